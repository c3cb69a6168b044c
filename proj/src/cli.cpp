#include "lorenzcode/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "lorenzcode/cipher.hpp"
#include "lorenzcode/config.hpp"
#include "lorenzcode/cup.hpp"
#include "lorenzcode/lorenz.hpp"
#include "lorenzcode/oneway.hpp"
#include "lorenzcode/randq.hpp"

namespace lzc::cli {

namespace {

unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

// ---- base-config flags shared by the subcommands ----------------------

struct BaseFlags {
  std::string config_path;
  std::string sigma, gamma, beta, x0, y0, z0, h, t, h_perturb_scale;
  long prec = 0;
  bool paper_h_perturb = false;

  void add_to(CLI::App& cmd, bool with_prec = true) {
    cmd.add_option("--config", config_path,
                   "Config file of name = decimal lines (default from "
                   "LORENZ_CODE_CONFIG)");
    cmd.add_option("--sigma", sigma, "Base sigma (decimal, nondimensional)");
    cmd.add_option("--gamma", gamma, "Base gamma (decimal, nondimensional)");
    cmd.add_option("--beta", beta,
                   "Base beta (decimal; default is the exact ratio 8/3)");
    cmd.add_option("--x0", x0, "Initial x (decimal)");
    cmd.add_option("--y0", y0, "Initial y (decimal)");
    cmd.add_option("--z0", z0, "Initial z (decimal)");
    cmd.add_option("--h", h, "Time step (decimal, nondimensional time)");
    cmd.add_option("--t", t, "End time (decimal, nondimensional time)");
    cmd.add_option("--h-perturb-scale", h_perturb_scale,
                   "Scale for the m7 step perturbation (decimal)");
    cmd.add_flag("--paper-h-perturb", paper_h_perturb,
                 "Use the paper-style m7/1000 step perturbation");
    if (with_prec)
      cmd.add_option("--prec", prec, "Precision in bits (significand width)");
  }

  oneway::BaseConfig resolve() const {
    oneway::BaseConfig base;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("LORENZ_CODE_CONFIG"))
        path = env;
    }
    if (!path.empty()) config::apply_file(base, path);

    auto set = [&](const char* name, const std::string& v) {
      if (!v.empty()) config::apply_setting(base, name, v);
    };
    set("sigma", sigma);
    set("gamma", gamma);
    set("beta", beta);
    set("x0", x0);
    set("y0", y0);
    set("z0", z0);
    set("h", h);
    set("t", t);
    if (paper_h_perturb && h_perturb_scale.empty())
      config::apply_setting(base, "h_perturb_scale", "0.001");
    set("h_perturb_scale", h_perturb_scale);
    if (prec != 0) base.precision_bits = prec;
    return base;
  }
};

struct KeyFlags {
  std::string key;
  std::string format = "auto";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--key", key, "Key: 16 hex chars or 8 ASCII chars")
        ->required();
    cmd.add_option("--key-format", format,
                   "Key interpretation: auto, hex, ascii")
        ->check(CLI::IsMember({"auto", "hex", "ascii"}));
  }

  oneway::KeyBlock parse() const {
    if (format == "hex") return oneway::key_from_hex(key);
    if (format == "ascii") return oneway::key_from_ascii(key);
    if (key.size() == 16) return oneway::key_from_hex(key);
    if (key.size() == 8) return oneway::key_from_ascii(key);
    throw ParseError(
        "key must be 16 hex chars or 8 ASCII chars (use --key-format to "
        "disambiguate); got " +
        std::to_string(key.size()) + " chars");
  }
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading: " + path);
  return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing: " + path);
}

std::ofstream open_text_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open output file: " + path);
  return f;
}

void report_battery_text(std::ostream& out,
                         const std::vector<randq::TestReport>& reports) {
  bool all = true;
  for (const auto& r : reports) {
    out << r.test_name << ": statistic=" << fmt(r.statistic)
        << " p=" << fmt(r.p_value) << " bits=" << r.sample_bits << " "
        << (r.pass ? "PASS" : "FAIL") << "\n";
    all = all && r.pass;
  }
  out << "battery: " << (all ? "PASS" : "FAIL") << "\n";
}

void report_battery_csv(std::ostream& out,
                        const std::vector<randq::TestReport>& reports) {
  out << "test,statistic,p_value,pass,sample_bits\n";
  for (const auto& r : reports)
    out << r.test_name << ',' << fmt(r.statistic) << ',' << fmt(r.p_value)
        << ',' << (r.pass ? 1 : 0) << ',' << r.sample_bits << "\n";
}

std::vector<std::uint8_t> make_keystream_bytes(const cipher::CipherKey& key,
                                               std::size_t bytes) {
  std::size_t blocks = (bytes + 31) / 32;
  auto ks = cipher::keystream(key, blocks);
  std::vector<std::uint8_t> out;
  out.reserve(blocks * 32);
  for (const auto& b : ks) out.insert(out.end(), b.begin(), b.end());
  out.resize(bytes);
  return out;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "lorenz-code: multiple-precision Lorenz integration, computational-"
      "uncertainty experiments, and the hash/stream cipher built on them"};
  app.require_subcommand(1);

  // --- integrate -------------------------------------------------------
  auto* c_int = app.add_subcommand(
      "integrate", "Integrate the Lorenz system with fixed-step RK4");
  auto int_base = std::make_shared<BaseFlags>();
  int_base->add_to(*c_int);
  auto int_csv = std::make_shared<std::string>();
  auto int_every = std::make_shared<std::uint64_t>(1);
  c_int->add_option("--csv", *int_csv, "Write the t,x,y,z trajectory CSV here");
  c_int->add_option("--every", *int_every,
                    "Emit every Nth step in the CSV (always the last)");
  c_int->callback([int_base, int_csv, int_every, &out] {
    oneway::BaseConfig base = int_base->resolve();
    lorenz::IntegrationSpec spec = base.system.spec_at(base.precision_bits);
    if (!int_csv->empty()) {
      auto f = open_text_out(*int_csv);
      lorenz::write_trajectory_csv(f, spec, *int_every);
    }
    lorenz::State s = lorenz::integrate(spec);
    out << "x = " << s.x.to_decimal() << "\n";
    out << "y = " << s.y.to_decimal() << "\n";
    out << "z = " << s.z.to_decimal() << "\n";
  });

  // --- mect ------------------------------------------------------------
  auto* c_mect = app.add_subcommand(
      "mect", "Measure the maximum effective computation time at precision p");
  auto mect_base = std::make_shared<BaseFlags>();
  mect_base->add_to(*c_mect);
  c_mect->get_option("--prec")->required();
  auto mect_delta = std::make_shared<double>(cup::default_delta);
  auto mect_tmax = std::make_shared<double>(cup::default_t_max);
  c_mect->add_option("--delta", *mect_delta,
                     "Divergence threshold on |x - x_ref|");
  c_mect->add_option("--tmax", *mect_tmax,
                     "Search horizon (nondimensional time)");
  c_mect->callback([mect_base, mect_delta, mect_tmax, &out] {
    oneway::BaseConfig base = mect_base->resolve();
    long p = base.precision_bits;
    auto params = base.system.params_at(p);
    auto initial = base.system.initial_at(p);
    auto h = base.system.h.materialize(p);
    auto est =
        cup::measure_mect(params, initial, p, h, *mect_delta, *mect_tmax);
    out << "p,h,delta,T\n";
    out << est.precision_bits << ',' << fmt(est.h_used) << ','
        << fmt(est.threshold) << ',' << fmt(est.mect) << "\n";
  });

  // --- fit-error-law ---------------------------------------------------
  auto* c_fit = app.add_subcommand(
      "fit-error-law",
      "Fit measured |x(t)-x_ref(t)| against A*h^m + B*h^(-1/2)");
  auto fit_base = std::make_shared<BaseFlags>();
  fit_base->add_to(*c_fit);
  auto fit_t = std::make_shared<std::string>("5");
  auto fit_h_list = std::make_shared<std::string>(
      "0.1,0.05,0.02,0.01,0.005,0.002,0.001,0.0005");
  auto fit_ref_prec = std::make_shared<long>(192);
  auto fit_ref_h = std::make_shared<std::string>("0.0001");
  auto fit_m = std::make_shared<int>(4);
  c_fit->add_option("--at-t", *fit_t,
                    "Fixed evaluation time (nondimensional time)");
  c_fit->add_option("--h-list", *fit_h_list,
                    "Comma-separated step sizes (decimals)");
  c_fit->add_option("--ref-prec", *fit_ref_prec,
                    "Reference orbit precision in bits");
  c_fit->add_option("--ref-h", *fit_ref_h, "Reference orbit step (decimal)");
  c_fit->add_option("--m", *fit_m, "Method order");
  c_fit->callback(
      [fit_base, fit_t, fit_h_list, fit_ref_prec, fit_ref_h, fit_m, &out] {
        oneway::BaseConfig base = fit_base->resolve();
        // The error-law experiment is about low working precisions; default
        // to the single-precision significand width.
        long p = fit_base->prec != 0 ? fit_base->prec : 24;
        std::vector<std::string> hs;
        std::stringstream ss(*fit_h_list);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) hs.push_back(item);
        auto samples = cup::measure_error_samples(base.system, p, *fit_t, hs,
                                                  *fit_ref_prec, *fit_ref_h);
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : samples) pts.emplace_back(s.h, s.error);
        auto fit = cup::fit_error_law(
            pts, *fit_m, mp::Real::from_decimal(*fit_t, 64).to_double());
        double hstar = cup::optimal_step(fit);
        out << "h,error,fitA,fitB,hstar\n";
        for (const auto& s : samples)
          out << fmt(s.h) << ',' << fmt(s.error) << ',' << fmt(fit.amp_trunc)
              << ',' << fmt(fit.amp_round) << ',' << fmt(hstar) << "\n";
      });

  // --- extrapolate -----------------------------------------------------
  auto* c_ext = app.add_subcommand(
      "extrapolate", "Extrapolate mect to a target precision from two anchors");
  auto ext_base = std::make_shared<BaseFlags>();
  ext_base->add_to(*c_ext, /*with_prec=*/false);
  auto ext_anchors = std::make_shared<std::string>();
  auto ext_measure = std::make_shared<bool>(false);
  auto ext_p1 = std::make_shared<long>(24);
  auto ext_p2 = std::make_shared<long>(53);
  auto ext_target = std::make_shared<long>();
  auto ext_delta = std::make_shared<double>(cup::default_delta);
  auto ext_tmax = std::make_shared<double>(cup::default_t_max);
  auto ext_m = std::make_shared<int>(4);
  c_ext->add_option("--anchors", *ext_anchors,
                    "Anchors as p1:T1,p2:T2 (skip measurement)");
  c_ext->add_flag("--measure", *ext_measure,
                  "Measure the anchors at --p1/--p2 first");
  c_ext->add_option("--p1", *ext_p1, "First anchor precision in bits");
  c_ext->add_option("--p2", *ext_p2, "Second anchor precision in bits");
  c_ext->add_option("--target", *ext_target, "Target precision in bits")
      ->required();
  c_ext->add_option("--delta", *ext_delta, "Divergence threshold");
  c_ext->add_option("--tmax", *ext_tmax, "Search horizon");
  c_ext->add_option("--m", *ext_m, "Method order");
  c_ext->callback([ext_base, ext_anchors, ext_measure, ext_p1, ext_p2,
                   ext_target, ext_delta, ext_tmax, ext_m, &out] {
    cup::MectEstimate a1, a2;
    if (*ext_measure == ext_anchors->empty()) // exactly one mode
      throw DomainError("extrapolate: give --anchors or --measure");
    if (*ext_measure) {
      oneway::BaseConfig base = ext_base->resolve();
      auto measure = [&](long p) {
        auto params = base.system.params_at(p);
        auto initial = base.system.initial_at(p);
        auto h = base.system.h.materialize(p);
        return cup::measure_mect(params, initial, p, h, *ext_delta, *ext_tmax);
      };
      a1 = measure(*ext_p1);
      a2 = measure(*ext_p2);
    } else {
      auto parse_anchor = [](const std::string& s) {
        auto colon = s.find(':');
        if (colon == std::string::npos)
          throw ParseError("anchor must be p:T, got \"" + s + "\"");
        cup::MectEstimate est;
        try {
          est.precision_bits = std::stol(s.substr(0, colon));
          est.mect = std::stod(s.substr(colon + 1));
        } catch (const std::exception&) {
          throw ParseError("anchor must be p:T, got \"" + s + "\"");
        }
        return est;
      };
      auto comma = ext_anchors->find(',');
      if (comma == std::string::npos)
        throw ParseError("--anchors needs p1:T1,p2:T2");
      a1 = parse_anchor(ext_anchors->substr(0, comma));
      a2 = parse_anchor(ext_anchors->substr(comma + 1));
    }
    auto [model, predicted] = cup::extrapolate_mect(a1, a2, *ext_target, *ext_m);
    out << "p1,T1,p2,T2,chat,m,target_p,predicted_T\n";
    out << model.anchors[0].first << ',' << fmt(model.anchors[0].second) << ','
        << model.anchors[1].first << ',' << fmt(model.anchors[1].second) << ','
        << fmt(model.chat) << ',' << model.method_order << ',' << *ext_target
        << ',' << fmt(predicted) << "\n";
  });

  // --- hash ------------------------------------------------------------
  auto* c_hash =
      app.add_subcommand("hash", "256-bit digest of an 8-byte message");
  auto hash_base = std::make_shared<BaseFlags>();
  auto hash_key = std::make_shared<KeyFlags>();
  hash_base->add_to(*c_hash);
  hash_key->add_to(*c_hash);
  c_hash->callback([hash_base, hash_key, &out] {
    auto digest = oneway::hash8(hash_base->resolve(), hash_key->parse());
    out << oneway::to_hex(digest) << "\n";
  });

  // --- keystream -------------------------------------------------------
  auto* c_ks = app.add_subcommand(
      "keystream", "Emit keystream blocks as hex (one 32-byte block per line)");
  auto ks_base = std::make_shared<BaseFlags>();
  auto ks_key = std::make_shared<KeyFlags>();
  auto ks_blocks = std::make_shared<std::size_t>();
  ks_base->add_to(*c_ks);
  ks_key->add_to(*c_ks);
  c_ks->add_option("--blocks", *ks_blocks, "Number of 32-byte blocks")
      ->required();
  c_ks->callback([ks_base, ks_key, ks_blocks, &out] {
    cipher::CipherKey key{ks_key->parse(), ks_base->resolve()};
    for (const auto& block : cipher::keystream(key, *ks_blocks))
      out << oneway::to_hex(block) << "\n";
  });

  // --- encrypt / decrypt -------------------------------------------------
  auto* c_enc = app.add_subcommand("encrypt", "Encrypt a file (LZC1 container)");
  auto enc_base = std::make_shared<BaseFlags>();
  auto enc_key = std::make_shared<KeyFlags>();
  auto enc_in = std::make_shared<std::string>();
  auto enc_out = std::make_shared<std::string>();
  enc_base->add_to(*c_enc);
  enc_key->add_to(*c_enc);
  c_enc->add_option("--in", *enc_in, "Plaintext file")->required();
  c_enc->add_option("--out", *enc_out, "Container file")->required();
  c_enc->callback([enc_base, enc_key, enc_in, enc_out] {
    cipher::CipherKey key{enc_key->parse(), enc_base->resolve()};
    auto plain = read_file(*enc_in);
    auto container = cipher::encrypt(key, plain);
    write_file(*enc_out, cipher::serialize(container));
  });

  auto* c_dec =
      app.add_subcommand("decrypt", "Decrypt an LZC1 container file");
  auto dec_base = std::make_shared<BaseFlags>();
  auto dec_key = std::make_shared<KeyFlags>();
  auto dec_in = std::make_shared<std::string>();
  auto dec_out = std::make_shared<std::string>();
  dec_base->add_to(*c_dec);
  dec_key->add_to(*c_dec);
  c_dec->add_option("--in", *dec_in, "Container file")->required();
  c_dec->add_option("--out", *dec_out, "Plaintext file")->required();
  c_dec->callback([dec_base, dec_key, dec_in, dec_out] {
    cipher::CipherKey key{dec_key->parse(), dec_base->resolve()};
    auto data = read_file(*dec_in);
    auto container = cipher::parse_container(data);
    auto plain = cipher::decrypt(key, container);
    write_file(*dec_out, plain);
  });

  // --- randtest ----------------------------------------------------------
  auto* c_rt = app.add_subcommand(
      "randtest", "Monobit, runs, byte chi-square and serial-correlation tests");
  auto rt_base = std::make_shared<BaseFlags>();
  auto rt_in = std::make_shared<std::string>();
  auto rt_key = std::make_shared<std::string>();
  auto rt_key_format = std::make_shared<std::string>("auto");
  auto rt_bytes = std::make_shared<std::size_t>(262144);
  auto rt_alpha = std::make_shared<double>(randq::default_alpha);
  auto rt_csv = std::make_shared<std::string>();
  rt_base->add_to(*c_rt);
  c_rt->add_option("--in", *rt_in, "Read sample bytes from this file");
  c_rt->add_option("--keystream-key", *rt_key,
                   "Generate the sample as keystream under this key");
  c_rt->add_option("--key-format", *rt_key_format,
                   "Key interpretation: auto, hex, ascii")
      ->check(CLI::IsMember({"auto", "hex", "ascii"}));
  c_rt->add_option("--bytes", *rt_bytes,
                   "Keystream sample size in bytes (default 256 KiB)");
  c_rt->add_option("--alpha", *rt_alpha, "Significance level");
  c_rt->add_option("--csv", *rt_csv, "Also write the report as CSV here");
  c_rt->callback(
      [rt_base, rt_in, rt_key, rt_key_format, rt_bytes, rt_alpha, rt_csv, &out] {
        if (rt_in->empty() == rt_key->empty())
          throw DomainError("randtest: give exactly one of --in or "
                            "--keystream-key");
        std::vector<std::uint8_t> sample;
        if (!rt_in->empty()) {
          sample = read_file(*rt_in);
        } else {
          KeyFlags kf;
          kf.key = *rt_key;
          kf.format = *rt_key_format;
          cipher::CipherKey key{kf.parse(), rt_base->resolve()};
          sample = make_keystream_bytes(key, *rt_bytes);
        }
        auto reports = randq::run_battery(sample, *rt_alpha);
        report_battery_text(out, reports);
        if (!rt_csv->empty()) {
          auto f = open_text_out(*rt_csv);
          report_battery_csv(f, reports);
        }
      });

  // --- collide -----------------------------------------------------------
  auto* c_col = app.add_subcommand(
      "collide", "Hash n distinct random keys and count digest collisions");
  auto col_base = std::make_shared<BaseFlags>();
  auto col_n = std::make_shared<std::size_t>();
  auto col_seed = std::make_shared<std::uint64_t>(1);
  auto col_threads = std::make_shared<unsigned>(default_threads());
  col_base->add_to(*c_col);
  c_col->add_option("--n", *col_n, "Number of distinct keys")->required();
  c_col->add_option("--seed", *col_seed, "Scan RNG seed (splitmix64)");
  c_col->add_option("--threads", *col_threads, "Worker threads");
  c_col->callback([col_base, col_n, col_seed, col_threads, &out] {
    auto report =
        randq::collision_scan(col_base->resolve(), *col_n, *col_seed,
                              *col_threads);
    out << "distinct_inputs=" << report.distinct_inputs
        << " collisions=" << report.collisions << "\n";
    for (const auto& [a, b] : report.colliding_pairs)
      out << "collision: " << oneway::key_to_hex(a) << " "
          << oneway::key_to_hex(b) << "\n";
  });

  // --- avalanche -----------------------------------------------------------
  auto* c_av = app.add_subcommand(
      "avalanche", "Digest Hamming distance under single-bit key flips");
  auto av_base = std::make_shared<BaseFlags>();
  auto av_trials = std::make_shared<std::size_t>();
  auto av_seed = std::make_shared<std::uint64_t>(1);
  auto av_threads = std::make_shared<unsigned>(default_threads());
  auto av_csv = std::make_shared<std::string>();
  av_base->add_to(*c_av);
  c_av->add_option("--trials", *av_trials, "Number of single-bit flip trials")
      ->required();
  c_av->add_option("--seed", *av_seed, "Scan RNG seed (splitmix64)");
  c_av->add_option("--threads", *av_threads, "Worker threads");
  c_av->add_option("--csv", *av_csv, "Write per-bit flip frequencies here");
  c_av->callback([av_base, av_trials, av_seed, av_threads, av_csv, &out] {
    auto report = randq::avalanche_scan(av_base->resolve(), *av_trials,
                                        *av_seed, *av_threads);
    double lo = 1.0, hi = 0.0;
    for (double f : report.bit_flip_frequency) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    out << "trials=" << report.trials
        << " mean_distance=" << fmt(report.mean_distance)
        << " min_bit_freq=" << fmt(lo) << " max_bit_freq=" << fmt(hi) << "\n";
    if (!av_csv->empty()) {
      auto f = open_text_out(*av_csv);
      f << "bit,flip_frequency\n";
      for (std::size_t i = 0; i < report.bit_flip_frequency.size(); ++i)
        f << i << ',' << fmt(report.bit_flip_frequency[i]) << "\n";
    }
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    err << "error: format: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const DivergedError& e) {
    err << "error: diverged: " << e.what() << "\n";
    return 1;
  } catch (const NonFiniteError& e) {
    err << "error: nonfinite: " << e.what() << "\n";
    return 1;
  } catch (const MectHorizonError& e) {
    err << "error: horizon: " << e.what() << "\n";
    return 1;
  } catch (const FitError& e) {
    err << "error: fit: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: domain: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

} // namespace lzc::cli
