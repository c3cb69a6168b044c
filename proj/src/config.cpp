#include "lorenzcode/config.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace lzc::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Validate decimal syntax up front so errors carry the config name.
lorenz::ParamSource decimal_source(const std::string& name,
                                   const std::string& value) {
  try {
    mp::Real::from_decimal(value, 64);
  } catch (const ParseError&) {
    throw ConfigError("config: " + name + " is not a decimal literal: \"" +
                      value + "\"");
  }
  return lorenz::ParamSource(value);
}

} // namespace

void apply_setting(oneway::BaseConfig& base, const std::string& name,
                   const std::string& value) {
  if (name == "sigma")
    base.system.sigma = decimal_source(name, value);
  else if (name == "gamma")
    base.system.gamma = decimal_source(name, value);
  else if (name == "beta")
    base.system.beta = decimal_source(name, value);
  else if (name == "x0")
    base.system.x0 = decimal_source(name, value);
  else if (name == "y0")
    base.system.y0 = decimal_source(name, value);
  else if (name == "z0")
    base.system.z0 = decimal_source(name, value);
  else if (name == "h")
    base.system.h = decimal_source(name, value);
  else if (name == "t")
    base.system.t = decimal_source(name, value);
  else if (name == "h_perturb_scale")
    base.h_perturb_scale = decimal_source(name, value);
  else if (name == "p") {
    try {
      std::size_t pos = 0;
      long p = std::stol(value, &pos);
      if (pos != value.size() || p < mp::min_precision)
        throw std::invalid_argument("range");
      base.precision_bits = p;
    } catch (const std::exception&) {
      throw ConfigError("config: p must be an integer >= " +
                        std::to_string(mp::min_precision) + ", got \"" +
                        value + "\"");
    }
  } else {
    throw FormatError("config: unknown setting \"" + name + "\"");
  }
}

void apply_stream(oneway::BaseConfig& base, std::istream& in,
                  const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = line;
    if (auto hash = stripped.find('#'); hash != std::string::npos)
      stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": expected \"name = value\"");
    std::string name = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (name.empty() || value.empty())
      throw FormatError(origin + ":" + std::to_string(line_no) +
                        ": expected \"name = value\"");
    apply_setting(base, name, value);
  }
}

void apply_file(oneway::BaseConfig& base, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  apply_stream(base, in, path);
}

} // namespace lzc::config
