#ifndef LORENZCODE_CONFIG_HPP
#define LORENZCODE_CONFIG_HPP

#include <iosfwd>
#include <string>

#include "lorenzcode/oneway.hpp"

namespace lzc::config {

// Config files are "name = value" lines; '#' starts a comment, blank lines
// are ignored. Recognized names: sigma, gamma, beta, x0, y0, z0, h, t
// (decimal), p (integer bits), h_perturb_scale (decimal). Unknown names and
// malformed lines raise FormatError; invalid values raise ConfigError.
void apply_setting(oneway::BaseConfig& base, const std::string& name,
                   const std::string& value);
void apply_stream(oneway::BaseConfig& base, std::istream& in,
                  const std::string& origin);
void apply_file(oneway::BaseConfig& base, const std::string& path);

} // namespace lzc::config

#endif
