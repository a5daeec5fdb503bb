#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dreamnet {

/// Flat `key = value` file; '#' starts a comment. Throws std::runtime_error on a malformed line.
std::map<std::string, std::string> parse_config(std::istream& in);

/// Rewrites argv so config entries become `--key=value` tokens placed right after the
/// subcommand and before the user's own flags. With last-value-wins options this gives
/// CLI > config > defaults.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args);

/// "a,b,c" or "start:stop:step" (inclusive stop, within half a step).
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace dreamnet
