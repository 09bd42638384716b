#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqr/error.hpp"
#include "vqr/text.hpp"

namespace vqr {

/// Quotes one argument for a POSIX shell when it contains anything beyond a
/// conservative set of safe characters.
inline std::string shell_quote(std::string_view arg) {
  const bool safe = !arg.empty() &&
                    arg.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                          "0123456789-_./=,:+@%") == std::string_view::npos;
  if (safe) return std::string(arg);
  std::string out = "'";
  for (char ch : arg) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Record of one CLI run: the full invocation, every effective parameter and
/// seed, and the resulting metrics. Serialized as CSV with columns
/// field,name,value after a comment line holding the invocation.
struct RunReport {
  std::string command;
  std::string invocation;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::pair<std::string, double>> metrics;
  std::uint64_t seed = 0;

  void input(std::string name, std::string path) {
    inputs.emplace_back(std::move(name), std::move(path));
  }
  void param(std::string name, std::string value) {
    parameters.emplace_back(std::move(name), std::move(value));
  }
  void param(std::string name, double value) { param(std::move(name), format_real(value)); }
  void metric(std::string name, double value) {
    detail::require(std::isfinite(value), ErrorCode::kInvalidArgument,
                    "report metric '" + name + "' is not finite");
    metrics.emplace_back(std::move(name), value);
  }

  std::string to_csv() const {
    std::string out = "# " + invocation + "\n";
    out += "field,name,value\n";
    out += "command,command," + csv_field(command) + "\n";
    for (const auto& [k, v] : inputs) out += "input," + csv_field(k) + "," + csv_field(v) + "\n";
    for (const auto& [k, v] : parameters) out += "param," + csv_field(k) + "," + csv_field(v) + "\n";
    out += "seed,seed," + std::to_string(seed) + "\n";
    for (const auto& [k, v] : metrics) out += "metric," + csv_field(k) + "," + format_real(v) + "\n";
    return out;
  }
};

inline std::string join_invocation(int argc, const char* const* argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += shell_quote(argv[i]);
  }
  return out;
}

}  // namespace vqr
