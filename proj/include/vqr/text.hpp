#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "vqr/error.hpp"

namespace vqr {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  detail::require(res.ec == std::errc() && res.ptr == text.data() + text.size() &&
                      std::isfinite(v),
                  ErrorCode::kInvalidArgument,
                  "not a finite number: '" + std::string(text) + "'");
  return v;
}

}  // namespace vqr
