#pragma once

#include <stdexcept>
#include <string>

namespace vqr {

/// Failure categories. Each malformed-input condition gets its own code so
/// callers (and the CLI) can tell them apart without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kUnsupportedMagic,
  kMalformedHeader,
  kMaxvalTooLarge,
  kTruncated,
  kBadVersion,
  kDegenerateImage,
  kInsufficientData,
  kSingularSystem,
  kInfiniteIsnr,
  kAllCorrupt,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace detail
}  // namespace vqr
