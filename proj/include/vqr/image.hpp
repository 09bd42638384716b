#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqr/error.hpp"

namespace vqr {

/// Row-major grid of real intensities. Nominal range is [0, 255] but values
/// outside it are allowed; quantization happens only when writing PGM.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), data_(width * height, fill) {
    detail::require(width > 0 && height > 0, ErrorCode::kInvalidArgument,
                    "image dimensions must be positive");
  }

  GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    detail::require(width > 0 && height > 0, ErrorCode::kInvalidArgument,
                    "image dimensions must be positive");
    detail::require(data_.size() == width * height,
                    ErrorCode::kDimensionMismatch,
                    "pixel count does not match width x height");
    for (double v : data_) {
      detail::require(std::isfinite(v), ErrorCode::kInvalidArgument,
                      "image intensities must be finite");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return data_[row * width_ + col];
  }

  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> pixels() noexcept { return data_; }

  bool same_shape(const GrayImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

/// Square neighbourhood of odd side centred on one pixel, row-major.
struct Block {
  std::size_t center_row = 0;
  std::size_t center_col = 0;
  std::size_t side = 0;
  std::vector<double> values;
};

namespace detail {

/// Reflect-without-repeat index into [0, n): -1 -> 1, n -> n - 2. Offsets
/// larger than the image keep reflecting with period 2(n - 1).
inline std::size_t mirror_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= n) i = period - i;
  return static_cast<std::size_t>(i);
}

inline double mirrored(const GrayImage& img, long long row, long long col) {
  return img(mirror_index(row, static_cast<long long>(img.height())),
             mirror_index(col, static_cast<long long>(img.width())));
}

inline void require_odd(std::size_t side) {
  require(side % 2 == 1, ErrorCode::kInvalidArgument,
          "block side must be odd, got " + std::to_string(side));
}

/// Writes the side x side mirror-padded neighbourhood of (row, col) into out.
inline void gather_block(const GrayImage& img, std::size_t row,
                         std::size_t col, std::size_t side,
                         std::span<double> out) {
  const long long half = static_cast<long long>(side / 2);
  const long long r0 = static_cast<long long>(row);
  const long long c0 = static_cast<long long>(col);
  std::size_t k = 0;
  for (long long dr = -half; dr <= half; ++dr) {
    for (long long dc = -half; dc <= half; ++dc) {
      out[k++] = mirrored(img, r0 + dr, c0 + dc);
    }
  }
}

}  // namespace detail

inline Block extract_block(const GrayImage& image, std::size_t row,
                           std::size_t col, std::size_t side) {
  detail::require_odd(side);
  detail::require(row < image.height() && col < image.width(),
                  ErrorCode::kInvalidArgument, "block center outside image");
  Block b{row, col, side, std::vector<double>(side * side)};
  detail::gather_block(image, row, col, side, b.values);
  return b;
}

/// Population variance of the side x side mirror-padded window around every
/// pixel.
inline GrayImage local_variance_map(const GrayImage& image, std::size_t side) {
  detail::require_odd(side);
  GrayImage out(image.width(), image.height());
  std::vector<double> window(side * side);
  const double n = static_cast<double>(window.size());
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      detail::gather_block(image, r, c, side, window);
      double mean = 0.0;
      for (double v : window) mean += v;
      mean /= n;
      double ss = 0.0;
      for (double v : window) ss += (v - mean) * (v - mean);
      out(r, c) = ss / n;
    }
  }
  return out;
}

inline double population_variance(std::span<const double> values) {
  detail::require(!values.empty(), ErrorCode::kInsufficientData,
                  "variance of an empty sequence");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size());
}

// PGM (binary P5, 8-bit) ------------------------------------------------------

namespace detail {

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes)
      : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (is_space(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long long read_uint(const char* what) {
    skip_space_and_comments();
    unsigned long long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      require(value <= 0xFFFFFFFFull, ErrorCode::kMalformedHeader,
              std::string("PGM ") + what + " out of range");
      ++pos_;
      ++digits;
    }
    require(digits > 0, ErrorCode::kMalformedHeader,
            std::string("PGM header: expected ") + what);
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance() noexcept { ++pos_; }
  bool at_space() const noexcept {
    return pos_ < bytes_.size() && is_space(bytes_[pos_]);
  }

 private:
  static bool is_space(std::uint8_t ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' ||
           ch == '\f';
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
  detail::require(bytes.size() >= 2, ErrorCode::kMalformedHeader,
                  "PGM header: file too short");
  detail::require(bytes[0] == 'P' && bytes[1] == '5',
                  ErrorCode::kUnsupportedMagic,
                  "unsupported magic (only binary P5 PGM is supported)");
  detail::PgmHeaderReader rd(bytes.subspan(2));
  detail::require(rd.at_space(), ErrorCode::kMalformedHeader,
                  "PGM header: missing whitespace after magic");
  const auto width = rd.read_uint("width");
  const auto height = rd.read_uint("height");
  const auto maxval = rd.read_uint("maxval");
  detail::require(width > 0 && height > 0, ErrorCode::kMalformedHeader,
                  "PGM header: zero dimension");
  detail::require(maxval > 0, ErrorCode::kMalformedHeader,
                  "PGM header: zero maxval");
  detail::require(maxval <= 255, ErrorCode::kMaxvalTooLarge,
                  "PGM maxval " + std::to_string(maxval) +
                      " > 255 is not supported");
  detail::require(rd.at_space(), ErrorCode::kMalformedHeader,
                  "PGM header: missing whitespace after maxval");
  rd.advance();
  const std::size_t offset = 2 + rd.pos();
  const std::size_t count = static_cast<std::size_t>(width * height);
  detail::require(bytes.size() - offset >= count, ErrorCode::kTruncated,
                  "PGM pixel data truncated: expected " +
                      std::to_string(count) + " bytes, found " +
                      std::to_string(bytes.size() - offset));
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = bytes[offset + i];
  return GrayImage(static_cast<std::size_t>(width),
                   static_cast<std::size_t>(height), std::move(data));
}

/// Quantizes one intensity for 8-bit output: round half-up, clamp to [0, 255].
inline std::uint8_t quantize_u8(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline std::vector<std::uint8_t> write_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (double v : image.pixels()) out.push_back(quantize_u8(v));
  return out;
}

}  // namespace vqr
