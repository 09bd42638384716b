#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "vqr/error.hpp"
#include "vqr/image.hpp"

namespace vqr {

/// Per-pixel corruption flags, true = corrupted.
struct CorruptionMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<bool> corrupt;

  CorruptionMask() = default;
  CorruptionMask(std::size_t w, std::size_t h)
      : width(w), height(h), corrupt(w * h, false) {}

  bool operator()(std::size_t row, std::size_t col) const {
    return corrupt[row * width + col];
  }
  void set(std::size_t row, std::size_t col, bool v) { corrupt[row * width + col] = v; }

  std::size_t count_corrupt() const {
    return static_cast<std::size_t>(std::count(corrupt.begin(), corrupt.end(), true));
  }
};

/// Mask image convention: 0 = good, anything else = corrupt.
inline CorruptionMask mask_from_image(const GrayImage& img) {
  CorruptionMask m(img.width(), img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) m.corrupt[i] = px[i] != 0.0;
  return m;
}

inline GrayImage mask_to_image(const CorruptionMask& m) {
  GrayImage img(m.width, m.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = m.corrupt[i] ? 255.0 : 0.0;
  return img;
}

/// Marks round(fraction * pixels) distinct pixels corrupt (seeded shuffle) and
/// returns the image with those pixels set to `value`.
inline std::pair<GrayImage, CorruptionMask> salt_corrupt(const GrayImage& image,
                                                         double fraction,
                                                         std::uint64_t seed,
                                                         double value = 255.0) {
  detail::require(fraction >= 0.0 && fraction <= 1.0, ErrorCode::kInvalidArgument,
                  "salt fraction must lie in [0, 1]");
  std::vector<std::size_t> order(image.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit index draw so the permutation does not
  // depend on the standard library's shuffle implementation.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(image.size())));
  CorruptionMask mask(image.width(), image.height());
  GrayImage out = image;
  auto px = out.pixels();
  for (std::size_t k = 0; k < count; ++k) {
    mask.corrupt[order[k]] = true;
    px[order[k]] = value;
  }
  return {out, mask};
}

/// Chessboard distance from each pixel to its nearest good pixel.
struct DistanceImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> dist;

  std::uint32_t operator()(std::size_t row, std::size_t col) const {
    return dist[row * width + col];
  }
};

/// Exact chessboard distance transform: two raster passes of a 3x3 chamfer
/// with unit weights on all eight neighbours.
inline DistanceImage distance_transform(const CorruptionMask& mask) {
  detail::require(mask.corrupt.size() == mask.width * mask.height &&
                      !mask.corrupt.empty(),
                  ErrorCode::kDimensionMismatch, "malformed corruption mask");
  detail::require(mask.count_corrupt() < mask.corrupt.size(),
                  ErrorCode::kAllCorrupt, "every pixel is corrupted");
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max() / 2;
  const std::size_t w = mask.width;
  const std::size_t h = mask.height;
  DistanceImage d{w, h, std::vector<std::uint32_t>(w * h)};
  for (std::size_t i = 0; i < d.dist.size(); ++i) d.dist[i] = mask.corrupt[i] ? kInf : 0;

  auto relax = [&](std::size_t r, std::size_t c, long long dr, long long dc) {
    const long long rr = static_cast<long long>(r) + dr;
    const long long cc = static_cast<long long>(c) + dc;
    if (rr < 0 || cc < 0 || rr >= static_cast<long long>(h) ||
        cc >= static_cast<long long>(w)) {
      return;
    }
    auto& here = d.dist[r * w + c];
    here = std::min(here, d.dist[static_cast<std::size_t>(rr) * w +
                                 static_cast<std::size_t>(cc)] + 1);
  };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      relax(r, c, -1, -1);
      relax(r, c, -1, 0);
      relax(r, c, -1, 1);
      relax(r, c, 0, -1);
    }
  }
  for (std::size_t r = h; r-- > 0;) {
    for (std::size_t c = w; c-- > 0;) {
      relax(r, c, 1, 1);
      relax(r, c, 1, 0);
      relax(r, c, 1, -1);
      relax(r, c, 0, 1);
    }
  }
  return d;
}

/// Good-pixel values on the chessboard rings d, d+1, ... around (row, col),
/// where d is the pixel's distance; stops after the first ring that brings
/// the total to at least n. Each ring is scanned in row-major order.
inline std::vector<double> neighbor_values(const GrayImage& image,
                                           const CorruptionMask& mask,
                                           const DistanceImage& dist,
                                           std::size_t row, std::size_t col,
                                           std::size_t n) {
  detail::require(n >= 1, ErrorCode::kInvalidArgument, "n must be at least 1");
  const std::uint32_t d0 = dist(row, col);
  detail::require(d0 > 0, ErrorCode::kInvalidArgument,
                  "neighbor_values called on a good pixel");
  const auto h = static_cast<long long>(image.height());
  const auto w = static_cast<long long>(image.width());
  const auto r0 = static_cast<long long>(row);
  const auto c0 = static_cast<long long>(col);
  const long long max_ring = std::max(h, w);
  std::vector<double> values;
  auto take = [&](long long r, long long c) {
    if (r < 0 || c < 0 || r >= h || c >= w) return;
    const auto ur = static_cast<std::size_t>(r);
    const auto uc = static_cast<std::size_t>(c);
    if (!mask(ur, uc)) values.push_back(image(ur, uc));
  };
  for (long long k = d0; k <= max_ring && values.size() < n; ++k) {
    for (long long r = r0 - k; r <= r0 + k; ++r) {
      if (r == r0 - k || r == r0 + k) {
        for (long long c = c0 - k; c <= c0 + k; ++c) take(r, c);
      } else {
        take(r, c0 - k);
        take(r, c0 + k);
      }
    }
  }
  return values;
}

/// Median that is always an element of the input: the lower middle for even
/// counts.
inline double lazy_median(std::vector<double> values) {
  detail::require(!values.empty(), ErrorCode::kInsufficientData,
                  "median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

/// Replaces each corrupted pixel by the lazy median of its n nearest good
/// neighbours. Neighbour values always come from the input image, never from
/// pixels filled earlier in the same pass.
inline GrayImage nnn_restore(const GrayImage& image, const CorruptionMask& mask,
                             std::size_t n) {
  detail::require(mask.width == image.width() && mask.height == image.height(),
                  ErrorCode::kDimensionMismatch,
                  "mask and image dimensions differ");
  detail::require(n >= 1, ErrorCode::kInvalidArgument, "n must be at least 1");
  const auto dist = distance_transform(mask);
  GrayImage out = image;
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      if (dist(r, c) == 0) continue;
      out(r, c) = lazy_median(neighbor_values(image, mask, dist, r, c, n));
    }
  }
  return out;
}

}  // namespace vqr
