#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vqr/error.hpp"
#include "vqr/image.hpp"

// Synthetic grayscale scenes for codebook design and benchmarking. Every
// family is edge-dense with axis-aligned geometry drawn at random from a
// seed, in the spirit of scanned documents. Intensities are two-level except
// for the ramp slopes.

namespace vqr::synth {

enum class Family { kStepEdges, kBars, kCheckerboard, kRamp };

inline constexpr double kDark = 40.0;
inline constexpr double kLight = 210.0;

inline Family parse_family(const std::string& name) {
  if (name == "steps") return Family::kStepEdges;
  if (name == "bars") return Family::kBars;
  if (name == "checker") return Family::kCheckerboard;
  if (name == "ramp") return Family::kRamp;
  throw Error(ErrorCode::kInvalidArgument, "unknown synthetic family '" + name + "'");
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kStepEdges: return "steps";
    case Family::kBars: return "bars";
    case Family::kCheckerboard: return "checker";
    case Family::kRamp: return "ramp";
  }
  return "unknown";
}

namespace detail {

/// Cut points 0 = b0 < b1 < ... covering [0, size), gaps uniform in [lo, hi].
inline std::vector<std::size_t> random_cuts(std::size_t size, std::size_t lo,
                                            std::size_t hi, std::mt19937_64& rng) {
  std::vector<std::size_t> cuts{0};
  while (cuts.back() < size) cuts.push_back(cuts.back() + lo + rng() % (hi - lo + 1));
  return cuts;
}

/// Index of the interval of `cuts` containing x.
inline std::size_t interval_of(const std::vector<std::size_t>& cuts, std::size_t x) {
  return static_cast<std::size_t>(
      std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin() - 1);
}

}  // namespace detail

/// Random axis-aligned rectangles; a pixel is light when an odd number of
/// rectangles cover it.
inline GrayImage step_edges(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  struct Rect { std::size_t r0, r1, c0, c1; };
  std::vector<Rect> rs;
  const std::size_t count = 6 + size / 10;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t h = 6 + rng() % (size / 2);
    const std::size_t w = 6 + rng() % (size / 2);
    const std::size_t r0 = rng() % size;
    const std::size_t c0 = rng() % size;
    rs.push_back({r0, r0 + h, c0, c0 + w});
  }
  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      std::size_t parity = 0;
      for (const auto& q : rs) parity += r >= q.r0 && r < q.r1 && c >= q.c0 && c < q.c1;
      img(r, c) = parity % 2 ? kLight : kDark;
    }
  }
  return img;
}

/// Alternating dark/light bars of random width (3 to 10 pixels): vertical in
/// one half of the image, horizontal in the other.
inline GrayImage bars(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto vcuts = detail::random_cuts(size, 3, 10, rng);
  const auto hcuts = detail::random_cuts(size, 3, 10, rng);
  const bool vertical_on_top = rng() % 2 == 0;
  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const bool vertical = (r < size / 2) == vertical_on_top;
    for (std::size_t c = 0; c < size; ++c) {
      const auto k = vertical ? detail::interval_of(vcuts, c) : detail::interval_of(hcuts, r);
      img(r, c) = k % 2 ? kLight : kDark;
    }
  }
  return img;
}

/// Checkerboard on an irregular grid (cell sides 4 to 14 pixels).
inline GrayImage checkerboard(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto rcuts = detail::random_cuts(size, 4, 14, rng);
  const auto ccuts = detail::random_cuts(size, 4, 14, rng);
  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const auto kr = detail::interval_of(rcuts, r);
    for (std::size_t c = 0; c < size; ++c) {
      img(r, c) = (kr + detail::interval_of(ccuts, c)) % 2 ? kLight : kDark;
    }
  }
  return img;
}

/// Sawtooth ramps rising from dark to light over random periods (10 to 28
/// pixels), each ending in a sharp drop; varying along columns in one half
/// of the image and along rows in the other.
inline GrayImage ramp(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto vcuts = detail::random_cuts(size, 10, 28, rng);
  const auto hcuts = detail::random_cuts(size, 10, 28, rng);
  const bool vertical_on_top = rng() % 2 == 0;
  auto level = [](const std::vector<std::size_t>& cuts, std::size_t x) {
    const auto k = detail::interval_of(cuts, x);
    const double t = static_cast<double>(x - cuts[k]) /
                     static_cast<double>(cuts[k + 1] - cuts[k] - 1);
    return kDark + (kLight - kDark) * t;
  };
  GrayImage img(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const bool vertical = (r < size / 2) == vertical_on_top;
    for (std::size_t c = 0; c < size; ++c) {
      img(r, c) = vertical ? level(vcuts, c) : level(hcuts, r);
    }
  }
  return img;
}

/// One scene of `family`; different variants give independent geometry, so
/// variant 0 can serve for training and other variants as held-out scenes.
inline GrayImage make(Family family, std::size_t size, int variant) {
  const std::uint64_t seed =
      0x5EED0000ull + 16ull * static_cast<std::uint64_t>(variant) +
      static_cast<std::uint64_t>(family);
  switch (family) {
    case Family::kStepEdges: return step_edges(size, seed);
    case Family::kBars: return bars(size, seed);
    case Family::kCheckerboard: return checkerboard(size, seed);
    case Family::kRamp: return ramp(size, seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown synthetic family");
}

inline std::vector<GrayImage> prototype_set(std::size_t size, int variant = 0) {
  return {make(Family::kStepEdges, size, variant), make(Family::kBars, size, variant),
          make(Family::kCheckerboard, size, variant), make(Family::kRamp, size, variant)};
}

/// Held-out scene: a 2 x 2 grid of half-size scenes, one per family, each
/// generated from `variant`. Family proportions match a prototype_set.
inline GrayImage mosaic(std::size_t size, int variant) {
  vqr::detail::require(size >= 2 && size % 2 == 0, ErrorCode::kInvalidArgument,
                       "mosaic size must be even");
  const std::size_t half = size / 2;
  GrayImage out(size, size);
  for (int f = 0; f < 4; ++f) {
    const auto tile = make(static_cast<Family>(f), half, variant);
    const std::size_t r0 = static_cast<std::size_t>(f / 2) * half;
    const std::size_t c0 = static_cast<std::size_t>(f % 2) * half;
    for (std::size_t r = 0; r < half; ++r) {
      for (std::size_t c = 0; c < half; ++c) out(r0 + r, c0 + c) = tile(r, c);
    }
  }
  return out;
}

}  // namespace vqr::synth
