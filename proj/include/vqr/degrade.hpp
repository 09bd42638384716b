#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vqr/error.hpp"
#include "vqr/image.hpp"

namespace vqr {

enum class BlurFamily : std::uint8_t { kGaussian = 0, kPillbox = 1, kDelta = 2 };

inline std::string_view to_string(BlurFamily f) {
  switch (f) {
    case BlurFamily::kGaussian: return "gaussian";
    case BlurFamily::kPillbox: return "pillbox";
    case BlurFamily::kDelta: return "delta";
  }
  return "unknown";
}

inline BlurFamily parse_blur_family(std::string_view name) {
  if (name == "gaussian") return BlurFamily::kGaussian;
  if (name == "pillbox") return BlurFamily::kPillbox;
  if (name == "delta") return BlurFamily::kDelta;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown blur family '" + std::string(name) + "'");
}

/// Discrete unit-sum point-spread function on a (2h+1) x (2h+1) grid.
/// `param` is the variance for gaussian, the radius for pillbox.
struct BlurKernel {
  BlurFamily family = BlurFamily::kDelta;
  double param = 0.0;
  std::size_t half_width = 0;
  std::vector<double> taps{1.0};

  std::size_t side() const noexcept { return 2 * half_width + 1; }

  /// Tap at integer offset (dy, dx) from the centre.
  double at(long long dy, long long dx) const {
    const auto h = static_cast<long long>(half_width);
    return taps[static_cast<std::size_t>((dy + h) * (2 * h + 1) + (dx + h))];
  }

  friend bool operator==(const BlurKernel&, const BlurKernel&) = default;
};

namespace detail {

inline void normalize(std::vector<double>& taps) {
  double sum = 0.0;
  for (double t : taps) sum += t;
  for (double& t : taps) t /= sum;
}

}  // namespace detail

inline BlurKernel delta_kernel() { return BlurKernel{}; }

inline BlurKernel gaussian_kernel(double sigma2) {
  detail::require(sigma2 > 0.0 && std::isfinite(sigma2),
                  ErrorCode::kInvalidArgument,
                  "gaussian variance must be positive");
  BlurKernel k;
  k.family = BlurFamily::kGaussian;
  k.param = sigma2;
  k.half_width = static_cast<std::size_t>(std::ceil(3.0 * std::sqrt(sigma2)));
  const auto h = static_cast<long long>(k.half_width);
  k.taps.assign(k.side() * k.side(), 0.0);
  std::size_t i = 0;
  for (long long y = -h; y <= h; ++y) {
    for (long long x = -h; x <= h; ++x) {
      k.taps[i++] = std::exp(-static_cast<double>(x * x + y * y) / (2.0 * sigma2));
    }
  }
  detail::normalize(k.taps);
  return k;
}

inline BlurKernel pillbox_kernel(double radius) {
  detail::require(radius > 0.0 && std::isfinite(radius),
                  ErrorCode::kInvalidArgument,
                  "pillbox radius must be positive");
  BlurKernel k;
  k.family = BlurFamily::kPillbox;
  k.param = radius;
  k.half_width = static_cast<std::size_t>(std::ceil(radius));
  const auto h = static_cast<long long>(k.half_width);
  k.taps.assign(k.side() * k.side(), 0.0);
  std::size_t i = 0;
  for (long long y = -h; y <= h; ++y) {
    for (long long x = -h; x <= h; ++x) {
      k.taps[i++] = std::sqrt(static_cast<double>(x * x + y * y)) <= radius ? 1.0 : 0.0;
    }
  }
  detail::normalize(k.taps);
  return k;
}

inline BlurKernel make_kernel(BlurFamily family, double param) {
  switch (family) {
    case BlurFamily::kGaussian: return gaussian_kernel(param);
    case BlurFamily::kPillbox: return pillbox_kernel(param);
    case BlurFamily::kDelta: return delta_kernel();
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown blur family");
}

/// 2-D correlation with mirror padding. Kernels here are symmetric, so this is
/// also the convolution. Per-pixel summation order is fixed (row-major taps).
inline GrayImage convolve(const GrayImage& image, const BlurKernel& kernel) {
  GrayImage out(image.width(), image.height());
  const auto h = static_cast<long long>(kernel.half_width);
  const auto rows = static_cast<long long>(image.height());
  const auto cols = static_cast<long long>(image.width());
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      double acc = 0.0;
      std::size_t t = 0;
      for (long long dy = -h; dy <= h; ++dy) {
        for (long long dx = -h; dx <= h; ++dx, ++t) {
          const double w = kernel.taps[t];
          if (w != 0.0) acc += w * detail::mirrored(image, r + dy, c + dx);
        }
      }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  }
  return out;
}

/// Seeded standard-normal source: mt19937_64 (output sequence fixed by the
/// C++ standard) feeding a Box-Muller transform on 53-bit uniforms. Used
/// instead of std::normal_distribution, whose algorithm is unspecified.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Variance of a blurred image, or 0 when it is constant up to the rounding
/// left behind by the kernel sum.
inline double signal_variance(const GrayImage& blurred) {
  const auto px = blurred.pixels();
  const double var = population_variance(px);
  double mean_sq = 0.0;
  for (double v : px) mean_sq += v * v;
  mean_sq /= static_cast<double>(px.size());
  return var <= 1e-20 * (mean_sq + 1.0) ? 0.0 : var;
}

inline double bsnr_db(const GrayImage& blurred_noiseless, double noise_variance) {
  detail::require(noise_variance > 0.0, ErrorCode::kInvalidArgument,
                  "noise variance must be positive");
  const double var = signal_variance(blurred_noiseless);
  detail::require(var > 0.0, ErrorCode::kDegenerateImage,
                  "BSNR undefined for a constant image");
  return 10.0 * std::log10(var / noise_variance);
}

struct DegradedPair {
  GrayImage original;
  GrayImage blurred_noiseless;
  GrayImage degraded;
  double noise_variance = 0.0;
  double target_bsnr_db = 0.0;
  double realized_bsnr_db = 0.0;
  std::uint64_t seed = 0;
};

/// Blurs `image` and adds white Gaussian noise whose variance puts the
/// blurred-signal-to-noise ratio at `target_bsnr_db`.
inline DegradedPair degrade(const GrayImage& image, const BlurKernel& kernel,
                            double target_bsnr_db, std::uint64_t seed) {
  detail::require(image.size() >= 2, ErrorCode::kInvalidArgument,
                  "degradation needs at least two pixels");
  detail::require(std::isfinite(target_bsnr_db), ErrorCode::kInvalidArgument,
                  "target BSNR must be finite");
  DegradedPair p;
  p.original = image;
  p.blurred_noiseless = convolve(image, kernel);
  const double var = signal_variance(p.blurred_noiseless);
  detail::require(var > 0.0, ErrorCode::kDegenerateImage,
                  "blurred image is constant; BSNR is undefined");
  p.noise_variance = var / std::pow(10.0, target_bsnr_db / 10.0);
  p.target_bsnr_db = target_bsnr_db;
  p.seed = seed;

  GaussianNoise noise(seed);
  const double sigma = std::sqrt(p.noise_variance);
  p.degraded = p.blurred_noiseless;
  double power = 0.0;
  for (double& v : p.degraded.pixels()) {
    const double n = sigma * noise.next();
    power += n * n;
    v += n;
  }
  power /= static_cast<double>(image.size());
  p.realized_bsnr_db = bsnr_db(p.blurred_noiseless, power);
  return p;
}

/// Improvement in SNR: 10 log10(|f - g|^2 / |f - r|^2).
inline double isnr_db(const GrayImage& original, const GrayImage& degraded,
                      const GrayImage& restored) {
  detail::require(original.same_shape(degraded) && original.same_shape(restored),
                  ErrorCode::kDimensionMismatch,
                  "ISNR needs images of identical dimensions");
  double before = 0.0;
  double after = 0.0;
  const auto f = original.pixels();
  const auto g = degraded.pixels();
  const auto r = restored.pixels();
  for (std::size_t i = 0; i < f.size(); ++i) {
    before += (f[i] - g[i]) * (f[i] - g[i]);
    after += (f[i] - r[i]) * (f[i] - r[i]);
  }
  detail::require(after > 0.0, ErrorCode::kInfiniteIsnr,
                  "restored image equals the original; ISNR is infinite");
  detail::require(before > 0.0, ErrorCode::kInvalidArgument,
                  "degraded image equals the original; ISNR is undefined");
  return 10.0 * std::log10(before / after);
}

}  // namespace vqr
