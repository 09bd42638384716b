#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "vqr/degrade.hpp"
#include "vqr/error.hpp"
#include "vqr/image.hpp"

namespace vqr {

using Complex = std::complex<double>;

/// Dense complex 2-D array, row-major.
struct Spectrum {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Complex> data;

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * width + c]; }
  Complex operator()(std::size_t r, std::size_t c) const { return data[r * width + c]; }
};

namespace detail {

/// In-place DFT of `n` samples spaced `step` apart. Plain O(n^2) sum with a
/// twiddle table so any length works.
inline void dft_strided(Complex* x, std::size_t n, std::size_t step, bool inverse,
                        std::vector<Complex>& scratch) {
  std::vector<Complex> twiddle(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(n);
    twiddle[k] = {std::cos(a), std::sin(a)};
  }
  scratch.assign(n, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j * step] * twiddle[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    scratch[k] = acc;
  }
  for (std::size_t k = 0; k < n; ++k) x[k * step] = scratch[k];
}

}  // namespace detail

/// Unnormalized forward DFT, or the inverse scaled by 1/(width*height).
inline void dft2(Spectrum& s, bool inverse) {
  std::vector<Complex> scratch;
  for (std::size_t r = 0; r < s.height; ++r) {
    detail::dft_strided(s.data.data() + r * s.width, s.width, 1, inverse, scratch);
  }
  for (std::size_t c = 0; c < s.width; ++c) {
    detail::dft_strided(s.data.data() + c, s.height, s.width, inverse, scratch);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(s.width * s.height);
    for (auto& v : s.data) v *= scale;
  }
}

/// Centre-anchored stencil wrapped onto a width x height periodic grid (the
/// first column of the corresponding block-circulant operator).
inline Spectrum wrap_stencil(std::span<const double> taps, std::size_t half_width,
                             std::size_t width, std::size_t height) {
  Spectrum s{width, height, std::vector<Complex>(width * height)};
  const auto h = static_cast<long long>(half_width);
  const auto side = 2 * h + 1;
  for (long long dy = -h; dy <= h; ++dy) {
    for (long long dx = -h; dx <= h; ++dx) {
      const double t = taps[static_cast<std::size_t>((dy + h) * side + (dx + h))];
      const auto r = static_cast<std::size_t>(
          ((dy % static_cast<long long>(height)) + static_cast<long long>(height)) %
          static_cast<long long>(height));
      const auto c = static_cast<std::size_t>(
          ((dx % static_cast<long long>(width)) + static_cast<long long>(width)) %
          static_cast<long long>(width));
      s(r, c) += t;
    }
  }
  return s;
}

inline std::array<double, 9> laplacian_3x3() {
  return {0.0, -1.0, 0.0, -1.0, 4.0, -1.0, 0.0, -1.0, 0.0};
}

/// Default regularization: reciprocal of the observed BSNR expressed in dB.
inline double default_alpha(double bsnr_db) {
  detail::require(bsnr_db > 0.0, ErrorCode::kInvalidArgument,
                  "BSNR must be positive to derive the CLS regularization");
  return 1.0 / bsnr_db;
}

struct ClsConfig {
  double alpha = 0.0;
  BlurKernel kernel;
};

/// Frequency-domain constrained least squares:
///   F = conj(H) G / (|H|^2 + alpha |C|^2)
/// with H the blur and C the 3x3 Laplacian, both under periodic boundaries.
inline GrayImage cls_restore(const GrayImage& degraded, const ClsConfig& cfg) {
  detail::require(!degraded.empty(), ErrorCode::kInvalidArgument,
                  "CLS input image is empty");
  detail::require(cfg.alpha >= 0.0 && std::isfinite(cfg.alpha),
                  ErrorCode::kInvalidArgument,
                  "CLS regularization must be nonnegative");
  const std::size_t w = degraded.width();
  const std::size_t h = degraded.height();

  auto blur = wrap_stencil(cfg.kernel.taps, cfg.kernel.half_width, w, h);
  const auto lap_taps = laplacian_3x3();
  auto lap = wrap_stencil(lap_taps, 1, w, h);
  Spectrum g{w, h, std::vector<Complex>(w * h)};
  const auto px = degraded.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) g.data[i] = px[i];
  dft2(blur, false);
  dft2(lap, false);
  dft2(g, false);

  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const double denom = std::norm(blur.data[i]) + cfg.alpha * std::norm(lap.data[i]);
    detail::require(denom > 1e-12, ErrorCode::kSingularSystem,
                    "CLS system is singular (blur transfer function vanishes "
                    "and alpha is zero)");
    g.data[i] = std::conj(blur.data[i]) * g.data[i] / denom;
  }
  dft2(g, true);
  GrayImage out(w, h);
  auto o = out.pixels();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = g.data[i].real();
  return out;
}

}  // namespace vqr
