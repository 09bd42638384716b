#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vqr/degrade.hpp"
#include "vqr/error.hpp"
#include "vqr/image.hpp"
#include "vqr/vq.hpp"

namespace vqr {

struct TrainingConfig {
  std::size_t block_size = 7;
  std::size_t stride = 1;
  std::size_t codewords = 32;
  BlurKernel kernel = gaussian_kernel(1.5);
  double target_bsnr_db = 20.0;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  std::size_t max_iters = 100;
  std::string prototype_label;
};

/// Degraded blocks (low) and the centre residual original - degraded (high).
struct TrainingPairs {
  VectorSet lows;
  std::vector<double> highs;

  std::size_t size() const noexcept { return highs.size(); }
};

inline TrainingPairs build_training_pairs(const GrayImage& original,
                                          const GrayImage& degraded,
                                          std::size_t block_size,
                                          std::size_t stride) {
  detail::require_odd(block_size);
  detail::require(stride >= 1, ErrorCode::kInvalidArgument,
                  "stride must be at least 1");
  detail::require(original.same_shape(degraded), ErrorCode::kDimensionMismatch,
                  "original and degraded images differ in size");
  TrainingPairs pairs{VectorSet(block_size * block_size), {}};
  const std::size_t rows = (degraded.height() + stride - 1) / stride;
  const std::size_t cols = (degraded.width() + stride - 1) / stride;
  pairs.lows.reserve(rows * cols);
  pairs.highs.reserve(rows * cols);
  std::vector<double> block(block_size * block_size);
  for (std::size_t r = 0; r < degraded.height(); r += stride) {
    for (std::size_t c = 0; c < degraded.width(); c += stride) {
      detail::gather_block(degraded, r, c, block_size, block);
      pairs.lows.push_back(block);
      pairs.highs.push_back(original(r, c) - degraded(r, c));
    }
  }
  return pairs;
}

/// Degrades one prototype for training. A prototype whose blurred version is
/// constant has no defined BSNR; it is used noise-free.
inline DegradedPair degrade_prototype(const GrayImage& prototype,
                                      const BlurKernel& kernel,
                                      double target_bsnr_db, std::uint64_t seed) {
  try {
    return degrade(prototype, kernel, target_bsnr_db, seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateImage) throw;
  }
  DegradedPair p;
  p.original = prototype;
  p.blurred_noiseless = convolve(prototype, kernel);
  p.degraded = p.blurred_noiseless;
  p.target_bsnr_db = target_bsnr_db;
  p.seed = seed;
  return p;
}

/// Degrades every prototype (seed offset by image index), pools the training
/// pairs, designs the low codevectors with LBG and attaches the per-cell mean
/// residual.
inline Codebook train_restoration_codebook(std::span<const GrayImage> prototypes,
                                           const TrainingConfig& cfg) {
  detail::require(!prototypes.empty(), ErrorCode::kInsufficientData,
                  "at least one prototype image is required");
  detail::require_odd(cfg.block_size);
  TrainingPairs pool{VectorSet(cfg.block_size * cfg.block_size), {}};
  for (std::size_t i = 0; i < prototypes.size(); ++i) {
    const auto pair = degrade_prototype(prototypes[i], cfg.kernel,
                                        cfg.target_bsnr_db, cfg.seed + i);
    auto part = build_training_pairs(pair.original, pair.degraded,
                                     cfg.block_size, cfg.stride);
    for (std::size_t k = 0; k < part.size(); ++k) {
      pool.lows.push_back(part.lows[k]);
      pool.highs.push_back(part.highs[k]);
    }
  }
  detail::require(pool.size() >= cfg.codewords, ErrorCode::kInsufficientData,
                  "prototypes yield " + std::to_string(pool.size()) +
                      " training pairs, fewer than the " +
                      std::to_string(cfg.codewords) + " codewords requested");

  LbgOptions opt;
  opt.codewords = cfg.codewords;
  opt.epsilon = cfg.epsilon;
  opt.max_iters = cfg.max_iters;
  opt.seed = cfg.seed;
  const auto lbg = lbg_train(pool.lows, opt);

  Codebook cb;
  cb.block_size = cfg.block_size;
  cb.codewords = attach_high(lbg.codevectors, pool.lows, pool.highs);
  cb.meta.family = cfg.kernel.family;
  cb.meta.blur_param = cfg.kernel.param;
  cb.meta.bsnr_db = cfg.target_bsnr_db;
  cb.meta.prototype_label = cfg.prototype_label;
  return cb;
}

/// Per-pixel flags, true = nonflat.
struct RegionMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<bool> nonflat;

  bool operator()(std::size_t row, std::size_t col) const {
    return nonflat[row * width + col];
  }
  std::size_t count_nonflat() const {
    std::size_t n = 0;
    for (bool b : nonflat) n += b;
    return n;
  }
};

struct FlatThreshold {
  double tau = 0.0;  // intensity^2
  std::size_t window = 7;
};

/// Suggested threshold for an observation with noise variance sigma_n^2.
inline double default_tau(double noise_variance) { return 4.0 * noise_variance; }

/// Noise variance estimate from a patch the caller knows to be flat.
inline double estimate_noise_variance(const GrayImage& image, std::size_t row,
                                      std::size_t col, std::size_t height,
                                      std::size_t width) {
  detail::require(height > 0 && width > 0 && row + height <= image.height() &&
                      col + width <= image.width(),
                  ErrorCode::kInvalidArgument, "flat patch outside image");
  std::vector<double> v;
  v.reserve(height * width);
  for (std::size_t r = row; r < row + height; ++r) {
    for (std::size_t c = col; c < col + width; ++c) v.push_back(image(r, c));
  }
  return population_variance(v);
}

inline RegionMask classify_regions(const GrayImage& degraded,
                                   const FlatThreshold& thr) {
  detail::require(thr.tau >= 0.0, ErrorCode::kInvalidArgument,
                  "flat threshold must be nonnegative");
  const auto var = local_variance_map(degraded, thr.window);
  RegionMask mask{degraded.width(), degraded.height(),
                  std::vector<bool>(degraded.size())};
  const auto v = var.pixels();
  for (std::size_t i = 0; i < v.size(); ++i) mask.nonflat[i] = v[i] > thr.tau;
  return mask;
}

/// Adds the codebook's high-frequency residual to every nonflat pixel; flat
/// pixels are copied unchanged.
inline GrayImage restore(const GrayImage& degraded, const Codebook& codebook,
                         const FlatThreshold& thr) {
  detail::require_odd(codebook.block_size);
  detail::require_codebook_dim(codebook, codebook.dim());
  const auto mask = classify_regions(degraded, thr);
  GrayImage out = degraded;
  std::vector<double> block(codebook.dim());
  for (std::size_t r = 0; r < degraded.height(); ++r) {
    for (std::size_t c = 0; c < degraded.width(); ++c) {
      if (!mask(r, c)) continue;
      detail::gather_block(degraded, r, c, codebook.block_size, block);
      out(r, c) += codebook.codewords[encode(codebook, block)].high;
    }
  }
  return out;
}

}  // namespace vqr
