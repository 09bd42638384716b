#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "expect_code.hpp"
#include "oracles.hpp"
#include "vqr/restore.hpp"
#include "vqr/synthetic.hpp"

using vqr::ErrorCode;
using vqr::GrayImage;

namespace {

GrayImage step_image(std::size_t w, std::size_t h, std::size_t edge_col, double lo = 40,
                     double hi = 210) {
  GrayImage img(w, h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) img(r, c) = c < edge_col ? lo : hi;
  return img;
}

}  // namespace

TEST(TrainingPairs, CountAndZeroHighs) {
  std::mt19937_64 rng(1);
  const auto img = oracle::random_image(9, 9, rng);
  const auto p = vqr::build_training_pairs(img, img, 7, 1);
  EXPECT_EQ(p.size(), 81u);
  for (double h : p.highs) EXPECT_EQ(h, 0.0);
}

TEST(TrainingPairs, MatchIndexOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const std::size_t w = 3 + rng() % 14, h = 3 + rng() % 14, stride = 1 + rng() % 3;
    const auto f = oracle::random_image(w, h, rng);
    const auto g = oracle::random_image(w, h, rng);
    const auto p = vqr::build_training_pairs(f, g, 5, stride);
    std::size_t k = 0;
    for (std::size_t r = 0; r < h; r += stride) {
      for (std::size_t c = 0; c < w; c += stride, ++k) {
        ASSERT_LT(k, p.size());
        const auto low = p.lows[k];
        EXPECT_EQ(std::vector<double>(low.begin(), low.end()), oracle::naive_block(g, r, c, 5));
        EXPECT_EQ(p.highs[k], f(r, c) - g(r, c));
      }
    }
    EXPECT_EQ(k, p.size());
  }
}

TEST(TrainingPairs, Errors) {
  EXPECT_VQR_ERROR(vqr::build_training_pairs(GrayImage(4, 4), GrayImage(4, 5), 3, 1),
                   ErrorCode::kDimensionMismatch);
  EXPECT_VQR_ERROR(vqr::build_training_pairs(GrayImage(4, 4), GrayImage(4, 4), 4, 1),
                   ErrorCode::kInvalidArgument);
}

TEST(TrainCodebook, ConstantPrototypesGiveZeroHighs) {
  const std::vector<GrayImage> protos{GrayImage(16, 16, 50.0), GrayImage(16, 16, 180.0)};
  vqr::TrainingConfig cfg;
  cfg.codewords = 4;
  const auto cb = vqr::train_restoration_codebook(protos, cfg);
  EXPECT_EQ(cb.size(), 4u);
  for (const auto& w : cb.codewords) EXPECT_NEAR(w.high, 0.0, 1e-9);
}

TEST(TrainCodebook, StepEdgeCarriesResidualAndIsDeterministic) {
  const std::vector<GrayImage> protos{step_image(64, 64, 30)};
  vqr::TrainingConfig cfg;
  cfg.codewords = 4;
  const auto a = vqr::train_restoration_codebook(protos, cfg);
  const auto b = vqr::train_restoration_codebook(protos, cfg);
  EXPECT_EQ(vqr::save_codebook(a), vqr::save_codebook(b));
  double biggest = 0.0;
  for (const auto& w : a.codewords) biggest = std::max(biggest, std::fabs(w.high));
  EXPECT_GT(biggest, 0.5);
  EXPECT_EQ(a.meta.family, vqr::BlurFamily::kGaussian);
  EXPECT_EQ(a.meta.blur_param, 1.5);
  EXPECT_EQ(a.meta.bsnr_db, 20.0);

  // highs are the per-cell means of the pooled pairs
  const auto pair = vqr::degrade(protos[0], cfg.kernel, cfg.target_bsnr_db, cfg.seed);
  const auto pairs = vqr::build_training_pairs(pair.original, pair.degraded, 7, 1);
  std::vector<std::vector<double>> lows;
  for (const auto& w : a.codewords) lows.push_back(w.low);
  std::vector<double> sum(4, 0.0);
  std::vector<int> cnt(4, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto j = oracle::argmin(lows, {pairs.lows[i].begin(), pairs.lows[i].end()});
    sum[j] += pairs.highs[i];
    ++cnt[j];
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(a.codewords[j].high, cnt[j] ? sum[j] / cnt[j] : 0, 1e-9);
}

TEST(TrainCodebook, TooFewPairs) {
  vqr::TrainingConfig cfg;
  cfg.codewords = 32;
  const std::vector<GrayImage> protos{step_image(4, 4, 2)};
  EXPECT_VQR_ERROR(vqr::train_restoration_codebook(protos, cfg), ErrorCode::kInsufficientData);
  EXPECT_VQR_ERROR(vqr::train_restoration_codebook(std::vector<GrayImage>{}, cfg),
                   ErrorCode::kInsufficientData);
}

TEST(Classify, ConstantAndZeroTau) {
  const auto flat = vqr::classify_regions(GrayImage(8, 8, 3.0), {0.0, 7});
  EXPECT_EQ(flat.count_nonflat(), 0u);
  std::mt19937_64 rng(3);
  const auto noisy = vqr::classify_regions(oracle::random_image(8, 8, rng), {0.0, 3});
  EXPECT_EQ(noisy.count_nonflat(), 64u);
  EXPECT_VQR_ERROR(vqr::classify_regions(GrayImage(2, 2), {-1.0, 3}), ErrorCode::kInvalidArgument);
}

// An ideal 0/100 step seen through a 7-wide window: a pixel whose window
// holds k columns of the other level has variance 10000 k (7 - k) / 49, which
// exceeds 25 for any k in 1..6, i.e. within 3 columns of the edge.
TEST(Classify, StepEdgeBand) {
  const auto img = step_image(30, 5, 15, 0, 100);
  const auto m = vqr::classify_regions(img, {25.0, 7});
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 30; ++c) {
      const bool near = c + 3 >= 15 && c <= 15 + 2;
      EXPECT_EQ(m(r, c), near) << r << "," << c;
    }
  }
}

TEST(Restore, NullMappingAndClosedGate) {
  std::mt19937_64 rng(4);
  const auto g = oracle::random_image(20, 20, rng);
  vqr::Codebook cb;
  cb.block_size = 3;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> low(9);
    for (auto& x : low) x = std::uniform_real_distribution<double>(0, 255)(rng);
    cb.codewords.push_back({low, 0.0});
  }
  EXPECT_EQ(vqr::restore(g, cb, {0.0, 3}), g);
  for (auto& w : cb.codewords) w.high = 17.0;
  EXPECT_EQ(vqr::restore(g, cb, {1e12, 3}), g);
}

TEST(Restore, FlatUntouchedAndBoundedChange) {
  const auto protos = vqr::synth::prototype_set(64);
  vqr::TrainingConfig cfg;
  cfg.codewords = 8;
  cfg.stride = 2;
  const auto cb = vqr::train_restoration_codebook(protos, cfg);
  const auto pair = vqr::degrade(vqr::synth::mosaic(64, 1), cfg.kernel, 20.0, 42);
  const vqr::FlatThreshold thr{vqr::default_tau(pair.noise_variance), 7};
  const auto r = vqr::restore(pair.degraded, cb, thr);
  const auto mask = vqr::classify_regions(pair.degraded, thr);
  double max_high = 0.0;
  for (const auto& w : cb.codewords) max_high = std::max(max_high, std::fabs(w.high));
  for (std::size_t y = 0; y < r.height(); ++y) {
    for (std::size_t x = 0; x < r.width(); ++x) {
      if (!mask(y, x)) {
        EXPECT_EQ(r(y, x), pair.degraded(y, x));
      }
      EXPECT_LE(std::fabs(r(y, x) - pair.degraded(y, x)), max_high + 1e-12);
    }
  }
  EXPECT_EQ(vqr::restore(pair.degraded, cb, thr), r);
}

TEST(Restore, IdentityCodebookLeavesImage) {
  // original == degraded, so every cell's residual is zero
  const auto protos = vqr::synth::prototype_set(32);
  vqr::TrainingPairs pool{vqr::VectorSet(49), {}};
  for (const auto& p : protos) {
    auto part = vqr::build_training_pairs(p, p, 7, 1);
    for (std::size_t i = 0; i < part.size(); ++i) {
      pool.lows.push_back(part.lows[i]);
      pool.highs.push_back(part.highs[i]);
    }
  }
  vqr::LbgOptions opt;
  opt.codewords = 8;
  vqr::Codebook cb;
  cb.block_size = 7;
  cb.codewords = vqr::attach_high(vqr::lbg_train(pool.lows, opt).codevectors, pool.lows, pool.highs);
  const auto g = vqr::synth::mosaic(32, 2);
  EXPECT_EQ(vqr::restore(g, cb, {0.0, 7}), g);
}

TEST(Restore, HeldOutShiftedStepImproves) {
  std::vector<GrayImage> protos{step_image(64, 64, 20), step_image(64, 64, 41)};
  vqr::TrainingConfig cfg;
  cfg.codewords = 8;
  const auto cb = vqr::train_restoration_codebook(protos, cfg);
  const auto clean = step_image(64, 64, 33);
  const auto pair = vqr::degrade(clean, cfg.kernel, 20.0, 77);
  const auto r = vqr::restore(pair.degraded, cb, {vqr::default_tau(pair.noise_variance), 7});
  EXPECT_GT(vqr::isnr_db(clean, pair.degraded, r), 0.0);
}

TEST(NoiseEstimate, FlatPatch) {
  const auto pair = vqr::degrade(step_image(128, 128, 64), vqr::gaussian_kernel(1.5), 20.0, 5);
  const double est = vqr::estimate_noise_variance(pair.degraded, 0, 0, 128, 40);
  EXPECT_NEAR(est / pair.noise_variance, 1.0, 0.1);
  EXPECT_EQ(vqr::default_tau(2.5), 10.0);
  EXPECT_VQR_ERROR(vqr::estimate_noise_variance(pair.degraded, 100, 0, 40, 40),
                   ErrorCode::kInvalidArgument);
}
