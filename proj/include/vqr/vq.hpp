#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vqr/degrade.hpp"
#include "vqr/error.hpp"

namespace vqr {

/// Flat storage for many equal-length real vectors (training sets, block
/// collections). Row i is data[i*dim, (i+1)*dim).
class VectorSet {
 public:
  VectorSet() = default;
  explicit VectorSet(std::size_t dim) : dim_(dim) {
    detail::require(dim > 0, ErrorCode::kInvalidArgument,
                    "vector dimension must be positive");
  }

  static VectorSet from_rows(const std::vector<std::vector<double>>& rows) {
    detail::require(!rows.empty(), ErrorCode::kInsufficientData,
                    "cannot infer dimension of an empty vector list");
    VectorSet s(rows.front().size());
    for (const auto& r : rows) s.push_back(r);
    return s;
  }

  void reserve(std::size_t n) { data_.reserve(n * dim_); }

  void push_back(std::span<const double> v) {
    if (v.size() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "vector length " + std::to_string(v.size()) +
                      " does not match set dimension " + std::to_string(dim_));
    }
    data_.insert(data_.end(), v.begin(), v.end());
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// A reproduction vector for the low-frequency block plus the high-frequency
/// residual learned for its cell.
struct Codeword {
  std::vector<double> low;
  double high = 0.0;

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

struct CodebookMeta {
  BlurFamily family = BlurFamily::kDelta;
  double blur_param = 0.0;
  double bsnr_db = 0.0;
  // Not persisted in VQCB files.
  std::string prototype_label;

  friend bool operator==(const CodebookMeta&, const CodebookMeta&) = default;
};

struct Codebook {
  std::size_t block_size = 0;
  std::vector<Codeword> codewords;
  CodebookMeta meta;

  std::size_t dim() const noexcept { return block_size * block_size; }
  std::size_t size() const noexcept { return codewords.size(); }

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

/// Squared Euclidean distance.
inline double distortion(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), ErrorCode::kDimensionMismatch,
                  "distortion of vectors with different lengths");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

struct Match {
  std::size_t index = 0;
  double distortion = 0.0;
};

namespace detail {

/// Squared distance from v to c, abandoned (returning +inf) once the running
/// sum passes `bound` (or reaches it, when `inclusive` is false). The
/// accumulation order matches distortion(), so any value returned is
/// bit-identical to the full sum.
inline double bounded_distance(std::span<const double> v, std::span<const double> c,
                               double bound, bool inclusive) {
  constexpr std::size_t kChunk = 8;
  const std::size_t n = v.size();
  double d = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t stop = std::min(n, i + kChunk);
    for (; i < stop; ++i) d += (v[i] - c[i]) * (v[i] - c[i]);
    if (inclusive ? d > bound : d >= bound) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return d;
}

/// Nearest codevector under squared error, lowest index on ties. Uses
/// partial-distance elimination, seeded with the distance to `hint` when one
/// is given; the answer equals a plain linear scan exactly.
template <typename Lows>
Match nearest(const Lows& lows, std::size_t count, std::span<const double> v,
              std::size_t hint = static_cast<std::size_t>(-1)) {
  Match best{0, std::numeric_limits<double>::infinity()};
  if (hint < count) {
    best = {hint, bounded_distance(v, lows[hint], best.distortion, true)};
  }
  for (std::size_t j = 0; j < count; ++j) {
    if (j == hint) continue;
    // A lower index than the incumbent wins ties.
    const bool lower = j < best.index;
    const double d = bounded_distance(v, lows[j], best.distortion, lower);
    if (d < best.distortion || (lower && d == best.distortion)) best = {j, d};
  }
  return best;
}

/// Squared distance with four interleaved accumulators and early exit once
/// `bound` is exceeded. Faster than the sequential sum but not bit-identical
/// to distortion(); used only inside LBG, where the assignment just has to be
/// deterministic.
inline double fast_bounded_distance(const double* v, const double* c,
                                    std::size_t n, double bound) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  while (i + 16 <= n) {
    for (const std::size_t stop = i + 16; i < stop; i += 4) {
      const double d0 = v[i] - c[i], d1 = v[i + 1] - c[i + 1];
      const double d2 = v[i + 2] - c[i + 2], d3 = v[i + 3] - c[i + 3];
      a0 += d0 * d0;
      a1 += d1 * d1;
      a2 += d2 * d2;
      a3 += d3 * d3;
    }
    if ((a0 + a1) + (a2 + a3) > bound) return std::numeric_limits<double>::infinity();
  }
  for (; i < n; ++i) a0 += (v[i] - c[i]) * (v[i] - c[i]);
  return (a0 + a1) + (a2 + a3);
}

struct CodewordLows {
  const std::vector<Codeword>* words;
  std::span<const double> operator[](std::size_t j) const {
    return (*words)[j].low;
  }
};

inline void require_codebook_dim(const Codebook& cb, std::size_t len) {
  require(!cb.codewords.empty(), ErrorCode::kInsufficientData,
          "codebook is empty");
  require(len == cb.dim(), ErrorCode::kDimensionMismatch,
          "vector length " + std::to_string(len) +
              " does not match codebook dimension " + std::to_string(cb.dim()));
}

}  // namespace detail

inline Match nearest_codeword(const Codebook& codebook,
                              std::span<const double> vec) {
  detail::require_codebook_dim(codebook, vec.size());
  return detail::nearest(detail::CodewordLows{&codebook.codewords},
                         codebook.size(), vec);
}

inline std::size_t encode(const Codebook& codebook, std::span<const double> vec) {
  return nearest_codeword(codebook, vec).index;
}

/// Sample estimate of the expected quantization error.
inline double mean_distortion(const Codebook& codebook, const VectorSet& vecs) {
  detail::require(!vecs.empty(), ErrorCode::kInsufficientData,
                  "mean distortion of an empty vector set");
  detail::require_codebook_dim(codebook, vecs.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    total += detail::nearest(detail::CodewordLows{&codebook.codewords},
                             codebook.size(), vecs[i])
                 .distortion;
  }
  return total / static_cast<double>(vecs.size());
}

// LBG -------------------------------------------------------------------------

struct LbgOptions {
  std::size_t codewords = 32;
  double epsilon = 1e-4;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  /// Split perturbation: c -> c(1 + delta), c(1 - delta).
  double delta = 0.01;
};

struct LbgResult {
  VectorSet codevectors;
  /// Mean distortion measured at every assignment step, one list per
  /// splitting phase (phase 0 is the single-centroid codebook).
  std::vector<std::vector<double>> phase_history;
  double final_distortion = 0.0;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Runs Lloyd iterations on `codes` in place until the relative drop in mean
/// distortion falls below epsilon, the assignment stops changing, or
/// max_iters assignments have been made, or the distortion fails to drop.
/// Empty cells are refilled with the
/// training vectors that currently have the largest quantization error.
///
/// The assignment step keeps per-vector, per-centre lower bounds on the
/// Euclidean distance (Elkan's method); a centre is only measured when its
/// bound and the centre-centre separation cannot rule it out. The resulting
/// assignment is the same as a brute-force search.
inline std::vector<double> lloyd_phase(const VectorSet& vecs, VectorSet& codes,
                                       const LbgOptions& opt) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kMargin = 1e-9;
  const std::size_t n = vecs.size();
  const std::size_t k = codes.size();
  const std::size_t dim = vecs.dim();
  std::vector<std::size_t> assign(n, 0);
  std::vector<double> lower(n * k, 0.0);
  std::vector<double> err(n);
  std::vector<double> history;
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  std::vector<double> half_dist(k * k);
  std::vector<double> drift(k);
  VectorSet previous = codes;
  bool first = true;

  auto dist = [dim](const double* x, const double* y) {
    return fast_bounded_distance(x, y, dim, kInf);
  };

  for (std::size_t iter = 0; iter < opt.max_iters; ++iter) {
    for (std::size_t a = 0; a < k; ++a) {
      half_dist[a * k + a] = 0.0;
      for (std::size_t b = a + 1; b < k; ++b) {
        const double h = 0.5 * std::sqrt(dist(codes[a].data(), codes[b].data()));
        half_dist[a * k + b] = h;
        half_dist[b * k + a] = h;
      }
    }

    bool changed = first;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* v = vecs[i].data();
      double* lb = lower.data() + i * k;
      std::size_t a = assign[i];
      double da = dist(v, codes[a].data());
      double u = std::sqrt(da);
      lb[a] = u;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == a) continue;
        // j can only win (or tie) if neither bound excludes it.
        const double bound = std::max(lb[j], half_dist[a * k + j]);
        if (u * (1.0 + kMargin) < bound) continue;
        const double dj = dist(v, codes[j].data());
        lb[j] = std::sqrt(dj);
        if (dj < da || (dj == da && j < a)) {
          a = j;
          da = dj;
          u = lb[j];
        }
      }
      if (a != assign[i]) changed = true;
      assign[i] = a;
      err[i] = da;
      total += da;
    }
    first = false;
    const double mean = total / static_cast<double>(n);
    const double prev = history.empty() ? kInf : history.back();
    // Exact Lloyd steps never increase distortion; rounding can, by an ulp.
    // Keep the better codebook and stop.
    if (mean > prev) {
      codes = previous;
      break;
    }
    history.push_back(mean);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = vecs[i];
      double* s = sums.data() + assign[i] * dim;
      for (std::size_t d = 0; d < dim; ++d) s[d] += v[d];
      ++counts[assign[i]];
    }
    bool has_empty = false;
    for (std::size_t j = 0; j < k; ++j) has_empty |= counts[j] == 0;

    const bool converged =
        mean == 0.0 || !changed ||
        (std::isfinite(prev) && (prev - mean) / prev < opt.epsilon);
    if (converged && !has_empty) break;
    if (iter + 1 == opt.max_iters) break;

    previous = codes;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      auto c = codes[j];
      const double inv = 1.0 / static_cast<double>(counts[j]);
      for (std::size_t d = 0; d < dim; ++d) c[d] = sums[j * dim + d] * inv;
    }
    if (has_empty) {
      for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] != 0) continue;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (err[i] > err[worst]) worst = i;
        }
        const auto src = vecs[worst];
        auto dst = codes[j];
        std::copy(src.begin(), src.end(), dst.begin());
        err[worst] = -1.0;  // not reused for another empty cell
      }
    }

    for (std::size_t j = 0; j < k; ++j) {
      drift[j] = std::sqrt(dist(codes[j].data(), previous[j].data())) * (1.0 + kMargin);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double* lb = lower.data() + i * k;
      for (std::size_t j = 0; j < k; ++j) lb[j] = std::max(0.0, lb[j] - drift[j]);
    }
  }
  return history;
}

}  // namespace detail

/// Linde-Buzo-Gray codebook design: start from the global centroid and
/// repeatedly split every codevector in two, refining with Lloyd iterations
/// after each split, until `opt.codewords` vectors exist.
inline LbgResult lbg_train(const VectorSet& vecs, const LbgOptions& opt) {
  detail::require(detail::is_power_of_two(opt.codewords),
                  ErrorCode::kInvalidArgument,
                  "codebook size must be a power of two, got " +
                      std::to_string(opt.codewords));
  detail::require(vecs.size() >= opt.codewords, ErrorCode::kInsufficientData,
                  "need at least " + std::to_string(opt.codewords) +
                      " training vectors, got " + std::to_string(vecs.size()));
  detail::require(opt.epsilon > 0.0, ErrorCode::kInvalidArgument,
                  "epsilon must be positive");
  detail::require(opt.max_iters > 0, ErrorCode::kInvalidArgument,
                  "max_iters must be positive");
  const std::size_t dim = vecs.dim();

  std::vector<double> centroid(dim, 0.0);
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    const auto v = vecs[i];
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += v[d];
  }
  for (double& c : centroid) c /= static_cast<double>(vecs.size());

  LbgResult result;
  result.codevectors = VectorSet(dim);
  result.codevectors.push_back(centroid);
  result.phase_history.push_back(detail::lloyd_phase(vecs, result.codevectors, opt));

  // Components that are exactly zero would split into identical copies; those
  // get a seeded offset of magnitude ~delta instead.
  std::mt19937_64 rng(opt.seed);
  auto jitter = [&rng] { return 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  while (result.codevectors.size() < opt.codewords) {
    VectorSet split(dim);
    split.reserve(result.codevectors.size() * 2);
    std::vector<double> up(dim), down(dim);
    for (std::size_t j = 0; j < result.codevectors.size(); ++j) {
      const auto c = result.codevectors[j];
      for (std::size_t d = 0; d < dim; ++d) {
        if (c[d] == 0.0) {
          const double off = opt.delta * jitter();
          up[d] = off;
          down[d] = -off;
        } else {
          up[d] = c[d] * (1.0 + opt.delta);
          down[d] = c[d] * (1.0 - opt.delta);
        }
      }
      split.push_back(up);
      split.push_back(down);
    }
    result.codevectors = std::move(split);
    result.phase_history.push_back(
        detail::lloyd_phase(vecs, result.codevectors, opt));
  }
  result.final_distortion = result.phase_history.back().back();
  return result;
}

/// Pairs every codevector with the mean high-frequency scalar of the training
/// pairs it encodes. Cells that receive no pairs get 0.
inline std::vector<Codeword> attach_high(const VectorSet& low_codevectors,
                                         const VectorSet& pair_lows,
                                         std::span<const double> pair_highs) {
  detail::require(!pair_lows.empty(), ErrorCode::kInsufficientData,
                  "no training pairs");
  detail::require(pair_lows.size() == pair_highs.size(),
                  ErrorCode::kDimensionMismatch,
                  "pair low/high counts differ");
  detail::require(!low_codevectors.empty(), ErrorCode::kInsufficientData,
                  "no codevectors");
  detail::require(pair_lows.dim() == low_codevectors.dim(),
                  ErrorCode::kDimensionMismatch,
                  "pair vectors and codevectors differ in length");
  const std::size_t k = low_codevectors.size();
  std::vector<double> sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < pair_lows.size(); ++i) {
    const auto j = detail::nearest(low_codevectors, k, pair_lows[i]).index;
    sum[j] += pair_highs[i];
    ++count[j];
  }
  std::vector<Codeword> words(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto c = low_codevectors[j];
    words[j].low.assign(c.begin(), c.end());
    words[j].high = count[j] == 0 ? 0.0 : sum[j] / static_cast<double>(count[j]);
  }
  return words;
}

// VQCB persistence ------------------------------------------------------------
//
// "VQCB" | u32 version=1 | u32 block_size | u32 T | u8 family | f64 blur param
// | f64 training BSNR | T x (block_size^2 + 1) f64 (low vector, high scalar).
// Everything little-endian.

inline constexpr std::uint32_t kVqcbVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return std::bit_cast<double>(bits);
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    require(in_.size() - pos_ >= n, ErrorCode::kTruncated, "VQCB data truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> save_codebook(const Codebook& cb) {
  detail::require(cb.block_size % 2 == 1, ErrorCode::kInvalidArgument,
                  "codebook block size must be odd");
  detail::ByteWriter w;
  w.raw("VQCB");
  w.u32(kVqcbVersion);
  w.u32(static_cast<std::uint32_t>(cb.block_size));
  w.u32(static_cast<std::uint32_t>(cb.codewords.size()));
  w.u8(static_cast<std::uint8_t>(cb.meta.family));
  w.f64(cb.meta.blur_param);
  w.f64(cb.meta.bsnr_db);
  for (const auto& word : cb.codewords) {
    detail::require(word.low.size() == cb.dim(), ErrorCode::kDimensionMismatch,
                    "codeword length does not match block size");
    for (double v : word.low) w.f64(v);
    w.f64(word.high);
  }
  return w.take();
}

inline Codebook load_codebook(std::span<const std::uint8_t> bytes) {
  detail::require(bytes.size() >= 4, ErrorCode::kTruncated, "VQCB data truncated");
  detail::require(bytes[0] == 'V' && bytes[1] == 'Q' && bytes[2] == 'C' &&
                      bytes[3] == 'B',
                  ErrorCode::kUnsupportedMagic, "bad VQCB magic");
  detail::ByteReader rd(bytes.subspan(4));
  const auto version = rd.u32();
  detail::require(version == kVqcbVersion, ErrorCode::kBadVersion,
                  "unsupported VQCB version " + std::to_string(version));
  Codebook cb;
  cb.block_size = rd.u32();
  const auto count = rd.u32();
  const auto family = rd.u8();
  detail::require(cb.block_size % 2 == 1, ErrorCode::kMalformedHeader,
                  "VQCB block size must be odd");
  detail::require(count >= 1, ErrorCode::kMalformedHeader,
                  "VQCB codebook has no codewords");
  detail::require(family <= 2, ErrorCode::kMalformedHeader,
                  "VQCB blur family tag out of range");
  cb.meta.family = static_cast<BlurFamily>(family);
  cb.meta.blur_param = rd.f64();
  cb.meta.bsnr_db = rd.f64();
  const std::size_t record = (cb.dim() + 1) * 8;
  detail::require(rd.remaining() / record >= count, ErrorCode::kTruncated,
                  "VQCB data truncated");
  cb.codewords.resize(count);
  for (auto& word : cb.codewords) {
    word.low.resize(cb.dim());
    for (double& v : word.low) v = rd.f64();
    word.high = rd.f64();
  }
  detail::require(rd.remaining() == 0, ErrorCode::kMalformedHeader,
                  "trailing bytes after VQCB records");
  return cb;
}

}  // namespace vqr
