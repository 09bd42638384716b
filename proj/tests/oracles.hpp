#pragma once

// Slow, direct reference implementations used to check the library. Nothing
// here calls into the library's own helpers beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "vqr/degrade.hpp"
#include "vqr/image.hpp"
#include "vqr/nnn.hpp"

namespace oracle {

/// Reflect-without-repeat by repeated folding.
inline long long reflect(long long i, long long n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline double at_reflected(const vqr::GrayImage& img, long long r, long long c) {
  return img(static_cast<std::size_t>(reflect(r, static_cast<long long>(img.height()))),
             static_cast<std::size_t>(reflect(c, static_cast<long long>(img.width()))));
}

inline vqr::GrayImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng,
                                   double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> px(w * h);
  for (auto& v : px) v = u(rng);
  return vqr::GrayImage(w, h, std::move(px));
}

inline vqr::GrayImage naive_convolve(const vqr::GrayImage& img, const vqr::BlurKernel& k) {
  const auto hw = static_cast<long long>(k.half_width);
  const auto side = 2 * hw + 1;
  vqr::GrayImage out(img.width(), img.height());
  for (long long r = 0; r < static_cast<long long>(img.height()); ++r) {
    for (long long c = 0; c < static_cast<long long>(img.width()); ++c) {
      double acc = 0.0;
      for (long long i = 0; i < side; ++i) {
        for (long long j = 0; j < side; ++j) {
          acc += k.taps[static_cast<std::size_t>(i * side + j)] *
                 at_reflected(img, r + i - hw, c + j - hw);
        }
      }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
    }
  }
  return out;
}

inline std::vector<double> naive_block(const vqr::GrayImage& img, std::size_t row,
                                       std::size_t col, std::size_t side) {
  std::vector<double> out;
  const long long h = static_cast<long long>(side / 2);
  for (long long i = -h; i <= h; ++i) {
    for (long long j = -h; j <= h; ++j) {
      out.push_back(at_reflected(img, static_cast<long long>(row) + i,
                                 static_cast<long long>(col) + j));
    }
  }
  return out;
}

/// Multi-source BFS over 8-connectivity; unit step cost equals Chebyshev
/// distance on the grid.
inline std::vector<std::uint32_t> bfs_distance(const vqr::CorruptionMask& m) {
  const auto w = static_cast<long long>(m.width);
  const auto h = static_cast<long long>(m.height);
  std::vector<std::uint32_t> d(m.corrupt.size(), std::numeric_limits<std::uint32_t>::max());
  std::deque<long long> q;
  for (long long i = 0; i < w * h; ++i) {
    if (!m.corrupt[static_cast<std::size_t>(i)]) {
      d[static_cast<std::size_t>(i)] = 0;
      q.push_back(i);
    }
  }
  while (!q.empty()) {
    const long long i = q.front();
    q.pop_front();
    const long long r = i / w, c = i % w;
    for (long long dr = -1; dr <= 1; ++dr) {
      for (long long dc = -1; dc <= 1; ++dc) {
        const long long rr = r + dr, cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
        const auto j = static_cast<std::size_t>(rr * w + cc);
        if (d[j] == std::numeric_limits<std::uint32_t>::max()) {
          d[j] = d[static_cast<std::size_t>(i)] + 1;
          q.push_back(rr * w + cc);
        }
      }
    }
  }
  return d;
}

/// All good pixels grouped by Chebyshev distance from (row, col), then whole
/// groups taken in increasing distance until at least n values are held.
/// Returned sorted, for multiset comparison.
inline std::vector<double> ring_neighbors(const vqr::GrayImage& img,
                                          const vqr::CorruptionMask& m, std::size_t row,
                                          std::size_t col, std::size_t n) {
  std::map<long long, std::vector<double>> by_dist;
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (m(r, c)) continue;
      const long long d = std::max(std::llabs(static_cast<long long>(r) - static_cast<long long>(row)),
                                   std::llabs(static_cast<long long>(c) - static_cast<long long>(col)));
      by_dist[d].push_back(img(r, c));
    }
  }
  std::vector<double> out;
  for (auto& [d, vals] : by_dist) {
    if (out.size() >= n) break;
    out.insert(out.end(), vals.begin(), vals.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Circulant operator of a centred stencil on a periodic w x h grid:
/// (S f)(r, c) = sum taps(dy, dx) f(r + dy, c + dx).
inline std::vector<std::vector<double>> circulant(const std::vector<double>& taps,
                                                  long long half, std::size_t w,
                                                  std::size_t h) {
  const std::size_t n = w * h;
  const long long side = 2 * half + 1;
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  const auto W = static_cast<long long>(w), H = static_cast<long long>(h);
  for (long long r = 0; r < H; ++r) {
    for (long long c = 0; c < W; ++c) {
      for (long long dy = -half; dy <= half; ++dy) {
        for (long long dx = -half; dx <= half; ++dx) {
          const long long rr = ((r + dy) % H + H) % H;
          const long long cc = ((c + dx) % W + W) % W;
          m[static_cast<std::size_t>(r * W + c)][static_cast<std::size_t>(rr * W + cc)] +=
              taps[static_cast<std::size_t>((dy + half) * side + dx + half)];
        }
      }
    }
  }
  return m;
}

/// Minimizer of |H f - g|^2 + alpha |C f|^2 with circulant H and Laplacian C.
inline vqr::GrayImage dense_cls(const vqr::GrayImage& g, const vqr::BlurKernel& k, double alpha) {
  const std::size_t w = g.width(), h = g.height(), n = w * h;
  const auto H = circulant(k.taps, static_cast<long long>(k.half_width), w, h);
  const auto C = circulant({0, -1, 0, -1, 4, -1, 0, -1, 0}, 1, w, h);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k2 = 0; k2 < n; ++k2) s += H[k2][i] * H[k2][j] + alpha * C[k2][i] * C[k2][j];
      a[i][j] = s;
    }
    for (std::size_t k2 = 0; k2 < n; ++k2) b[i] += H[k2][i] * g.pixels()[k2];
  }
  return vqr::GrayImage(w, h, solve_dense(std::move(a), std::move(b)));
}

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// Linear scan, strict comparison so the first minimum wins.
inline std::size_t argmin(const std::vector<std::vector<double>>& codes,
                          const std::vector<double>& v) {
  std::size_t best = 0;
  double bd = sqdist(codes[0], v);
  for (std::size_t j = 1; j < codes.size(); ++j) {
    const double d = sqdist(codes[j], v);
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  return best;
}

inline double mean_min_distortion(const std::vector<std::vector<double>>& codes,
                                  const std::vector<std::vector<double>>& vecs) {
  double total = 0.0;
  for (const auto& v : vecs) {
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& c : codes) bd = std::min(bd, sqdist(c, v));
    total += bd;
  }
  return total / static_cast<double>(vecs.size());
}

/// Best final mean distortion over `restarts` plain Lloyd runs seeded from
/// random distinct data points.
inline double lloyd_best(const std::vector<std::vector<double>>& pts, std::size_t k,
                         int restarts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < restarts; ++t) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::vector<double>> codes;
    for (std::size_t j = 0; j < k; ++j) codes.push_back(pts[idx[j]]);
    std::vector<std::size_t> assign(pts.size(), k);
    for (int it = 0; it < 1000; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto a = argmin(codes, pts[i]);
        if (a != assign[i]) {
          assign[i] = a;
          changed = true;
        }
      }
      if (!changed) break;
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> sum(pts[0].size(), 0.0);
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (assign[i] != j) continue;
          for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += pts[i][d];
          ++cnt;
        }
        if (cnt == 0) continue;
        for (auto& s : sum) s /= static_cast<double>(cnt);
        codes[j] = sum;
      }
    }
    best = std::min(best, mean_min_distortion(codes, pts));
  }
  return best;
}

}  // namespace oracle
