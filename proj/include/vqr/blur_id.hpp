#pragma once

#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vqr/degrade.hpp"
#include "vqr/error.hpp"
#include "vqr/restore.hpp"
#include "vqr/text.hpp"
#include "vqr/vq.hpp"

namespace vqr {

struct BicCandidate {
  double param = 0.0;
  Codebook codebook;

  friend bool operator==(const BicCandidate&, const BicCandidate&) = default;
};

/// Blur identification bank: one codebook per candidate blur parameter, all
/// trained on the same prototypes at one reference BSNR.
struct BicBank {
  BlurFamily family = BlurFamily::kGaussian;
  std::vector<BicCandidate> candidates;
  double reference_bsnr_db = 20.0;
  std::size_t block_size = 7;
  std::size_t stride = 1;

  friend bool operator==(const BicBank&, const BicBank&) = default;
};

struct DistortionPoint {
  double param = 0.0;
  double mean_distortion = 0.0;
};

using DistortionCurve = std::vector<DistortionPoint>;

namespace detail {

inline void require_increasing(std::span<const double> params) {
  require(!params.empty(), ErrorCode::kInvalidArgument,
          "candidate parameter list is empty");
  for (std::size_t i = 1; i < params.size(); ++i) {
    require(params[i] > params[i - 1], ErrorCode::kInvalidArgument,
            "candidate parameters must be strictly increasing");
  }
}

}  // namespace detail

/// `cfg.kernel` is ignored; each candidate gets make_kernel(family, param).
inline BicBank build_bic(std::span<const GrayImage> prototypes, BlurFamily family,
                         std::span<const double> params, TrainingConfig cfg) {
  detail::require_increasing(params);
  BicBank bank;
  bank.family = family;
  bank.reference_bsnr_db = cfg.target_bsnr_db;
  bank.block_size = cfg.block_size;
  bank.stride = cfg.stride;
  for (double p : params) {
    cfg.kernel = make_kernel(family, p);
    bank.candidates.push_back({p, train_restoration_codebook(prototypes, cfg)});
  }
  return bank;
}

/// All stride-stepped mirror-padded blocks of an image, row-major.
inline VectorSet collect_blocks(const GrayImage& image, std::size_t block_size,
                                std::size_t stride) {
  detail::require_odd(block_size);
  detail::require(stride >= 1, ErrorCode::kInvalidArgument,
                  "stride must be at least 1");
  VectorSet blocks(block_size * block_size);
  std::vector<double> buf(block_size * block_size);
  for (std::size_t r = 0; r < image.height(); r += stride) {
    for (std::size_t c = 0; c < image.width(); c += stride) {
      detail::gather_block(image, r, c, block_size, buf);
      blocks.push_back(buf);
    }
  }
  return blocks;
}

inline DistortionCurve distortion_curve(const BicBank& bank,
                                        const GrayImage& degraded) {
  detail::require(!bank.candidates.empty(), ErrorCode::kInvalidArgument,
                  "blur identification bank is empty");
  detail::require(degraded.width() >= bank.block_size &&
                      degraded.height() >= bank.block_size,
                  ErrorCode::kDimensionMismatch,
                  "image is smaller than the bank block size");
  const auto blocks = collect_blocks(degraded, bank.block_size, bank.stride);
  DistortionCurve curve;
  curve.reserve(bank.candidates.size());
  for (const auto& cand : bank.candidates) {
    detail::require(cand.codebook.block_size == bank.block_size,
                    ErrorCode::kDimensionMismatch,
                    "bank codebook block size differs from the bank's");
    curve.push_back({cand.param, mean_distortion(cand.codebook, blocks)});
  }
  return curve;
}

struct Identification {
  double param = 0.0;
  DistortionCurve curve;
};

/// Picks the candidate with minimum mean distortion; ties go to the smaller
/// parameter.
inline Identification identify(const BicBank& bank, const GrayImage& degraded) {
  Identification id{0.0, distortion_curve(bank, degraded)};
  std::size_t best = 0;
  for (std::size_t i = 1; i < id.curve.size(); ++i) {
    if (id.curve[i].mean_distortion < id.curve[best].mean_distortion) best = i;
  }
  id.param = id.curve[best].param;
  return id;
}

// Bank manifest ---------------------------------------------------------------
//
//   BIC v1 family=<gaussian|pillbox> bsnr=<dB> block=<n>
//   <param>\t<codebook path>
//   ...

struct BicManifest {
  BlurFamily family = BlurFamily::kGaussian;
  double bsnr_db = 20.0;
  std::size_t block_size = 7;
  std::vector<std::pair<double, std::string>> entries;

  friend bool operator==(const BicManifest&, const BicManifest&) = default;
};

inline std::string format_manifest(const BicManifest& m) {
  std::string out = "BIC v1 family=" + std::string(to_string(m.family)) +
                    " bsnr=" + format_real(m.bsnr_db) +
                    " block=" + std::to_string(m.block_size) + "\n";
  for (const auto& [param, path] : m.entries) {
    out += format_real(param) + "\t" + path + "\n";
  }
  return out;
}

inline BicManifest parse_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)),
                  ErrorCode::kMalformedHeader, "empty bank manifest");
  std::istringstream header(line);
  std::string magic, version;
  header >> magic >> version;
  detail::require(magic == "BIC", ErrorCode::kUnsupportedMagic,
                  "bank manifest must start with 'BIC'");
  detail::require(version == "v1", ErrorCode::kBadVersion,
                  "unsupported bank manifest version '" + version + "'");
  BicManifest m;
  bool seen_family = false, seen_bsnr = false, seen_block = false;
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    detail::require(eq != std::string::npos, ErrorCode::kMalformedHeader,
                    "bad manifest header field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "family") {
      m.family = parse_blur_family(value);
      seen_family = true;
    } else if (key == "bsnr") {
      m.bsnr_db = parse_real(value);
      seen_bsnr = true;
    } else if (key == "block") {
      const double b = parse_real(value);
      detail::require(b >= 1 && b == static_cast<double>(static_cast<std::size_t>(b)),
                      ErrorCode::kMalformedHeader, "bad manifest block size");
      m.block_size = static_cast<std::size_t>(b);
      seen_block = true;
    } else {
      throw Error(ErrorCode::kMalformedHeader,
                  "unknown manifest header field '" + key + "'");
    }
  }
  detail::require(seen_family && seen_bsnr && seen_block,
                  ErrorCode::kMalformedHeader,
                  "manifest header needs family, bsnr and block");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    detail::require(tab != std::string::npos && tab + 1 < line.size(),
                    ErrorCode::kMalformedHeader,
                    "manifest line must be '<param>\\t<path>'");
    m.entries.emplace_back(parse_real(line.substr(0, tab)), line.substr(tab + 1));
  }
  std::vector<double> params;
  for (const auto& e : m.entries) params.push_back(e.first);
  detail::require_increasing(params);
  return m;
}

}  // namespace vqr
