// vqrestore: command-line front end for degradation synthesis, codebook
// training, VQ restoration, blur identification, NNN repair, the CLS
// baseline and evaluation.

#include <glob.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vqr/blur_id.hpp"
#include "vqr/cls.hpp"
#include "vqr/degrade.hpp"
#include "vqr/io.hpp"
#include "vqr/nnn.hpp"
#include "vqr/report.hpp"
#include "vqr/restore.hpp"
#include "vqr/synthetic.hpp"
#include "vqr/text.hpp"
#include "vqr/vq.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

/// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& p : patterns) {
    glob_t g{};
    if (::glob(p.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    } else {
      out.push_back(p);  // let the loader report the missing file
    }
    ::globfree(&g);
  }
  return out;
}

std::vector<vqr::GrayImage> load_all(const std::vector<std::string>& paths) {
  std::vector<vqr::GrayImage> images;
  for (const auto& p : paths) images.push_back(vqr::load_pgm(p));
  return images;
}

std::string mask_path_for(const fs::path& out) {
  auto p = out;
  p.replace_extension();
  return p.string() + ".mask.pgm";
}

void require_power_of_two(std::size_t t) {
  if (t == 0 || (t & (t - 1)) != 0) {
    throw UsageError("-T must be a power of two, got " + std::to_string(t));
  }
}

struct BlurArgs {
  std::string family = "gaussian";
  double param = 1.5;
  bool has_param = true;

  void add(CLI::App* app, bool with_param = true) {
    has_param = with_param;
    app->add_option("--blur", family, "Blur family")
        ->check(CLI::IsMember({"gaussian", "pillbox", "delta"}))
        ->capture_default_str();
    if (!with_param) return;
    app->add_option("--param", param, "Blur parameter (variance for gaussian, radius for pillbox)")
        ->capture_default_str();
  }
  vqr::BlurKernel kernel() const {
    return vqr::make_kernel(vqr::parse_blur_family(family), param);
  }
  void record(vqr::RunReport& rep) const {
    rep.param("blur", family);
    if (has_param) rep.param("param", param);
  }
};

struct TrainArgs {
  BlurArgs blur;
  double bsnr = 20.0;
  std::size_t codewords = 32;
  std::size_t block = 7;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
  double epsilon = 1e-4;
  std::size_t max_iters = 100;

  void add(CLI::App* app, bool with_param = true) {
    blur.add(app, with_param);
    app->add_option("--bsnr", bsnr, "Training BSNR in dB")->capture_default_str();
    app->add_option("-T,--codewords", codewords, "Codebook size (power of two)")
        ->capture_default_str();
    app->add_option("--block", block, "Block side (odd)")->capture_default_str();
    app->add_option("--stride", stride, "Training block stride")->capture_default_str();
    app->add_option("--seed", seed, "Noise seed")->capture_default_str();
    app->add_option("--epsilon", epsilon, "LBG relative distortion threshold")
        ->capture_default_str();
    app->add_option("--max-iters", max_iters, "LBG iterations per phase")
        ->capture_default_str();
  }
  vqr::TrainingConfig config() const {
    require_power_of_two(codewords);
    if (block % 2 == 0) throw UsageError("--block must be odd");
    if (stride == 0) throw UsageError("--stride must be positive");
    vqr::TrainingConfig cfg;
    cfg.block_size = block;
    cfg.stride = stride;
    cfg.codewords = codewords;
    cfg.kernel = blur.kernel();
    cfg.target_bsnr_db = bsnr;
    cfg.seed = seed;
    cfg.epsilon = epsilon;
    cfg.max_iters = max_iters;
    return cfg;
  }
  void record(vqr::RunReport& rep) const {
    blur.record(rep);
    rep.param("bsnr", bsnr);
    rep.param("codewords", std::to_string(codewords));
    rep.param("block", std::to_string(block));
    rep.param("stride", std::to_string(stride));
    rep.param("epsilon", epsilon);
    rep.param("max_iters", std::to_string(max_iters));
    rep.seed = seed;
  }
};

struct Context {
  std::string invocation;
};

vqr::RunReport start_report(const Context& ctx, std::string command) {
  vqr::RunReport rep;
  rep.command = std::move(command);
  rep.invocation = ctx.invocation;
  return rep;
}

// degrade ---------------------------------------------------------------------

struct DegradeCmd {
  std::string in, out, report;
  BlurArgs blur;
  double bsnr = 20.0;
  std::uint64_t seed = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("degrade", "Blur an image and add noise at a target BSNR");
    app->add_option("input", in, "Input PGM")->required();
    blur.add(app);
    app->add_option("--bsnr", bsnr, "Target BSNR in dB")->capture_default_str();
    app->add_option("--seed", seed, "Noise seed")->capture_default_str();
    app->add_option("--out", out, "Output PGM")->required();
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    const auto image = vqr::load_pgm(in);
    const auto pair = vqr::degrade(image, blur.kernel(), bsnr, seed);
    vqr::OutputSet outputs;
    outputs.add(out, vqr::write_pgm(pair.degraded));
    if (!report.empty()) {
      auto rep = start_report(ctx, "degrade");
      rep.input("in", in);
      blur.record(rep);
      rep.param("bsnr", bsnr);
      rep.param("out", out);
      rep.seed = seed;
      rep.metric("target_bsnr_db", pair.target_bsnr_db);
      rep.metric("bsnr_db", pair.realized_bsnr_db);
      rep.metric("noise_variance", pair.noise_variance);
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
    std::cout << "realized BSNR " << vqr::format_real(pair.realized_bsnr_db) << " dB\n";
  }
};

// train -----------------------------------------------------------------------

struct TrainCmd {
  std::vector<std::string> prototypes;
  std::string out, report;
  TrainArgs args;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("train", "Design a restoration codebook from prototypes");
    app->add_option("--prototypes", prototypes, "Prototype PGMs (globs allowed)")
        ->required()
        ->expected(1, -1);
    args.add(app);
    app->add_option("--out", out, "Output VQCB codebook")->required();
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    const auto cfg = args.config();
    const auto paths = expand_globs(prototypes);
    const auto images = load_all(paths);
    const auto cb = vqr::train_restoration_codebook(images, cfg);
    vqr::OutputSet outputs;
    outputs.add(out, vqr::save_codebook(cb));
    if (!report.empty()) {
      auto rep = start_report(ctx, "train");
      for (const auto& p : paths) rep.input("prototype", p);
      args.record(rep);
      rep.param("out", out);
      rep.metric("codewords", static_cast<double>(cb.size()));
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
    std::cout << "wrote " << cb.size() << " codewords to " << out << "\n";
  }
};

// restore ---------------------------------------------------------------------

struct RestoreCmd {
  std::string in, codebook, out, clean, degraded_ref, report;
  std::optional<double> tau, noise_var;
  std::vector<std::size_t> flat_patch;
  std::size_t window = 7;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("restore", "Restore a degraded image with a codebook");
    app->add_option("input", in, "Degraded PGM")->required();
    app->add_option("--codebook", codebook, "VQCB codebook")->required();
    auto* t = app->add_option("--tau", tau, "Flat/nonflat variance threshold");
    auto* nv = app->add_option("--noise-var", noise_var,
                               "Known noise variance; tau defaults to 4x this");
    auto* fp = app->add_option("--flat-patch", flat_patch,
                               "row col height width of a flat patch used to estimate "
                               "the noise variance")
                   ->expected(4);
    t->excludes(nv)->excludes(fp);
    nv->excludes(fp);
    app->add_option("--window", window, "Variance window side (odd)")->capture_default_str();
    app->add_option("--out", out, "Output PGM")->required();
    app->add_option("--clean", clean, "Clean reference for ISNR");
    app->add_option("--degraded-ref", degraded_ref,
                    "Degraded reference for ISNR (defaults to the input)");
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    const auto degraded = vqr::load_pgm(in);
    const auto cb = vqr::load_codebook_file(codebook);
    double threshold = 0.0;
    if (tau) {
      threshold = *tau;
    } else if (noise_var) {
      threshold = vqr::default_tau(*noise_var);
    } else if (!flat_patch.empty()) {
      threshold = vqr::default_tau(vqr::estimate_noise_variance(
          degraded, flat_patch[0], flat_patch[1], flat_patch[2], flat_patch[3]));
    } else {
      throw UsageError("restore needs one of --tau, --noise-var or --flat-patch");
    }
    const vqr::FlatThreshold thr{threshold, window};
    const auto restored = vqr::restore(degraded, cb, thr);
    vqr::OutputSet outputs;
    outputs.add(out, vqr::write_pgm(restored));
    std::optional<double> isnr;
    if (!clean.empty()) {
      const auto f = vqr::load_pgm(clean);
      const auto g = degraded_ref.empty() ? degraded : vqr::load_pgm(degraded_ref);
      // Score the image as written, i.e. after 8-bit quantization.
      isnr = vqr::isnr_db(f, g, vqr::read_pgm(vqr::write_pgm(restored)));
    }
    if (!report.empty()) {
      auto rep = start_report(ctx, "restore");
      rep.input("in", in);
      rep.input("codebook", codebook);
      if (!clean.empty()) rep.input("clean", clean);
      if (!degraded_ref.empty()) rep.input("degraded_ref", degraded_ref);
      rep.param("tau", threshold);
      rep.param("window", std::to_string(window));
      rep.param("out", out);
      rep.metric("nonflat_fraction",
                 static_cast<double>(vqr::classify_regions(degraded, thr).count_nonflat()) /
                     static_cast<double>(degraded.size()));
      if (isnr) rep.metric("isnr_db", *isnr);
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
    if (isnr) std::cout << "ISNR " << vqr::format_real(*isnr) << " dB\n";
  }
};

// build-bank / identify ---------------------------------------------------------

struct BuildBankCmd {
  std::vector<std::string> prototypes;
  std::vector<double> params{1.5, 2.5, 3.5, 4.5, 5.5};
  std::string out_dir, report;
  TrainArgs args;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand(
        "build-bank", "Train one codebook per candidate blur parameter and write a manifest");
    app->add_option("--prototypes", prototypes, "Prototype PGMs (globs allowed)")
        ->required()
        ->expected(1, -1);
    args.add(app, false);
    app->add_option("--params", params, "Candidate blur parameters (increasing)")
        ->expected(1, -1)
        ->capture_default_str();
    app->add_option("--out-dir", out_dir, "Directory for codebooks and bank.bic")->required();
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    const auto cfg = args.config();
    const auto paths = expand_globs(prototypes);
    const auto images = load_all(paths);
    const auto family = vqr::parse_blur_family(args.blur.family);
    const auto bank = vqr::build_bic(images, family, params, cfg);
    fs::create_directories(out_dir);
    vqr::BicManifest manifest{family, cfg.target_bsnr_db, cfg.block_size, {}};
    vqr::OutputSet outputs;
    for (std::size_t i = 0; i < bank.candidates.size(); ++i) {
      const std::string name = "cb_" + std::to_string(i) + ".vqcb";
      outputs.add(fs::path(out_dir) / name, vqr::save_codebook(bank.candidates[i].codebook));
      manifest.entries.emplace_back(bank.candidates[i].param, name);
    }
    const auto manifest_path = fs::path(out_dir) / "bank.bic";
    outputs.add(manifest_path, vqr::format_manifest(manifest));
    if (!report.empty()) {
      auto rep = start_report(ctx, "build-bank");
      for (const auto& p : paths) rep.input("prototype", p);
      args.record(rep);
      std::string plist;
      for (double p : params) plist += (plist.empty() ? "" : " ") + vqr::format_real(p);
      rep.param("params", plist);
      rep.param("out_dir", out_dir);
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
    std::cout << "wrote " << manifest_path.string() << "\n";
  }
};

vqr::BicBank load_bank(const fs::path& manifest_path, std::size_t stride) {
  const auto manifest = vqr::parse_manifest(vqr::read_text(manifest_path));
  vqr::BicBank bank;
  bank.family = manifest.family;
  bank.reference_bsnr_db = manifest.bsnr_db;
  bank.block_size = manifest.block_size;
  bank.stride = stride;
  for (const auto& [param, rel] : manifest.entries) {
    const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel)
                                                   : manifest_path.parent_path() / rel;
    auto cb = vqr::load_codebook_file(p);
    vqr::detail::require(cb.block_size == bank.block_size, vqr::ErrorCode::kDimensionMismatch,
                         p.string() + ": block size differs from the manifest");
    bank.candidates.push_back({param, std::move(cb)});
  }
  return bank;
}

struct IdentifyCmd {
  std::string in, bank_path, report, run_report;
  std::size_t stride = 1;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("identify", "Identify the blur parameter of an image");
    app->add_option("input", in, "Degraded PGM")->required();
    app->add_option("--bank", bank_path, "Bank manifest")->required();
    app->add_option("--stride", stride, "Block stride over the image")->capture_default_str();
    app->add_option("--report", report, "Distortion curve CSV (param,mean_distortion)");
    app->add_option("--run-report", run_report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    if (stride == 0) throw UsageError("--stride must be positive");
    const auto image = vqr::load_pgm(in);
    const auto bank = load_bank(bank_path, stride);
    const auto id = vqr::identify(bank, image);
    vqr::OutputSet outputs;
    if (!report.empty()) {
      std::string csv = "param,mean_distortion\n";
      for (const auto& p : id.curve) {
        csv += vqr::format_real(p.param) + "," + vqr::format_real(p.mean_distortion) + "\n";
      }
      outputs.add(report, csv);
    }
    if (!run_report.empty()) {
      auto rep = start_report(ctx, "identify");
      rep.input("in", in);
      rep.input("bank", bank_path);
      rep.param("stride", std::to_string(stride));
      if (!report.empty()) rep.param("report", report);
      rep.metric("identified_param", id.param);
      for (const auto& p : id.curve) {
        rep.metric("mean_distortion@" + vqr::format_real(p.param), p.mean_distortion);
      }
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(run_report, rep.to_csv());
    }
    outputs.commit();
    std::cout << vqr::format_real(id.param) << "\n";
  }
};

// nnn -------------------------------------------------------------------------

struct NnnCmd {
  std::string in, mask, out, report;
  std::optional<double> salt;
  std::uint64_t seed = 0;
  std::size_t n = 3;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("nnn", "Repair corrupted pixels by nearest-neighbour median");
    app->add_option("input", in, "Input PGM")->required();
    auto* m = app->add_option("--mask", mask, "Corruption mask PGM (0 = good, 255 = corrupt)");
    auto* s = app->add_option("--salt", salt,
                              "Corrupt this fraction of pixels (set to 255) before repair");
    m->excludes(s);
    app->add_option("--seed", seed, "Salt corruption seed")->capture_default_str();
    app->add_option("-n", n, "Minimum neighbour count")->capture_default_str();
    app->add_option("--out", out, "Output PGM")->required();
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    if (mask.empty() && !salt) throw UsageError("nnn needs --mask or --salt");
    if (n == 0) throw UsageError("-n must be at least 1");
    auto image = vqr::load_pgm(in);
    vqr::CorruptionMask cm;
    vqr::OutputSet outputs;
    if (salt) {
      auto [corrupted, generated] = vqr::salt_corrupt(image, *salt, seed);
      image = std::move(corrupted);
      cm = std::move(generated);
      outputs.add(mask_path_for(out), vqr::write_pgm(vqr::mask_to_image(cm)));
    } else {
      cm = vqr::mask_from_image(vqr::load_pgm(mask));
    }
    const auto restored = vqr::nnn_restore(image, cm, n);
    outputs.add(out, vqr::write_pgm(restored));
    if (!report.empty()) {
      auto rep = start_report(ctx, "nnn");
      rep.input("in", in);
      if (!mask.empty()) rep.input("mask", mask);
      if (salt) rep.param("salt", *salt);
      rep.param("n", std::to_string(n));
      rep.param("out", out);
      rep.seed = seed;
      rep.metric("corrupt_fraction", static_cast<double>(cm.count_corrupt()) /
                                         static_cast<double>(image.size()));
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
  }
};

// cls -------------------------------------------------------------------------

struct ClsCmd {
  std::string in, out, clean, degraded_ref, report;
  BlurArgs blur;
  std::optional<double> alpha, bsnr;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("cls", "Constrained least squares restoration");
    app->add_option("input", in, "Degraded PGM")->required();
    blur.add(app);
    auto* a = app->add_option("--alpha", alpha, "Regularization parameter");
    auto* b = app->add_option("--bsnr", bsnr, "Observed BSNR in dB; alpha = 1/BSNR");
    a->excludes(b);
    app->add_option("--out", out, "Output PGM")->required();
    app->add_option("--clean", clean, "Clean reference for ISNR");
    app->add_option("--degraded-ref", degraded_ref,
                    "Degraded reference for ISNR (defaults to the input)");
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    if (!alpha && !bsnr) throw UsageError("cls needs --alpha or --bsnr");
    const double a = alpha ? *alpha : vqr::default_alpha(*bsnr);
    const auto degraded = vqr::load_pgm(in);
    const auto restored = vqr::cls_restore(degraded, {a, blur.kernel()});
    vqr::OutputSet outputs;
    outputs.add(out, vqr::write_pgm(restored));
    std::optional<double> isnr;
    if (!clean.empty()) {
      const auto f = vqr::load_pgm(clean);
      const auto g = degraded_ref.empty() ? degraded : vqr::load_pgm(degraded_ref);
      isnr = vqr::isnr_db(f, g, vqr::read_pgm(vqr::write_pgm(restored)));
    }
    if (!report.empty()) {
      auto rep = start_report(ctx, "cls");
      rep.input("in", in);
      if (!clean.empty()) rep.input("clean", clean);
      blur.record(rep);
      rep.param("alpha", a);
      rep.param("out", out);
      if (isnr) rep.metric("isnr_db", *isnr);
      rep.metric("wall_time_seconds", sw.seconds());
      outputs.add(report, rep.to_csv());
    }
    outputs.commit();
    std::cout << "alpha " << vqr::format_real(a);
    if (isnr) std::cout << "  ISNR " << vqr::format_real(*isnr) << " dB";
    std::cout << "\n";
  }
};

// evaluate --------------------------------------------------------------------

/// 10 log10(Var(clean) / MSE(clean, other)).
double snr_db(const vqr::GrayImage& clean, const vqr::GrayImage& other) {
  double mse = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = clean.pixels()[i] - other.pixels()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(clean.size());
  vqr::detail::require(mse > 0.0, vqr::ErrorCode::kInfiniteIsnr,
                       "image equals the clean reference; SNR is infinite");
  return 10.0 * std::log10(vqr::population_variance(clean.pixels()) / mse);
}

struct EvaluateCmd {
  std::string clean, degraded, restored, report;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("evaluate", "SNR and ISNR of a restoration");
    app->add_option("--clean", clean, "Clean PGM")->required();
    app->add_option("--degraded", degraded, "Degraded PGM")->required();
    app->add_option("--restored", restored, "Restored PGM")->required();
    app->add_option("--report", report, "Run report CSV");
  }

  void run(const Context& ctx) const {
    Stopwatch sw;
    const auto f = vqr::load_pgm(clean);
    const auto g = vqr::load_pgm(degraded);
    const auto r = vqr::load_pgm(restored);
    const double isnr = vqr::isnr_db(f, g, r);
    const double snr_g = snr_db(f, g);
    const double snr_r = snr_db(f, r);
    if (!report.empty()) {
      auto rep = start_report(ctx, "evaluate");
      rep.input("clean", clean);
      rep.input("degraded", degraded);
      rep.input("restored", restored);
      rep.metric("snr_degraded_db", snr_g);
      rep.metric("snr_restored_db", snr_r);
      rep.metric("isnr_db", isnr);
      rep.metric("wall_time_seconds", sw.seconds());
      vqr::OutputSet outputs;
      outputs.add(report, rep.to_csv());
      outputs.commit();
    }
    std::cout << "SNR degraded " << vqr::format_real(snr_g) << " dB, restored "
              << vqr::format_real(snr_r) << " dB, ISNR " << vqr::format_real(isnr) << " dB\n";
  }
};

// synth -----------------------------------------------------------------------

struct SynthCmd {
  std::string family = "mosaic";
  std::size_t size = 256;
  int variant = 0;
  std::string out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("synth", "Write a synthetic test scene");
    app->add_option("--family", family, "steps, bars, checker, ramp or mosaic")
        ->check(CLI::IsMember({"steps", "bars", "checker", "ramp", "mosaic"}))
        ->capture_default_str();
    app->add_option("--size", size, "Side length in pixels")->capture_default_str();
    app->add_option("--variant", variant, "Geometry variant (0 = training set)")
        ->capture_default_str();
    app->add_option("--out", out, "Output PGM")->required();
  }

  void run(const Context&) const {
    const auto img = family == "mosaic"
                         ? vqr::synth::mosaic(size, variant)
                         : vqr::synth::make(vqr::synth::parse_family(family), size, variant);
    vqr::OutputSet outputs;
    outputs.add(out, vqr::write_pgm(img));
    outputs.commit();
  }
};

// reproduce -------------------------------------------------------------------

struct ReproduceCmd {
  std::vector<std::string> prototypes;
  std::string test, out_dir;
  std::size_t codewords = 32;
  std::size_t block = 7;
  std::size_t stride = 1;
  std::uint64_t seed = 0;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand(
        "reproduce",
        "Gaussian blur 1.5/3.5 x BSNR 20/10 dB: train, restore, CLS, evaluate");
    app->add_option("--prototypes", prototypes, "Prototype PGMs (globs allowed)")
        ->required()
        ->expected(1, -1);
    app->add_option("--test", test, "Held-out clean test PGM")->required();
    app->add_option("--out-dir", out_dir, "Output directory")->required();
    app->add_option("-T,--codewords", codewords, "Codebook size")->capture_default_str();
    app->add_option("--block", block, "Block side")->capture_default_str();
    app->add_option("--stride", stride, "Training stride")->capture_default_str();
    app->add_option("--seed", seed, "Seed")->capture_default_str();
  }

  void run(const Context& ctx) const {
    require_power_of_two(codewords);
    const auto paths = expand_globs(prototypes);
    const auto images = load_all(paths);
    const auto clean = vqr::load_pgm(test);
    fs::create_directories(out_dir);
    vqr::OutputSet outputs;
    std::string csv = "# " + ctx.invocation + "\n";
    csv += "sigma2,bsnr_db,realized_bsnr_db,cls_alpha,isnr_proposed_db,isnr_cls_db\n";
    for (double sigma2 : {1.5, 3.5}) {
      for (double bsnr : {20.0, 10.0}) {
        vqr::TrainingConfig cfg;
        cfg.block_size = block;
        cfg.stride = stride;
        cfg.codewords = codewords;
        cfg.kernel = vqr::gaussian_kernel(sigma2);
        cfg.target_bsnr_db = bsnr;
        cfg.seed = seed;
        const auto cb = vqr::train_restoration_codebook(images, cfg);
        const auto pair = vqr::degrade(clean, cfg.kernel, bsnr, seed + 1000);
        const auto g = vqr::read_pgm(vqr::write_pgm(pair.degraded));
        const auto r = vqr::restore(g, cb, {vqr::default_tau(pair.noise_variance), 7});
        const double alpha = vqr::default_alpha(bsnr);
        const auto c = vqr::cls_restore(g, {alpha, cfg.kernel});
        const auto r8 = vqr::write_pgm(r);
        const auto c8 = vqr::write_pgm(c);
        const double isnr_vq = vqr::isnr_db(clean, g, vqr::read_pgm(r8));
        const double isnr_cls = vqr::isnr_db(clean, g, vqr::read_pgm(c8));
        const std::string tag = "s" + vqr::format_real(sigma2) + "_b" + vqr::format_real(bsnr);
        outputs.add(fs::path(out_dir) / ("degraded_" + tag + ".pgm"), vqr::write_pgm(g));
        outputs.add(fs::path(out_dir) / ("restored_" + tag + ".pgm"), r8);
        outputs.add(fs::path(out_dir) / ("cls_" + tag + ".pgm"), c8);
        outputs.add(fs::path(out_dir) / ("codebook_" + tag + ".vqcb"), vqr::save_codebook(cb));
        csv += vqr::format_real(sigma2) + "," + vqr::format_real(bsnr) + "," +
               vqr::format_real(pair.realized_bsnr_db) + "," + vqr::format_real(alpha) + "," +
               vqr::format_real(isnr_vq) + "," + vqr::format_real(isnr_cls) + "\n";
        std::cout << "sigma2=" << sigma2 << " BSNR=" << bsnr << " dB: ISNR proposed "
                  << isnr_vq << " dB, CLS " << isnr_cls << " dB\n";
      }
    }
    outputs.add(fs::path(out_dir) / "summary.csv", csv);
    outputs.commit();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VQ-based image restoration, blur identification and NNN repair"};
  app.require_subcommand(1);
  Context ctx{vqr::join_invocation(argc, argv)};

  DegradeCmd degrade;
  TrainCmd train;
  RestoreCmd restore;
  BuildBankCmd build_bank;
  IdentifyCmd identify;
  NnnCmd nnn;
  ClsCmd cls;
  EvaluateCmd evaluate;
  SynthCmd synth;
  ReproduceCmd reproduce;
  degrade.add(app);
  train.add(app);
  restore.add(app);
  build_bank.add(app);
  identify.add(app);
  nnn.add(app);
  cls.add(app);
  evaluate.add(app);
  synth.add(app);
  reproduce.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "degrade") degrade.run(ctx);
    else if (name == "train") train.run(ctx);
    else if (name == "restore") restore.run(ctx);
    else if (name == "build-bank") build_bank.run(ctx);
    else if (name == "identify") identify.run(ctx);
    else if (name == "nnn") nnn.run(ctx);
    else if (name == "cls") cls.run(ctx);
    else if (name == "evaluate") evaluate.run(ctx);
    else if (name == "synth") synth.run(ctx);
    else if (name == "reproduce") reproduce.run(ctx);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const vqr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
