#include <gtest/gtest.h>

#include <filesystem>

#include "cli_runner.hpp"
#include "vqr/io.hpp"
#include "vqr/nnn.hpp"
#include "vqr/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = cli::fresh_dir("cli");
    for (const char* f : {"steps", "bars", "checker", "ramp"}) {
      ASSERT_EQ(cli::run(dir_, std::string("synth --size 64 --family ") + f + " --out p_" + f + ".pgm").code, 0);
    }
    ASSERT_EQ(cli::run(dir_, "synth --size 64 --family mosaic --variant 1 --out clean.pgm").code, 0);
    ASSERT_EQ(cli::run(dir_, "degrade clean.pgm --param 1.5 --bsnr 20 --seed 3 --out g.pgm").code, 0);
    ASSERT_EQ(cli::run(dir_, "synth --family steps --size 32 --out small.pgm").code, 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static cli::Result run(const std::string& args) { return cli::run(dir_, args); }
  static fs::path at(const std::string& name) { return dir_ / name; }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("degrade clean.pgm").code, 1);  // --out missing
  EXPECT_EQ(run("degrade clean.pgm --blur motion --out x.pgm").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DegradeReportsRealizedBsnrAndIsDeterministic) {
  ASSERT_EQ(run("degrade clean.pgm --param 1.5 --bsnr 20 --out d1.pgm --report d1.csv").code, 0);
  ASSERT_EQ(run("degrade clean.pgm --param 1.5 --bsnr 20 --out d2.pgm").code, 0);
  EXPECT_NEAR(cli::metric_of(at("d1.csv"), "bsnr_db"), 20.0, 0.3);
  EXPECT_EQ(vqr::read_file(at("d1.pgm")), vqr::read_file(at("d2.pgm")));
  ASSERT_EQ(run("degrade clean.pgm --param 1.5 --bsnr 20 --seed 1 --out d3.pgm").code, 0);
  EXPECT_NE(vqr::read_file(at("d1.pgm")), vqr::read_file(at("d3.pgm")));
  EXPECT_NE(cli::invocation_of(at("d1.csv")).find("degrade clean.pgm"), std::string::npos);
}

TEST_F(Cli, FailuresLeaveNoOutputs) {
  EXPECT_EQ(run("degrade missing.pgm --out m.pgm --report m.csv").code, 2);
  EXPECT_FALSE(fs::exists(at("m.pgm")));
  EXPECT_FALSE(fs::exists(at("m.csv")));
  std::ofstream(at("const.pgm"), std::ios::binary) << "P5\n4 4\n255\n" << std::string(16, 'a');
  EXPECT_EQ(run("degrade const.pgm --out c.pgm").code, 2);
  EXPECT_FALSE(fs::exists(at("c.pgm")));
  EXPECT_FALSE(fs::exists(at("c.pgm.tmp")));
}

TEST_F(Cli, TrainWritesCodebook) {
  ASSERT_EQ(run("train --prototypes 'p_*.pgm' --param 1.5 --bsnr 20 -T 32 --block 7 --stride 2 --out cb.vqcb").code, 0);
  const auto cb = vqr::load_codebook_file(at("cb.vqcb"));
  EXPECT_EQ(cb.size(), 32u);
  EXPECT_EQ(cb.block_size, 7u);
  EXPECT_EQ(cb.meta.blur_param, 1.5);
  ASSERT_EQ(run("train --prototypes p_bars.pgm p_checker.pgm p_ramp.pgm p_steps.pgm --stride 2 --out cb2.vqcb").code, 0);
  EXPECT_EQ(vqr::read_file(at("cb.vqcb")), vqr::read_file(at("cb2.vqcb")));
  EXPECT_EQ(run("train --prototypes 'p_*.pgm' -T 3 --out bad.vqcb").code, 1);
  EXPECT_EQ(run("train --prototypes 'p_*.pgm' --block 6 --out bad.vqcb").code, 1);
  EXPECT_EQ(run("train --prototypes nothing.pgm --out bad.vqcb").code, 2);
  EXPECT_FALSE(fs::exists(at("bad.vqcb")));
}

TEST_F(Cli, RestoreAndEvaluate) {
  ASSERT_EQ(run("train --prototypes 'p_*.pgm' -T 16 --stride 2 --out r.vqcb").code, 0);
  EXPECT_EQ(run("restore g.pgm --codebook r.vqcb --out r.pgm").code, 1);
  EXPECT_EQ(run("restore g.pgm --codebook r.vqcb --tau 1 --noise-var 2 --out r.pgm").code, 1);
  ASSERT_EQ(run("restore g.pgm --codebook r.vqcb --noise-var 30 --clean clean.pgm --out r.pgm --report r.csv").code, 0);
  EXPECT_TRUE(std::isfinite(cli::metric_of(at("r.csv"), "isnr_db")));
  ASSERT_EQ(run("restore g.pgm --codebook r.vqcb --flat-patch 0 0 8 8 --out r2.pgm").code, 0);
  ASSERT_EQ(run("restore g.pgm --codebook r.vqcb --tau 1e12 --out r3.pgm").code, 0);
  EXPECT_EQ(vqr::read_file(at("r3.pgm")), vqr::read_file(at("g.pgm")));
  EXPECT_EQ(run("restore g.pgm --codebook g.pgm --tau 1 --out r4.pgm").code, 2);

  ASSERT_EQ(run("evaluate --clean clean.pgm --degraded g.pgm --restored r.pgm --report e.csv").code, 0);
  EXPECT_NEAR(cli::metric_of(at("e.csv"), "isnr_db"), cli::metric_of(at("r.csv"), "isnr_db"), 1e-12);
  EXPECT_NEAR(cli::metric_of(at("e.csv"), "snr_restored_db") - cli::metric_of(at("e.csv"), "snr_degraded_db"),
              cli::metric_of(at("e.csv"), "isnr_db"), 1e-9);
  ASSERT_EQ(run("evaluate --clean clean.pgm --degraded g.pgm --restored g.pgm --report e0.csv").code, 0);
  EXPECT_EQ(cli::metric_of(at("e0.csv"), "isnr_db"), 0.0);
  EXPECT_EQ(run("evaluate --clean clean.pgm --degraded g.pgm --restored small.pgm").code, 2);
}

TEST_F(Cli, BuildBankAndIdentify) {
  ASSERT_EQ(run("build-bank --prototypes 'p_*.pgm' -T 8 --stride 2 --params 1.5 3.5 --out-dir bank").code, 0);
  EXPECT_EQ(vqr::read_text(at("bank/bank.bic")),
            "BIC v1 family=gaussian bsnr=20 block=7\n1.5\tcb_0.vqcb\n3.5\tcb_1.vqcb\n");
  const auto r = run("identify g.pgm --bank bank/bank.bic --report curve.csv --run-report id.csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out == "1.5\n" || r.out == "3.5\n") << r.out;
  const auto curve = vqr::read_text(at("curve.csv"));
  EXPECT_EQ(curve.rfind("param,mean_distortion\n1.5,", 0), 0u) << curve;
  EXPECT_EQ(cli::metric_of(at("id.csv"), "identified_param"), std::stod(r.out));
  EXPECT_EQ(run("identify g.pgm --bank missing.bic").code, 2);
  EXPECT_EQ(run("build-bank --prototypes 'p_*.pgm' --params 3.5 1.5 --out-dir bank2").code, 2);
}

TEST_F(Cli, NnnWithSaltAndMask) {
  ASSERT_EQ(run("nnn clean.pgm --salt 0.1 --seed 4 -n 3 --out n.pgm").code, 0);
  ASSERT_TRUE(fs::exists(at("n.mask.pgm")));
  const auto mask = vqr::mask_from_image(vqr::load_pgm(at("n.mask.pgm")));
  EXPECT_EQ(mask.count_corrupt(), 410u);
  const auto clean = vqr::load_pgm(at("clean.pgm"));
  const auto out = vqr::load_pgm(at("n.pgm"));
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!mask.corrupt[i]) {
      EXPECT_EQ(out.pixels()[i], clean.pixels()[i]);
    }
  }
  ASSERT_EQ(run("nnn clean.pgm --mask n.mask.pgm --out n2.pgm").code, 0);
  EXPECT_EQ(run("nnn clean.pgm --out n3.pgm").code, 1);
  EXPECT_EQ(run("nnn clean.pgm --mask small.pgm --out n3.pgm").code, 2);
  std::ofstream(at("allbad.pgm"), std::ios::binary) << "P5\n64 64\n255\n" << std::string(64 * 64, '\xff');
  EXPECT_EQ(run("nnn clean.pgm --mask allbad.pgm --out n4.pgm").code, 2);
  EXPECT_FALSE(fs::exists(at("n4.pgm")));
}

TEST_F(Cli, ClsDefaultsAlphaFromBsnr) {
  ASSERT_EQ(run("cls g.pgm --param 1.5 --bsnr 20 --clean clean.pgm --out c.pgm --report c.csv").code, 0);
  EXPECT_NE(vqr::read_text(at("c.csv")).find("param,alpha,0.05\n"), std::string::npos);
  ASSERT_EQ(run("cls g.pgm --param 1.5 --bsnr 10 --out c10.pgm --report c10.csv").code, 0);
  EXPECT_NE(vqr::read_text(at("c10.csv")).find("param,alpha,0.1\n"), std::string::npos);
  EXPECT_EQ(run("cls g.pgm --param 1.5 --out c.pgm").code, 1);
  ASSERT_EQ(run("cls g.pgm --blur delta --alpha 0 --out id.pgm").code, 0);
  EXPECT_EQ(vqr::read_file(at("id.pgm")), vqr::read_file(at("g.pgm")));
}

TEST_F(Cli, ReproduceWritesSummary) {
  ASSERT_EQ(run("reproduce --prototypes 'p_*.pgm' --test clean.pgm -T 8 --stride 3 --out-dir repro").code, 0);
  const auto text = vqr::read_text(at("repro/summary.csv"));
  EXPECT_NE(text.find("sigma2,bsnr_db,realized_bsnr_db,cls_alpha,isnr_proposed_db,isnr_cls_db\n"),
            std::string::npos);
  EXPECT_NE(text.find("\n1.5,20,"), std::string::npos);
  EXPECT_NE(text.find("\n3.5,10,"), std::string::npos);
  EXPECT_TRUE(fs::exists(at("repro/restored_s3.5_b10.pgm")));
}
