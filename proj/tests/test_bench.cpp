#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "csfact/bench.hpp"
#include "csfact/cosamp.hpp"
#include "csfact/dictionary.hpp"
#include "csfact/matcore.hpp"
#include "csfact/rng.hpp"

using namespace csfact;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.dict_source = DictSource::wavelet;
  cfg.wavelet_levels = 2;
  cfg.l = 64;
  cfg.n = 256;
  cfg.k_list = {4};
  cfg.trials = 20;
  cfg.base_seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("default_ratio_grid spans (k+2)/n to l/n") {
  std::vector<double> grid = default_ratio_grid(4, 64, 256);
  REQUIRE(grid.size() == 10);
  CHECK(default_ratio_grid(4, 64, 256, 8).size() == 8);
  CHECK(grid.front() == doctest::Approx(6.0 / 256.0));
  CHECK(grid.back() == doctest::Approx(64.0 / 256.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("run_trial succeeds for both methods in an easy regime") {
  ExperimentConfig cfg = small_config();
  CurveContext ctx = make_curve_context(cfg);
  CHECK(ctx.d.rows() == 64);
  CHECK(ctx.d.cols() == 256);
  // Corollary 2 at full selector: G^{-1} D == A H
  CHECK((ctx.ours_operator_full - ctx.ah).norm() <= 1e-8 * ctx.d.norm());

  int ours = 0, bench = 0;
  for (int t = 0; t < 20; ++t) {
    TrialOutcome out = run_trial(cfg, ctx, 4, 60, t);
    CHECK_FALSE(out.errored);
    ours += out.success_ours;
    bench += out.success_benchmark;
  }
  CHECK(ours >= 19);
  CHECK(bench >= 19);
}

TEST_CASE("run_curve skips k > m and reports single-trial probabilities") {
  ExperimentConfig cfg = small_config();
  cfg.k_list = {4, 200};
  cfg.cs_ratios = {10.0 / 256.0};
  cfg.trials = 1;
  CurveResult res = run_curve(cfg);
  REQUIRE(res.points.size() == 2);
  CHECK_FALSE(res.points[0].skipped);
  CHECK(res.points[1].skipped);  // k = 200 > m = 10
  const double p = res.points[0].probability_ours();
  CHECK((p == 0.0 || p == 1.0));
  CHECK(res.corollary2_max_dev <= 1e-8);
  CHECK(res.wall_seconds >= 0.0);
}

TEST_CASE("run_curve rejects out-of-range ratios") {
  ExperimentConfig cfg = small_config();
  cfg.cs_ratios = {1.5};  // m would exceed l
  CHECK_THROWS_AS(run_curve(cfg), ParameterError);
}

TEST_CASE("run_curve is deterministic, also across jobs") {
  ExperimentConfig cfg = small_config();
  cfg.cs_ratios = {30.0 / 256.0, 50.0 / 256.0};
  cfg.trials = 12;
  const std::string csv1 = curve_csv(run_curve(cfg));
  const std::string csv2 = curve_csv(run_curve(cfg));
  CHECK(csv1 == csv2);
  cfg.jobs = 4;
  CHECK(curve_csv(run_curve(cfg)) == csv1);
}

TEST_CASE("curve_csv layout") {
  ExperimentConfig cfg = small_config();
  cfg.cs_ratios = {40.0 / 256.0};
  cfg.trials = 5;
  const std::string csv = curve_csv(run_curve(cfg));
  CHECK(csv.rfind("method,k,m,cs_ratio,trials,successes,probability,errors,"
                  "skipped\n", 0) == 0);
  CHECK(csv.find("\nours,4,40,") != std::string::npos);
  CHECK(csv.find("\nbenchmark,4,40,") != std::string::npos);
}

TEST_CASE("head to head: derived sensing matches benchmark closely") {
  ExperimentConfig cfg = small_config();
  cfg.k_list = {4};
  cfg.cs_ratios = {40.0 / 256.0};
  cfg.trials = 200;
  cfg.jobs = 4;
  CurveResult res = run_curve(cfg);
  REQUIRE(res.points.size() == 1);
  const PointResult& pt = res.points[0];
  CHECK(pt.errored == 0);
  CHECK(std::abs(pt.probability_ours() - pt.probability_benchmark()) <= 0.05);
  CHECK(pt.probability_ours() >= 0.9);  // m = 40 >> k = 4 is an easy point
}

TEST_CASE("rip_probe") {
  // square orthonormal operator: rescale is 1 and every ratio is exactly 1
  Matrix q = random_orthonormal(32, 7);
  RipProbeResult ident = rip_probe(q, 3, 50, 21);
  CHECK(ident.samples == 50);
  CHECK(ident.delta_hat <= 1e-10);
  CHECK(ident.ratio_mean == doctest::Approx(1.0).epsilon(1e-10));

  Matrix phi = gaussian_matrix(EnsembleSpec{EnsembleKind::gaussian, 64, 256, 3});
  RipProbeResult g = rip_probe(phi, 5, 200, 22);
  CHECK(g.ratio_mean >= 0.9);
  CHECK(g.ratio_mean <= 1.1);
  CHECK(g.delta_hat > 0.0);
  CHECK(g.delta_hat < 1.0);
}

TEST_CASE("rip_probe sees identical spectra through both Corollary 2 paths") {
  ExperimentConfig cfg = small_config();
  CurveContext ctx = make_curve_context(cfg);
  RowSelector e = row_selector(24, 64, 5);
  Matrix ours = apply_selector(e, ctx.ours_operator_full);
  Matrix equiv = apply_selector(e, ctx.ah);
  RipProbeResult r1 = rip_probe(ours, 4, 100, 31);
  RipProbeResult r2 = rip_probe(equiv, 4, 100, 31);
  CHECK(std::abs(r1.delta_hat - r2.delta_hat) <= 1e-8);
  CHECK(std::abs(r1.ratio_mean - r2.ratio_mean) <= 1e-8);
}

TEST_CASE("concentration_probe") {
  for (EnsembleKind kind : {EnsembleKind::gaussian, EnsembleKind::bernoulli}) {
    EnsembleSpec spec{kind, 128, 1024, 8};
    ConcentrationSummary s = concentration_probe(spec, 64, 300, 9);
    CHECK(s.mean >= 0.97);
    CHECK(s.mean <= 1.03);
    CHECK(s.max_deviation > 0.0);
  }
}

TEST_CASE("write_curve_csv and write_curve_svg produce files") {
  ExperimentConfig cfg = small_config();
  cfg.cs_ratios = {40.0 / 256.0};
  cfg.trials = 5;
  CurveResult res = run_curve(cfg);
  write_curve_csv("/tmp/csfact_test_curve.csv", res);
  write_curve_svg("/tmp/csfact_test_curve.svg", res, 4);
  std::ifstream csv("/tmp/csfact_test_curve.csv");
  CHECK(csv.good());
  std::ifstream svg("/tmp/csfact_test_curve.svg");
  std::string body((std::istreambuf_iterator<char>(svg)),
                   std::istreambuf_iterator<char>());
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("polyline") != std::string::npos);
}
