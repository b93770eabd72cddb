#ifndef CSFACT_BENCH_HPP
#define CSFACT_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "csfact/ensembles.hpp"
#include "csfact/factorize.hpp"
#include "csfact/matrix.hpp"

namespace csfact {

enum class DictSource { wavelet, parseval_random, file };

struct ExperimentConfig {
  DictSource dict_source = DictSource::wavelet;
  std::string dict_path;  // when dict_source == file
  int wavelet_levels = 5;
  EnsembleKind ensemble_kind = EnsembleKind::gaussian;
  FactorMethod factor_method = FactorMethod::spectral;
  int l = 64;
  int n = 256;
  std::vector<int> k_list = {4, 6, 8};
  std::vector<double> cs_ratios;  // empty: default grid per k
  int trials = 200;
  std::uint64_t base_seed = 1;
  int max_iter = 50;
  double halt_tol = 1e-6;
  bool redraw_a_per_trial = false;
  int jobs = 1;
};

struct PointResult {
  int k = 0;
  int m = 0;
  double cs_ratio = 0.0;
  int trials_run = 0;
  int successes_ours = 0;
  int successes_benchmark = 0;
  int errored = 0;
  bool skipped = false;

  double probability_ours() const {
    return trials_run ? static_cast<double>(successes_ours) / trials_run : 0.0;
  }
  double probability_benchmark() const {
    return trials_run ? static_cast<double>(successes_benchmark) / trials_run
                      : 0.0;
  }
};

struct CurveResult {
  ExperimentConfig config;
  std::vector<PointResult> points;
  double corollary2_max_dev = 0.0;  // spot-checked ||E G^-1 D - E A H||_F / ||D||_F
  double wall_seconds = 0.0;
};

struct RipProbeResult {
  int k = 0;
  int samples = 0;
  double delta_hat = 0.0;  // max |ratio - 1| (empirical lower bound on delta_k)
  double ratio_mean = 0.0;
};

struct ConcentrationSummary {
  double mean = 0.0;
  double max_deviation = 0.0;  // max |ratio - 1|
};

// Fixed per-curve state: the dictionary, A and the factorization are drawn
// once; only the selector and the sparse vector vary across trials.
struct CurveContext {
  Matrix d;
  Matrix a;
  Factorization factorization;
  Matrix ours_operator_full;  // G^{-1} D, l x n
  Matrix ah;                  // A H, l x n (Corollary 2 spot checks)
};

struct TrialOutcome {
  bool success_ours = false;
  bool success_benchmark = false;
  bool errored = false;
};

CurveContext make_curve_context(const ExperimentConfig& config);

TrialOutcome run_trial(const ExperimentConfig& config, const CurveContext& ctx,
                       int k, int m, int trial_index);

CurveResult run_curve(const ExperimentConfig& config);

// Default ratio grid: evenly spaced from (k+2)/n to l/n.
std::vector<double> default_ratio_grid(int k, int l, int n, int points = 10);

RipProbeResult rip_probe(const Matrix& phi, int k, int samples,
                         std::uint64_t seed);

ConcentrationSummary concentration_probe(const EnsembleSpec& ensemble, int m,
                                         int num_vectors, std::uint64_t seed);

// Results CSV (one row per method x point, 6-decimal floats) and an SVG with
// both polylines for a single sparsity level.
std::string curve_csv(const CurveResult& result);
void write_curve_csv(const std::string& path, const CurveResult& result);
void write_curve_svg(const std::string& path, const CurveResult& result, int k);

}  // namespace csfact

#endif
