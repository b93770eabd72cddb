#include "csfact/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>

#include <Eigen/LU>

#include "csfact/cosamp.hpp"
#include "csfact/dictionary.hpp"
#include "csfact/matcore.hpp"
#include "csfact/rng.hpp"

namespace csfact {

namespace {

// stream tags for deterministic seed derivation
constexpr std::uint64_t kTagDict = 0xd1c7;
constexpr std::uint64_t kTagEnsemble = 0xa000;
constexpr std::uint64_t kTagSparse = 0x5bec;
constexpr std::uint64_t kTagSelector = 0x5e1e;
constexpr std::uint64_t kTagUnit = 0x0417;

std::uint64_t point_tag(std::uint64_t tag, int k, int m) {
  return tag ^ (static_cast<std::uint64_t>(k) * 0x100000001b3ULL +
                static_cast<std::uint64_t>(m));
}

Matrix build_dictionary(const ExperimentConfig& config) {
  switch (config.dict_source) {
    case DictSource::wavelet: {
      WaveletSpec spec;
      spec.signal_len = config.l;
      spec.total_cols = config.n;
      spec.levels = config.wavelet_levels;
      spec.seed = derive_seed(config.base_seed, 0, kTagDict);
      return wavelet_dictionary(spec);
    }
    case DictSource::parseval_random: {
      Matrix q = random_orthonormal(config.n,
                                    derive_seed(config.base_seed, 0, kTagDict));
      return q.topRows(config.l);
    }
    case DictSource::file: {
      Matrix d = read_matrix(config.dict_path);
      if (d.rows() != config.l || d.cols() != config.n)
        throw DimensionError("dictionary file is " + std::to_string(d.rows()) +
                             "x" + std::to_string(d.cols()) + ", config wants " +
                             std::to_string(config.l) + "x" +
                             std::to_string(config.n));
      return d;
    }
  }
  throw ParameterError("unknown dictionary source");
}

Factorization factor_by_method(const ExperimentConfig& config, const Matrix& d,
                               const Matrix& a) {
  const double tol = default_rank_tol(config.l, config.n);
  switch (config.factor_method) {
    case FactorMethod::spectral:
      return factor_spectral(d, a, tol);
    case FactorMethod::tight_frame:
      return factor_tight_frame(d, a, std::nullopt, tol);
    case FactorMethod::gram_schmidt:
      return factor_gram_schmidt(d, a, tol);
  }
  throw ParameterError("unknown factorization method");
}

}  // namespace

std::vector<double> default_ratio_grid(int k, int l, int n, int points) {
  const double lo = static_cast<double>(k + 2) / n;
  const double hi = static_cast<double>(l) / n;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

namespace {

CurveContext context_for(const ExperimentConfig& config, Matrix d,
                         std::uint64_t ensemble_seed) {
  CurveContext ctx;
  ctx.d = std::move(d);
  EnsembleSpec espec{config.ensemble_kind, config.l, config.n, ensemble_seed};
  ctx.a = random_matrix(espec);
  ctx.factorization = factor_by_method(config, ctx.d, ctx.a);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(ctx.factorization.g)};
  ctx.ours_operator_full = lu.solve(Eigen::MatrixXd(ctx.d));
  ctx.ah = ctx.a * ctx.factorization.h;
  return ctx;
}

}  // namespace

CurveContext make_curve_context(const ExperimentConfig& config) {
  return context_for(config, build_dictionary(config),
                     derive_seed(config.base_seed, 0, kTagEnsemble));
}

TrialOutcome run_trial(const ExperimentConfig& config, const CurveContext& ctx,
                       int k, int m, int trial_index) {
  TrialOutcome out;
  try {
    const SparseVector xs = sparse_vector(
        config.n, k,
        derive_seed(config.base_seed, trial_index, point_tag(kTagSparse, k, m)));
    const RowSelector e = row_selector(
        m, config.l,
        derive_seed(config.base_seed, trial_index,
                    point_tag(kTagSelector, k, m)));
    const Vector x = xs.dense();

    // ours: measure the synthesized signal D x through S = E G^{-1}, so the
    // recovery operator is S D = E G^{-1} D; benchmark: sense x directly with
    // the row-sampled random ensemble E A
    RecoveryProblem ours;
    ours.phi = apply_selector(e, ctx.ours_operator_full);
    ours.z = ours.phi * x;
    ours.k = k;
    ours.max_iter = config.max_iter;
    ours.halt_tol = config.halt_tol;
    ours.allow_underdetermined = true;

    RecoveryProblem benchmark = ours;
    benchmark.phi = apply_selector(e, ctx.a);
    benchmark.z = benchmark.phi * x;

    out.success_ours = recovery_success(cosamp(ours).x_hat, x);
    out.success_benchmark = recovery_success(cosamp(benchmark).x_hat, x);
  } catch (const Error&) {
    out.errored = true;
  }
  return out;
}

CurveResult run_curve(const ExperimentConfig& config_in) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig config = config_in;
  if (config.dict_source == DictSource::file) {
    Matrix d = read_matrix(config.dict_path);
    config.l = static_cast<int>(d.rows());
    config.n = static_cast<int>(d.cols());
  }
  if (config.trials < 1) throw ParameterError("run_curve: trials must be >= 1");

  CurveResult result;
  result.config = config;
  const CurveContext ctx = make_curve_context(config);
  const double dnorm = ctx.d.norm();

  for (int k : config.k_list) {
    const std::vector<double> ratios =
        config.cs_ratios.empty() ? default_ratio_grid(k, config.l, config.n)
                                 : config.cs_ratios;
    for (double rho : ratios) {
      PointResult point;
      point.k = k;
      point.cs_ratio = rho;
      point.m = static_cast<int>(std::lround(rho * config.n));
      if (point.m < 1 || point.m > config.l)
        throw ParameterError("run_curve: ratio " + std::to_string(rho) +
                             " gives m outside [1, l]");
      if (k > point.m) {
        point.skipped = true;
        result.points.push_back(point);
        continue;
      }

      std::vector<TrialOutcome> outcomes(config.trials);
      auto worker = [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
          if (config.redraw_a_per_trial) {
            // same dictionary, fresh A (and factorization) for every trial
            try {
              const CurveContext trial_ctx = context_for(
                  config, ctx.d,
                  derive_seed(config.base_seed, t,
                              point_tag(kTagEnsemble, k, point.m)));
              outcomes[t] = run_trial(config, trial_ctx, k, point.m, t);
            } catch (const Error&) {
              outcomes[t].errored = true;
            }
          } else {
            outcomes[t] = run_trial(config, ctx, k, point.m, t);
          }
        }
      };
      const int jobs = std::max(1, config.jobs);
      if (jobs == 1 || config.trials < 2 * jobs) {
        worker(0, config.trials);
      } else {
        std::vector<std::future<void>> futures;
        const int chunk = (config.trials + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
          const int begin = j * chunk;
          const int end = std::min(config.trials, begin + chunk);
          if (begin >= end) break;
          futures.push_back(
              std::async(std::launch::async, worker, begin, end));
        }
        for (auto& f : futures) f.get();
      }

      // ordered reduction so concurrency cannot change the output bytes
      for (const TrialOutcome& o : outcomes) {
        if (o.errored) {
          ++point.errored;
          continue;
        }
        ++point.trials_run;
        point.successes_ours += o.success_ours;
        point.successes_benchmark += o.success_benchmark;
      }

      // Corollary 2 spot check on 1% of trials
      for (int t = 0; t < config.trials; t += 100) {
        const RowSelector e = row_selector(
            point.m, config.l,
            derive_seed(config.base_seed, t,
                        point_tag(kTagSelector, k, point.m)));
        const double dev = (apply_selector(e, ctx.ours_operator_full) -
                            apply_selector(e, ctx.ah))
                               .norm() /
                           dnorm;
        result.corollary2_max_dev = std::max(result.corollary2_max_dev, dev);
      }
      result.points.push_back(point);
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

RipProbeResult rip_probe(const Matrix& phi, int k, int samples,
                         std::uint64_t seed) {
  const int n = static_cast<int>(phi.cols());
  const int m = static_cast<int>(phi.rows());
  if (k < 1 || k > n) throw ParameterError("rip_probe: need 1 <= k <= n");
  if (samples < 1) throw ParameterError("rip_probe: samples must be >= 1");
  const double rescale = std::sqrt(static_cast<double>(n) / m);
  RipProbeResult out;
  out.k = k;
  out.samples = samples;
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector x = sparse_vector(n, k, derive_seed(seed, s, kTagSparse)).dense();
    x /= x.norm();
    const double ratio = (rescale * (phi * x)).squaredNorm();
    sum += ratio;
    out.delta_hat = std::max(out.delta_hat, std::abs(ratio - 1.0));
  }
  out.ratio_mean = sum / samples;
  return out;
}

ConcentrationSummary concentration_probe(const EnsembleSpec& ensemble, int m,
                                         int num_vectors, std::uint64_t seed) {
  if (m < 1 || m > ensemble.rows)
    throw ParameterError("concentration_probe: need 1 <= m <= rows");
  const Matrix a = random_matrix(ensemble);
  const double rescale = static_cast<double>(ensemble.cols) / m;
  ConcentrationSummary out;
  double sum = 0.0;
  for (int v = 0; v < num_vectors; ++v) {
    Rng rng(derive_seed(seed, v, kTagUnit));
    Vector x(ensemble.cols);
    for (int i = 0; i < ensemble.cols; ++i) x(i) = rng.next_normal();
    x /= x.norm();
    const RowSelector e =
        row_selector(m, ensemble.rows, derive_seed(seed, v, kTagSelector));
    const double ratio = rescale * (apply_selector(e, a) * x).squaredNorm();
    sum += ratio;
    out.max_deviation = std::max(out.max_deviation, std::abs(ratio - 1.0));
  }
  out.mean = sum / num_vectors;
  return out;
}

std::string curve_csv(const CurveResult& result) {
  std::string out = "method,k,m,cs_ratio,trials,successes,probability,errors,skipped\n";
  char line[256];
  for (const char* method : {"ours", "benchmark"}) {
    const bool ours = std::string(method) == "ours";
    for (const PointResult& p : result.points) {
      std::snprintf(line, sizeof(line), "%s,%d,%d,%.6f,%d,%d,%.6f,%d,%d\n",
                    method, p.k, p.m, p.cs_ratio, p.trials_run,
                    ours ? p.successes_ours : p.successes_benchmark,
                    ours ? p.probability_ours() : p.probability_benchmark(),
                    p.errored, p.skipped ? 1 : 0);
      out += line;
    }
  }
  return out;
}

void write_curve_csv(const std::string& path, const CurveResult& result) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp);
    out << curve_csv(result);
    if (!out) throw IoError("write failed on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("rename " + tmp + " -> " + path + " failed");
}

void write_curve_svg(const std::string& path, const CurveResult& result,
                     int k) {
  constexpr int w = 640, h = 440, ml = 60, mr = 20, mt = 30, mb = 50;
  std::vector<const PointResult*> pts;
  for (const PointResult& p : result.points)
    if (p.k == k && !p.skipped) pts.push_back(&p);
  if (pts.empty()) throw ParameterError("write_curve_svg: no points for k");
  double xmin = pts.front()->cs_ratio, xmax = pts.back()->cs_ratio;
  if (xmax <= xmin) xmax = xmin + 1e-9;
  auto sx = [&](double r) {
    return ml + (r - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto sy = [&](double p) { return h - mb - p * (h - mt - mb); };

  std::string svg;
  char buf[512];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\">\n";
  std::snprintf(buf, sizeof(buf),
                "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n"
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                w, h, ml, h - mb, w - mr, h - mb, ml, mt, ml, h - mb);
  svg += buf;
  for (const char* method : {"ours", "benchmark"}) {
    const bool ours = std::string(method) == "ours";
    std::string poly;
    for (const PointResult* p : pts) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p->cs_ratio),
                    sy(ours ? p->probability_ours() : p->probability_benchmark()));
      poly += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" "
                  "points=\"%s\"/>\n",
                  ours ? "blue" : "red", poly.c_str());
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-size=\"14\">k = %d  "
                "(blue: factorized sensing, red: benchmark)</text>\n"
                "<text x=\"%d\" y=\"%d\" font-size=\"12\">CS ratio m/n</text>\n"
                "<text x=\"12\" y=\"%d\" font-size=\"12\" transform=\"rotate(-90 "
                "12 %d)\">recovery probability</text>\n",
                ml, mt - 10, k, (w - ml) / 2, h - 15, h / 2, h / 2);
  svg += buf;
  svg += "</svg>\n";

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp);
    out << svg;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("rename " + tmp + " -> " + path + " failed");
}

}  // namespace csfact
