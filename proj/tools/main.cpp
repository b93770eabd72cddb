// csfact: factorize sparsifying dictionaries as D = G A H, derive the
// row-sampled sensing matrix E G^{-1}, and run sparse-recovery experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "csfact/bench.hpp"
#include "csfact/cosamp.hpp"
#include "csfact/dictionary.hpp"
#include "csfact/factorize.hpp"
#include "csfact/matcore.hpp"

namespace {

using namespace csfact;

EnsembleKind parse_kind(const std::string& s) {
  if (s == "gaussian") return EnsembleKind::gaussian;
  if (s == "bernoulli") return EnsembleKind::bernoulli;
  throw CLI::ValidationError("--kind", "expected gaussian or bernoulli");
}

FactorMethod parse_method(const std::string& s) {
  if (s == "spectral") return FactorMethod::spectral;
  if (s == "tight_frame") return FactorMethod::tight_frame;
  if (s == "gram_schmidt") return FactorMethod::gram_schmidt;
  throw CLI::ValidationError("--method",
                             "expected spectral, tight_frame or gram_schmidt");
}

DictSource parse_dict_source(const std::string& s) {
  if (s == "wavelet") return DictSource::wavelet;
  if (s == "parseval") return DictSource::parseval_random;
  if (s == "file") return DictSource::file;
  throw CLI::ValidationError("--dict-source",
                             "expected wavelet, parseval or file");
}

bool is_csv_path(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
}

void save_matrix(const std::string& path, const Matrix& m) {
  if (is_csv_path(path))
    write_matrix_csv(path, m);
  else
    write_matrix(path, m);
}

Matrix load_matrix(const std::string& path) {
  return is_csv_path(path) ? read_matrix_csv(path) : read_matrix(path);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

// Resolve a seed: an explicit flag wins, otherwise generate one and print it
// so the run can be reproduced.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const std::uint64_t s = fresh_seed();
  std::cerr << "seed not given; generated seed = " << s << "\n";
  return s;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path + ": expected key=value, got '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
  auto starts_with = [&](const char* p) { return preset.rfind(p, 0) == 0; };
  if (starts_with("paper-")) {
    cfg.l = 128;
    cfg.n = 1024;
    cfg.k_list = {10, 12, 14};
    cfg.trials = 2000;
    cfg.wavelet_levels = 5;
  } else if (starts_with("desk-")) {
    cfg.l = 64;
    cfg.n = 256;
    cfg.k_list = {4, 6, 8};
    cfg.trials = 200;
    cfg.wavelet_levels = 2;
  } else {
    throw CLI::ValidationError("--preset", "unknown preset " + preset);
  }
  if (preset.find("-wavelet-") != std::string::npos)
    cfg.dict_source = DictSource::wavelet;
  else if (preset.find("-parseval-") != std::string::npos)
    cfg.dict_source = DictSource::parseval_random;
  else if (preset.find("-ksvd-") != std::string::npos ||
           preset.find("-pksvd-") != std::string::npos)
    cfg.dict_source = DictSource::file;  // trained dictionary imported via --dict
  else
    throw CLI::ValidationError("--preset", "unknown dictionary in " + preset);
  if (preset.size() >= 9 && preset.substr(preset.size() - 9) == "-gaussian")
    cfg.ensemble_kind = EnsembleKind::gaussian;
  else if (preset.size() >= 10 && preset.substr(preset.size() - 10) == "-bernoulli")
    cfg.ensemble_kind = EnsembleKind::bernoulli;
  else
    throw CLI::ValidationError("--preset", "unknown ensemble in " + preset);
}

void log_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment config: dict_source=";
  switch (cfg.dict_source) {
    case DictSource::wavelet: os << "wavelet"; break;
    case DictSource::parseval_random: os << "parseval"; break;
    case DictSource::file: os << "file:" << cfg.dict_path; break;
  }
  os << " ensemble="
     << (cfg.ensemble_kind == EnsembleKind::gaussian ? "gaussian" : "bernoulli")
     << " method=" << to_string(cfg.factor_method) << " l=" << cfg.l
     << " n=" << cfg.n << " k=";
  for (std::size_t i = 0; i < cfg.k_list.size(); ++i)
    os << (i ? "," : "") << cfg.k_list[i];
  os << " ratios=";
  if (cfg.cs_ratios.empty())
    os << "default-grid";
  else
    for (std::size_t i = 0; i < cfg.cs_ratios.size(); ++i)
      os << (i ? "," : "") << cfg.cs_ratios[i];
  os << " trials=" << cfg.trials << " base_seed=" << cfg.base_seed
     << " max_iter=" << cfg.max_iter << " halt_tol=" << cfg.halt_tol
     << " redraw_a=" << cfg.redraw_a_per_trial << " jobs=" << cfg.jobs
     << " levels=" << cfg.wavelet_levels;
  std::cerr << os.str() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"compressive sensing factorization toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a random ensemble matrix");
  std::string gen_kind = "gaussian", gen_out;
  int gen_rows = 0, gen_cols = 0;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--kind", gen_kind, "gaussian or bernoulli");
  gen->add_option("--rows", gen_rows)->required();
  gen->add_option("--cols", gen_cols)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out)->required();

  // ---- dict ----
  auto* dict = app.add_subcommand("dict", "build the CDF 9/7 wavelet dictionary");
  int dict_rows = 128, dict_cols = 1024, dict_levels = 5;
  std::optional<std::uint64_t> dict_seed;
  std::string dict_out;
  dict->add_option("--rows", dict_rows, "signal length l (power of two)");
  dict->add_option("--cols", dict_cols, "total columns n");
  dict->add_option("--levels", dict_levels);
  dict->add_option("--seed", dict_seed, "seed for the random tail columns");
  dict->add_option("--out", dict_out)->required();

  // ---- factorize ----
  auto* fact = app.add_subcommand("factorize", "factor D = G A H");
  std::string fa_dict, fa_a, fa_method = "spectral", fa_o, fa_out_g, fa_out_h,
              fa_report;
  std::uint64_t fa_completion_seed = 0;
  fact->add_option("--dict", fa_dict)->required();
  fact->add_option("--a", fa_a)->required();
  fact->add_option("--method", fa_method);
  fact->add_option("--o", fa_o, "orthonormal O for tight_frame");
  fact->add_option("--completion-seed", fa_completion_seed);
  fact->add_option("--out-g", fa_out_g);
  fact->add_option("--out-h", fa_out_h);
  fact->add_option("--report", fa_report, "validation report CSV");

  // ---- sense ----
  auto* sense = app.add_subcommand("sense", "derive sensing matrix E G^{-1}");
  std::string se_g, se_out, se_indices;
  int se_m = 0;
  std::optional<std::uint64_t> se_seed;
  sense->add_option("--g", se_g)->required();
  sense->add_option("--m", se_m, "number of selected rows")->required();
  sense->add_option("--seed", se_seed);
  sense->add_option("--out", se_out)->required();
  sense->add_option("--indices-out", se_indices, "selected row indices CSV");

  // ---- recover ----
  auto* rec = app.add_subcommand("recover", "CoSaMP sparse recovery");
  std::string re_phi, re_z, re_out;
  int re_k = 0, re_max_iter = 50;
  double re_halt_tol = 1e-6;
  bool re_relax = false;
  rec->add_option("--phi", re_phi)->required();
  rec->add_option("--z", re_z, "measurement vector (CSV)")->required();
  rec->add_option("--k", re_k)->required();
  rec->add_option("--max-iter", re_max_iter);
  rec->add_option("--halt-tol", re_halt_tol);
  rec->add_flag("--allow-underdetermined", re_relax);
  rec->add_option("--out", re_out)->required();

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "recovery-probability curves");
  std::string ex_preset, ex_config_file, ex_dict_source, ex_dict_path,
      ex_ensemble, ex_method, ex_out, ex_svg;
  std::vector<int> ex_k;
  std::vector<double> ex_ratios;
  int ex_l = 0, ex_n = 0, ex_trials = 0, ex_jobs = 0, ex_max_iter = 0,
      ex_levels = 0;
  double ex_halt_tol = 0;
  std::optional<std::uint64_t> ex_seed;
  bool ex_redraw = false;
  exp->add_option("--preset", ex_preset,
                  "{desk,paper}-{wavelet,parseval,ksvd,pksvd}-{gaussian,bernoulli}");
  exp->add_option("--config", ex_config_file, "key=value config file");
  exp->add_option("--dict-source", ex_dict_source);
  exp->add_option("--dict", ex_dict_path, "dictionary file (CSMX or CSV)");
  exp->add_option("--ensemble", ex_ensemble);
  exp->add_option("--method", ex_method);
  exp->add_option("--l", ex_l);
  exp->add_option("--n", ex_n);
  exp->add_option("--k", ex_k, "sparsity levels");
  exp->add_option("--ratios", ex_ratios, "CS ratio grid");
  exp->add_option("--trials", ex_trials);
  exp->add_option("--seed", ex_seed);
  exp->add_option("--jobs", ex_jobs);
  exp->add_option("--max-iter", ex_max_iter);
  exp->add_option("--halt-tol", ex_halt_tol);
  exp->add_option("--levels", ex_levels);
  exp->add_flag("--redraw-a", ex_redraw, "redraw A per trial");
  exp->add_option("--out", ex_out, "results CSV")->required();
  exp->add_option("--svg", ex_svg, "SVG path prefix (one file per k)");

  // ---- probe ----
  auto* probe = app.add_subcommand("probe", "empirical RIP / concentration probes");
  std::string pr_type = "concentration", pr_phi, pr_kind = "gaussian";
  int pr_k = 10, pr_samples = 2000, pr_rows = 128, pr_cols = 1024, pr_m = 64;
  std::optional<std::uint64_t> pr_seed;
  probe->add_option("--type", pr_type, "rip or concentration");
  probe->add_option("--phi", pr_phi, "operator file for rip probe");
  probe->add_option("--k", pr_k);
  probe->add_option("--samples", pr_samples);
  probe->add_option("--kind", pr_kind);
  probe->add_option("--rows", pr_rows);
  probe->add_option("--cols", pr_cols);
  probe->add_option("--m", pr_m);
  probe->add_option("--seed", pr_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors always exit 1
  }

  if (gen->parsed()) {
    EnsembleSpec spec{parse_kind(gen_kind), gen_rows, gen_cols,
                      resolve_seed(gen_seed)};
    std::cerr << "gen: kind=" << gen_kind << " rows=" << gen_rows
              << " cols=" << gen_cols << " seed=" << spec.seed
              << " out=" << gen_out << "\n";
    save_matrix(gen_out, random_matrix(spec));
    return 0;
  }

  if (dict->parsed()) {
    WaveletSpec spec;
    spec.signal_len = dict_rows;
    spec.total_cols = dict_cols;
    spec.levels = dict_levels;
    spec.seed = resolve_seed(dict_seed);
    std::cerr << "dict: l=" << dict_rows << " n=" << dict_cols
              << " levels=" << dict_levels << " seed=" << spec.seed
              << " out=" << dict_out << "\n";
    Matrix d = wavelet_dictionary(spec);
    const FrameDiagnostics diag = frame_diagnostics(d);
    std::cerr << "dict diagnostics: tight_frame_err=" << diag.tight_frame_err
              << " column_norm_max_dev=" << diag.column_norm_max_dev
              << " rank=" << diag.rank << "\n";
    save_matrix(dict_out, d);
    return 0;
  }

  if (fact->parsed()) {
    Matrix d = load_matrix(fa_dict);
    Matrix a = load_matrix(fa_a);
    const double tol = default_rank_tol(static_cast<int>(d.rows()),
                                        static_cast<int>(d.cols()));
    std::cerr << "factorize: dict=" << fa_dict << " a=" << fa_a
              << " method=" << fa_method << " tol=" << tol
              << " completion_seed=" << fa_completion_seed << "\n";
    Factorization f;
    const FactorMethod method = parse_method(fa_method);
    if (method == FactorMethod::spectral)
      f = factor_spectral(d, a, tol, fa_completion_seed);
    else if (method == FactorMethod::gram_schmidt)
      f = factor_gram_schmidt(d, a, tol, fa_completion_seed);
    else {
      std::optional<Matrix> o;
      if (!fa_o.empty()) o = load_matrix(fa_o);
      f = factor_tight_frame(d, a, o, tol, fa_completion_seed);
    }
    const ValidationReport rep = validate(f, d);
    std::cerr << "validation: residual_rel=" << rep.residual_rel
              << " h_orth_err=" << rep.h_orthonormality_err
              << " cond(G)=" << rep.g_condition_number
              << " rank_d=" << rep.rank_d << " rank_a=" << rep.rank_a << "\n";
    if (!fa_out_g.empty()) save_matrix(fa_out_g, f.g);
    if (!fa_out_h.empty()) save_matrix(fa_out_h, f.h);
    if (!fa_report.empty()) {
      std::ostringstream os;
      os << "method,residual_rel,h_orthonormality_err,g_condition_number,"
            "rank_d,rank_a,scale\n";
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%.6e,%.6e,%.6e,%d,%d,%.17g\n",
                    to_string(f.method), rep.residual_rel,
                    rep.h_orthonormality_err, rep.g_condition_number,
                    rep.rank_d, rep.rank_a, f.scale);
      os << line;
      std::ofstream out(fa_report + ".tmp");
      if (!out) throw IoError("cannot open " + fa_report + ".tmp");
      out << os.str();
      out.close();
      if (std::rename((fa_report + ".tmp").c_str(), fa_report.c_str()) != 0)
        throw IoError("rename failed for " + fa_report);
    }
    return 0;
  }

  if (sense->parsed()) {
    Matrix g = load_matrix(se_g);
    const std::uint64_t seed = resolve_seed(se_seed);
    std::cerr << "sense: g=" << se_g << " m=" << se_m << " seed=" << seed
              << "\n";
    Factorization f;
    f.g = g;
    f.a = Matrix::Zero(g.rows(), g.cols());
    f.h = Matrix::Identity(g.cols(), g.cols());
    f.tol = default_rank_tol(static_cast<int>(g.rows()),
                             static_cast<int>(g.cols()));
    const RowSelector e =
        row_selector(se_m, static_cast<int>(g.rows()), seed);
    save_matrix(se_out, sensing_matrix(f, e));
    if (!se_indices.empty()) {
      Matrix idx(1, e.m);
      for (int i = 0; i < e.m; ++i) idx(0, i) = e.indices[i];
      write_matrix_csv(se_indices, idx);
    }
    return 0;
  }

  if (rec->parsed()) {
    RecoveryProblem p;
    p.phi = load_matrix(re_phi);
    Matrix zmat = load_matrix(re_z);
    if (zmat.rows() != 1 && zmat.cols() != 1)
      throw DimensionError("recover: z must be a vector");
    p.z = zmat.rows() == 1 ? Vector(zmat.transpose().col(0)) : Vector(zmat.col(0));
    p.k = re_k;
    p.max_iter = re_max_iter;
    p.halt_tol = re_halt_tol;
    p.allow_underdetermined = re_relax;
    std::cerr << "recover: phi=" << re_phi << " z=" << re_z << " k=" << re_k
              << " max_iter=" << re_max_iter << " halt_tol=" << re_halt_tol
              << "\n";
    const RecoveryResult r = cosamp(p);
    std::cerr << "recover: iterations=" << r.iterations
              << " final_residual=" << r.final_residual
              << " converged=" << r.converged << "\n";
    Matrix x(r.x_hat.size(), 1);
    x.col(0) = r.x_hat;
    save_matrix(re_out, x);
    return 0;
  }

  if (exp->parsed()) {
    ExperimentConfig cfg;  // defaults
    if (!ex_preset.empty()) apply_preset(cfg, ex_preset);
    if (!ex_config_file.empty()) {
      for (const auto& [key, value] : read_config_file(ex_config_file)) {
        if (key == "dict-source") cfg.dict_source = parse_dict_source(value);
        else if (key == "dict") cfg.dict_path = value;
        else if (key == "ensemble") cfg.ensemble_kind = parse_kind(value);
        else if (key == "method") cfg.factor_method = parse_method(value);
        else if (key == "l") cfg.l = std::stoi(value);
        else if (key == "n") cfg.n = std::stoi(value);
        else if (key == "trials") cfg.trials = std::stoi(value);
        else if (key == "seed") cfg.base_seed = std::stoull(value);
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else if (key == "max-iter") cfg.max_iter = std::stoi(value);
        else if (key == "halt-tol") cfg.halt_tol = std::stod(value);
        else if (key == "levels") cfg.wavelet_levels = std::stoi(value);
        else if (key == "k") {
          cfg.k_list.clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) cfg.k_list.push_back(std::stoi(item));
        } else if (key == "ratios") {
          cfg.cs_ratios.clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) cfg.cs_ratios.push_back(std::stod(item));
        } else {
          throw FormatError("config file: unknown key '" + key + "'");
        }
      }
    }
    if (!ex_dict_source.empty()) cfg.dict_source = parse_dict_source(ex_dict_source);
    if (!ex_dict_path.empty()) cfg.dict_path = ex_dict_path;
    if (!ex_ensemble.empty()) cfg.ensemble_kind = parse_kind(ex_ensemble);
    if (!ex_method.empty()) cfg.factor_method = parse_method(ex_method);
    if (ex_l > 0) cfg.l = ex_l;
    if (ex_n > 0) cfg.n = ex_n;
    if (!ex_k.empty()) cfg.k_list = ex_k;
    if (!ex_ratios.empty()) cfg.cs_ratios = ex_ratios;
    if (ex_trials > 0) cfg.trials = ex_trials;
    if (ex_jobs > 0) cfg.jobs = ex_jobs;
    if (ex_max_iter > 0) cfg.max_iter = ex_max_iter;
    if (ex_halt_tol > 0) cfg.halt_tol = ex_halt_tol;
    if (ex_levels > 0) cfg.wavelet_levels = ex_levels;
    if (ex_redraw) cfg.redraw_a_per_trial = true;
    cfg.base_seed = ex_seed ? *ex_seed : resolve_seed(ex_seed);
    if (cfg.dict_source == DictSource::file && cfg.dict_path.empty())
      throw ParameterError("experiment: dictionary file preset requires --dict");
    log_experiment_config(cfg);

    const CurveResult result = run_curve(cfg);
    if (ex_out == "-")
      std::cout << curve_csv(result);
    else
      write_curve_csv(ex_out, result);
    std::cerr << "experiment: corollary2_max_dev=" << result.corollary2_max_dev
              << " wall_seconds=" << result.wall_seconds << "\n";
    if (!ex_svg.empty())
      for (int k : cfg.k_list)
        write_curve_svg(ex_svg + "_k" + std::to_string(k) + ".svg", result, k);
    return 0;
  }

  if (probe->parsed()) {
    const std::uint64_t seed = resolve_seed(pr_seed);
    if (pr_type == "rip") {
      if (pr_phi.empty())
        throw ParameterError("probe --type rip requires --phi");
      Matrix phi = load_matrix(pr_phi);
      std::cerr << "probe rip: phi=" << pr_phi << " k=" << pr_k
                << " samples=" << pr_samples << " seed=" << seed << "\n";
      const RipProbeResult r = rip_probe(phi, pr_k, pr_samples, seed);
      std::printf("k,samples,delta_hat,ratio_mean\n%d,%d,%.6f,%.6f\n", r.k,
                  r.samples, r.delta_hat, r.ratio_mean);
    } else if (pr_type == "concentration") {
      EnsembleSpec spec{parse_kind(pr_kind), pr_rows, pr_cols, seed};
      std::cerr << "probe concentration: kind=" << pr_kind
                << " rows=" << pr_rows << " cols=" << pr_cols << " m=" << pr_m
                << " vectors=" << pr_samples << " seed=" << seed << "\n";
      const ConcentrationSummary s =
          concentration_probe(spec, pr_m, pr_samples, seed);
      std::printf("mean,max_deviation\n%.6f,%.6f\n", s.mean, s.max_deviation);
    } else {
      throw ParameterError("probe: --type must be rip or concentration");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const csfact::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const csfact::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const csfact::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
