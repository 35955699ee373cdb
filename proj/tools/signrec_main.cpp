// Batch front end for the sign-recovery toolkit: data generation, sparse
// solvers, certificates, bound evaluation, penalty calibration and the
// replicate engine.  Diagnostics go to stderr; data goes to files or stdout.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "signrec/amp.hpp"
#include "signrec/conditions.hpp"
#include "signrec/curves.hpp"
#include "signrec/errors.hpp"
#include "signrec/experiments.hpp"
#include "signrec/generate.hpp"
#include "signrec/io.hpp"
#include "signrec/parallel.hpp"
#include "signrec/recovery_bound.hpp"
#include "signrec/solvers.hpp"
#include "signrec/thresholding.hpp"

namespace {

using json = nlohmann::json;
using namespace signrec;

// Accepts "a..b", "a..b..step" and comma lists like "1,2,5".
std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  auto parse_one = [](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end && *end != '\0'))
      throw ParameterError("bad number in list: '" + s + "'");
    return v;
  };
  auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    std::string a = text.substr(0, range_pos);
    std::string rest = text.substr(range_pos + 2);
    double step = 1.0;
    auto step_pos = rest.find("..");
    if (step_pos != std::string::npos) {
      step = parse_one(rest.substr(step_pos + 2));
      rest = rest.substr(0, step_pos);
    }
    double lo = parse_one(a), hi = parse_one(rest);
    if (!(step > 0)) throw ParameterError("range step must be positive");
    if (hi < lo) throw ParameterError("range end below range start");
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (!piece.empty()) out.push_back(parse_one(piece));
  }
  if (out.empty()) throw ParameterError("empty value list: '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_value_list(text)) {
    int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9)
      throw ParameterError("expected integers in list: '" + text + "'");
    out.push_back(i);
  }
  return out;
}

DesignMatrix load_design(const std::string& path) {
  DesignMatrix d;
  d.entries = read_matrix_auto(path);
  d.setting = DesignSetting::Custom;
  d.validate();
  return d;
}

SignMode parse_sign_mode(const std::string& s) {
  if (s == "symmetric") return SignMode::Symmetric;
  if (s == "positive") return SignMode::Positive;
  throw ParameterError("sign mode must be 'symmetric' or 'positive'");
}

void add_threads_option(CLI::App* cmd, int& threads) {
  cmd->add_option("--threads", threads,
                  "worker threads (0 = hardware concurrency)")
      ->envname("SIGNREC_THREADS");
}

json certificate_json(const CertificateReport& rep) {
  json j;
  j["indicator"] = rep.indicator;
  j["margin"] = rep.margin;
  if (rep.boundary) j["boundary"] = true;
  return j;
}

struct CliState {
  // gen
  std::string gen_setting = "setting1";
  long gen_n = 0, gen_p = 0;
  double gen_rho = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;

  // solve
  std::string solve_matrix, solve_response, solve_method = "lasso";
  std::string solve_pilot, solve_out;
  double solve_lambda = -1.0, solve_R = -1.0;
  double solve_tol = 1e-9;
  long solve_max_iters = 1000000;

  // certify
  std::string cert_matrix, cert_sign;
  bool cert_skip_kernel = false;

  // curve
  std::string curve_matrix, curve_kind = "both", curve_k, curve_out;
  std::string curve_sign_mode = "symmetric";
  long curve_samples = 1000;
  std::uint64_t curve_seed = 0;
  int curve_threads = 1;

  // bound
  std::string bound_matrix, bound_sign;
  double bound_sigma = 1.0, bound_lambda = 0.0;
  long bound_draws = 1000;
  std::uint64_t bound_seed = 0;
  int bound_threads = 1;

  // calibrate
  std::string cal_matrix, cal_sign_mode = "symmetric";
  int cal_k = 5;
  double cal_sigma = 1.0, cal_target = 0.95;
  long cal_signs = 1000, cal_draws = 1000;
  std::uint64_t cal_seed = 0;
  int cal_threads = 1;

  // amp
  double amp_delta = 1.0 / 3.0, amp_gamma = 0.0, amp_t = 1.0, amp_sigma = 1.0;

  // knockoff-threshold
  std::string kt_matrix, kt_estimator = "lasso", kt_mode = "simulation";
  std::string kt_response, kt_sign_mode = "symmetric";
  double kt_lambda = 0.0, kt_sigma = 1.0, kt_t = 1.0;
  int kt_k = 1;
  KnockoffConfig kt_cfg;
  std::uint64_t kt_seed = 0;
  int kt_threads = 1;

  // fn-threshold
  std::string fn_matrix;
  double fn_sigma = 1.0, fn_alpha = 0.05;
  long fn_replicates = 1000;
  std::uint64_t fn_seed = 0;
  int fn_threads = 1;

  // experiment
  std::string exp_matrix, exp_label = "custom", exp_sign_mode = "symmetric";
  std::string exp_k, exp_t = "0.5,1,2,4,8,16,32,100,1000";
  std::string exp_estimators = "L,aL,BP,BPk,Lk,Lks", exp_out;
  long exp_replicates = 1000;
  double exp_sigma = 1.0;
  std::uint64_t exp_seed = 0;
  int exp_threads = 1;
  double exp_lambda_l = -1.0;
  int exp_calib_k = 5;
  double exp_calib_target = 0.95;
  long exp_calib_signs = 1000, exp_calib_draws = 1000, exp_mc_draws = 1000;
  KnockoffConfig exp_knockoff;
  double exp_fn_alpha = 0.05;
  long exp_fn_replicates = 1000;
};

int run_gen(const CliState& st) {
  DesignSetting setting;
  if (st.gen_setting == "setting1")
    setting = DesignSetting::Setting1;
  else if (st.gen_setting == "setting2")
    setting = DesignSetting::Setting2;
  else
    throw ParameterError("gen: --setting must be setting1 or setting2");
  DesignMatrix d = gen_design(setting, st.gen_n, st.gen_p, st.gen_rho,
                              RngStream(st.gen_seed));
  write_matrix_auto(st.gen_out, d.entries);
  std::cerr << "gen: wrote " << d.n() << "x" << d.p() << " matrix to "
            << st.gen_out << "\n";
  return 0;
}

int run_solve(const CliState& st) {
  DesignMatrix X = load_design(st.solve_matrix);
  Vec y = read_vector_csv(st.solve_response);
  LassoConfig cfg;
  cfg.tol = st.solve_tol;
  cfg.max_iters = st.solve_max_iters;

  SolverSolution sol;
  if (st.solve_method == "lasso") {
    if (st.solve_lambda < 0) throw ParameterError("solve: lasso needs --lambda");
    sol = lasso(y, X, st.solve_lambda, cfg);
  } else if (st.solve_method == "adaptive") {
    if (st.solve_lambda < 0)
      throw ParameterError("solve: adaptive needs --lambda");
    if (st.solve_pilot.empty())
      throw ParameterError("solve: adaptive needs --pilot");
    Vec pilot = read_vector_csv(st.solve_pilot);
    sol = adaptive_lasso(y, X, st.solve_lambda, pilot, cfg);
  } else if (st.solve_method == "bp") {
    sol = basis_pursuit(y, X);
  } else if (st.solve_method == "bpdn") {
    if (st.solve_R < 0) throw ParameterError("solve: bpdn needs --R");
    sol = bpdn(y, X, st.solve_R, cfg);
  } else {
    throw ParameterError("solve: unknown method '" + st.solve_method + "'");
  }

  if (st.solve_out.empty())
    write_solution_csv(std::cout, sol);
  else
    write_solution_csv(std::filesystem::path(st.solve_out), sol);
  std::cerr << "solve: " << st.solve_method << " finished, objective "
            << format_double(sol.objective) << ", optimality gap "
            << format_double(sol.kkt_gap) << "\n";
  return 0;
}

int run_certify(const CliState& st) {
  DesignMatrix X = load_design(st.cert_matrix);
  SignVector s = read_sign_csv(st.cert_sign);
  json j;
  j["k"] = s.k();
  j["irrepresentability"] = certificate_json(irrepresentability_indicator(X, s));
  j["identifiability"] = certificate_json(identifiability_indicator(X, s));
  if (!st.cert_skip_kernel)
    j["kernel"] = certificate_json(kernel_certificate(X, s));
  double cb = mutual_coherence_bound(X);
  j["coherence_sparsity_bound"] =
      std::isfinite(cb) ? json(cb) : json("inf");
  std::cout << j.dump() << "\n";
  return 0;
}

int run_curve(const CliState& st) {
  DesignMatrix X = load_design(st.curve_matrix);
  bool want_ic = st.curve_kind == "ic" || st.curve_kind == "both";
  bool want_idtf = st.curve_kind == "idtf" || st.curve_kind == "both";
  if (!want_ic && !want_idtf)
    throw ParameterError("curve: --kind must be ic, idtf or both");
  std::vector<int> ks = parse_int_list(st.curve_k);
  CurveResult r = certificate_curves(
      X, want_ic, want_idtf, ks, st.curve_samples,
      parse_sign_mode(st.curve_sign_mode), RngStream(st.curve_seed),
      st.curve_threads);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!st.curve_out.empty()) {
    file.open(st.curve_out);
    if (!file) throw ParameterError(st.curve_out + ": cannot open for writing");
    out = &file;
  }
  *out << "kind,k,p_hat,std_err,n_samples\n";
  auto emit = [&](const char* kind, const std::vector<CurvePoint>& pts) {
    for (const auto& pt : pts)
      *out << kind << ',' << pt.k << ',' << format_double(pt.p_hat) << ','
           << format_double(pt.std_err) << ',' << pt.n_samples << '\n';
  };
  if (want_ic) emit("ic", r.ic);
  if (want_idtf) emit("idtf", r.idtf);
  return 0;
}

int run_bound(const CliState& st) {
  DesignMatrix X = load_design(st.bound_matrix);
  SignVector s = read_sign_csv(st.bound_sign);
  if (!(st.bound_lambda > 0)) throw ParameterError("bound: needs --lambda > 0");
  ZetaContext ctx = build_zeta_context(X, s, st.bound_sigma, st.bound_lambda);
  McEstimate est = mc_bound(ctx, st.bound_draws, RngStream(st.bound_seed),
                            st.bound_threads);
  json j;
  j["lambda"] = st.bound_lambda;
  j["p_hat"] = est.p_hat;
  j["std_err"] = est.std_err;
  j["n_draws"] = est.n_draws;
  j["seed"] = st.bound_seed;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_calibrate(const CliState& st) {
  DesignMatrix X = load_design(st.cal_matrix);
  CalibrationResult r = calibrate_lambda_full(
      X, st.cal_k, st.cal_sigma, st.cal_target, st.cal_signs, st.cal_draws,
      parse_sign_mode(st.cal_sign_mode), RngStream(st.cal_seed),
      st.cal_threads);
  json j;
  j["lambda"] = r.lambda;
  j["p_hat"] = r.p_hat;
  j["std_err"] = r.std_err;
  j["n_signs"] = r.n_signs;
  j["n_draws"] = r.n_draws;
  j["max_achievable"] = r.max_achievable;
  j["non_monotone"] = r.non_monotone;
  j["seed"] = st.cal_seed;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_amp(const CliState& st) {
  AmpProblem prob;
  prob.delta = st.amp_delta;
  prob.gamma = st.amp_gamma;
  prob.t = st.amp_t;
  prob.sigma = st.amp_sigma;
  AmpCalibration cal = optimal_lambda_amp(prob);
  json j;
  j["alpha"] = cal.alpha;
  j["tau"] = cal.tau;
  j["lambda"] = cal.lambda;
  j["lambda_half"] = 0.5 * cal.lambda;
  j["mse"] = cal.mse;
  j["capped"] = cal.capped;
  j["alpha_min"] = alpha_min(prob.delta);
  std::cout << j.dump() << "\n";
  return 0;
}

int run_knockoff_threshold(const CliState& st) {
  DesignMatrix X = load_design(st.kt_matrix);

  AugmentedEstimator est;
  if (st.kt_estimator == "lasso") {
    if (!(st.kt_lambda > 0))
      throw ParameterError("knockoff-threshold: lasso estimator needs --lambda > 0");
    double lam = st.kt_lambda;
    est = [lam](const DesignMatrix& aug, const Vec& y) {
      return lasso(y, aug, lam).estimate;
    };
  } else if (st.kt_estimator == "bp") {
    est = [](const DesignMatrix& aug, const Vec& y) {
      return basis_pursuit(y, aug).estimate;
    };
  } else {
    throw ParameterError("knockoff-threshold: --estimator must be lasso or bp");
  }

  std::function<Vec(RngStream)> make_response;
  if (st.kt_mode == "simulation") {
    double sigma = st.kt_sigma, t = st.kt_t;
    int k = st.kt_k;
    SignMode mode = parse_sign_mode(st.kt_sign_mode);
    DesignMatrix* Xp = &X;
    make_response = [Xp, sigma, t, k, mode](RngStream stream) {
      SignVector s = sample_sign_vector(Xp->p(), k, mode, stream.child(0));
      RngStream noise = stream.child(1);
      Vec eps = sigma * normal_vector(Xp->n(), noise);
      return Vec(Xp->entries * (t * s.values.cast<double>()) + eps);
    };
  } else if (st.kt_mode == "conditional") {
    if (st.kt_response.empty())
      throw ParameterError("knockoff-threshold: conditional mode needs --response");
    Vec y = read_vector_csv(st.kt_response);
    make_response = [y](RngStream) { return y; };
  } else {
    throw ParameterError("knockoff-threshold: --mode must be simulation or conditional");
  }

  double tau = knockoff_threshold(X, make_response, est, st.kt_cfg,
                                  RngStream(st.kt_seed), st.kt_threads);
  json j;
  j["tau"] = tau;
  j["quantile"] = st.kt_cfg.quantile;
  j["n_replicates"] = st.kt_cfg.n_replicates;
  j["seed"] = st.kt_seed;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_fn_threshold(const CliState& st) {
  DesignMatrix X = load_design(st.fn_matrix);
  double tau = full_null_threshold(X, st.fn_sigma, st.fn_alpha,
                                   st.fn_replicates, RngStream(st.fn_seed),
                                   st.fn_threads);
  json j;
  j["tau"] = tau;
  j["alpha"] = st.fn_alpha;
  j["n_replicates"] = st.fn_replicates;
  j["seed"] = st.fn_seed;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_experiment(const CliState& st) {
  auto design = std::make_shared<DesignMatrix>(load_design(st.exp_matrix));
  ExperimentPlan plan;
  plan.design = design;
  plan.setting_label = st.exp_label;
  plan.sign_mode = parse_sign_mode(st.exp_sign_mode);
  plan.k_list = parse_int_list(st.exp_k);
  plan.t_grid = parse_value_list(st.exp_t);
  {
    std::stringstream ss(st.exp_estimators);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      auto e = parse_estimator(piece);
      if (!e)
        throw ParameterError("experiment: unknown estimator '" + piece + "'");
      plan.estimators.push_back(*e);
    }
    if (plan.estimators.empty())
      throw ParameterError("experiment: no estimators given");
  }
  plan.n_replicates = st.exp_replicates;
  plan.sigma = st.exp_sigma;
  plan.master_seed = st.exp_seed;
  plan.threads = st.exp_threads;
  if (st.exp_lambda_l > 0) plan.lambda_l = st.exp_lambda_l;
  plan.calibration_k = st.exp_calib_k;
  plan.calibration_target = st.exp_calib_target;
  plan.calibration_signs = st.exp_calib_signs;
  plan.calibration_draws = st.exp_calib_draws;
  plan.mc_bound_draws = st.exp_mc_draws;
  plan.knockoff = st.exp_knockoff;
  plan.fn_alpha = st.exp_fn_alpha;
  plan.fn_replicates = st.exp_fn_replicates;

  PlanResult result = run_plan(plan);
  write_results_csv(st.exp_out, plan, result);
  std::cerr << "experiment: " << result.cells.size() << " cells written to "
            << st.exp_out << "\n";
  for (const auto& e : result.errors)
    std::cerr << "experiment: cell (" << estimator_code(e.estimator) << ", k="
              << e.k << ", t=" << e.t << ") failed: " << e.message << "\n";
  return result.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sign recovery toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file merged under explicit flags");
  CliState st;

  auto* gen = app.add_subcommand("gen", "generate a random design matrix");
  gen->add_option("--setting", st.gen_setting, "setting1 | setting2");
  gen->add_option("--n", st.gen_n, "rows")->required();
  gen->add_option("--p", st.gen_p, "columns")->required();
  gen->add_option("--rho", st.gen_rho, "row correlation (setting2)");
  gen->add_option("--seed", st.gen_seed, "master seed")->required();
  gen->add_option("--out", st.gen_out, ".srx or .csv output path")->required();

  auto* solve = app.add_subcommand("solve", "run a sparse solver");
  solve->add_option("--matrix", st.solve_matrix, "design file")->required();
  solve->add_option("--response", st.solve_response, "response CSV")->required();
  solve->add_option("--method", st.solve_method, "lasso | adaptive | bp | bpdn");
  solve->add_option("--lambda", st.solve_lambda, "penalty level");
  solve->add_option("--R", st.solve_R, "residual budget (bpdn)");
  solve->add_option("--pilot", st.solve_pilot, "pilot estimate CSV (adaptive)");
  solve->add_option("--tol", st.solve_tol, "optimality gap tolerance");
  solve->add_option("--max-iters", st.solve_max_iters, "sweep budget");
  solve->add_option("--out", st.solve_out, "solution CSV (stdout if omitted)");

  auto* certify = app.add_subcommand("certify", "certificates for one sign pattern");
  certify->add_option("--matrix", st.cert_matrix, "design file")->required();
  certify->add_option("--sign", st.cert_sign, "sign CSV")->required();
  certify->add_flag("--skip-kernel", st.cert_skip_kernel,
                    "skip the kernel program (faster on large designs)");

  auto* curve = app.add_subcommand("curve", "certificate probability curves over k");
  curve->add_option("--matrix", st.curve_matrix, "design file")->required();
  curve->add_option("--kind", st.curve_kind, "ic | idtf | both");
  curve->add_option("--k", st.curve_k, "k grid, e.g. 1..40 or 5,15,25")->required();
  curve->add_option("--samples", st.curve_samples, "sign draws per k");
  curve->add_option("--sign-mode", st.curve_sign_mode, "symmetric | positive");
  curve->add_option("--seed", st.curve_seed, "master seed")->required();
  curve->add_option("--out", st.curve_out, "CSV output (stdout if omitted)");
  add_threads_option(curve, st.curve_threads);

  auto* bound = app.add_subcommand("bound", "Monte Carlo sign-consistency bound");
  bound->add_option("--matrix", st.bound_matrix, "design file")->required();
  bound->add_option("--sign", st.bound_sign, "sign CSV")->required();
  bound->add_option("--sigma", st.bound_sigma, "noise level");
  bound->add_option("--lambda", st.bound_lambda, "penalty level")->required();
  bound->add_option("--draws", st.bound_draws, "noise draws");
  bound->add_option("--seed", st.bound_seed, "master seed")->required();
  add_threads_option(bound, st.bound_threads);

  auto* cal = app.add_subcommand("calibrate", "penalty level hitting a bound target");
  cal->add_option("--matrix", st.cal_matrix, "design file")->required();
  cal->add_option("--k", st.cal_k, "sparsity of the random sign patterns");
  cal->add_option("--sigma", st.cal_sigma, "noise level");
  cal->add_option("--target", st.cal_target, "averaged bound target");
  cal->add_option("--signs", st.cal_signs, "sign draws");
  cal->add_option("--draws", st.cal_draws, "noise draws per sign");
  cal->add_option("--sign-mode", st.cal_sign_mode, "symmetric | positive");
  cal->add_option("--seed", st.cal_seed, "master seed")->required();
  add_threads_option(cal, st.cal_threads);

  auto* amp = app.add_subcommand("amp", "MSE-optimal penalty from problem shape");
  amp->add_option("--delta", st.amp_delta, "undersampling n/p")->required();
  amp->add_option("--gamma", st.amp_gamma, "sparsity fraction k/p")->required();
  amp->add_option("--t", st.amp_t, "signal magnitude")->required();
  amp->add_option("--sigma", st.amp_sigma, "noise level");

  auto* kt = app.add_subcommand("knockoff-threshold",
                                "threshold from appended null columns");
  kt->add_option("--matrix", st.kt_matrix, "design file")->required();
  kt->add_option("--estimator", st.kt_estimator, "lasso | bp");
  kt->add_option("--lambda", st.kt_lambda, "penalty for the lasso estimator");
  kt->add_option("--mode", st.kt_mode, "simulation | conditional");
  kt->add_option("--response", st.kt_response, "response CSV (conditional mode)");
  kt->add_option("--k", st.kt_k, "signal sparsity (simulation mode)");
  kt->add_option("--t", st.kt_t, "signal magnitude (simulation mode)");
  kt->add_option("--sigma", st.kt_sigma, "noise level (simulation mode)");
  kt->add_option("--sign-mode", st.kt_sign_mode, "symmetric | positive");
  kt->add_option("--batch-columns", st.kt_cfg.batch_columns, "null columns per batch");
  kt->add_option("--batches", st.kt_cfg.batches, "batches per replicate");
  kt->add_option("--replicates", st.kt_cfg.n_replicates, "replicates");
  kt->add_option("--quantile", st.kt_cfg.quantile, "order statistic level");
  kt->add_option("--rho", st.kt_cfg.rho, "row correlation of the design model");
  kt->add_flag("--naive-iid", st.kt_cfg.naive_iid,
               "draw iid null columns even when rho > 0");
  kt->add_option("--seed", st.kt_seed, "master seed")->required();
  add_threads_option(kt, st.kt_threads);

  auto* fn = app.add_subcommand("fn-threshold", "pure-noise threshold");
  fn->add_option("--matrix", st.fn_matrix, "design file")->required();
  fn->add_option("--sigma", st.fn_sigma, "noise level");
  fn->add_option("--alpha", st.fn_alpha, "tail level");
  fn->add_option("--replicates", st.fn_replicates, "noise replicates");
  fn->add_option("--seed", st.fn_seed, "master seed")->required();
  add_threads_option(fn, st.fn_threads);

  auto* exp = app.add_subcommand("experiment", "replicate engine over (k, t, estimator)");
  exp->add_option("--matrix", st.exp_matrix, "design file")->required();
  exp->add_option("--setting-label", st.exp_label, "label for the results table");
  exp->add_option("--sign-mode", st.exp_sign_mode, "symmetric | positive");
  exp->add_option("--k", st.exp_k, "k list")->required();
  exp->add_option("--t", st.exp_t, "t grid (default brackets the transition regions)");
  exp->add_option("--estimators", st.exp_estimators, "comma list of L,aL,BP,BPk,Lk,Lks");
  exp->add_option("--replicates", st.exp_replicates, "replicates per cell");
  exp->add_option("--sigma", st.exp_sigma, "noise level");
  exp->add_option("--seed", st.exp_seed, "master seed")->required();
  exp->add_option("--out", st.exp_out, "results CSV path")->required();
  exp->add_option("--lambda-L", st.exp_lambda_l, "preset calibrated penalty");
  exp->add_option("--calib-k", st.exp_calib_k, "calibration sparsity");
  exp->add_option("--calib-target", st.exp_calib_target, "calibration target");
  exp->add_option("--calib-signs", st.exp_calib_signs, "calibration sign draws");
  exp->add_option("--calib-draws", st.exp_calib_draws, "calibration noise draws");
  exp->add_option("--mc-draws", st.exp_mc_draws, "bound draws per replicate");
  exp->add_option("--knockoff-replicates", st.exp_knockoff.n_replicates,
                  "threshold-selection replicates");
  exp->add_option("--knockoff-batches", st.exp_knockoff.batches, "batches per replicate");
  exp->add_option("--knockoff-batch-columns", st.exp_knockoff.batch_columns,
                  "null columns per batch");
  exp->add_option("--knockoff-quantile", st.exp_knockoff.quantile, "threshold quantile");
  exp->add_option("--rho", st.exp_knockoff.rho, "row correlation of the design model");
  exp->add_flag("--naive-iid", st.exp_knockoff.naive_iid,
                "iid null columns even when rho > 0");
  exp->add_option("--fn-alpha", st.exp_fn_alpha, "full-null tail level");
  exp->add_option("--fn-replicates", st.exp_fn_replicates, "full-null replicates");
  add_threads_option(exp, st.exp_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(st);
    if (solve->parsed()) return run_solve(st);
    if (certify->parsed()) return run_certify(st);
    if (curve->parsed()) return run_curve(st);
    if (bound->parsed()) return run_bound(st);
    if (cal->parsed()) return run_calibrate(st);
    if (amp->parsed()) return run_amp(st);
    if (kt->parsed()) return run_knockoff_threshold(st);
    if (fn->parsed()) return run_fn_threshold(st);
    if (exp->parsed()) return run_experiment(st);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
