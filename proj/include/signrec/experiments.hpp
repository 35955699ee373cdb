#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signrec/amp.hpp"
#include "signrec/rng.hpp"
#include "signrec/solvers.hpp"
#include "signrec/thresholding.hpp"
#include "signrec/types.hpp"

namespace signrec {

// Sign estimators compared by the replicate engine.
//
//   L    sign of the penalized least-squares fit at the calibrated penalty
//   aL   sign of the reweighted fit (pilot at the MSE-optimal penalty,
//        outer solve at the calibrated penalty)
//   BP   equality-constrained l1 fit cut at the full-null threshold
//   BPk  equality-constrained l1 fit cut at its knockoff threshold
//   Lk   fit at the MSE-optimal penalty cut at its knockoff threshold
//   Lks  fit at half the MSE-optimal penalty cut at its knockoff threshold
enum class Estimator { L, aL, BP, BPk, Lk, Lks };

std::string estimator_code(Estimator e);
std::optional<Estimator> parse_estimator(const std::string& code);

struct ExperimentPlan {
  std::shared_ptr<const DesignMatrix> design;
  std::string setting_label = "custom";
  SignMode sign_mode = SignMode::Symmetric;
  std::vector<int> k_list;
  std::vector<double> t_grid;
  std::vector<Estimator> estimators;
  long n_replicates = 1000;
  double sigma = 1.0;
  std::uint64_t master_seed = 0;
  int threads = 1;
  LassoConfig solver;

  // Penalty calibration for the L / aL outer solves: done once per plan at
  // this sparsity and success target unless lambda_l is preset.
  std::optional<double> lambda_l;
  int calibration_k = 5;
  double calibration_target = 0.95;
  long calibration_signs = 1000;
  long calibration_draws = 1000;

  long mc_bound_draws = 1000;  // per-replicate draws behind the reported bound

  KnockoffConfig knockoff;  // n_replicates/quantile/batches for threshold selection
  double fn_alpha = 0.05;
  long fn_replicates = 1000;

  // Tuning tables filled by prepare_tuning (or preset by the caller).
  std::map<std::pair<int, double>, AmpCalibration> amp;  // by (k, t)
  std::map<std::tuple<Estimator, int, double>, double> taus;  // by (estimator, k, t)
  std::optional<double> fn_tau;

  void validate() const;
};

struct CellResult {
  std::string setting;
  Estimator estimator = Estimator::L;
  int k = 0;
  double t = 0.0;
  long n_replicates = 0;
  double fwer = 0.0;
  double fwer_se = 0.0;
  double recovery_prob = 0.0;
  double recovery_se = 0.0;
  double support_power = 0.0;
  std::optional<double> mc_bound;     // averaged over the replicate signs (L only)
  std::optional<double> lambda_used;
  std::optional<double> tau_used;
  std::uint64_t seed = 0;
};

struct PlanCellError {
  Estimator estimator = Estimator::L;
  int k = 0;
  double t = 0.0;
  std::string message;
};

struct PlanResult {
  std::vector<CellResult> cells;
  std::vector<PlanCellError> errors;
};

// Fills lambda_l, the per-(k,t) penalty calibrations, the per-cell knockoff
// thresholds and the full-null threshold, using streams disjoint from the
// evaluation replicates.  The full-null threshold depends only on the design
// and noise level, so it is computed once and shared.
void prepare_tuning(ExperimentPlan& plan);

// Evaluates one (k, t, estimator) cell over plan.n_replicates fresh
// instances drawn from rng.child(replicate).  All tuning values must already
// be present in the plan.
CellResult run_cell(const ExperimentPlan& plan, int k, double t, Estimator est,
                    const RngStream& rng);

// prepare_tuning + every cell in deterministic (k, t, estimator) order.
// Cell failures are collected, not fatal.
PlanResult run_plan(ExperimentPlan& plan);

// Versioned results table; empty fields for quantities a cell does not have.
void write_results_csv(const std::filesystem::path& path,
                       const ExperimentPlan& plan, const PlanResult& result);

}  // namespace signrec
