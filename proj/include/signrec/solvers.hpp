#pragma once

#include <optional>

#include "signrec/types.hpp"

namespace signrec {

struct LassoConfig {
  long max_iters = 1000000;  // coordinate sweeps (full or active)
  double tol = 1e-9;         // optimality gap at which the solve stops
  std::optional<Vec> warm_start;
};

// Output of every sparse solver in this library.  `lambda_or_R` holds the
// penalty level for penalized solves and the residual budget for the
// constrained ones (0 for exact-fit pursuit).
struct SolverSolution {
  Vec estimate;
  double objective = 0.0;
  double residual_norm2_sq = 0.0;
  long iterations = 0;
  double kkt_gap = 0.0;
  double lambda_or_R = 0.0;
};

double soft_threshold(double x, double t);

// min 0.5 ||Y - X b||^2 + lambda ||b||_1 by cyclic coordinate descent with
// active-set sweeps.  Stops when the optimality gap (see kkt_check) falls
// below cfg.tol; throws ConvergenceError carrying the last gap otherwise.
SolverSolution lasso(const Vec& Y, const DesignMatrix& X, double lambda,
                     const LassoConfig& cfg = {});

// Penalty weights used by the reweighted solve: 1 / (|pilot_i| + 1e-7).
Vec adaptive_weights(const Vec& pilot);

// min 0.5 ||Y - X b||^2 + lambda sum_i w_i |b_i| with w = adaptive_weights(pilot).
SolverSolution adaptive_lasso(const Vec& Y, const DesignMatrix& X,
                              double lambda, const Vec& pilot,
                              const LassoConfig& cfg = {});

// min ||b||_1 subject to X b = target, solved as a linear program.
// Throws InfeasibleError when target is outside the column span.
SolverSolution basis_pursuit(const Vec& target, const DesignMatrix& X);

// min ||b||_1 subject to ||Y - X b||^2 <= R, by bisection on the penalized
// problem.  R >= ||Y||^2 returns 0; R = 0 delegates to basis_pursuit.
SolverSolution bpdn(const Vec& Y, const DesignMatrix& X, double R,
                    const LassoConfig& cfg = {});

// Largest violation of the stationarity system of the penalized problem:
// on the active set |X_j'(Y - Xb) - lambda sign(b_j)|, off it
// max(0, |X_j'(Y - Xb)| - lambda).
double kkt_check(const SolverSolution& sol, const Vec& Y,
                 const DesignMatrix& X, double lambda);

// Same gap with a per-coordinate penalty vector.
double weighted_kkt_gap(const Vec& b, const Vec& Y, const Mat& X,
                        const Vec& lambdas);

}  // namespace signrec
