#pragma once

namespace signrec {

// Asymptotic problem shape for penalty tuning: undersampling delta = n/p,
// sparsity fraction gamma = k/p, signal magnitude t, noise level sigma.
// The signal prior is gamma * (point masses +/-t, equal weight) + (1-gamma) * 0.
struct AmpProblem {
  double delta = 1.0 / 3.0;
  double gamma = 0.0;
  double t = 1.0;
  double sigma = 1.0;

  void validate() const;
};

// Mean squared error of soft thresholding at level theta around a point b:
// E[(eta(b + tau Z; theta) - b)^2], Z standard normal.  Closed form.
double soft_threshold_mse(double b, double tau, double theta);

// Prior-averaged version of the above.
double mse_functional(const AmpProblem& prob, double tau, double theta);

// Effective noise level solving  tau^2 = sigma^2 + (1/delta) *
// mse_functional(tau, alpha * tau).  Requires alpha > alpha_min(delta).
double state_evolution_fixed_point(const AmpProblem& prob, double alpha);

// Smallest admissible threshold ratio: the root of
// (2/delta) * ((1+a^2)(1-Phi(a)) - a phi(a)) = 1.
double alpha_min(double delta);

struct AmpCalibration {
  double alpha = 0.0;   // threshold ratio minimizing the fixed-point MSE
  double tau = 0.0;     // effective noise at that ratio
  double lambda = 0.0;  // implied penalty level
  double mse = 0.0;
  bool capped = false;  // minimizer sat on the upper alpha search bound (10)
};

// Minimizes the fixed-point MSE over alpha in [alpha_min + 1e-3, 10]
// (coarse grid plus golden-section refinement) and converts the minimizer to
// a penalty level via
//   lambda = alpha * tau * (1 - P(|B + tau Z| > alpha tau) / delta).
AmpCalibration optimal_lambda_amp(const AmpProblem& prob);

}  // namespace signrec
