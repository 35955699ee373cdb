#pragma once

#include "signrec/rng.hpp"
#include "signrec/types.hpp"

namespace signrec {

// Precomputed pieces of the sign-consistency statistic for one (design, sign
// pattern, noise level, penalty) tuple.  With I the support, H the orthogonal
// projector onto span(X_I) and eps the noise vector, the statistic is
//     zeta = w + (1/lambda) * P * eps,
//     w = X_Ic' X_I (X_I'X_I)^{-1} s_I,      P = X_Ic' (Id - H),
// and sign recovery is possible only when ||zeta||_inf <= 1.
struct ZetaContext {
  Vec w;   // length p - k
  Mat P;   // (p - k) x n
  double sigma = 0.0;
  double lambda = 0.0;
  Eigen::Index p = 0;
  int k = 0;
};

// Builds the context; requires lambda > 0, sigma >= 0 and full column rank of
// X_I.  The projector identity (Id-H)^2 = Id-H is verified to 1e-8.
// k = 0 yields w = 0 (length p) and P = X'.
ZetaContext build_zeta_context(const DesignMatrix& X, const SignVector& s,
                               double sigma, double lambda);

struct McEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  long n_draws = 0;
};

// Monte Carlo probability of the event ||zeta||_inf <= 1 over fresh noise.
// Draw d uses the child stream rng.child(d), so the estimate is independent
// of scheduling and batch size.
McEstimate mc_bound(const ZetaContext& ctx, long n_draws, const RngStream& rng,
                    int threads = 1);

struct CalibrationResult {
  double lambda = 0.0;
  double p_hat = 0.0;     // estimate at the returned lambda
  double std_err = 0.0;
  long n_signs = 0;
  long n_draws = 0;
  double max_achievable = 0.0;  // sup over lambda of the averaged estimate
  bool non_monotone = false;    // probes did not increase with lambda
};

// Finds lambda so that the bound averaged over random k-sparse sign patterns
// hits `target`.  Sign patterns and noise draws are fixed up front (common
// random numbers), which makes the averaged estimate an exact step function
// of lambda: for each (sign, draw) pair the event holds on a closed lambda
// interval computable from the draw.  Bisection then stops once the estimate
// is within two pooled standard errors of the target.
//
// Throws CalibrationError (carrying the best achievable value) when the mean
// margin over signs is nonpositive or no lambda can reach the target.
CalibrationResult calibrate_lambda_full(const DesignMatrix& X, int k,
                                        double sigma, double target,
                                        long n_signs, long n_draws,
                                        SignMode mode, const RngStream& rng,
                                        int threads = 1);

// Convenience wrapper returning just the penalty level.
double calibrate_lambda(const DesignMatrix& X, int k, double sigma,
                        double target, long n_signs, long n_draws,
                        SignMode mode, const RngStream& rng, int threads = 1);

}  // namespace signrec
