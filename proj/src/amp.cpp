#include "signrec/amp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "signrec/errors.hpp"

namespace signrec {

namespace {

const double kInvSqrt2Pi = 0.3989422804014327;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace

void AmpProblem::validate() const {
  if (!(delta > 0 && delta <= 1))
    throw ParameterError("AmpProblem: delta must lie in (0,1]");
  if (!(gamma >= 0 && gamma <= 1))
    throw ParameterError("AmpProblem: gamma must lie in [0,1]");
  if (!(t > 0)) throw ParameterError("AmpProblem: t must be positive");
  if (!(sigma >= 0)) throw ParameterError("AmpProblem: sigma must be >= 0");
}

double soft_threshold_mse(double b, double tau, double theta) {
  if (!(tau > 0)) throw ParameterError("soft_threshold_mse: tau must be > 0");
  if (!(theta >= 0)) throw ParameterError("soft_threshold_mse: theta must be >= 0");
  const double A = (theta - b) / tau;
  const double C = (-theta - b) / tau;
  // Upper branch: (tau Z - theta)^2 over Z > A.
  double up = tau * tau * ((1.0 - norm_cdf(A)) + A * norm_pdf(A)) -
              2.0 * tau * theta * norm_pdf(A) +
              theta * theta * (1.0 - norm_cdf(A));
  // Lower branch: (tau Z + theta)^2 over Z < C.
  double low = tau * tau * (norm_cdf(C) - C * norm_pdf(C)) -
               2.0 * tau * theta * norm_pdf(C) + theta * theta * norm_cdf(C);
  // Dead zone contributes b^2.
  double mid = b * b * (norm_cdf(A) - norm_cdf(C));
  return up + low + mid;
}

double mse_functional(const AmpProblem& prob, double tau, double theta) {
  // The prior is symmetric, so the +t and -t modes contribute equally.
  return (1.0 - prob.gamma) * soft_threshold_mse(0.0, tau, theta) +
         prob.gamma * soft_threshold_mse(prob.t, tau, theta);
}

double alpha_min(double delta) {
  if (!(delta > 0 && delta <= 1))
    throw ParameterError("alpha_min: delta must lie in (0,1]");
  auto g = [delta](double a) {
    return (2.0 / delta) *
           ((1.0 + a * a) * (1.0 - norm_cdf(a)) - a * norm_pdf(a));
  };
  // g decreases from 1/delta at 0 towards 0; the root is the admissibility
  // edge.  delta = 1 puts it exactly at 0.
  double lo = 0.0, hi = 50.0;
  if (g(lo) <= 1.0) return 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

double state_evolution_fixed_point(const AmpProblem& prob, double alpha) {
  prob.validate();
  if (!(prob.sigma > 0))
    throw ParameterError("state_evolution_fixed_point: sigma must be > 0");
  double amin = alpha_min(prob.delta);
  if (alpha <= amin)
    throw ParameterError("state_evolution_fixed_point: alpha " +
                         std::to_string(alpha) +
                         " is inadmissible (alpha_min = " +
                         std::to_string(amin) + ")");

  const double sig2 = prob.sigma * prob.sigma;
  double tau2 = sig2 + prob.gamma * prob.t * prob.t / prob.delta;
  const double diverge_at =
      std::max(1e24 * sig2, 1e12 * (sig2 + prob.gamma * prob.t * prob.t));

  // Near the admissibility edge the map contracts slowly, so iterate until
  // the step is well under the 1e-8 residual certificate.  The second stop
  // is the floating-point floor: for enormous fixed points the step cannot
  // shrink below a few ulps of tau2, and the final check decides honestly.
  double next = tau2;
  for (long iter = 0; iter < 200000; ++iter) {
    double tau = std::sqrt(tau2);
    next = sig2 + mse_functional(prob, tau, alpha * tau) / prob.delta;
    double change = std::abs(next - tau2);
    tau2 = next;
    if (tau2 > diverge_at)
      throw NumericalError("state_evolution_fixed_point: iteration diverged");
    if ((change <= 1e-10 * tau2 && change <= 2e-9) || change <= 4e-15 * tau2)
      break;
  }
  // Any exact fixed point satisfies tau^2 >= sigma^2; roundoff can dip a few
  // ulps below when the map contribution is negligible.
  tau2 = std::max(tau2, sig2);
  double tau = std::sqrt(tau2);
  double residual =
      std::abs(sig2 + mse_functional(prob, tau, alpha * tau) / prob.delta - tau2);
  if (residual > 1e-8) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "state_evolution_fixed_point: residual %.3g above 1e-8 at "
                  "alpha %.6g (near-critical fixed point)",
                  residual, alpha);
    throw NumericalError(buf);
  }
  return tau;
}

namespace {

double exceed_probability(const AmpProblem& prob, double tau, double theta) {
  // P(|B + tau Z| > theta) under the prior.
  double null_part = 2.0 * (1.0 - norm_cdf(theta / tau));
  double sig_part = (1.0 - norm_cdf((theta - prob.t) / tau)) +
                    norm_cdf((-theta - prob.t) / tau);
  return (1.0 - prob.gamma) * null_part + prob.gamma * sig_part;
}

}  // namespace

AmpCalibration optimal_lambda_amp(const AmpProblem& prob) {
  prob.validate();
  if (!(prob.sigma > 0))
    throw ParameterError("optimal_lambda_amp: sigma must be > 0");

  const double a_lo = alpha_min(prob.delta) + 1e-3;
  const double a_hi = 10.0;
  if (a_lo >= a_hi)
    throw ParameterError("optimal_lambda_amp: admissible range is empty");

  // The fixed point gives mse = delta * (tau^2 - sigma^2), so minimizing the
  // effective noise and minimizing the MSE are the same search.  Grid points
  // too close to the admissibility edge can fail to converge; their tau is
  // effectively infinite, so they are never the minimizer and get skipped.
  auto tau_at = [&](double a) { return state_evolution_fixed_point(prob, a); };
  auto tau_or_inf = [&](double a) {
    try {
      return tau_at(a);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Ties resolve to the larger alpha so that a flat tail (pure-noise priors,
  // where the MSE decays below machine precision) reports the range cap.
  const int grid_n = 256;
  int best_i = -1;
  double best_tau = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_n; ++i) {
    double a = a_lo + (a_hi - a_lo) * i / (grid_n - 1);
    double tau = tau_or_inf(a);
    if (std::isfinite(tau) && tau <= best_tau) {
      best_tau = tau;
      best_i = i;
    }
  }
  if (best_i < 0)
    throw NumericalError(
        "optimal_lambda_amp: state evolution converged nowhere on the alpha grid");

  AmpCalibration cal;
  double alpha;
  if (best_i == grid_n - 1) {
    // Pure-noise limits push the minimizer upward without bound; report the cap.
    alpha = a_hi;
    cal.capped = true;
  } else {
    double step = (a_hi - a_lo) / (grid_n - 1);
    double lo = std::max(a_lo, a_lo + (best_i - 1) * step);
    double hi = std::min(a_hi, a_lo + (best_i + 1) * step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = tau_or_inf(x1), f2 = tau_or_inf(x2);
    while (hi - lo > 1e-8) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = tau_or_inf(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = tau_or_inf(x2);
      }
    }
    alpha = 0.5 * (lo + hi);
  }

  cal.alpha = alpha;
  cal.tau = tau_at(alpha);
  cal.mse = prob.delta * (cal.tau * cal.tau - prob.sigma * prob.sigma);
  double theta = alpha * cal.tau;
  cal.lambda =
      theta * (1.0 - exceed_probability(prob, cal.tau, theta) / prob.delta);
  return cal;
}

}  // namespace signrec
