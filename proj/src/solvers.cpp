#include "signrec/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "signrec/errors.hpp"
#include "signrec/simplex.hpp"

namespace signrec {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double weighted_kkt_gap(const Vec& b, const Vec& Y, const Mat& X,
                        const Vec& lambdas) {
  Vec g = X.transpose() * (Y - X * b);
  double gap = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b[j] != 0.0) {
      double sgn = b[j] > 0 ? 1.0 : -1.0;
      gap = std::max(gap, std::abs(g[j] - lambdas[j] * sgn));
    } else {
      gap = std::max(gap, std::abs(g[j]) - lambdas[j]);
    }
  }
  return std::max(gap, 0.0);
}

double kkt_check(const SolverSolution& sol, const Vec& Y,
                 const DesignMatrix& X, double lambda) {
  if (sol.estimate.size() != X.p())
    throw ParameterError("kkt_check: estimate length differs from p");
  if (Y.size() != X.n()) throw ParameterError("kkt_check: response length differs from n");
  return weighted_kkt_gap(sol.estimate, Y, X.entries,
                          Vec::Constant(X.p(), lambda));
}

namespace {

// Cyclic coordinate descent on the per-coordinate penalized problem.  Full
// sweeps alternate with sweeps over the current nonzero set; the optimality
// gap is evaluated on a freshly recomputed residual so it cannot drift.
SolverSolution weighted_lasso(const Vec& Y, const Mat& X, const Vec& lambdas,
                              const LassoConfig& cfg, double reported_lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (Y.size() != n) throw ParameterError("lasso: response length differs from n");
  if (cfg.tol <= 0) throw ParameterError("lasso: tol must be positive");
  if (cfg.max_iters < 1) throw ParameterError("lasso: max_iters must be >= 1");

  Vec colsq(p);
  for (Eigen::Index j = 0; j < p; ++j) colsq[j] = X.col(j).squaredNorm();

  Vec b = Vec::Zero(p);
  if (cfg.warm_start) {
    if (cfg.warm_start->size() != p)
      throw ParameterError("lasso: warm start length differs from p");
    b = *cfg.warm_start;
    for (Eigen::Index j = 0; j < p; ++j)
      if (colsq[j] == 0.0) b[j] = 0.0;  // a null column never helps the fit
  }
  Vec r = Y - X * b;

  // Effective penalties and stop tolerance for the current continuation
  // stage; the last stage always runs at the requested values.
  Vec cur = lambdas;
  double tol = cfg.tol;

  auto update_coord = [&](Eigen::Index j) -> double {
    if (colsq[j] == 0.0) return 0.0;
    double z = X.col(j).dot(r) + colsq[j] * b[j];
    double bj = soft_threshold(z, cur[j]) / colsq[j];
    double d = bj - b[j];
    if (d != 0.0) {
      r -= d * X.col(j);
      b[j] = bj;
    }
    return std::abs(d);
  };

  long sweeps = 0;
  double gap = std::numeric_limits<double>::infinity();
  const double change_tol = 0.5 * cfg.tol / std::max(1.0, colsq.maxCoeff());
  std::vector<Eigen::Index> active;

  auto refresh_active = [&]() {
    active.clear();
    for (Eigen::Index j = 0; j < p; ++j)
      if (b[j] != 0.0) active.push_back(j);
  };

  // On the support and signs of the current iterate the minimizer satisfies
  // X_A'X_A b_A = X_A'Y - lambda_A s_A; one dense solve of that system
  // replaces the long coordinate-descent tail in the small-penalty regime,
  // where sweeps contract slowly through near-collinear active sets.  When
  // the iterate carries more nonzeros than rows, the guess keeps the largest
  // coefficients.  A candidate is kept only when it strictly lowers both the
  // penalized objective and the optimality gap.  The objective is the
  // quantity the sweeps themselves decrease, so an accepted jump can never
  // set them back; the gap alone would admit near-singular solves whose
  // huge cancelling coefficients take the sweeps ages to unwind.
  auto exact_support_step = [&]() -> bool {
    if (active.empty()) return false;
    std::vector<Eigen::Index> sel = active;
    if (static_cast<Eigen::Index>(sel.size()) > n) {
      std::nth_element(sel.begin(), sel.begin() + n, sel.end(),
                       [&](Eigen::Index a, Eigen::Index c) {
                         double da = std::abs(b[a]), dc = std::abs(b[c]);
                         return da > dc || (da == dc && a < c);
                       });
      sel.resize(static_cast<std::size_t>(n));
      std::sort(sel.begin(), sel.end());
    }
    const Eigen::Index na = static_cast<Eigen::Index>(sel.size());
    Mat Xa(n, na);
    for (Eigen::Index i = 0; i < na; ++i)
      Xa.col(i) = X.col(sel[static_cast<std::size_t>(i)]);
    Mat G = Xa.transpose() * Xa;
    Vec rhs = Xa.transpose() * Y;
    for (Eigen::Index i = 0; i < na; ++i) {
      Eigen::Index j = sel[static_cast<std::size_t>(i)];
      rhs[i] -= cur[j] * (b[j] > 0 ? 1.0 : -1.0);
    }
    Eigen::LDLT<Mat> ldlt(G);
    if (ldlt.info() != Eigen::Success) return false;
    Vec u = ldlt.solve(rhs);
    // Whenever the solve flips a sign the assumed subgradient was wrong, so
    // the candidate is not a stationary point of anything; ill conditioned
    // selections show up here as wild sign patterns and get discarded.
    for (Eigen::Index i = 0; i < na; ++i) {
      Eigen::Index j = sel[static_cast<std::size_t>(i)];
      if (u[i] * (b[j] > 0 ? 1.0 : -1.0) <= 0.0) return false;
    }
    Vec cand = Vec::Zero(p);
    for (Eigen::Index i = 0; i < na; ++i)
      cand[sel[static_cast<std::size_t>(i)]] = u[i];
    // The maintained residual is exact enough here: it is rebuilt at every
    // outer sweep and on every accepted step, and the comparison margins
    // are far above its drift.
    double obj = 0.5 * r.squaredNorm() + cur.dot(b.cwiseAbs());
    Vec rc = Y - X * cand;
    double cand_obj = 0.5 * rc.squaredNorm() + cur.dot(cand.cwiseAbs());
    if (!(cand_obj < obj)) return false;
    double cand_gap = weighted_kkt_gap(cand, Y, X, cur);
    if (!(cand_gap < gap)) return false;
    b = cand;
    r = rc;
    gap = cand_gap;
    refresh_active();
    return true;
  };

  // Chained acceptances refine the support guess; the chain stops as soon
  // as a candidate fails to improve, which also bounds its length.
  auto polish = [&]() {
    for (int t = 0; t < 8 && gap > tol && exact_support_step(); ++t) {
    }
  };

  const long polish_every = 50;

  auto descend = [&]() {
    while (sweeps < cfg.max_iters) {
      for (Eigen::Index j = 0; j < p; ++j) update_coord(j);
      ++sweeps;

      r = Y - X * b;  // discard accumulated residual drift before testing
      gap = weighted_kkt_gap(b, Y, X, cur);
      refresh_active();
      polish();
      if (gap <= tol) break;

      long inner = 0;
      // The cap forces a periodic full sweep so a stalled restricted problem
      // can never capture the iteration for good.
      while (sweeps < cfg.max_iters && inner < 20000 && !active.empty()) {
        double max_change = 0.0;
        for (Eigen::Index j : active)
          max_change = std::max(max_change, update_coord(j));
        ++sweeps;
        if (max_change <= change_tol) break;
        if (++inner % polish_every == 0) {
          gap = weighted_kkt_gap(b, Y, X, cur);
          polish();
          if (gap <= tol) break;
        }
      }
      if (gap <= tol) break;
    }
  };

  // Deep below the penalty level that zeroes everything, a cold solve crawls
  // through huge transient active sets.  A geometric ladder of penalty
  // scales, each stage warm starting the next, keeps the active set close to
  // its final size the whole way down.  A caller supplied warm start is
  // assumed to be near the solution already and skips the ladder.
  std::vector<double> scales;
  if (!cfg.warm_start) {
    double s0 = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (lambdas[j] > 0.0)
        s0 = std::max(s0, std::abs(X.col(j).dot(Y)) / lambdas[j]);
    if (s0 > 4.0)
      for (double s = 0.25 * s0; s > 1.0; s *= 0.25) scales.push_back(s);
  }
  scales.push_back(1.0);

  const double lam_peak = lambdas.maxCoeff();
  for (std::size_t stage = 0; stage < scales.size(); ++stage) {
    cur = scales[stage] * lambdas;
    tol = stage + 1 == scales.size()
              ? cfg.tol
              : std::max(cfg.tol, 1e-8 * scales[stage] * lam_peak);
    descend();
    if (sweeps >= cfg.max_iters) break;
  }

  if (gap > cfg.tol) {
    // The ladder may have stopped mid stage; report the gap at the
    // requested penalties, not the stage ones.
    cur = lambdas;
    r = Y - X * b;
    gap = weighted_kkt_gap(b, Y, X, lambdas);
  }

  if (gap > cfg.tol)
    throw ConvergenceError("lasso: no convergence within max_iters (gap " +
                               std::to_string(gap) + ")",
                           gap);

  SolverSolution sol;
  sol.estimate = b;
  sol.residual_norm2_sq = r.squaredNorm();
  sol.objective = 0.5 * sol.residual_norm2_sq;
  for (Eigen::Index j = 0; j < p; ++j)
    sol.objective += lambdas[j] * std::abs(b[j]);
  sol.iterations = sweeps;
  sol.kkt_gap = gap;
  sol.lambda_or_R = reported_lambda;
  return sol;
}

}  // namespace

SolverSolution lasso(const Vec& Y, const DesignMatrix& X, double lambda,
                     const LassoConfig& cfg) {
  if (!(lambda >= 0)) throw ParameterError("lasso: lambda must be >= 0");
  return weighted_lasso(Y, X.entries, Vec::Constant(X.p(), lambda), cfg,
                        lambda);
}

Vec adaptive_weights(const Vec& pilot) {
  return (pilot.cwiseAbs().array() + 1e-7).inverse().matrix();
}

SolverSolution adaptive_lasso(const Vec& Y, const DesignMatrix& X,
                              double lambda, const Vec& pilot,
                              const LassoConfig& cfg) {
  if (!(lambda >= 0)) throw ParameterError("adaptive_lasso: lambda must be >= 0");
  if (pilot.size() != X.p())
    throw ParameterError("adaptive_lasso: pilot length differs from p");
  Vec lambdas = lambda * adaptive_weights(pilot);
  return weighted_lasso(Y, X.entries, lambdas, cfg, lambda);
}

SolverSolution basis_pursuit(const Vec& target, const DesignMatrix& X) {
  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  if (target.size() != n)
    throw ParameterError("basis_pursuit: target length differs from n");

  // Split b = u - v, u,v >= 0; minimize the total mass.
  Mat A(n, 2 * p);
  A.leftCols(p) = X.entries;
  A.rightCols(p) = -X.entries;
  LpResult lp = solve_lp(A, target, Vec::Ones(2 * p));
  if (lp.status == LpResult::Status::Infeasible)
    throw InfeasibleError("basis_pursuit: target is outside the column span");
  if (lp.status == LpResult::Status::Unbounded)
    throw NumericalError("basis_pursuit: unbounded program (cannot happen)");

  SolverSolution sol;
  sol.estimate = lp.x.head(p) - lp.x.tail(p);
  sol.objective = sol.estimate.lpNorm<1>();
  sol.residual_norm2_sq = (target - X.entries * sol.estimate).squaredNorm();
  sol.iterations = lp.pivots;
  sol.kkt_gap = std::max(lp.primal_infeasibility, lp.max_dual_violation);
  sol.lambda_or_R = 0.0;
  return sol;
}

SolverSolution bpdn(const Vec& Y, const DesignMatrix& X, double R,
                    const LassoConfig& cfg) {
  if (!(R >= 0)) throw ParameterError("bpdn: R must be >= 0");
  if (Y.size() != X.n()) throw ParameterError("bpdn: response length differs from n");

  const double ynorm2 = Y.squaredNorm();
  if (R >= ynorm2) {
    SolverSolution sol;
    sol.estimate = Vec::Zero(X.p());
    sol.residual_norm2_sq = ynorm2;
    sol.lambda_or_R = R;
    return sol;
  }
  if (R == 0.0) {
    SolverSolution sol = basis_pursuit(Y, X);
    sol.lambda_or_R = 0.0;
    return sol;
  }

  // The penalized residual grows with the penalty level, so bisect it until
  // the residual budget is met.  Warm starts come from the previous probe.
  double lo = 0.0;                                      // residual -> 0 (needs full row rank)
  double hi = (X.entries.transpose() * Y).lpNorm<Eigen::Infinity>();
  LassoConfig probe = cfg;
  long total_iters = 0;
  double res_lo = 0.0;
  SolverSolution best;
  bool have_best = false;

  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    SolverSolution sol = weighted_lasso(Y, X.entries,
                                        Vec::Constant(X.p(), mid), probe, R);
    total_iters += sol.iterations;
    probe.warm_start = sol.estimate;
    double res = sol.residual_norm2_sq;

    // Residual monotonicity guard (up to solver tolerance wiggle).
    double slack = 1e-6 * std::max(1.0, ynorm2);
    if (res < res_lo - slack && mid > lo)
      throw NumericalError("bpdn: residual decreased as the penalty grew");

    if (std::abs(res - R) <= cfg.tol * R || (hi - lo) <= 1e-15 * hi) {
      best = sol;
      have_best = true;
      break;
    }
    if (res > R) {
      hi = mid;
    } else {
      lo = mid;
      res_lo = res;
    }
    best = sol;
    have_best = true;
  }
  if (!have_best) throw NumericalError("bpdn: bisection failed to produce a solve");
  if (std::abs(best.residual_norm2_sq - R) > 1e-3 * std::max(R, 1e-12) &&
      std::abs(best.residual_norm2_sq - R) > cfg.tol * R)
    throw NumericalError(
        "bpdn: residual budget not met; is the design full row rank?");
  best.objective = best.estimate.lpNorm<1>();
  best.iterations = total_iters;
  best.lambda_or_R = R;
  return best;
}

}  // namespace signrec
