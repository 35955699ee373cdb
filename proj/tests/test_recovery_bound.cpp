#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/recovery_bound.hpp"
#include "signrec/rng.hpp"
#include "signrec/solvers.hpp"

using namespace signrec;

namespace {

SignVector sv(std::initializer_list<int> vals) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (int x : vals) v[i++] = x;
  return make_sign_vector(v);
}

DesignMatrix custom(const Mat& m) {
  DesignMatrix d;
  d.entries = m;
  return d;
}

DesignMatrix orthonormal_design(Eigen::Index n, std::uint64_t seed) {
  Mat g = gen_design(DesignSetting::Setting1, n, n, 0.0, RngStream(seed)).entries;
  DesignMatrix d;
  d.entries = Eigen::HouseholderQR<Mat>(g).householderQ() * Mat::Identity(n, n);
  return d;
}

double std_normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

// Event probability when the off-support statistics are independent standard
// normals scaled by sigma/lambda (identity and orthonormal designs).
double independent_coord_bound(double lambda, double sigma, Eigen::Index off) {
  return std::pow(2.0 * std_normal_cdf(lambda / sigma) - 1.0,
                  static_cast<double>(off));
}

}  // namespace

TEST_SUITE("recovery_bound") {

TEST_CASE("context pieces match the hand computation") {
  Mat m(2, 2);
  m.col(0) << 1, 0;
  m.col(1) << 0.8, 0.6;
  ZetaContext ctx = build_zeta_context(custom(m), sv({1, 0}), 0.5, 2.0);
  CHECK(ctx.p == 2);
  CHECK(ctx.k == 1);
  CHECK(ctx.sigma == 0.5);
  CHECK(ctx.lambda == 2.0);
  REQUIRE(ctx.w.size() == 1);
  CHECK(ctx.w[0] == doctest::Approx(0.8).epsilon(1e-12));
  // Id - H annihilates the first axis, so only the second column survives.
  REQUIRE(ctx.P.rows() == 1);
  REQUIRE(ctx.P.cols() == 2);
  CHECK(ctx.P(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(ctx.P(0, 1) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("an empty support keeps every column in play") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 3, 5, 0.0, RngStream(1000));
  ZetaContext ctx = build_zeta_context(X, sv({0, 0, 0, 0, 0}), 1.0, 0.7);
  CHECK(ctx.w.size() == 5);
  CHECK(ctx.w.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((ctx.P - X.entries.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("context construction validates its arguments") {
  DesignMatrix X = custom(Mat::Identity(4, 4));
  SignVector s = sv({1, 0, 0, 0});
  CHECK_THROWS_AS(build_zeta_context(X, s, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(build_zeta_context(X, s, 1.0, -2.0), ParameterError);
  CHECK_THROWS_AS(build_zeta_context(X, s, -1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(build_zeta_context(X, sv({1, 0, 0}), 1.0, 1.0), ParameterError);

  Mat dup(3, 3);
  dup.col(0) << 1, 1, 0;
  dup.col(1) << 1, 1, 0;
  dup.col(2) << 0, 0, 1;
  CHECK_THROWS_AS(build_zeta_context(custom(dup), sv({1, 1, 0}), 1.0, 1.0),
                  ParameterError);
}

TEST_CASE("the identity design admits a closed-form check") {
  ZetaContext ctx = build_zeta_context(custom(Mat::Identity(6, 6)),
                                       sv({1, -1, 0, 0, 0, 0}), 1.0, 1.2);
  McEstimate est = mc_bound(ctx, 200000, RngStream(1010));
  double exact = independent_coord_bound(1.2, 1.0, 4);
  CHECK(std::abs(est.p_hat - exact) <= 3.5 * est.std_err + 1e-4);
  CHECK(est.n_draws == 200000);
  CHECK(est.std_err ==
        doctest::Approx(std::sqrt(est.p_hat * (1.0 - est.p_hat) / 200000.0))
            .epsilon(1e-9));
}

TEST_CASE("the estimate is a deterministic function of the seed") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 8, 20, 0.0, RngStream(1020));
  SignVector s = sample_sign_vector(20, 3, SignMode::Symmetric, RngStream(1021));
  ZetaContext ctx = build_zeta_context(X, s, 1.0, 5.0);
  McEstimate a = mc_bound(ctx, 4000, RngStream(1022));
  McEstimate b = mc_bound(ctx, 4000, RngStream(1022));
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.std_err == b.std_err);
  McEstimate c = mc_bound(ctx, 4000, RngStream(1023));
  CHECK(a.p_hat != c.p_hat);
  CHECK_THROWS_AS(mc_bound(ctx, 0, RngStream(1)), ParameterError);
}

TEST_CASE("calibration on the identity matches the analytic penalty") {
  DesignMatrix X = custom(Mat::Identity(300, 300));
  CalibrationResult cal = calibrate_lambda_full(X, 5, 1.0, 0.95, 40, 250,
                                                SignMode::Symmetric,
                                                RngStream(1030));
  // Invert the closed form by bisection.
  double lo = 0.1, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (independent_coord_bound(mid, 1.0, 295) < 0.95 ? lo : hi) = mid;
  }
  double analytic = 0.5 * (lo + hi);
  CHECK(analytic == doctest::Approx(3.75425).epsilon(1e-3));
  CHECK(std::abs(cal.lambda - analytic) <= 0.08);
  CHECK(std::abs(cal.p_hat - 0.95) <= 0.02);
  CHECK(cal.n_signs == 40);
  CHECK(cal.n_draws == 250);
  CHECK(cal.max_achievable >= 0.95);
}

TEST_CASE("an unreachable target reports what was achievable") {
  // One wide row: patterns on the second column always succeed, patterns on
  // the first never do, so no penalty level can average above one half.
  Mat m(1, 2);
  m << 1, 2;
  bool threw = false;
  try {
    calibrate_lambda(custom(m), 1, 1.0, 0.9, 40, 50, SignMode::Symmetric,
                     RngStream(1040));
  } catch (const CalibrationError& e) {
    threw = true;
    CHECK(e.best_achievable() >= 0.3);
    CHECK(e.best_achievable() <= 0.7);
  }
  CHECK(threw);
}

TEST_CASE("parameter validation rejects bad calibration requests") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 10, 20, 0.0, RngStream(1050));
  RngStream r(1051);
  CHECK_THROWS_AS(calibrate_lambda(X, 20, 1.0, 0.5, 5, 5, SignMode::Symmetric, r),
                  ParameterError);
  CHECK_THROWS_AS(calibrate_lambda(X, -1, 1.0, 0.5, 5, 5, SignMode::Symmetric, r),
                  ParameterError);
  CHECK_THROWS_AS(calibrate_lambda(X, 3, 0.0, 0.5, 5, 5, SignMode::Symmetric, r),
                  ParameterError);
  CHECK_THROWS_AS(calibrate_lambda(X, 3, 1.0, 1.0, 5, 5, SignMode::Symmetric, r),
                  ParameterError);
  CHECK_THROWS_AS(calibrate_lambda(X, 3, 1.0, 0.5, 0, 5, SignMode::Symmetric, r),
                  ParameterError);
}

TEST_CASE("a calibrated penalty hits its target on fresh patterns") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 40, 80, 0.0, RngStream(1060));
  double lam = calibrate_lambda(X, 3, 1.0, 0.7, 50, 400, SignMode::Symmetric,
                                RngStream(1061));
  CHECK(lam > 0.0);

  RngStream eval(1062);
  double total = 0.0;
  const int n_signs = 60;
  for (int i = 0; i < n_signs; ++i) {
    SignVector s = sample_sign_vector(80, 3, SignMode::Symmetric, eval.child(i));
    ZetaContext ctx = build_zeta_context(X, s, 1.0, lam);
    total += mc_bound(ctx, 3000, eval.child(1000 + i)).p_hat;
  }
  CHECK(std::abs(total / n_signs - 0.7) <= 0.06);
}

TEST_CASE("on orthonormal designs the bound tracks actual recovery") {
  DesignMatrix Q = orthonormal_design(25, 1070);
  SignVector s = sample_sign_vector(25, 3, SignMode::Symmetric, RngStream(1071));
  const double lambda = 2.5, sigma = 1.0, t = 1000.0;

  ZetaContext ctx = build_zeta_context(Q, s, sigma, lambda);
  McEstimate bound = mc_bound(ctx, 200000, RngStream(1072));
  CHECK(std::abs(bound.p_hat - independent_coord_bound(lambda, sigma, 22)) <=
        3.5 * bound.std_err + 1e-4);

  Vec beta = Vec::Zero(25);
  for (int i : s.support) beta[i] = t * s.values[i];
  RngStream rep(1073);
  int hits = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    RngStream noise = rep.child(r);
    Vec y = Q.entries * beta + sigma * normal_vector(25, noise);
    SolverSolution sol = lasso(y, Q, lambda);
    if (sign_of(sol.estimate) == s) ++hits;
  }
  double emp = static_cast<double>(hits) / reps;
  double se = std::sqrt(bound.p_hat * (1.0 - bound.p_hat) / reps);
  CHECK(std::abs(emp - bound.p_hat) <= 4.0 * se + 0.01);
}

}  // TEST_SUITE
