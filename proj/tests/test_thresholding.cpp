#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/rng.hpp"
#include "signrec/solvers.hpp"
#include "signrec/thresholding.hpp"

using namespace signrec;

namespace {

SignVector sv(std::initializer_list<int> vals) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (int x : vals) v[i++] = x;
  return make_sign_vector(v);
}

Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

DesignMatrix gaussian_design(Eigen::Index rows, Eigen::Index cols,
                             std::uint64_t seed) {
  RngStream r(seed);
  DesignMatrix d;
  d.entries.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) d.entries(i, j) = r.normal();
  return d;
}

// Rows drawn from the unit-variance equicorrelated Gaussian law.
DesignMatrix equicorrelated_rows(Eigen::Index rows, Eigen::Index cols,
                                 double rho, std::uint64_t seed) {
  RngStream r(seed);
  DesignMatrix d;
  d.entries.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double shared = r.normal();
    for (Eigen::Index j = 0; j < cols; ++j)
      d.entries(i, j) = std::sqrt(1.0 - rho) * r.normal() + std::sqrt(rho) * shared;
  }
  return d;
}

}  // namespace

TEST_SUITE("thresholding") {

TEST_CASE("entries at the threshold are zeroed, survivors keep their value") {
  Vec out = apply_threshold(vec({1.0, -1.0, 0.5, 2.0, -3.25}), 1.0);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 2.0);
  CHECK(out[4] == -3.25);
  // tau = 0 only removes exact zeros.
  Vec tiny = apply_threshold(vec({1e-300, 0.0, -1e-300}), 0.0);
  CHECK(tiny[0] == 1e-300);
  CHECK(tiny[1] == 0.0);
  CHECK(tiny[2] == -1e-300);
  CHECK_THROWS_AS(apply_threshold(vec({1.0}), -0.5), ParameterError);
}

TEST_CASE("the quantile follows the ceiling convention") {
  std::vector<double> ten = {7, 3, 10, 1, 5, 9, 2, 8, 4, 6};  // 1..10 shuffled
  CHECK(empirical_quantile(ten, 0.95) == 10.0);
  CHECK(empirical_quantile(ten, 0.5) == 5.0);
  CHECK(empirical_quantile(ten, 0.05) == 1.0);
  CHECK(empirical_quantile(ten, 0.0) == 1.0);
  CHECK(empirical_quantile(ten, 1.0) == 10.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), ParameterError);
  CHECK_THROWS_AS(empirical_quantile(ten, 1.5), ParameterError);
}

TEST_CASE("independent null columns have the right moments") {
  DesignMatrix X = gaussian_design(200, 10, 1200);
  Mat K = knockoff_columns(X, 50, 0.0, false, RngStream(1201));
  REQUIRE(K.rows() == 200);
  REQUIRE(K.cols() == 50);
  double n = 200.0 * 50.0;
  CHECK(std::abs(K.mean()) <= 4.0 / std::sqrt(n));
  CHECK(K.array().square().mean() == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("conditional null columns extend the equicorrelated law") {
  // Treat each design row as one draw of a 5-variate equicorrelated vector;
  // appended columns must make the joint 8-variate law equicorrelated too.
  const double rho = 0.9;
  DesignMatrix X = equicorrelated_rows(4000, 5, rho, 1210);
  Mat K = knockoff_columns(X, 3, rho, false, RngStream(1211));
  Mat H(4000, 8);
  H << X.entries, K;

  Vec mu = H.colwise().mean();
  for (Eigen::Index a = 0; a < 8; ++a) {
    for (Eigen::Index b = 0; b < 8; ++b) {
      double cov = ((H.col(a).array() - mu[a]) * (H.col(b).array() - mu[b])).mean();
      double want = (a == b) ? 1.0 : rho;
      CHECK(std::abs(cov - want) <= 0.06);
    }
  }
}

TEST_CASE("the naive variant ignores the correlation structure") {
  const double rho = 0.9;
  DesignMatrix X = equicorrelated_rows(4000, 5, rho, 1220);
  Mat K = knockoff_columns(X, 3, rho, true, RngStream(1221));
  for (Eigen::Index a = 0; a < 5; ++a)
    for (Eigen::Index b = 0; b < 3; ++b) {
      double corr = (X.entries.col(a).array() * K.col(b).array()).mean();
      CHECK(std::abs(corr) <= 0.06);
    }
  CHECK_THROWS_AS(knockoff_columns(X, 0, rho, false, RngStream(1)), ParameterError);
  CHECK_THROWS_AS(knockoff_columns(X, 3, 1.0, false, RngStream(1)), ParameterError);
}

TEST_CASE("a zero response produces a zero threshold") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 15, 30, 0.0, RngStream(1230));
  KnockoffConfig cfg;
  cfg.batch_columns = 5;
  cfg.batches = 3;
  cfg.n_replicates = 20;
  auto zero_response = [&](RngStream) { return Vec::Zero(15); };
  AugmentedEstimator est = [](const DesignMatrix& A, const Vec& y) {
    return lasso(y, A, 1.0).estimate;
  };
  double tau = knockoff_threshold(X, zero_response, est, cfg, RngStream(1231));
  CHECK(tau == 0.0);
}

TEST_CASE("null calibration reacts to the quantile and stays reproducible") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 20, 40, 0.0, RngStream(1240));
  Vec beta = Vec::Zero(40);
  beta[3] = 10.0;
  auto make_response = [&](RngStream r) {
    return Vec(X.entries * beta + normal_vector(20, r));
  };
  AugmentedEstimator est = [](const DesignMatrix& A, const Vec& y) {
    return lasso(y, A, 0.5).estimate;
  };
  KnockoffConfig cfg;
  cfg.batch_columns = 5;
  cfg.batches = 4;
  cfg.n_replicates = 50;

  double tau = knockoff_threshold(X, make_response, est, cfg, RngStream(1241));
  CHECK(tau > 0.0);
  CHECK(tau < 10.0);
  CHECK(knockoff_threshold(X, make_response, est, cfg, RngStream(1241)) == tau);

  KnockoffConfig median = cfg;
  median.quantile = 0.5;
  CHECK(knockoff_threshold(X, make_response, est, median, RngStream(1241)) <= tau);
}

TEST_CASE("the pure-noise threshold scales with sigma and tightens with alpha") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 10, 30, 0.0, RngStream(1250));
  double tau = full_null_threshold(X, 1.0, 0.05, 200, RngStream(1251));
  CHECK(tau > 0.0);
  CHECK(full_null_threshold(X, 1.0, 0.05, 200, RngStream(1251)) == tau);
  CHECK(full_null_threshold(X, 2.0, 0.05, 200, RngStream(1251)) ==
        doctest::Approx(2.0 * tau).epsilon(1e-9));
  CHECK(full_null_threshold(X, 1.0, 0.3, 200, RngStream(1251)) <= tau);
  CHECK_THROWS_AS(full_null_threshold(X, -1.0, 0.05, 10, RngStream(1)),
                  ParameterError);
  CHECK_THROWS_AS(full_null_threshold(X, 1.0, 0.0, 10, RngStream(1)),
                  ParameterError);
}

TEST_CASE("recovery flags read off sign agreement") {
  SignVector truth = sv({1, -1, 0, 0});

  RecoveryFlags exact = recovery_flags(truth, vec({5, -3, 0, 0}));
  CHECK_FALSE(exact.false_positive);
  CHECK(exact.exact_recovery);
  CHECK(exact.support_recovered);

  RecoveryFlags spurious = recovery_flags(truth, vec({5, -3, 0.1, 0}));
  CHECK(spurious.false_positive);
  CHECK_FALSE(spurious.exact_recovery);
  CHECK(spurious.support_recovered);

  RecoveryFlags flipped = recovery_flags(truth, vec({5, 3, 0, 0}));
  CHECK_FALSE(flipped.false_positive);
  CHECK_FALSE(flipped.exact_recovery);
  CHECK_FALSE(flipped.support_recovered);

  RecoveryFlags missed = recovery_flags(truth, vec({0, -3, 0, 0}));
  CHECK_FALSE(missed.false_positive);
  CHECK_FALSE(missed.exact_recovery);
  CHECK_FALSE(missed.support_recovered);

  SignVector null_truth = sv({0, 0, 0, 0});
  RecoveryFlags clean = recovery_flags(null_truth, vec({0, 0, 0, 0}));
  CHECK(clean.exact_recovery);
  CHECK_FALSE(clean.false_positive);

  CHECK_THROWS_AS(recovery_flags(truth, vec({1, 2})), ParameterError);
}

TEST_CASE("aggregate rates match hand counting") {
  SignVector truth = sv({1, -1, 0, 0});
  std::vector<Vec> estimates = {vec({5, -3, 0, 0}),    // exact
                                vec({5, -3, 0.1, 0}),  // false positive
                                vec({0, -3, 0, 0})};   // missed signal
  RecoveryRates rates = fwer_and_recovery(truth, estimates);
  CHECK(rates.n == 3);
  CHECK(rates.fwer == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rates.recovery == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rates.support_power == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 3.0);
  CHECK(rates.fwer_se == doctest::Approx(se).epsilon(1e-12));
  CHECK(rates.recovery_se == doctest::Approx(se).epsilon(1e-12));
  CHECK_THROWS_AS(fwer_and_recovery(truth, {}), ParameterError);
}

}  // TEST_SUITE
