#include <doctest.h>

#include <cmath>
#include <limits>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/rng.hpp"
#include "signrec/simplex.hpp"
#include "signrec/solvers.hpp"

using namespace signrec;

namespace {

Mat gaussian_mat(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  RngStream r(seed);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = r.normal();
  return m;
}

DesignMatrix wrap(const Mat& m) {
  DesignMatrix d;
  d.entries = m;
  return d;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("a one-constraint program picks the cheaper vertex") {
  Mat A(1, 2);
  A << 1, 2;
  Vec b(1);
  b << 2;
  LpResult lp = solve_lp(A, b, Vec::Ones(2));
  REQUIRE(lp.status == LpResult::Status::Optimal);
  CHECK(lp.x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lp.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp.max_dual_violation <= 1e-9);
  CHECK(lp.primal_infeasibility <= 1e-12);
}

TEST_CASE("an unbounded direction is reported as such") {
  Mat A = Mat::Zero(1, 1);
  Vec b = Vec::Zero(1);
  Vec c(1);
  c << -1;
  LpResult lp = solve_lp(A, b, c);
  CHECK(lp.status == LpResult::Status::Unbounded);
}

TEST_CASE("an inconsistent constraint is reported infeasible") {
  Mat A = Mat::Zero(1, 1);
  Vec b(1);
  b << 1;
  LpResult lp = solve_lp(A, b, Vec::Ones(1));
  CHECK(lp.status == LpResult::Status::Infeasible);
}

TEST_CASE("redundant duplicate rows do not break the solve") {
  Mat A(2, 2);
  A << 1, 2, 1, 2;
  Vec b(2);
  b << 2, 2;
  LpResult lp = solve_lp(A, b, Vec::Ones(2));
  REQUIRE(lp.status == LpResult::Status::Optimal);
  CHECK(lp.objective == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lp.x[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lp.primal_infeasibility <= 1e-10);
}

TEST_CASE("random feasible programs end at certified optima") {
  for (int trial = 0; trial < 20; ++trial) {
    RngStream r(700 + trial);
    Mat A = gaussian_mat(6, 14, 7000 + trial);
    Vec x0 = Vec::Zero(14);
    for (int s = 0; s < 5; ++s)
      x0[static_cast<Eigen::Index>(r.uniform_below(14))] = 2.0 * r.uniform01();
    Vec b = A * x0;
    Vec c(14);
    for (Eigen::Index i = 0; i < 14; ++i) c[i] = 0.1 + r.uniform01();

    LpResult lp = solve_lp(A, b, c);
    REQUIRE(lp.status == LpResult::Status::Optimal);
    CHECK(lp.pivots > 0);
    CHECK(lp.max_dual_violation <= 1e-7);
    CHECK(lp.primal_infeasibility <= 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>()));
    CHECK(lp.x.minCoeff() >= -1e-12);
    // x0 is feasible, so the optimum cannot cost more.
    CHECK(lp.objective <= c.dot(x0) + 1e-9);
    CHECK(lp.objective >= -1e-9);
  }
}

TEST_CASE("pursuit on a single wide row finds the sparsest direction") {
  Mat X(1, 2);
  X << 1, 2;
  Vec y(1);
  y << 2;
  SolverSolution sol = basis_pursuit(y, wrap(X));
  CHECK(std::abs(sol.estimate[0]) <= 1e-12);
  CHECK(sol.estimate[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.lambda_or_R == 0.0);
  CHECK(sol.residual_norm2_sq <= 1e-20);
}

TEST_CASE("pursuit through an identity design reproduces the target") {
  RngStream r(710);
  Vec y = normal_vector(5, r);
  SolverSolution sol = basis_pursuit(y, wrap(Mat::Identity(5, 5)));
  CHECK((sol.estimate - y).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(sol.objective == doctest::Approx(y.lpNorm<1>()).epsilon(1e-12));
}

TEST_CASE("pursuit refuses a target outside the column span") {
  Mat X(2, 1);
  X << 1, 1;
  Vec y(2);
  y << 1, 2;
  CHECK_THROWS_AS(basis_pursuit(y, wrap(X)), InfeasibleError);
  CHECK_THROWS_AS(basis_pursuit(Vec::Ones(3), wrap(X)), ParameterError);
}

TEST_CASE("pursuit never exceeds the mass of a known generator") {
  for (int trial = 0; trial < 10; ++trial) {
    Mat X = gaussian_mat(8, 20, 7200 + trial);
    RngStream r(720 + trial);
    Vec b0 = Vec::Zero(20);
    for (int s = 0; s < 3; ++s) {
      Eigen::Index j = static_cast<Eigen::Index>(r.uniform_below(20));
      b0[j] = (r.uniform01() < 0.5 ? -1.0 : 1.0) * (0.5 + r.uniform01());
    }
    Vec y = X * b0;
    SolverSolution sol = basis_pursuit(y, wrap(X));
    CHECK(sol.objective <= b0.lpNorm<1>() + 1e-7);
    CHECK((X * sol.estimate - y).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("a residual budget at or above the signal energy yields zero") {
  Mat X = gaussian_mat(6, 12, 730);
  RngStream r(731);
  Vec y = normal_vector(6, r);
  double e = y.squaredNorm();
  for (double budget : {e, 2.0 * e}) {
    SolverSolution sol = bpdn(y, wrap(X), budget);
    CHECK(sol.estimate.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(sol.residual_norm2_sq == doctest::Approx(e).epsilon(1e-12));
    CHECK(sol.lambda_or_R == budget);
  }
}

TEST_CASE("a zero residual budget reduces to exact pursuit") {
  Mat X = gaussian_mat(5, 12, 740);
  RngStream r(741);
  Vec y = normal_vector(5, r);
  SolverSolution tight = bpdn(y, wrap(X), 0.0);
  SolverSolution exact = basis_pursuit(y, wrap(X));
  CHECK((tight.estimate - exact.estimate).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK(tight.lambda_or_R == 0.0);
}

TEST_CASE("penalized and budget-constrained solves agree through the residual map") {
  for (int trial = 0; trial < 10; ++trial) {
    DesignMatrix X = wrap(gaussian_mat(15, 40, 7500 + trial));
    RngStream r(750 + trial);
    Vec y = normal_vector(15, r) * 2.0;
    double lambda = 0.3 + 0.2 * trial;

    SolverSolution pen = lasso(y, X, lambda);
    double budget = pen.residual_norm2_sq;
    if (budget <= 0 || budget >= y.squaredNorm()) continue;
    SolverSolution con = bpdn(y, X, budget);

    CHECK(std::abs(con.residual_norm2_sq - budget) <= 1e-3 * budget);
    CHECK((con.estimate - pen.estimate).lpNorm<Eigen::Infinity>() <=
          1e-4 * (1.0 + pen.estimate.lpNorm<Eigen::Infinity>()));
    CHECK(std::abs(con.estimate.lpNorm<1>() - pen.estimate.lpNorm<1>()) <=
          1e-4 * (1.0 + pen.estimate.lpNorm<1>()));
    CHECK(con.lambda_or_R == budget);
  }
}

TEST_CASE("loosening the residual budget never increases the mass") {
  DesignMatrix X = wrap(gaussian_mat(10, 25, 760));
  RngStream r(761);
  Vec y = normal_vector(10, r) * 3.0;
  double e = y.squaredNorm();
  double prev = std::numeric_limits<double>::infinity();
  for (double frac : {0.05, 0.2, 0.5, 0.8}) {
    SolverSolution sol = bpdn(y, X, frac * e);
    double mass = sol.estimate.lpNorm<1>();
    CHECK(mass <= prev + 1e-6);
    prev = mass;
  }
}

}  // TEST_SUITE
