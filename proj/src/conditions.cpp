#include "signrec/conditions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "signrec/errors.hpp"
#include "signrec/simplex.hpp"
#include "signrec/solvers.hpp"

namespace signrec {

namespace {

constexpr double kRankCutoff = 1e-10;   // relative singular-value cutoff
constexpr double kIdtfTol = 1e-7;       // equality tolerance for minimizers
constexpr double kBoundaryBand = 1e-7;  // half-width of the undecidable band
constexpr double kInf = std::numeric_limits<double>::infinity();

Mat support_columns(const DesignMatrix& X, const SignVector& s) {
  Mat Xi(X.n(), s.k());
  for (int c = 0; c < s.k(); ++c) Xi.col(c) = X.entries.col(s.support[c]);
  return Xi;
}

bool full_column_rank(const Mat& m) {
  if (m.cols() == 0) return true;
  if (m.cols() > m.rows()) return false;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1] > kRankCutoff * sv[0];
}

void check_inputs(const DesignMatrix& X, const SignVector& s,
                  const char* where) {
  X.validate();
  s.validate();
  if (s.p() != X.p())
    throw ParameterError(std::string(where) + ": sign length differs from p");
}

}  // namespace

CertificateReport irrepresentability_indicator(const DesignMatrix& X,
                                               const SignVector& s) {
  check_inputs(X, s, "irrepresentability_indicator");
  CertificateReport rep;
  const int k = s.k();
  if (k == 0) {
    rep.indicator = 1;
    rep.margin = 1.0;
    return rep;
  }

  Mat Xi = support_columns(X, s);
  if (!full_column_rank(Xi)) {
    rep.indicator = 0;
    rep.margin = -kInf;  // the normal equations have no unique solution
    return rep;
  }

  Vec si(k);
  for (int c = 0; c < k; ++c) si[c] = s.values[s.support[c]];
  Mat gram = Xi.transpose() * Xi;
  Vec gsolve = gram.llt().solve(si);
  Vec t = Xi * gsolve;

  const Eigen::Index p = X.p();
  Vec w(p - k);
  Eigen::Index out = 0;
  std::size_t si_pos = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (si_pos < s.support.size() && s.support[si_pos] == j) {
      ++si_pos;
      continue;
    }
    w[out++] = X.entries.col(j).dot(t);
  }

  double norm = (p == k) ? 0.0 : w.lpNorm<Eigen::Infinity>();
  rep.margin = 1.0 - norm;
  rep.indicator = (norm <= 1.0) ? 1 : 0;
  rep.detail = w;
  return rep;
}

CertificateReport identifiability_indicator(const DesignMatrix& X,
                                            const SignVector& s) {
  check_inputs(X, s, "identifiability_indicator");
  CertificateReport rep;
  if (s.k() == 0) {
    rep.indicator = 1;
    rep.margin = kIdtfTol;
    return rep;
  }
  Vec sd = s.values.cast<double>();
  SolverSolution sol = basis_pursuit(X.entries * sd, X);
  double dist = (sol.estimate - sd).lpNorm<Eigen::Infinity>();
  rep.indicator = (dist <= kIdtfTol) ? 1 : 0;
  rep.margin = kIdtfTol - dist;
  rep.detail = sol.estimate;
  return rep;
}

CertificateReport kernel_certificate(const DesignMatrix& X,
                                     const SignVector& s) {
  check_inputs(X, s, "kernel_certificate");
  CertificateReport rep;

  // Kernel basis of X from the right singular vectors.
  Eigen::JacobiSVD<Mat> svd(X.entries, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = (sv.size() > 0) ? kRankCutoff * sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  const Eigen::Index p = X.p();
  const Eigen::Index d = p - rank;
  if (d == 0) {
    rep.indicator = 1;
    rep.margin = kInf;  // no kernel direction exists, the condition is vacuous
    return rep;
  }
  Mat N = svd.matrixV().rightCols(d);

  const int k = s.k();
  // Directions supported entirely inside I have zero objective and zero
  // off-support mass, so the program below cannot see them; they break
  // identifiability whenever they exist.
  if (k > 0 && !full_column_rank(support_columns(X, s))) {
    rep.indicator = 0;
    rep.margin = -kInf;
    return rep;
  }

  Mat Ni(k, d);
  Vec si(k);
  for (int c = 0; c < k; ++c) {
    Ni.row(c) = N.row(s.support[c]);
    si[c] = s.values[s.support[c]];
  }
  Mat Nbar(p - k, d);
  {
    Eigen::Index out = 0;
    std::size_t pos = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (pos < s.support.size() && s.support[pos] == j) {
        ++pos;
        continue;
      }
      Nbar.row(out++) = N.row(j);
    }
  }

  // maximize si'Ni z  over  Nbar z = a - b,  sum(a+b) + slack = 1,  a,b,slack >= 0.
  // Variables: z+ (d), z- (d), a (p-k), b (p-k), slack (1).
  const Eigen::Index rows = (p - k) + 1;
  const Eigen::Index cols = 2 * d + 2 * (p - k) + 1;
  Mat A = Mat::Zero(rows, cols);
  Vec rhs = Vec::Zero(rows);
  A.block(0, 0, p - k, d) = Nbar;
  A.block(0, d, p - k, d) = -Nbar;
  A.block(0, 2 * d, p - k, p - k) = -Mat::Identity(p - k, p - k);
  A.block(0, 2 * d + (p - k), p - k, p - k) = Mat::Identity(p - k, p - k);
  A.row(p - k).segment(2 * d, 2 * (p - k)).setOnes();
  A(p - k, cols - 1) = 1.0;
  rhs[p - k] = 1.0;

  Vec cost = Vec::Zero(cols);
  Vec obj = Ni.transpose() * si;  // objective on z, to be maximized
  cost.head(d) = -obj;
  cost.segment(d, d) = obj;

  LpResult lp = solve_lp(A, rhs, cost);
  if (lp.status == LpResult::Status::Infeasible)
    throw NumericalError("kernel_certificate: feasible program reported infeasible");
  if (lp.status == LpResult::Status::Unbounded) {
    // A kernel direction with zero off-support mass and nonzero objective.
    rep.indicator = 0;
    rep.margin = -kInf;
    return rep;
  }

  double vstar = -lp.objective;
  rep.margin = 1.0 - vstar;
  rep.boundary = std::abs(vstar - 1.0) <= kBoundaryBand;
  rep.indicator = (vstar < 1.0 - kBoundaryBand) ? 1 : 0;
  Vec z = lp.x.head(d) - lp.x.segment(d, d);
  rep.detail = N * z;
  return rep;
}

double mutual_coherence_bound(const DesignMatrix& X) {
  X.validate();
  const Eigen::Index p = X.p();
  Mat U(X.n(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double norm = X.entries.col(j).norm();
    if (norm == 0.0)
      throw ParameterError("mutual_coherence_bound: zero column");
    U.col(j) = X.entries.col(j) / norm;
  }
  double M = 0.0;
  for (Eigen::Index j = 1; j < p; ++j) {
    Vec g = U.leftCols(j).transpose() * U.col(j);
    M = std::max(M, g.lpNorm<Eigen::Infinity>());
  }
  if (M < 1e-12) return kInf;  // orthogonal columns: every sparsity level works
  return 0.5 * (1.0 + 1.0 / M);
}

}  // namespace signrec
