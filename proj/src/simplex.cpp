#include "signrec/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "signrec/errors.hpp"

namespace signrec {

namespace {

constexpr double kEnterTol = 1e-9;  // reduced-cost violation worth pivoting on

// Tableau is stored row-major: pivoting is row arithmetic.
using Tableau =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Phase {
  Tableau& T;
  std::vector<int>& basis;
  std::vector<char>& excluded;
  long& pivots;
  long pivot_budget;
  double pivot_tol;
  Eigen::Index n_structural;
  int perturbations = 0;

  // Runs simplex iterations on the current tableau until no entering column
  // remains.  Returns false when an unbounded ray is detected.
  bool run() {
    const Eigen::Index m = T.rows() - 1;
    const Eigen::Index ncols = T.cols() - 1;
    const Eigen::Index rhs = ncols;
    bool bland = false;
    int stall = 0;
    double prev_obj = -T(m, rhs);

    for (;;) {
      // Entering column.  The cutoff is relative to the objective scale:
      // chasing reduced costs below roundoff level grinds through
      // combinatorially many zero-progress bases at degenerate vertices.
      Eigen::Index enter = -1;
      double best = -kEnterTol * (1.0 + std::abs(prev_obj));
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (excluded[static_cast<std::size_t>(j)]) continue;
        double rc = T(m, j);
        if (rc < best) {
          best = rc;
          enter = j;
          if (bland) break;  // smallest violating index wins
        }
      }
      if (enter < 0) return true;

      // Ratio test: exact minimum, exact ties broken by smallest basic
      // index.  Approximate tie windows would let the chosen row miss the
      // true minimum ratio, which is what voids Bland's no-cycling proof.
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        double a = T(i, enter);
        if (a <= pivot_tol) continue;
        double ratio = std::max(T(i, rhs), 0.0) / a;
        if (ratio < best_ratio) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio == best_ratio && leave >= 0 &&
                   basis[static_cast<std::size_t>(i)] <
                       basis[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return false;

      pivot(leave, enter);
      if (++pivots > pivot_budget)
        throw NumericalError("simplex: pivot budget exhausted");

      double obj = -T(m, rhs);
      // Noise-level decreases do not count as progress: a degenerate vertex
      // can bleed the objective by ~1e-12 per pivot indefinitely.
      if (obj < prev_obj - 1e-10 * (1.0 + std::abs(prev_obj))) {
        stall = 0;
        bland = false;
      } else if (++stall > 100) {
        stall = 0;
        if (perturbations < 2) {
          // Degenerate shuffle: shift the basic values by tiny distinct
          // amounts so every ratio test has a strict minimizer again.  The
          // final vertex is re-solved from the unshifted data, so the shift
          // never reaches the reported solution.
          ++perturbations;
          double scale =
              1e-11 * (1.0 + T.col(rhs).head(m).cwiseAbs().maxCoeff());
          for (Eigen::Index i = 0; i < m; ++i) {
            double frac = std::fmod(
                0.61803398874989485 * static_cast<double>(i + 1), 1.0);
            T(i, rhs) += scale * (0.5 + frac);
          }
        } else {
          bland = true;  // smallest-index pricing until real progress resumes
        }
      }
      prev_obj = obj;
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    T.row(row) /= T(row, col);
    Eigen::VectorXd f = T.col(col);
    f[row] = 0.0;
    T.noalias() -= f * T.row(row);
    T.col(col).setZero();
    T(row, col) = 1.0;
    int leaving = basis[static_cast<std::size_t>(row)];
    basis[static_cast<std::size_t>(row)] = static_cast<int>(col);
    // An artificial that leaves the basis never needs to come back.
    if (leaving >= n_structural) excluded[static_cast<std::size_t>(leaving)] = true;
  }
};

}  // namespace

LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c, double pivot_tol) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n)
    throw ParameterError("solve_lp: inconsistent dimensions");
  if (m < 1 || n < 1) throw ParameterError("solve_lp: empty program");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw ParameterError("solve_lp: non-finite input");

  // Work copies with nonnegative right-hand side.
  Mat Aw = A;
  Vec bw = b;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (bw[i] < 0) {
      bw[i] = -bw[i];
      Aw.row(i) = -Aw.row(i);
    }
  }

  const Eigen::Index ncols = n + m;  // structural then artificial
  const Eigen::Index rhs = ncols;
  Tableau T = Tableau::Zero(m + 1, ncols + 1);
  T.topLeftCorner(m, n) = Aw;
  T.block(0, n, m, m).setIdentity();
  T.col(rhs).head(m) = bw;

  std::vector<int> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);
  std::vector<char> excluded(static_cast<std::size_t>(ncols), 0);

  LpResult res;
  long pivot_budget = 50000 + 100 * static_cast<long>(m + ncols);
  Phase ph{T, basis, excluded, res.pivots, pivot_budget, pivot_tol, n};

  // Phase 1: minimize the artificial sum.  With the artificial basis the
  // reduced cost of structural column j is -sum_i Aw(i,j).
  for (Eigen::Index j = 0; j < n; ++j) T(m, j) = -T.col(j).head(m).sum();
  T(m, rhs) = -bw.sum();
  if (!ph.run())
    throw NumericalError("simplex: phase 1 reported an unbounded ray");

  double infeas = -T(m, rhs);
  if (infeas > 1e-7 * std::max(1.0, bw.lpNorm<Eigen::Infinity>())) {
    res.status = LpResult::Status::Infeasible;
    res.x = Vec::Zero(n);
    return res;
  }

  // Drive any artificial still basic (at level ~0) out of the basis; a row
  // with no usable structural entry is redundant and gets dropped.
  std::vector<Eigen::Index> drop;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n) continue;
    Eigen::Index piv = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (excluded[static_cast<std::size_t>(j)]) continue;
      if (std::abs(T(i, j)) > pivot_tol) {
        piv = j;
        break;
      }
    }
    if (piv >= 0)
      ph.pivot(i, piv);
    else
      drop.push_back(i);
  }
  if (!drop.empty()) {
    Tableau T2(T.rows() - static_cast<Eigen::Index>(drop.size()), T.cols());
    std::vector<int> basis2;
    Eigen::Index out = 0;
    std::size_t d = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (d < drop.size() && drop[d] == i) {
        ++d;
        continue;
      }
      T2.row(out++) = T.row(i);
      basis2.push_back(basis[static_cast<std::size_t>(i)]);
    }
    T2.row(out) = T.row(m);
    T = std::move(T2);
    basis = std::move(basis2);
  }
  const Eigen::Index m2 = T.rows() - 1;

  // All artificial columns are dead from here on.
  for (Eigen::Index j = n; j < ncols; ++j)
    excluded[static_cast<std::size_t>(j)] = 1;

  // Phase 2: install the real objective and price out the current basis.
  T.row(m2).setZero();
  T.row(m2).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < m2; ++i) {
    int bj = basis[static_cast<std::size_t>(i)];
    double cost = c[bj];
    if (cost != 0.0) T.row(m2) -= cost * T.row(i);
  }
  if (!ph.run()) {
    res.status = LpResult::Status::Unbounded;
    res.x = Vec::Zero(n);
    return res;
  }

  // Re-solve the basic system from the original (sign-fixed) data so the
  // vertex is free of accumulated tableau roundoff.  Rows dropped as
  // redundant also vanish from the clean solve.
  Mat Ak(m2, n);
  Vec bk(m2);
  {
    Eigen::Index out = 0;
    std::size_t d = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (d < drop.size() && drop[d] == i) {
        ++d;
        continue;
      }
      Ak.row(out) = Aw.row(i);
      bk[out] = bw[i];
      ++out;
    }
  }
  Mat Bk(m2, m2);
  for (Eigen::Index i = 0; i < m2; ++i)
    Bk.col(i) = Ak.col(basis[static_cast<std::size_t>(i)]);

  res.x = Vec::Zero(n);
  Eigen::ColPivHouseholderQR<Mat> qr(Bk);
  if (qr.rank() == m2) {
    Vec xb = qr.solve(bk);
    for (Eigen::Index i = 0; i < m2; ++i)
      res.x[basis[static_cast<std::size_t>(i)]] = xb[i];
    // Honest dual check against the original data.
    Vec cb(m2);
    for (Eigen::Index i = 0; i < m2; ++i)
      cb[i] = c[basis[static_cast<std::size_t>(i)]];
    Vec y = qr.transpose().solve(cb);
    Vec rc = c - Ak.transpose() * y;
    res.max_dual_violation = std::max(0.0, -rc.minCoeff());
  } else {
    // Fall back on tableau values if the clean basis went numerically rank
    // deficient (drifted pivots); keep the tableau's own dual signal.
    for (Eigen::Index i = 0; i < m2; ++i)
      res.x[basis[static_cast<std::size_t>(i)]] = std::max(T(i, rhs), 0.0);
    double min_rc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      min_rc = std::min(min_rc, T(m2, j));
    res.max_dual_violation = -min_rc;
  }
  res.primal_infeasibility = (Ak * res.x - bk).lpNorm<Eigen::Infinity>();
  res.objective = c.dot(res.x);
  res.status = LpResult::Status::Optimal;
  return res;
}

}  // namespace signrec
