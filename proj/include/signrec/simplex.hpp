#pragma once

#include "signrec/types.hpp"

namespace signrec {

// Dense two-phase primal simplex for  min c'x  s.t.  A x = b, x >= 0.
//
// Entering variable by largest reduced-cost violation, switching to Bland's
// rule while the objective stalls to rule out cycling.  After the final basis
// is found the basic values are re-solved from the original data, so the
// returned vertex does not carry accumulated tableau roundoff.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Optimal;
  Vec x;                 // structural variables only
  double objective = 0;  // c'x at the returned point
  long pivots = 0;
  double max_dual_violation = 0;  // largest negative reduced cost, clamped at 0
  double primal_infeasibility = 0;  // ||A x - b||_inf at the returned point
};

LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c,
                  double pivot_tol = 1e-10);

}  // namespace signrec
