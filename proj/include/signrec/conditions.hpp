#pragma once

#include <optional>

#include "signrec/types.hpp"

namespace signrec {

// Outcome of a 0/1 certificate together with how far the instance sits from
// the decision boundary.  `margin` is positive inside the certified region
// and negative outside; degenerate cases use +/-infinity sentinels (an empty
// kernel makes the kernel condition vacuous, a rank-deficient support makes
// it unattainable).  `boundary` marks values too close to the decision value
// to call reliably.
struct CertificateReport {
  int indicator = 0;
  double margin = 0.0;
  bool boundary = false;
  std::optional<Vec> detail;  // witness vector, when one exists
};

// Sign-consistency condition on the design: with I the support of s,
// requires full column rank of X_I and || X_Ic' X_I (X_I'X_I)^{-1} s_I ||_inf
// <= 1.  Margin is 1 minus that norm; detail is the correlation vector.
CertificateReport irrepresentability_indicator(const DesignMatrix& X,
                                               const SignVector& s);

// Declares s identifiable when the minimum-l1 solution of X b = X s is s
// itself (l-infinity tolerance 1e-7).  Margin is tolerance minus distance;
// detail is the computed minimizer.
CertificateReport identifiability_indicator(const DesignMatrix& X,
                                            const SignVector& s);

// Exact identifiability test through the kernel:  s is identifiable iff
// every nonzero h in ker(X) satisfies |sum_{i in I} s_i h_i| < sum_{i not in I} |h_i|.
// Evaluated as a linear program over a kernel basis; requires ker(X_I) = {0}
// first (directions supported inside I are invisible to the program).
// Margin is 1 minus the program value; values within 1e-7 of 1 set `boundary`.
CertificateReport kernel_certificate(const DesignMatrix& X,
                                     const SignVector& s);

// Sparsity level below which every sign pattern is identifiable:
// 0.5 * (1 + 1/M) with M the largest absolute inner product between distinct
// unit-normalized columns.  Returns +infinity when all columns are orthogonal.
double mutual_coherence_bound(const DesignMatrix& X);

}  // namespace signrec
