#pragma once

#include <vector>

#include "signrec/rng.hpp"
#include "signrec/types.hpp"

namespace signrec {

enum class CurveKind { Irrepresentability, Identifiability };

struct CurvePoint {
  int k = 0;
  double p_hat = 0.0;
  double std_err = 0.0;
  long n_samples = 0;
};

struct CurveResult {
  std::vector<CurvePoint> ic;
  std::vector<CurvePoint> idtf;
};

// Fraction of random k-sparse sign patterns certified at each k.  When both
// kinds are requested the same sign samples feed both certificates, so the
// pointwise dominance of the identifiability curve over the other one is
// exact on the sampled patterns, not just in expectation.  Sample j at
// sparsity k draws from rng.child(k).child(j), so a k value keeps its samples
// no matter how the grid is arranged.
CurveResult certificate_curves(const DesignMatrix& X, bool want_ic,
                               bool want_idtf, const std::vector<int>& k_grid,
                               long n_samples, SignMode mode,
                               const RngStream& rng, int threads = 1);

// Single-kind convenience wrapper.
std::vector<CurvePoint> certificate_curve(const DesignMatrix& X,
                                          CurveKind kind,
                                          const std::vector<int>& k_grid,
                                          long n_samples, SignMode mode,
                                          const RngStream& rng,
                                          int threads = 1);

}  // namespace signrec
