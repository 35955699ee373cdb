#pragma once

#include "signrec/rng.hpp"
#include "signrec/types.hpp"

namespace signrec {

// Draws a standard normal vector of the given length.
Vec normal_vector(Eigen::Index n, RngStream& rng);

// Random design matrix, filled row by row.
//
// Setting1: iid N(0,1) entries.  Setting2: each row is an equicorrelated
// Gaussian vector with unit variances and pairwise correlation rho, realized
// as sqrt(1-rho)*Z_j + sqrt(rho)*W with W shared within the row.
// Requires n <= p (the matrices this models are wide), rho in [0,1).
DesignMatrix gen_design(DesignSetting setting, Eigen::Index n, Eigen::Index p,
                        double rho, RngStream rng);

// Uniform sign pattern: support is a uniform k-subset of {0..p-1}; signs are
// iid uniform on {-1,+1} (Symmetric) or all +1 (Positive).  k = 0 gives the
// zero pattern.
SignVector sample_sign_vector(Eigen::Index p, int k, SignMode mode,
                              RngStream rng);

// Simulated instance: beta = t * sign pattern, response = X beta + sigma * eps.
// Stream consumption order: support, then signs, then noise.
RegressionInstance gen_instance(std::shared_ptr<const DesignMatrix> design,
                                const SignalSpec& spec, double sigma,
                                RngStream rng);

}  // namespace signrec
