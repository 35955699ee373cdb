#pragma once

#include <functional>
#include <vector>

#include "signrec/rng.hpp"
#include "signrec/types.hpp"

namespace signrec {

// Zeroes every entry with |b_i| <= tau; the surviving entries keep their value.
Vec apply_threshold(const Vec& estimate, double tau);

// Order statistic at probability q: after sorting ascending, the value at
// 1-based index ceil(q * N), clamped to [1, N].
double empirical_quantile(std::vector<double> values, double q);

// Null columns appended to a design for threshold selection.  rho = 0 (or
// naive_iid) draws iid standard normal entries.  rho > 0 draws, per row, the
// exact conditional law of `count` additional coordinates of the
// equicorrelated Gaussian model given the realized row: common mean
// rho * rowsum / (1 - rho + p rho), covariance (1-rho) I + rho' J with
// rho' = rho (1-rho) / (1 - rho + p rho).
Mat knockoff_columns(const DesignMatrix& X, int count, double rho,
                     bool naive_iid, RngStream rng);

struct KnockoffConfig {
  int batch_columns = 30;  // appended per batch; batches * batch_columns should equal p
  int batches = 10;
  long n_replicates = 1000;
  double quantile = 0.95;
  double rho = 0.0;
  bool naive_iid = false;
};

// Coefficient vector an estimator produces on an augmented design.
using AugmentedEstimator = std::function<Vec(const DesignMatrix&, const Vec&)>;

// Threshold calibrated on null coordinates: every replicate appends `batches`
// independent batches of fresh null columns to X, runs the estimator on each
// augmented design, and records the largest absolute coefficient any null
// column ever receives; the threshold is the `quantile` order statistic of
// those per-replicate maxima.
//
// `make_response` is called once per replicate with the replicate's stream:
// return a fresh simulated response for threshold selection under the data
// generating process, or ignore the stream and return a fixed response to
// condition on observed data.
double knockoff_threshold(const DesignMatrix& X,
                          const std::function<Vec(RngStream)>& make_response,
                          const AugmentedEstimator& estimator,
                          const KnockoffConfig& cfg, const RngStream& rng,
                          int threads = 1);

// (1 - alpha) quantile of || argmin ||b||_1 s.t. X b = eps ||_inf over pure
// noise eps ~ N(0, sigma^2 Id).
double full_null_threshold(const DesignMatrix& X, double sigma, double alpha,
                           long n_replicates, const RngStream& rng,
                           int threads = 1);

struct RecoveryFlags {
  bool false_positive = false;   // some null coordinate came out nonzero
  bool exact_recovery = false;   // the whole sign vector matches
  bool support_recovered = false;  // every true sign is recovered on-support
};

RecoveryFlags recovery_flags(const SignVector& truth, const Vec& estimate);

struct RecoveryRates {
  double fwer = 0.0;
  double fwer_se = 0.0;
  double recovery = 0.0;
  double recovery_se = 0.0;
  double support_power = 0.0;
  long n = 0;
};

RecoveryRates fwer_and_recovery(const SignVector& truth,
                                const std::vector<Vec>& estimates);

}  // namespace signrec
