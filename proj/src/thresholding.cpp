#include "signrec/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/parallel.hpp"
#include "signrec/solvers.hpp"

namespace signrec {

Vec apply_threshold(const Vec& estimate, double tau) {
  if (!(tau >= 0)) throw ParameterError("apply_threshold: tau must be >= 0");
  Vec out = estimate;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::abs(out[i]) <= tau) out[i] = 0.0;
  return out;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty())
    throw ParameterError("empirical_quantile: empty sample");
  if (!(q >= 0 && q <= 1))
    throw ParameterError("empirical_quantile: q must lie in [0,1]");
  std::sort(values.begin(), values.end());
  auto n = static_cast<long>(values.size());
  long idx = static_cast<long>(std::ceil(q * static_cast<double>(n)));
  idx = std::clamp(idx, 1L, n);
  return values[static_cast<std::size_t>(idx - 1)];
}

Mat knockoff_columns(const DesignMatrix& X, int count, double rho,
                     bool naive_iid, RngStream rng) {
  X.validate();
  if (count < 1) throw ParameterError("knockoff_columns: count must be >= 1");
  if (!(rho >= 0 && rho < 1))
    throw ParameterError("knockoff_columns: rho must lie in [0,1)");

  const Eigen::Index n = X.n();
  Mat cols(n, count);
  if (rho == 0.0 || naive_iid) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (int j = 0; j < count; ++j) cols(i, j) = rng.normal();
    return cols;
  }

  const double pd = static_cast<double>(X.p());
  const double denom = 1.0 - rho + pd * rho;
  const double mean_coef = rho / denom;
  const double rho_cond = rho * (1.0 - rho) / denom;  // shared-part variance
  const double a = std::sqrt(rho_cond);
  const double b = std::sqrt(1.0 - rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mean = mean_coef * X.entries.row(i).sum();
    double shared = rng.normal();
    for (int j = 0; j < count; ++j)
      cols(i, j) = mean + a * shared + b * rng.normal();
  }
  return cols;
}

double knockoff_threshold(const DesignMatrix& X,
                          const std::function<Vec(RngStream)>& make_response,
                          const AugmentedEstimator& estimator,
                          const KnockoffConfig& cfg, const RngStream& rng,
                          int threads) {
  X.validate();
  if (cfg.batch_columns < 1 || cfg.batches < 1 || cfg.n_replicates < 1)
    throw ParameterError("knockoff_threshold: batch/replicate counts must be >= 1");
  if (!(cfg.quantile > 0 && cfg.quantile <= 1))
    throw ParameterError("knockoff_threshold: quantile must lie in (0,1]");
  if (static_cast<Eigen::Index>(cfg.batch_columns) * cfg.batches != X.p())
    std::cerr << "knockoff_threshold: note: batches cover "
              << cfg.batch_columns * cfg.batches << " columns, design has "
              << X.p() << "\n";

  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  std::vector<double> stats(static_cast<std::size_t>(cfg.n_replicates), 0.0);

  parallel_for(cfg.n_replicates, threads, [&](long r) {
    RngStream rep = rng.child(static_cast<std::uint64_t>(r));
    Vec y = make_response(rep.child(0));
    if (y.size() != n)
      throw ParameterError("knockoff_threshold: response length differs from n");
    double worst = 0.0;
    DesignMatrix aug;
    aug.setting = DesignSetting::Custom;
    aug.entries.resize(n, p + cfg.batch_columns);
    aug.entries.leftCols(p) = X.entries;
    for (int b = 0; b < cfg.batches; ++b) {
      aug.entries.rightCols(cfg.batch_columns) = knockoff_columns(
          X, cfg.batch_columns, cfg.rho, cfg.naive_iid,
          rep.child(1 + static_cast<std::uint64_t>(b)));
      Vec coef = estimator(aug, y);
      if (coef.size() != aug.entries.cols())
        throw ParameterError(
            "knockoff_threshold: estimator returned wrong length");
      double m = coef.tail(cfg.batch_columns).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, m);
    }
    stats[static_cast<std::size_t>(r)] = worst;
  });

  return empirical_quantile(std::move(stats), cfg.quantile);
}

double full_null_threshold(const DesignMatrix& X, double sigma, double alpha,
                           long n_replicates, const RngStream& rng,
                           int threads) {
  X.validate();
  if (!(sigma >= 0)) throw ParameterError("full_null_threshold: sigma must be >= 0");
  if (!(alpha > 0 && alpha < 1))
    throw ParameterError("full_null_threshold: alpha must lie in (0,1)");
  if (n_replicates < 1)
    throw ParameterError("full_null_threshold: n_replicates must be >= 1");

  std::vector<double> stats(static_cast<std::size_t>(n_replicates), 0.0);
  parallel_for(n_replicates, threads, [&](long r) {
    RngStream rep = rng.child(static_cast<std::uint64_t>(r));
    Vec eps = sigma * normal_vector(X.n(), rep);
    SolverSolution sol = basis_pursuit(eps, X);
    stats[static_cast<std::size_t>(r)] =
        sol.estimate.lpNorm<Eigen::Infinity>();
  });
  return empirical_quantile(std::move(stats), 1.0 - alpha);
}

RecoveryFlags recovery_flags(const SignVector& truth, const Vec& estimate) {
  if (truth.p() != estimate.size())
    throw ParameterError("recovery_flags: length mismatch");
  RecoveryFlags f;
  f.exact_recovery = true;
  f.support_recovered = true;
  for (Eigen::Index i = 0; i < estimate.size(); ++i) {
    int est_sign = (estimate[i] > 0) - (estimate[i] < 0);
    int true_sign = truth.values[i];
    if (true_sign == 0) {
      if (est_sign != 0) {
        f.false_positive = true;
        f.exact_recovery = false;
      }
    } else {
      if (est_sign != true_sign) {
        f.exact_recovery = false;
        f.support_recovered = false;
      }
    }
  }
  return f;
}

RecoveryRates fwer_and_recovery(const SignVector& truth,
                                const std::vector<Vec>& estimates) {
  if (estimates.empty())
    throw ParameterError("fwer_and_recovery: no estimates");
  RecoveryRates r;
  r.n = static_cast<long>(estimates.size());
  long fp = 0, exact = 0, supp = 0;
  for (const auto& e : estimates) {
    RecoveryFlags f = recovery_flags(truth, e);
    fp += f.false_positive;
    exact += f.exact_recovery;
    supp += f.support_recovered;
  }
  auto rate = [&](long c) { return static_cast<double>(c) / static_cast<double>(r.n); };
  auto se = [&](double p) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(r.n));
  };
  r.fwer = rate(fp);
  r.fwer_se = se(r.fwer);
  r.recovery = rate(exact);
  r.recovery_se = se(r.recovery);
  r.support_power = rate(supp);
  return r;
}

}  // namespace signrec
