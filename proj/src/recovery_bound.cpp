#include "signrec/recovery_bound.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/parallel.hpp"

namespace signrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool support_full_rank(const Mat& Xi) {
  if (Xi.cols() == 0) return true;
  if (Xi.cols() > Xi.rows()) return false;
  Eigen::JacobiSVD<Mat> svd(Xi);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1] > 1e-10 * sv[0];
}

}  // namespace

ZetaContext build_zeta_context(const DesignMatrix& X, const SignVector& s,
                               double sigma, double lambda) {
  X.validate();
  s.validate();
  if (s.p() != X.p())
    throw ParameterError("build_zeta_context: sign length differs from p");
  if (!(lambda > 0)) throw ParameterError("build_zeta_context: lambda must be > 0");
  if (!(sigma >= 0)) throw ParameterError("build_zeta_context: sigma must be >= 0");

  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  const int k = s.k();

  ZetaContext ctx;
  ctx.sigma = sigma;
  ctx.lambda = lambda;
  ctx.p = p;
  ctx.k = k;

  if (k == 0) {
    ctx.w = Vec::Zero(p);
    ctx.P = X.entries.transpose();
    return ctx;
  }

  Mat Xi(n, k);
  Vec si(k);
  for (int c = 0; c < k; ++c) {
    Xi.col(c) = X.entries.col(s.support[c]);
    si[c] = s.values[s.support[c]];
  }
  if (!support_full_rank(Xi))
    throw ParameterError(
        "build_zeta_context: support columns are rank deficient");

  Mat Xbar(n, p - k);
  {
    Eigen::Index out = 0;
    std::size_t pos = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (pos < s.support.size() && s.support[pos] == j) {
        ++pos;
        continue;
      }
      Xbar.col(out++) = X.entries.col(j);
    }
  }

  Eigen::LLT<Mat> llt(Mat(Xi.transpose() * Xi));
  if (llt.info() != Eigen::Success)
    throw ParameterError("build_zeta_context: support Gram factorization failed");

  Mat H = Xi * llt.solve(Mat(Xi.transpose()));
  Mat IH = Mat::Identity(n, n) - H;
  double proj_err = (IH * IH - IH).cwiseAbs().maxCoeff();
  if (proj_err > 1e-8)
    throw NumericalError("build_zeta_context: projector check failed (error " +
                         std::to_string(proj_err) + ")");

  ctx.w = Xbar.transpose() * (Xi * llt.solve(si));
  ctx.P = Xbar.transpose() * IH;
  return ctx;
}

McEstimate mc_bound(const ZetaContext& ctx, long n_draws, const RngStream& rng,
                    int threads) {
  if (n_draws < 1) throw ParameterError("mc_bound: n_draws must be >= 1");
  const Eigen::Index n = ctx.P.cols();
  const double scale = ctx.sigma / ctx.lambda;

  // Draws are processed in blocks so the noise map is applied as a
  // matrix-matrix product; each draw still has its own child stream.
  constexpr long kBlock = 256;
  const long n_blocks = (n_draws + kBlock - 1) / kBlock;
  std::vector<long> hits(static_cast<std::size_t>(n_blocks), 0);

  parallel_for(n_blocks, threads, [&](long blk) {
    long lo = blk * kBlock;
    long hi = std::min(n_draws, lo + kBlock);
    Mat E(n, hi - lo);
    for (long d = lo; d < hi; ++d) {
      RngStream st = rng.child(static_cast<std::uint64_t>(d));
      Vec col = normal_vector(n, st);
      E.col(d - lo) = col;
    }
    Mat Z = ctx.P * E;
    long count = 0;
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
      double m = (ctx.w + scale * Z.col(c)).lpNorm<Eigen::Infinity>();
      if (m <= 1.0) ++count;
    }
    hits[static_cast<std::size_t>(blk)] = count;
  });

  long total = 0;
  for (long h : hits) total += h;
  McEstimate est;
  est.n_draws = n_draws;
  est.p_hat = static_cast<double>(total) / static_cast<double>(n_draws);
  est.std_err = std::sqrt(std::max(est.p_hat * (1.0 - est.p_hat), 0.0) /
                          static_cast<double>(n_draws));
  return est;
}

namespace {

// Closed interval of penalty levels on which  |w_i + v_i / lambda| <= 1
// holds for every coordinate, for one noise realization v.  Empty is
// encoded as lo > hi.
struct LambdaInterval {
  double lo = 0.0;
  double hi = kInf;

  void add_constraint(double c, double v) {
    // Constraint: lambda * c >= v with lambda > 0.
    if (c > 0) {
      if (v > 0) lo = std::max(lo, v / c);
    } else if (c == 0) {
      if (v > 0) make_empty();
    } else {
      if (v >= 0)
        make_empty();
      else
        hi = std::min(hi, v / c);
    }
  }
  void make_empty() {
    lo = 1.0;
    hi = 0.0;
  }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool empty() const { return lo > hi; }
};

}  // namespace

CalibrationResult calibrate_lambda_full(const DesignMatrix& X, int k,
                                        double sigma, double target,
                                        long n_signs, long n_draws,
                                        SignMode mode, const RngStream& rng,
                                        int threads) {
  X.validate();
  const Eigen::Index n = X.n();
  const Eigen::Index p = X.p();
  if (k < 0 || k >= p)
    throw ParameterError("calibrate_lambda: need 0 <= k < p");
  if (!(sigma > 0)) throw ParameterError("calibrate_lambda: sigma must be > 0");
  if (!(target > 0 && target < 1))
    throw ParameterError("calibrate_lambda: target must lie in (0,1)");
  if (n_signs < 1 || n_draws < 1)
    throw ParameterError("calibrate_lambda: need n_signs, n_draws >= 1");

  const long total = n_signs * n_draws;
  std::vector<LambdaInterval> intervals(static_cast<std::size_t>(total));
  std::vector<double> margins(static_cast<std::size_t>(n_signs), 0.0);

  const RngStream sign_streams = rng.child(1);
  const RngStream noise_streams = rng.child(2);

  parallel_for(n_signs, threads, [&](long j) {
    SignVector s = sample_sign_vector(
        p, k, mode, sign_streams.child(static_cast<std::uint64_t>(j)));
    ZetaContext ctx;
    bool degenerate = false;
    try {
      ctx = build_zeta_context(X, s, sigma, 1.0);  // lambda folded out below
    } catch (const ParameterError&) {
      degenerate = true;  // dependent support columns: never recoverable
    }
    auto* out = &intervals[static_cast<std::size_t>(j * n_draws)];
    if (degenerate) {
      margins[static_cast<std::size_t>(j)] = -1.0;
      for (long d = 0; d < n_draws; ++d) out[d].make_empty();
      return;
    }
    margins[static_cast<std::size_t>(j)] =
        (ctx.w.size() > 0) ? 1.0 - ctx.w.lpNorm<Eigen::Infinity>() : 1.0;

    RngStream noise_j = noise_streams.child(static_cast<std::uint64_t>(j));
    constexpr long kBlock = 256;
    for (long lo_d = 0; lo_d < n_draws; lo_d += kBlock) {
      long hi_d = std::min(n_draws, lo_d + kBlock);
      Mat E(n, hi_d - lo_d);
      for (long d = lo_d; d < hi_d; ++d) {
        RngStream st = noise_j.child(static_cast<std::uint64_t>(d));
        E.col(d - lo_d) = normal_vector(n, st);
      }
      Mat V = sigma * (ctx.P * E);
      for (long d = lo_d; d < hi_d; ++d) {
        LambdaInterval iv;
        auto v = V.col(d - lo_d);
        for (Eigen::Index i = 0; i < v.size() && !iv.empty(); ++i) {
          iv.add_constraint(1.0 - ctx.w[i], v[i]);
          iv.add_constraint(1.0 + ctx.w[i], -v[i]);
        }
        out[d] = iv;
      }
    }
  });

  double mean_margin = 0.0;
  for (double m : margins) mean_margin += m;
  mean_margin /= static_cast<double>(n_signs);

  // Largest value the averaged estimate attains at any lambda: sweep the
  // interval endpoints.
  std::vector<double> starts, ends;
  starts.reserve(intervals.size());
  ends.reserve(intervals.size());
  for (const auto& iv : intervals) {
    if (iv.empty()) continue;
    starts.push_back(iv.lo);
    ends.push_back(iv.hi);
  }
  std::sort(starts.begin(), starts.end());
  std::sort(ends.begin(), ends.end());
  long best_active = 0, active = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < starts.size()) {
    if (starts[ia] <= ends[ib]) {
      ++active;
      best_active = std::max(best_active, active);
      ++ia;
    } else {
      --active;
      ++ib;
    }
  }
  const double max_achievable =
      static_cast<double>(best_active) / static_cast<double>(total);
  const double pooled_se =
      std::sqrt(target * (1.0 - target) / static_cast<double>(total));

  if (mean_margin <= 0)
    throw CalibrationError(
        "calibrate_lambda: mean margin over sign patterns is nonpositive (" +
            std::to_string(mean_margin) +
            "); the averaged bound cannot reach any target near 1",
        max_achievable);
  if (max_achievable < target - 2 * pooled_se)
    throw CalibrationError(
        "calibrate_lambda: target " + std::to_string(target) +
            " is unreachable; best achievable estimate is " +
            std::to_string(max_achievable),
        max_achievable);

  auto estimate_at = [&](double lam) {
    long count = 0;
    for (const auto& iv : intervals)
      if (iv.contains(lam)) ++count;
    return static_cast<double>(count) / static_cast<double>(total);
  };

  double max_col_norm = 0.0;
  for (Eigen::Index j = 0; j < p; ++j)
    max_col_norm = std::max(max_col_norm, X.entries.col(j).norm());
  double lam_lo = sigma;
  double lam_hi = sigma * static_cast<double>(p - k) * max_col_norm;

  std::vector<std::pair<double, double>> probes;
  auto probe = [&](double lam) {
    double e = estimate_at(lam);
    probes.emplace_back(lam, e);
    return e;
  };

  double e_hi = probe(lam_hi);
  for (int i = 0; i < 60 && e_hi < target; ++i) {
    lam_hi *= 2;
    e_hi = probe(lam_hi);
  }
  if (e_hi < target - 2 * pooled_se)
    throw CalibrationError(
        "calibrate_lambda: bracket expansion failed; best achievable is " +
            std::to_string(max_achievable),
        max_achievable);
  double e_lo = probe(lam_lo);
  for (int i = 0; i < 60 && e_lo >= target && lam_lo > 0; ++i) {
    lam_lo /= 2;
    e_lo = probe(lam_lo);
  }

  CalibrationResult res;
  res.n_signs = n_signs;
  res.n_draws = n_draws;
  res.max_achievable = max_achievable;

  double lam = lam_hi, est = e_hi;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lam_lo + lam_hi);
    double e = probe(mid);
    if (std::abs(e - target) <= 2 * pooled_se) {
      lam = mid;
      est = e;
      break;
    }
    if (e < target)
      lam_lo = mid;
    else
      lam_hi = mid;
    lam = mid;
    est = e;
    if ((lam_hi - lam_lo) <= 1e-12 * lam_hi) break;
  }

  // The averaged estimate should grow with the penalty; flag inversions
  // among the probes (possible when some sign patterns sit outside the
  // certified region).
  std::sort(probes.begin(), probes.end());
  for (std::size_t i = 1; i < probes.size(); ++i)
    if (probes[i].second < probes[i - 1].second - 4 * pooled_se)
      res.non_monotone = true;

  res.lambda = lam;
  res.p_hat = est;
  res.std_err = std::sqrt(std::max(est * (1.0 - est), 0.0) /
                          static_cast<double>(total));
  return res;
}

double calibrate_lambda(const DesignMatrix& X, int k, double sigma,
                        double target, long n_signs, long n_draws,
                        SignMode mode, const RngStream& rng, int threads) {
  return calibrate_lambda_full(X, k, sigma, target, n_signs, n_draws, mode,
                               rng, threads)
      .lambda;
}

}  // namespace signrec
