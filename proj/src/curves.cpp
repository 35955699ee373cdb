#include "signrec/curves.hpp"

#include <cmath>
#include <string>

#include "signrec/conditions.hpp"
#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/parallel.hpp"

namespace signrec {

CurveResult certificate_curves(const DesignMatrix& X, bool want_ic,
                               bool want_idtf, const std::vector<int>& k_grid,
                               long n_samples, SignMode mode,
                               const RngStream& rng, int threads) {
  X.validate();
  if (!want_ic && !want_idtf)
    throw ParameterError("certificate_curves: no certificate kind requested");
  if (k_grid.empty()) throw ParameterError("certificate_curves: empty k grid");
  if (n_samples < 1)
    throw ParameterError("certificate_curves: n_samples must be >= 1");
  for (int k : k_grid)
    if (k < 0 || k > X.p())
      throw ParameterError("certificate_curves: k = " + std::to_string(k) +
                           " outside [0, p]");

  CurveResult result;
  for (int k : k_grid) {
    std::vector<char> ok_ic(static_cast<std::size_t>(n_samples), 0);
    std::vector<char> ok_idtf(static_cast<std::size_t>(n_samples), 0);
    RngStream k_stream = rng.child(static_cast<std::uint64_t>(k));

    parallel_for(n_samples, threads, [&](long j) {
      SignVector s = sample_sign_vector(
          X.p(), k, mode, k_stream.child(static_cast<std::uint64_t>(j)));
      try {
        if (want_ic)
          ok_ic[static_cast<std::size_t>(j)] =
              static_cast<char>(irrepresentability_indicator(X, s).indicator);
        if (want_idtf)
          ok_idtf[static_cast<std::size_t>(j)] =
              static_cast<char>(identifiability_indicator(X, s).indicator);
      } catch (const Error& e) {
        throw NumericalError("certificate_curves: k=" + std::to_string(k) +
                             " sample=" + std::to_string(j) + ": " + e.what());
      }
    });

    auto summarize = [&](const std::vector<char>& ok) {
      long hits = 0;
      for (char c : ok) hits += c;
      CurvePoint pt;
      pt.k = k;
      pt.n_samples = n_samples;
      pt.p_hat = static_cast<double>(hits) / static_cast<double>(n_samples);
      pt.std_err = std::sqrt(std::max(pt.p_hat * (1.0 - pt.p_hat), 0.0) /
                             static_cast<double>(n_samples));
      return pt;
    };
    if (want_ic) result.ic.push_back(summarize(ok_ic));
    if (want_idtf) result.idtf.push_back(summarize(ok_idtf));
  }
  return result;
}

std::vector<CurvePoint> certificate_curve(const DesignMatrix& X,
                                          CurveKind kind,
                                          const std::vector<int>& k_grid,
                                          long n_samples, SignMode mode,
                                          const RngStream& rng, int threads) {
  bool ic = kind == CurveKind::Irrepresentability;
  CurveResult r =
      certificate_curves(X, ic, !ic, k_grid, n_samples, mode, rng, threads);
  return ic ? r.ic : r.idtf;
}

}  // namespace signrec
