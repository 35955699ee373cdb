#include "signrec/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "signrec/errors.hpp"

namespace signrec {

std::string to_string(DesignSetting s) {
  switch (s) {
    case DesignSetting::Setting1: return "setting1";
    case DesignSetting::Setting2: return "setting2";
    case DesignSetting::Custom: return "custom";
  }
  return "custom";
}

void DesignMatrix::validate() const {
  if (n() < 1 || p() < 1)
    throw ParameterError("DesignMatrix: need n >= 1 and p >= 1");
  if (!entries.allFinite())
    throw ParameterError("DesignMatrix: entries must be finite");
}

void SignVector::validate() const {
  std::vector<int> supp;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    int v = values[i];
    if (v < -1 || v > 1)
      throw ParameterError("SignVector: entries must lie in {-1,0,+1}");
    if (v != 0) supp.push_back(static_cast<int>(i));
  }
  if (supp != support)
    throw ParameterError("SignVector: support does not match nonzero entries");
}

bool SignVector::operator==(const SignVector& other) const {
  return values.size() == other.values.size() && values == other.values;
}

SignVector make_sign_vector(const Eigen::VectorXi& values) {
  SignVector s;
  s.values = values;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] != 0) s.support.push_back(static_cast<int>(i));
  }
  s.validate();
  return s;
}

SignVector sign_of(const Vec& x) {
  Eigen::VectorXi v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    v[i] = (x[i] > 0) - (x[i] < 0);
  return make_sign_vector(v);
}

Vec normal_vector(Eigen::Index n, RngStream& rng) {
  Vec v(n);
  rng.fill_normal(v.data(), static_cast<std::size_t>(n));
  return v;
}

DesignMatrix gen_design(DesignSetting setting, Eigen::Index n, Eigen::Index p,
                        double rho, RngStream rng) {
  if (n < 1 || p < 1) throw ParameterError("gen_design: need n >= 1, p >= 1");
  if (n > p) throw ParameterError("gen_design: generated designs are wide (n <= p)");
  if (!(rho >= 0.0 && rho < 1.0))
    throw ParameterError("gen_design: rho must lie in [0,1)");
  if (setting == DesignSetting::Custom)
    throw ParameterError("gen_design: custom matrices are loaded, not generated");

  DesignMatrix d;
  d.setting = setting;
  d.rho = (setting == DesignSetting::Setting2) ? rho : 0.0;
  d.entries.resize(n, p);

  if (setting == DesignSetting::Setting1) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        d.entries(i, j) = rng.normal();
  } else {
    const double a = std::sqrt(1.0 - rho);
    const double b = std::sqrt(rho);
    for (Eigen::Index i = 0; i < n; ++i) {
      double w = rng.normal();  // component shared across the row
      for (Eigen::Index j = 0; j < p; ++j)
        d.entries(i, j) = a * rng.normal() + b * w;
    }
  }
  return d;
}

SignVector sample_sign_vector(Eigen::Index p, int k, SignMode mode,
                              RngStream rng) {
  if (p < 1) throw ParameterError("sample_sign_vector: p must be positive");
  if (k < 0 || k > p)
    throw ParameterError("sample_sign_vector: need 0 <= k <= p");

  SignVector s;
  s.values = Eigen::VectorXi::Zero(p);
  if (k == 0) return s;

  // Partial Fisher-Yates draw of a uniform k-subset.
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(
                     rng.uniform_below(static_cast<std::uint64_t>(p - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  s.support.assign(idx.begin(), idx.begin() + k);
  std::sort(s.support.begin(), s.support.end());

  for (int i : s.support) {
    int sign = 1;
    if (mode == SignMode::Symmetric) sign = (rng.next_u64() & 1) ? 1 : -1;
    s.values[i] = sign;
  }
  return s;
}

RegressionInstance gen_instance(std::shared_ptr<const DesignMatrix> design,
                                const SignalSpec& spec, double sigma,
                                RngStream rng) {
  if (!design) throw ParameterError("gen_instance: null design");
  design->validate();
  const Eigen::Index p = design->p();
  if (spec.k < 1 || spec.k > p)
    throw ParameterError("gen_instance: need 1 <= k <= p");
  if (!(spec.t > 0)) throw ParameterError("gen_instance: t must be positive");
  if (!(sigma >= 0)) throw ParameterError("gen_instance: sigma must be >= 0");

  SignVector s;
  if (spec.fixed_support) {
    if (static_cast<int>(spec.fixed_support->size()) != spec.k)
      throw ParameterError("gen_instance: fixed support size differs from k");
    Eigen::VectorXi v = Eigen::VectorXi::Zero(p);
    for (int i : *spec.fixed_support) {
      if (i < 0 || i >= p)
        throw ParameterError("gen_instance: fixed support index out of range");
      if (v[i] != 0)
        throw ParameterError("gen_instance: fixed support has duplicates");
      int sign = 1;
      if (spec.sign_mode == SignMode::Symmetric)
        sign = (rng.next_u64() & 1) ? 1 : -1;
      v[i] = sign;
    }
    s = make_sign_vector(v);
  } else {
    s = sample_sign_vector(p, spec.k, spec.sign_mode, rng);
  }

  RegressionInstance inst;
  inst.design = std::move(design);
  inst.sigma = sigma;
  inst.beta = spec.t * s.values.cast<double>();
  if (sigma > 0) {
    inst.noise = sigma * normal_vector(inst.design->n(), rng);
  } else {
    inst.noise = Vec::Zero(inst.design->n());
  }
  inst.response = inst.design->entries * inst.beta + inst.noise;
  return inst;
}

}  // namespace signrec
