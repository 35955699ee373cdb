#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace signrec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class DesignSetting { Setting1, Setting2, Custom };

enum class SignMode { Symmetric, Positive };

std::string to_string(DesignSetting s);

// A fixed n x p design with a tag recording where it came from.
struct DesignMatrix {
  Mat entries;
  DesignSetting setting = DesignSetting::Custom;
  double rho = 0.0;  // equicorrelation level used at generation time, 0 otherwise

  Eigen::Index n() const { return entries.rows(); }
  Eigen::Index p() const { return entries.cols(); }

  // Throws ParameterError on empty dimensions or non-finite entries.
  void validate() const;
};

// Sparse sign pattern in {-1, 0, +1}^p with its support cached.
struct SignVector {
  Eigen::VectorXi values;  // entries in {-1, 0, +1}
  std::vector<int> support;  // sorted indices of nonzero entries

  Eigen::Index p() const { return values.size(); }
  int k() const { return static_cast<int>(support.size()); }

  void validate() const;  // checks entry range and support consistency
  bool operator==(const SignVector& other) const;
};

// Builds a SignVector from raw {-1,0,1} values (recomputes the support).
SignVector make_sign_vector(const Eigen::VectorXi& values);

// Entrywise sign map applied to a real vector: exact zeros stay zero.
SignVector sign_of(const Vec& x);

// How to place and sign the k nonzero coefficients of a signal.
struct SignalSpec {
  int k = 1;
  double t = 1.0;  // common magnitude of the nonzero coefficients
  SignMode sign_mode = SignMode::Symmetric;
  // Empty: support drawn uniformly without replacement.  Set: use these indices.
  std::optional<std::vector<int>> fixed_support;
};

// One simulated data set Y = X beta + noise.
struct RegressionInstance {
  std::shared_ptr<const DesignMatrix> design;
  Vec beta;
  double sigma = 0.0;
  Vec noise;     // kept so instances can be reconstructed exactly
  Vec response;  // X beta + noise
};

}  // namespace signrec
