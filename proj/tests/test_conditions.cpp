#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>

#include "signrec/conditions.hpp"
#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/rng.hpp"

using namespace signrec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

SignVector sv(std::initializer_list<int> vals) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (int x : vals) v[i++] = x;
  return make_sign_vector(v);
}

SignVector negate(const SignVector& s) { return make_sign_vector(-s.values); }

DesignMatrix custom(const Mat& m) {
  DesignMatrix d;
  d.entries = m;
  return d;
}

}  // namespace

TEST_SUITE("conditions") {

TEST_CASE("orthogonal off-support columns leave the full margin") {
  DesignMatrix X = custom(Mat::Identity(6, 6));
  CertificateReport rep = irrepresentability_indicator(X, sv({1, 0, 0, -1, 0, 0}));
  CHECK(rep.indicator == 1);
  CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.detail.has_value());
  CHECK(rep.detail->size() == 4);
  CHECK(rep.detail->lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("a rank-deficient support cannot be certified") {
  Mat m(3, 3);
  m.col(0) << 1, 1, 0;
  m.col(1) << 1, 1, 0;
  m.col(2) << 0, 0, 1;
  CertificateReport rep = irrepresentability_indicator(custom(m), sv({1, 1, 0}));
  CHECK(rep.indicator == 0);
  CHECK(rep.margin == -kInf);
}

TEST_CASE("a two-column instance reproduces the hand-computed correlation") {
  Mat m(2, 2);
  m.col(0) << 1, 0;
  m.col(1) << 0.8, 0.6;
  CertificateReport rep = irrepresentability_indicator(custom(m), sv({1, 0}));
  CHECK(rep.indicator == 1);
  CHECK(rep.margin == doctest::Approx(0.2).epsilon(1e-12));
  REQUIRE(rep.detail.has_value());
  CHECK((*rep.detail)[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("the correlation condition is even in the sign pattern") {
  for (int trial = 0; trial < 8; ++trial) {
    DesignMatrix X =
        gen_design(DesignSetting::Setting1, 12, 30, 0.0, RngStream(800 + trial));
    SignVector s = sample_sign_vector(30, 4, SignMode::Symmetric,
                                      RngStream(810 + trial));
    CertificateReport a = irrepresentability_indicator(X, s);
    CertificateReport b = irrepresentability_indicator(X, negate(s));
    CHECK(a.indicator == b.indicator);
    CHECK(a.margin == doctest::Approx(b.margin).epsilon(1e-12));
  }
}

TEST_CASE("identity designs identify every pattern") {
  DesignMatrix X = custom(Mat::Identity(5, 5));
  CertificateReport rep = identifiability_indicator(X, sv({1, -1, 0, 1, 0}));
  CHECK(rep.indicator == 1);
  CHECK(rep.margin >= 0.9e-7);
  REQUIRE(rep.detail.has_value());
  CHECK((*rep.detail)[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("a single wide row separates identifiable from unidentifiable") {
  Mat m(1, 2);
  m << 1, 2;
  DesignMatrix X = custom(m);

  CertificateReport good = identifiability_indicator(X, sv({0, 1}));
  CHECK(good.indicator == 1);

  // The cheapest way to hit X s = 1 is (0, 0.5), not (1, 0).
  CertificateReport bad = identifiability_indicator(X, sv({1, 0}));
  CHECK(bad.indicator == 0);
  CHECK(bad.margin < -0.5);
  REQUIRE(bad.detail.has_value());
  CHECK((*bad.detail)[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("the kernel program scores the same wide row") {
  Mat m(1, 2);
  m << 1, 2;
  DesignMatrix X = custom(m);

  // ker(X) = span{(2, -1)}.  Pattern (1,0): on-support mass 2 vs off mass 1.
  CertificateReport bad = kernel_certificate(X, sv({1, 0}));
  CHECK(bad.indicator == 0);
  CHECK(bad.margin == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_FALSE(bad.boundary);

  CertificateReport good = kernel_certificate(X, sv({0, 1}));
  CHECK(good.indicator == 1);
  CHECK(good.margin == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("an empty kernel makes the condition vacuous") {
  CertificateReport rep = kernel_certificate(custom(Mat::Identity(4, 4)),
                                             sv({1, 0, -1, 0}));
  CHECK(rep.indicator == 1);
  CHECK(rep.margin == kInf);
}

TEST_CASE("kernel directions inside the support defeat the program") {
  Mat m(2, 3);
  m.col(0) << 1, 1;
  m.col(1) << 1, 1;
  m.col(2) << 0, 1;
  CertificateReport rep = kernel_certificate(custom(m), sv({1, -1, 0}));
  CHECK(rep.indicator == 0);
  CHECK(rep.margin == -kInf);
}

TEST_CASE("an empty support certifies trivially everywhere") {
  DesignMatrix X = gen_design(DesignSetting::Setting1, 4, 9, 0.0, RngStream(820));
  SignVector empty = sv({0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(irrepresentability_indicator(X, empty).indicator == 1);
  CHECK(identifiability_indicator(X, empty).indicator == 1);
  CertificateReport ker = kernel_certificate(X, empty);
  CHECK(ker.indicator == 1);
  CHECK(ker.margin >= 0.9);
}

TEST_CASE("the direct and kernel identifiability tests agree") {
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Index n = 4 + trial % 5;
    Eigen::Index p = n + 2 + trial % 4;
    DesignMatrix X =
        gen_design(DesignSetting::Setting1, n, p, 0.0, RngStream(830 + trial));
    int k = 1 + trial % 4;
    SignVector s = sample_sign_vector(p, k, SignMode::Symmetric,
                                      RngStream(860 + trial));
    CertificateReport ker = kernel_certificate(X, s);
    if (ker.boundary || std::abs(ker.margin) < 1e-6) continue;
    CertificateReport idtf = identifiability_indicator(X, s);
    CHECK(idtf.indicator == ker.indicator);
    ++compared;
  }
  CHECK(compared >= 25);
}

TEST_CASE("a certified correlation condition implies identifiability") {
  int certified = 0;
  for (int trial = 0; trial < 50; ++trial) {
    DesignMatrix X =
        gen_design(DesignSetting::Setting1, 10, 30, 0.0, RngStream(900 + trial));
    int k = 1 + trial % 5;
    SignVector s = sample_sign_vector(30, k, SignMode::Symmetric,
                                      RngStream(950 + trial));
    CertificateReport ic = irrepresentability_indicator(X, s);
    if (ic.indicator == 1 && ic.margin > 1e-6) {
      CHECK(identifiability_indicator(X, s).indicator == 1);
      ++certified;
    }
  }
  CHECK(certified >= 10);
}

TEST_CASE("coherence bounds match hand geometry") {
  CHECK(mutual_coherence_bound(custom(Mat::Identity(5, 5))) == kInf);

  Mat m(2, 2);
  m.col(0) << 1, 0;
  m.col(1) << std::sqrt(0.5), std::sqrt(0.5);
  CHECK(mutual_coherence_bound(custom(m)) ==
        doctest::Approx(0.5 * (1.0 + std::sqrt(2.0))).epsilon(1e-12));

  Mat z = Mat::Identity(3, 3);
  z.col(1).setZero();
  CHECK_THROWS_AS(mutual_coherence_bound(custom(z)), ParameterError);
}

TEST_CASE("mismatched sign length is rejected") {
  DesignMatrix X = custom(Mat::Identity(5, 5));
  CHECK_THROWS_AS(irrepresentability_indicator(X, sv({1, 0, 0, 0})),
                  ParameterError);
  CHECK_THROWS_AS(identifiability_indicator(X, sv({1, 0, 0, 0})),
                  ParameterError);
  CHECK_THROWS_AS(kernel_certificate(X, sv({1, 0, 0, 0})), ParameterError);
}

}  // TEST_SUITE
