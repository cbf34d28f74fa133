#include "common.hpp"

#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/spectral.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace relaxdamp;
using namespace relaxdamp::testing;

namespace {

std::vector<double> sorted_real(const CVec& mu) {
  std::vector<double> r;
  for (Eigen::Index i = 0; i < mu.size(); ++i) r.push_back(mu[i].real());
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST(Spectral, ZeroFrequency) {
  // Q+ = [[0,0],[-1,-1]] at u = -1 and [[0,0],[1,-1]] at u = +1: mu (mu + 1) = 0 both ways.
  for (Side s : {Side::Minus, Side::Plus}) {
    const CVec mu = symbol_spectrum(jinxin(), s, 0.0);
    const auto re = sorted_real(mu);
    EXPECT_NEAR(re[0], -1.0, 1e-14);
    EXPECT_NEAR(re[1], 0.0, 1e-14);
    EXPECT_NEAR(std::abs(mu[0].imag()) + std::abs(mu[1].imag()), 0.0, 1e-14);
  }
}

TEST(Spectral, DiagonalSymbolIgnoresFrequency) {
  const ModelSpec m = linear_model(Mat::Zero(2, 2), mat2(-2.0, 0.0, 0.0, -5.0));
  for (double xi : {0.0, 1.0, 37.0}) {
    const auto re = sorted_real(symbol_spectrum(m, Side::Plus, xi));
    EXPECT_NEAR(re[0], -5.0, 1e-14);
    EXPECT_NEAR(re[1], -2.0, 1e-14);
  }
}

TEST(Spectral, LargeFrequencyApproachesE) {
  const auto re = sorted_real(symbol_spectrum(jinxin(), Side::Plus, 50.0));
  EXPECT_NEAR(re[0], -0.75, 0.05);
  EXPECT_NEAR(re[1], -0.25, 0.05);
}

TEST(Spectral, ConjugateSymmetry) {
  for (double xi : {0.3, 4.0, 90.0}) {
    const CVec a = symbol_spectrum(jinxin(), Side::Minus, xi);
    const CVec b = symbol_spectrum(jinxin(), Side::Minus, -xi);
    // Sorting by imaginary part reverses the order under conjugation.
    for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(b[1 - j] - std::conj(a[j])), 1e-12);
  }
}

TEST(Spectral, JinXinCertificate) {
  const SpectralCertificate c = dissipativity_certificate(jinxin(), 100.0, 400, 0.1);
  ASSERT_TRUE(c.certified);
  EXPECT_GE(c.c, 0.1);
  EXPECT_LE(c.C, 5.0);
  EXPECT_LE(c.conjugate_error, 1e-12);
  for (const auto& scan : c.scans) {
    for (size_t k = 0; k < scan.xi.size(); ++k) {
      if (scan.xi[k] >= c.C) ASSERT_LE(scan.max_re[k], -c.c);
    }
  }
}

TEST(Spectral, CertificateRegionGrowsWithRange) {
  const SpectralCertificate a = dissipativity_certificate(jinxin(), 100.0, 400, 0.1);
  const SpectralCertificate b = dissipativity_certificate(jinxin(), 400.0, 800, 0.1);
  ASSERT_TRUE(a.certified);
  ASSERT_TRUE(b.certified);
  EXPECT_LE(b.C, a.C * (1.0 + 1e-12));
}

TEST(Spectral, SupercharacteristicWitness) {
  const SpectralCertificate c = dissipativity_certificate(jinxin(0.5), 100.0, 400, 0.1);
  EXPECT_FALSE(c.certified);
  EXPECT_GT(c.witness_xi, 50.0);
  EXPECT_NEAR(c.witness_re, 0.5, 0.01);
}

TEST(Spectral, PureDampingCertificate) {
  const ModelSpec m = linear_model(Mat::Zero(2, 2), mat2(-1.0, 0.0, 0.0, -1.0));
  const SpectralCertificate c = dissipativity_certificate(m, 100.0, 200, 0.1);
  ASSERT_TRUE(c.certified);
  EXPECT_NEAR(c.c, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(c.C, 0.01);
}

TEST(Spectral, CertificateConsistentWithE) {
  for (double a : {2.0, 1.5, 0.8, 0.5}) {
    const ModelSpec m = jinxin(a);
    bool negative = true;
    try {
      damping_rate(m);
    } catch (const Error&) {
      negative = false;
    }
    const SpectralCertificate c = dissipativity_certificate(m, 100.0, 400, 0.05);
    EXPECT_EQ(c.certified, negative) << "a=" << a;
  }
}

TEST(Spectral, ScanPreconditions) {
  EXPECT_THROW(dissipativity_certificate(jinxin(), 100.0, 50, 0.1), Error);
  try {
    dissipativity_certificate(jinxin(), 100.0, 100, 1e-4);
    FAIL() << "expected ScanTooCoarse";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ScanTooCoarse);
  }
}

TEST(Spectral, ExpansionJinXin) {
  const ExpansionCheck ex = expansion_check(jinxin(), Side::Plus, {20.0, 40.0, 80.0, 160.0});
  EXPECT_LT(ex.constant, 1.0);
  for (int j = 0; j < 2; ++j) {
    // Re mu_j -> E_jj monotonically; remainder |xi| |Re mu - E| does not grow.
    for (size_t k = 1; k < ex.xi.size(); ++k) {
      EXPECT_LT(std::abs(ex.re_mu[k][j] - ex.E[j]), std::abs(ex.re_mu[k - 1][j] - ex.E[j]));
      EXPECT_LE(ex.remainder[k][j], ex.remainder[k - 1][j] * (1.0 + 1e-9));
    }
    EXPECT_NEAR(ex.im_over_xi.back()[j], ex.lambdas[j], 1e-3);
  }
  EXPECT_NEAR(ex.lambdas[0], -2.0, 1e-12);
  EXPECT_NEAR(ex.lambdas[1], 2.0, 1e-12);
}

TEST(Spectral, ExpansionWithoutTransport) {
  const ModelSpec m = linear_model(Mat::Zero(2, 2), mat2(-2.0, 0.0, 0.0, -5.0));
  const ExpansionCheck ex = expansion_check(m, Side::Minus, {20.0, 40.0});
  EXPECT_EQ(ex.constant, 0.0);
}

TEST(Spectral, ExpansionNeedsLargeFrequency) {
  try {
    expansion_check(jinxin(), Side::Plus, {5.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(Spectral, HyperbolicityScan) {
  const HyperbolicityReport r = hyperbolicity_scan(jinxin(), jinxin_profile(), 1e-3);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.min_abs_lambda, 2.0, 1e-14);
  EXPECT_NEAR(r.min_gap, 4.0, 1e-14);

  const HyperbolicityReport hi = hyperbolicity_scan(jinxin(), jinxin_profile(), 3.0);
  EXPECT_FALSE(hi.pass);
  EXPECT_NEAR(hi.min_abs_lambda, 2.0, 1e-14);
}

TEST(Spectral, CharacteristicShockFrame) {
  // s = (u- + u+)/2 = 2 = a: lambda = -s + a = 0.
  const ModelSpec m = jinxin(2.0, 3.0, 1.0);
  ASSERT_DOUBLE_EQ(m.shock_speed(), 2.0);
  const ProfileRep flat = ProfileRep::constant(Grid::symmetric(5.0, 51), m.u_minus());
  const HyperbolicityReport r = hyperbolicity_scan(m, flat, 1e-3);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.min_abs_lambda, 0.0, 1e-14);
}
