#include "common.hpp"

#include "relaxdamp/damping.hpp"
#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/errors.hpp"

#include <gtest/gtest.h>

using namespace relaxdamp;
using namespace relaxdamp::testing;

namespace {

Snapshot snap_from(const Grid& g, const std::function<Vec(double)>& f, const std::function<Vec(double)>& df) {
  Snapshot s;
  s.U.resize(2, g.n);
  s.W.resize(2, g.n);
  for (int i = 0; i < g.n; ++i) {
    s.U.col(i) = f(g.x(i));
    s.W.col(i) = df(g.x(i));
  }
  return s;
}

Snapshot gaussian_snap(const Grid& g, double A, double w) {
  return snap_from(
      g, [&](double x) { return vec2(A * std::exp(-x * x / (2 * w * w)), 0.0); },
      [&](double x) { return vec2(-A * x / (w * w) * std::exp(-x * x / (2 * w * w)), 0.0); });
}

// Trajectory shell holding only Phi fields, for the energy functional.
Trajectory phi_trajectory(const Grid& g, double beta, int n_out, double dt) {
  Trajectory t(g, jinxin(), ProfileRep::constant(g, jinxin().u_minus()), ShiftSpec::zero());
  for (int m = 0; m <= n_out; ++m) {
    Snapshot s;
    s.t = m * dt;
    s.Phi.resize(2, g.n);
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      s.Phi.col(i) = vec2(std::exp(-x * x), 0.5 * std::exp(-(x - 1) * (x - 1))) * std::exp(-beta * s.t);
    }
    t.snaps.push_back(s);
  }
  return t;
}

}  // namespace

TEST(Damping, NormsOfConstantField) {
  const Grid g = Grid::symmetric(5.0, 101);
  const Snapshot s = snap_from(g, [](double) { return vec2(1e-2, 0.0); }, [](double) { return vec2(0.0, 0.0); });
  for (int K = 0; K <= 2; ++K) EXPECT_NEAR(ckb_norm(s, K, g.dx), 1e-2, 1e-15);
  try {
    ckb_norm(s, 3, g.dx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
}

TEST(Damping, GaussianC1Norm) {
  const Grid g = Grid::symmetric(20.0, 2001);
  const Snapshot s = gaussian_snap(g, 1e-2, 2.0);
  // Peak 1e-2 beats the largest slope 1e-2 / (2 sqrt(e)) ~ 0.0030.
  EXPECT_NEAR(ckb_norm(s, 1, g.dx), 1e-2, 1e-15);
  EXPECT_LE(ckb_norm(s, 0, g.dx), ckb_norm(s, 1, g.dx));
  EXPECT_LE(ckb_norm(s, 1, g.dx), ckb_norm(s, 2, g.dx));
}

TEST(Damping, SobolevNorms) {
  const Grid g = Grid::symmetric(30.0, 3001);
  const double A = 1e-2, w = 2.0;
  const SobolevNorms n = l2_h2_norms(gaussian_snap(g, A, w), g.dx);
  EXPECT_NEAR(n.l2 * n.l2, A * A * w * std::sqrt(M_PI), 1e-8);
  // int (A x / w^2)^2 e^{-x^2/w^2} dx = A^2 sqrt(pi) / (2 w)
  EXPECT_NEAR(n.h1 * n.h1 - n.l2 * n.l2, A * A * std::sqrt(M_PI) / (2 * w), 1e-8);
  EXPECT_GE(n.h2, n.h1);

  const Snapshot zero = snap_from(g, [](double) { return vec2(0, 0); }, [](double) { return vec2(0, 0); });
  const SobolevNorms z = l2_h2_norms(zero, g.dx);
  EXPECT_EQ(z.l2 + z.h1 + z.h2, 0.0);
}

TEST(Damping, QuadratureRefinement) {
  // Narrow gaussian on a coarse grid: error must drop at least 4x per halving.
  auto err = [](int n) {
    const Grid g = Grid::symmetric(3.0, n);
    const SobolevNorms s = l2_h2_norms(gaussian_snap(g, 1.0, 0.7), g.dx);
    return std::abs(s.l2 * s.l2 - 0.7 * std::sqrt(M_PI) * std::erf(3.0 / 0.7));
  };
  EXPECT_GE(err(31) / err(61), 4.0);
}

TEST(Damping, WeightClosedForm) {
  // lambda_2 = 2 on the whole line, C = 1, c = 0.25: log-ratio 2C/(c lambda) = 4.
  const ModelSpec m = jinxin();
  const ProfileRep& p = jinxin_profile();
  const WeightFn w = weight_fn(1, m, p, 1.0, 0.25);
  EXPECT_EQ(*std::max_element(w.alpha.begin(), w.alpha.end()), 1.0);
  const double expected = std::exp(-4.0 * (1.0 - std::exp(-0.25 * 40.0)));
  EXPECT_NEAR(w.min_alpha / expected, 1.0, 1e-10);
  EXPECT_GE(w.min_alpha, w.lower_bound);
  EXPECT_NEAR(w.lower_bound, std::exp(-4.0), 1e-15);
  EXPECT_LE(w.residual, 1e-10);
  // alpha_2 decreases to the right since lambda_2 > 0, and vice versa.
  EXPECT_EQ(w.alpha.front(), 1.0);
  const WeightFn w1 = weight_fn(0, m, p, 1.0, 0.25);
  EXPECT_EQ(w1.alpha.back(), 1.0);
  // Pointwise against the exact antiderivative.
  for (int i = 0; i < p.grid.n; i += 97) {
    const double x = p.grid.x(i);
    const double F = x >= 0 ? (1 - std::exp(-0.25 * x)) / 0.25 : -(1 - std::exp(0.25 * x)) / 0.25;
    const double F0 = -(1 - std::exp(-0.25 * 40.0)) / 0.25;
    EXPECT_NEAR(w.alpha[static_cast<size_t>(i)], std::exp(-(F - F0) / 2.0), 1e-12);
  }
}

TEST(Damping, WeightNeedsPositiveConstants) {
  EXPECT_THROW(weight_fn(0, jinxin(), jinxin_profile(), 0.0, 0.25), Error);
  EXPECT_THROW(weight_fn(0, jinxin(), jinxin_profile(), 1.0, -0.25), Error);
}

TEST(Damping, WeightTailConstantJinXin) {
  // |E_jj(Ubar) - E_jj(U±)| = |u - u±| / 4 and lambda is constant: C ~ c_0 / 4 ~ 0.5.
  const double C = weight_tail_constant(jinxin(), jinxin_profile(), 0.25);
  EXPECT_NEAR(C, 0.5, 0.02);
}

TEST(Damping, EnergiesOfZeroAndPureDecay) {
  const Grid g = Grid::symmetric(10.0, 401);
  const ModelSpec m = jinxin();
  const ProfileRep flat = ProfileRep::constant(g, m.u_minus());
  std::vector<WeightFn> ws{weight_fn(0, m, flat, 1.0, 0.25), weight_fn(1, m, flat, 1.0, 0.25)};

  const Trajectory zero = phi_trajectory(g, 0.0, 10, 0.1);
  Trajectory z = zero;
  for (auto& s : z.snaps) s.Phi.setZero();
  const EnergySeries ez = weighted_energy_series(z, ws, {});
  for (const auto& e : ez.e)
    for (double v : e) EXPECT_EQ(v, 0.0);

  const double beta = 0.1;
  const EnergySeries es = weighted_energy_series(phi_trajectory(g, beta, 100, 0.01), ws, {0.05, 0.0, 0.0});
  for (size_t j = 0; j < 2; ++j) {
    for (size_t k = 0; k < es.t.size(); ++k) ASSERT_NEAR(es.edot[j][k] / es.e[j][k], -2.0 * beta, 1e-6);
    // Decay at 2 beta = 0.2 beats 2 theta_E = 0.1: nothing flagged.
    EXPECT_EQ(es.flagged[j], 0);
  }
}

TEST(Damping, FitOfZeroSeriesIsDegenerate) {
  std::vector<double> t, N, f;
  for (int k = 0; k <= 10; ++k) {
    t.push_back(k);
    N.push_back(0.0);
    f.push_back(0.0);
  }
  const DampingFit fit = fit_damping_series(t, N, f, default_theta_grid(), 1000.0);
  EXPECT_TRUE(fit.degenerate);
  for (bool ok : fit.feasible) EXPECT_TRUE(ok);
}

TEST(Damping, FitOfPureDecay) {
  std::vector<double> t, N, f;
  for (int k = 0; k <= 200; ++k) {
    t.push_back(0.5 * k);
    N.push_back(std::exp(-0.2 * t.back()));
    f.push_back(0.0);
  }
  const std::vector<double> grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  const DampingFit fit = fit_damping_series(t, N, f, grid, 1000.0);
  for (size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= 0.2 + 1e-12)
      EXPECT_NEAR(fit.C_min[k], 1.0, 1e-12) << grid[k];
    else
      EXPECT_NEAR(fit.C_min[k], std::exp((grid[k] - 0.2) * 100.0), 1e-9 * fit.C_min[k]) << grid[k];
  }
  for (size_t k = 1; k < grid.size(); ++k) EXPECT_GE(fit.C_min[k], fit.C_min[k - 1]);
  EXPECT_NEAR(fit.max_feasible_theta, 0.25, 1e-15);  // e^{0.05 * 100} = 148 <= 1000 < e^{10}
}

TEST(Damping, InjectedGrowthIsInfeasible) {
  std::vector<double> t, N, f;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    N.push_back(1e-3 * std::exp(0.2 * k));
    f.push_back(1e-6);
  }
  try {
    fit_damping_series(t, N, f, default_theta_grid(), 1000.0);
    FAIL() << "expected EmptyFeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyFeasible);
  }
}

TEST(Damping, DefaultThetaGrid) {
  const auto g = default_theta_grid();
  ASSERT_EQ(g.size(), 80u);
  EXPECT_DOUBLE_EQ(g.front(), 0.00625);
  EXPECT_DOUBLE_EQ(g.back(), 0.5);
}

TEST(Damping, ZeroTrajectorySlavingIsDegenerate) {
  const ProfileRep p = exact_jinxin_profile(jinxin(), Grid::with_spacing(10.0, 0.05));
  EvolveOptions o;
  o.T = 1.0;
  o.n_out = 10;
  const Trajectory t = evolve(jinxin(), p, PerturbationSpec::zero(), ShiftSpec::zero(), o);
  const SlavingReport r = slaving_check(t, std::vector<Mat>(static_cast<size_t>(p.grid.n), Mat::Zero(2, 2)),
                                        default_theta_grid(), 1000.0);
  EXPECT_TRUE(r.psi_tilde.degenerate);
  EXPECT_TRUE(r.ups_tilde.degenerate);
}

TEST(Damping, NormOrderingAlongRun) {
  const ProfileRep p = exact_jinxin_profile(jinxin(), Grid::with_spacing(20.0, 0.04));
  EvolveOptions o;
  o.T = 4.0;
  o.n_out = 8;
  const Trajectory t = evolve(jinxin(), p, PerturbationSpec::gaussian(1e-2, 2.0), ShiftSpec::zero(), o);
  const NormSeries n = norm_series(t);
  for (size_t k = 0; k < n.t.size(); ++k) {
    EXPECT_LE(n.c0[k], n.c1[k]);
    EXPECT_LE(n.c1[k], n.c2[k]);
    EXPECT_LE(n.l2[k], n.h1[k]);
    EXPECT_LE(n.h1[k], n.h2[k]);
  }
}
