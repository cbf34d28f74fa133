#include "common.hpp"

#include "relaxdamp/characteristics.hpp"
#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/errors.hpp"

#include <gtest/gtest.h>

using namespace relaxdamp;
using namespace relaxdamp::testing;

namespace {

const ProfileRep& coarse_profile() {
  static const ProfileRep p = exact_jinxin_profile(jinxin(), Grid::with_spacing(20.0, 0.04));
  return p;
}

Trajectory run(const PerturbationSpec& pert, const ShiftSpec& shift, double T, int n_out = 40) {
  EvolveOptions o;
  o.T = T;
  o.n_out = n_out;
  return evolve(jinxin(), coarse_profile(), pert, shift, o);
}

const Trajectory& zero_run() {
  static const Trajectory t = run(PerturbationSpec::zero(), ShiftSpec::zero(), 8.0);
  return t;
}

// Synthetic path with constant diagonal source on a uniform time grid.
CharPath flat_path(int family, double E, double T, int n) {
  CharPath p;
  p.family = family;
  p.substeps = 1;
  for (int k = 0; k <= n; ++k) {
    const double s = T * k / n;
    p.s.push_back(s);
    p.X.push_back(2.0 * s);
    p.speed.push_back(2.0);
    p.E.push_back(E);
    p.G.push_back(0.0);
  }
  accumulate_H(p);
  return p;
}

}  // namespace

TEST(Characteristics, ConstantSpeedIsLinear) {
  const Trajectory& t = zero_run();
  for (int j = 0; j < 2; ++j) {
    const CharPath p = trace(t, j, -1.5, 4);
    const double c = j == 0 ? -2.0 : 2.0;
    for (size_t k = 0; k < p.s.size(); ++k) ASSERT_NEAR(p.X[k], -1.5 + c * p.s[k], 1e-12);
  }
}

TEST(Characteristics, ShiftChangesSlope) {
  const double r = 0.01;
  const Trajectory t = run(PerturbationSpec::zero(), ShiftSpec::linear(r), 4.0, 8);
  const CharPath p = trace(t, 1, 0.0, 4);
  for (size_t k = 0; k < p.s.size(); ++k) ASSERT_NEAR(p.X[k], (2.0 - r) * p.s[k], 1e-12);
}

TEST(Characteristics, TracerIsSecondOrder) {
  const Trajectory t = run(PerturbationSpec::zero(), ShiftSpec::sinusoid(0.2, 1.5), 8.0, 8);
  std::vector<double> ends;
  for (int sub : {1, 2, 4}) ends.push_back(trace(t, 0, 3.0, sub).X.back());
  const double order = std::log2(std::abs(ends[0] - ends[1]) / std::abs(ends[1] - ends[2]));
  EXPECT_GE(order, 1.8);
  // And it converges to the exact path x0 - 2t - delta(t).
  EXPECT_NEAR(trace(t, 0, 3.0, 32).X.back(), 3.0 - 16.0 - 0.2 * std::sin(12.0), 1e-4);
}

TEST(Characteristics, HOfConstantSource) {
  const CharPath p = flat_path(0, -0.3, 10.0, 100);
  for (size_t k = 0; k < p.s.size(); ++k) ASSERT_NEAR(p.H[k], -0.3 * p.s[k], 1e-10);
  EXPECT_EQ(p.H.front(), 0.0);
}

TEST(Characteristics, HIsNonIncreasingWhereSourceNegative) {
  const Trajectory t = run(PerturbationSpec::gaussian(1e-2, 2.0), ShiftSpec::zero(), 8.0);
  CharPath p = trace(t, 1, -5.0, 8);
  accumulate_H(p);
  for (size_t k = 1; k < p.H.size(); ++k) {
    if (p.E[k] < 0.0 && p.E[k - 1] < 0.0) ASSERT_LE(p.H[k], p.H[k - 1]);
  }
}

TEST(Characteristics, UniformDampingGivesSlackBound) {
  const double theta = 0.125;
  std::vector<CharPath> paths;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k) paths.push_back(flat_path(j, -2.0 * theta, 20.0, 40));
  const HBoundReport r = verify_H_bound(paths, theta, 2.0, 0.0, 0.25, 2);
  EXPECT_LE(r.C_emp, 0.0);
  EXPECT_EQ(r.n_paths, 20);
}

TEST(Characteristics, GrowingSupIsNotBounded) {
  std::vector<CharPath> paths;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k) paths.push_back(flat_path(j, -0.05, 20.0, 40));
  try {
    verify_H_bound(paths, 0.125, 2.0, 0.0, 0.25, 2);
    FAIL() << "expected NotBounded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotBounded);
  }
}

TEST(Characteristics, OverstatedRateIsCaught) {
  // Real paths run into their strongly damped side, so use paths parked at the
  // weakest endstate source -2 theta_E. Four times theta_E must then grow.
  const double theta_E = damping_rate(jinxin()).theta_E;
  std::vector<CharPath> paths;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 10; ++k) paths.push_back(flat_path(j, -2.0 * theta_E, 20.0, 40));
  EXPECT_NO_THROW(verify_H_bound(paths, theta_E, 2.0, 2.0, 0.25, 2));
  try {
    verify_H_bound(paths, 4.0 * theta_E, 2.0, 2.0, 0.25, 2);
    FAIL() << "expected NotBounded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotBounded);
  }
  // Traced paths of the unperturbed shock stay bounded at the certified rate.
  std::vector<CharPath> real = trace_family_set(zero_run(), 10, 10.0, 4);
  for (auto& p : real) accumulate_H(p);
  const HBoundReport r = verify_H_bound(real, theta_E, 2.0, 2.0, 0.25, 2);
  EXPECT_LE(r.C_emp, 1e-12);
}

TEST(Characteristics, NeedsEnoughPaths) {
  std::vector<CharPath> paths;
  for (int k = 0; k < 5; ++k) paths.push_back(flat_path(0, -0.25, 10.0, 20));
  EXPECT_THROW(verify_H_bound(paths, 0.125, 2.0, 0.0, 0.25, 1), Error);
}

TEST(Characteristics, RadiusOfUniformModel) {
  const ModelSpec m = linear_model(mat2(-1.0, 0.0, 0.0, 1.0), mat2(-1.0, 0.0, 0.0, -1.0));
  const ProfileRep flat = ProfileRep::constant(Grid::symmetric(10.0, 101), Vec::Zero(2));
  const NoDampingRadius r = no_damping_radius(m, flat, 1e-2);
  EXPECT_EQ(r.R, 0.0);
  EXPECT_NEAR(r.theta_E, 0.5, 1e-15);
}

TEST(Characteristics, RadiusOfJinXin) {
  const NoDampingRadius r = no_damping_radius(jinxin(), jinxin_profile(), 1e-2);
  EXPECT_GT(r.R, 0.0);
  EXPECT_LT(r.R, 20.0);
  EXPECT_NEAR(r.C_lip, 0.25, 1e-6);
  // Post-hoc scan of a trajectory on the same grid.
  const Trajectory t = run(PerturbationSpec::gaussian(1e-2, 2.0), ShiftSpec::zero(), 8.0);
  EXPECT_LE(max_diag_source_outside(t, r.R), -r.theta_E);
  try {
    no_damping_radius(jinxin(), jinxin_profile(), 10.0);
    FAIL() << "expected EpsilonTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EpsilonTooLarge);
  }
}

TEST(Characteristics, ExitTimeBound) {
  const Trajectory& t = zero_run();
  const double R = 3.0;
  for (const CharPath& p : trace_family_set(t, 10, R, 4)) {
    const double te = exit_time(p, R);
    ASSERT_GE(te, 0.0);
    EXPECT_LE(te, 2.0 * R / 2.0 + 1e-12);
  }
}

TEST(Characteristics, DuhamelConsistency) {
  const Trajectory t = run(PerturbationSpec::gaussian(1e-2, 2.0), ShiftSpec::zero(), 6.0, 60);
  double worst = 0.0;
  for (const CharPath& p : trace_family_set(t, 10, 4.0, 8)) worst = std::max(worst, duhamel_error(t, p));
  EXPECT_LE(worst, 1e-4);
}
