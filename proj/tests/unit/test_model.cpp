#include "common.hpp"

#include "relaxdamp/errors.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <functional>

using namespace relaxdamp;
using namespace relaxdamp::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Io;
}

}  // namespace

TEST(Model, JinXinStandingShock) {
  const ModelSpec m = jinxin();
  EXPECT_EQ(m.shock_speed(), 0.0);
  const Mat A = m.A(vec2(0.3, 0.4));
  EXPECT_EQ(A, mat2(0.0, 1.0, 4.0, 0.0));
  EXPECT_EQ(m.dim(), 2);
}

TEST(Model, RankineHugoniotSpeed) {
  const ModelSpec m = build_jinxin(1.0, 1.0, {0.0, 0.0, 0.5}, 1.0, 0.0);
  // (f(0) - f(1)) / (0 - 1) with f = u^2/2
  const double expected = (0.0 - 0.5) / (0.0 - 1.0);
  EXPECT_DOUBLE_EQ(m.shock_speed(), expected);
  EXPECT_DOUBLE_EQ(m.shock_speed(), 0.5);
  const Mat A = m.A(m.u_minus());
  EXPECT_DOUBLE_EQ(A(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(A(1, 1), -0.5);
  EXPECT_DOUBLE_EQ(A(1, 0), 1.0);
}

TEST(Model, BadParameters) {
  EXPECT_EQ(kind_of([] { jinxin(2.0, 1.0, 1.0); }), ErrorKind::DegenerateShock);
  EXPECT_EQ(kind_of([] { build_jinxin(0.0, 1.0, {0, 0, 0.5}, 1, -1); }), ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { build_jinxin(-1.0, 1.0, {0, 0, 0.5}, 1, -1); }), ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { build_jinxin(2.0, 0.0, {0, 0, 0.5}, 1, -1); }), ErrorKind::InvalidParam);
}

TEST(Model, CustomStateDependentA) {
  PolyMatrix a(2, 2, 2);
  a.at(0, 0) = Polynomial::linear(2, 0);
  a.at(1, 1) = Polynomial::constant(2, -1.0);
  PolyVector q(2, 2);
  const ModelSpec m("custom", 2, a, q, vec2(1.0, 0.0), vec2(-1.0, 0.0), 0.0);
  EXPECT_EQ(eval_A(m, vec2(0.5, 0.0)), mat2(0.5, 0.0, 0.0, -1.0));
}

TEST(Model, OutsideStateBox) {
  const ModelSpec m = jinxin();
  const Vec far = vec2(100.0, 0.5);
  EXPECT_FALSE(m.state_box().contains(far));
  EXPECT_EQ(kind_of([&] { eval_A(m, far); }), ErrorKind::OutOfDomain);
  EXPECT_EQ(kind_of([&] { eval_q(m, far); }), ErrorKind::OutOfDomain);
  EXPECT_EQ(kind_of([&] { eval_Q(m, far); }), ErrorKind::OutOfDomain);
}

TEST(Model, PaddedBox) {
  // u in [-1, 1] widens by 1 + 0.5; v is pinned at 1/2 and gets the floor.
  const StateBox b = jinxin().state_box();
  EXPECT_DOUBLE_EQ(b.lo[0], -2.5);
  EXPECT_DOUBLE_EQ(b.hi[0], 2.5);
  EXPECT_DOUBLE_EQ(b.lo[1], 0.0);
  EXPECT_DOUBLE_EQ(b.hi[1], 1.0);
}

TEST(Model, SourceAndJacobian) {
  const ModelSpec m = jinxin();
  const Vec u = vec2(1.0, 0.5);
  EXPECT_EQ(eval_q(m, u), vec2(0.0, 0.0));
  EXPECT_EQ(eval_Q(m, u), mat2(0.0, 0.0, 1.0, -1.0));
  EXPECT_LE(max_abs(Mat(eval_Q(m, u) - fd_jacobian(m, u))), 1e-6);
}

TEST(Model, EndstatesAreEquilibria) {
  for (double a : {2.0, 0.5}) {
    const ModelSpec m = jinxin(a);
    EXPECT_LE(max_abs(eval_q(m, m.u_minus())), 1e-12);
    EXPECT_LE(max_abs(eval_q(m, m.u_plus())), 1e-12);
  }
  const ModelSpec m = build_jinxin(1.0, 0.5, {0.1, 0.2, 0.5}, 1.0, 0.0);
  EXPECT_LE(max_abs(eval_q(m, m.u_minus())), 1e-12);
  EXPECT_LE(max_abs(eval_q(m, m.u_plus())), 1e-12);
}

TEST(Model, ValidationPasses) {
  const ModelValidation v = validate_model(jinxin(), 200);
  EXPECT_TRUE(v.passed);
  EXPECT_LE(v.max_jacobian_error, 1e-6);
  EXPECT_EQ(v.n_samples, 202);  // both endstates plus the random draws
}

TEST(Model, ValidationCatchesWrongJacobian) {
  const ModelSpec good = jinxin();
  PolyMatrix bad = good.q_poly().jacobian();
  for (auto& p : bad.entries) p *= -1.0;
  const ModelSpec m("jinxin_bad", 2, good.a_poly(), good.q_poly(), good.u_minus(), good.u_plus(), 0.0, {}, bad);
  EXPECT_EQ(kind_of([&] { validate_model(m, 50); }), ErrorKind::ValidationFailed);
}

TEST(Model, ValidationNeedsSamples) {
  EXPECT_EQ(kind_of([] { validate_model(jinxin(), 0); }), ErrorKind::Precondition);
}

TEST(Model, EvaluatorsArePure) {
  const ModelSpec m = build_jinxin(1.3, 0.7, {0.1, -0.2, 0.5, 0.05}, 0.9, -0.4);
  const Vec u = vec2(0.123456789, 0.3141592653);
  const Mat A1 = m.A(u), A2 = m.A(u);
  const Vec q1 = m.q(u), q2 = m.q(u);
  const Mat Q1 = m.Q(u), Q2 = m.Q(u);
  EXPECT_EQ(std::memcmp(A1.data(), A2.data(), sizeof(double) * 4), 0);
  EXPECT_EQ(std::memcmp(q1.data(), q2.data(), sizeof(double) * 2), 0);
  EXPECT_EQ(std::memcmp(Q1.data(), Q2.data(), sizeof(double) * 4), 0);
}

TEST(Polynomial, PartialsAndEvaluation) {
  // p = 3 u0^2 u1 - u1 + 2
  Polynomial p(2);
  p.add_term(3.0, {2, 1});
  p.add_term(-1.0, {0, 1});
  p.add_term(2.0, {0, 0});
  const Vec u = vec2(2.0, -0.5);
  EXPECT_DOUBLE_EQ(p(u), 3.0 * 4.0 * -0.5 + 0.5 + 2.0);
  EXPECT_DOUBLE_EQ(p.partial(0)(u), 6.0 * 2.0 * -0.5);
  EXPECT_DOUBLE_EQ(p.partial(1)(u), 3.0 * 4.0 - 1.0);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_TRUE(p.partial(0).partial(0).partial(0).is_zero());
}
