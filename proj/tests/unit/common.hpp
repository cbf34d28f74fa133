#pragma once

#include "relaxdamp/model.hpp"
#include "relaxdamp/profile.hpp"

#include <cmath>

namespace relaxdamp::testing {

inline ModelSpec jinxin(double a = 2.0, double u_minus = 1.0, double u_plus = -1.0) {
  return build_jinxin(a, 1.0, {0.0, 0.0, 0.5}, u_minus, u_plus);
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

/// U_t + A U_x = Qm U with constant coefficients. Both endstates sit at the
/// origin, so the profile is the zero state.
inline ModelSpec linear_model(const Mat& A, const Mat& Qm, const std::string& name = "linear") {
  const int n = static_cast<int>(A.rows());
  PolyMatrix a(n, n, n);
  PolyVector q(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (A(i, k) != 0.0) a.at(i, k) = Polynomial::constant(n, A(i, k));
      if (Qm(i, k) != 0.0) q.at(i) += Polynomial::linear(n, k, Qm(i, k));
    }
  }
  return ModelSpec(name, n, a, q, Vec::Zero(n), Vec::Zero(n), 0.0);
}

/// Shooting profile of the default Jin-Xin model on [-40, 40], computed once.
inline const ProfileRep& jinxin_profile() {
  static const ProfileRep p = solve_profile(jinxin(), 40.0, 4001, 1e-8);
  return p;
}

}  // namespace relaxdamp::testing
