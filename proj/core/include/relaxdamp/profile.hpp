#pragma once

#include "relaxdamp/model.hpp"
#include "relaxdamp/types.hpp"

#include <array>

namespace relaxdamp {

/// Exponential envelope |d^k/dx^k (Ubar - U±)(x)| <= amplitude * exp(-rate |x|).
struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;
  /// Set when the tail sank below the noise floor and the rate was fitted on
  /// a shorter window; the true rate is at least this large.
  bool lower_bound = false;
};

inline constexpr double kDecayNoiseFloor = 1e-13;

/// Stationary profile sampled on a uniform grid.
struct ProfileRep {
  Grid grid;
  Field values;  // N x n
  Field d1;      // Ubar_x
  Field d2;      // Ubar_xx
  Field d3;      // Ubar_xxx
  Vec u_minus;
  Vec u_plus;
  /// decay[side][k], side 0 = minus (x < 0), 1 = plus.
  std::array<std::array<DecayFit, 3>, 2> decay{};
  bool has_decay = false;

  int dim() const { return static_cast<int>(values.rows()); }
  Vec value(int i) const { return values.col(i); }
  Vec derivative(int i, int order) const;

  /// Piecewise cubic Hermite interpolation of the derivative of given order
  /// (0..2), built from that derivative and the next one. Constant
  /// extrapolation outside the grid.
  Vec interpolate(double x, int order = 0) const;

  /// A constant state on the grid (all derivatives zero).
  static ProfileRep constant(const Grid& grid, const Vec& state);
};

/// Right-hand side of the profile ODE Ubar_x = A(Ubar)^{-1} q(Ubar).
Vec profile_rhs(const ModelSpec& model, const Vec& u);

/// Fills d1..d3 from the values by differentiating A(U) U_x = q(U) analytically.
void fill_derivatives(const ModelSpec& model, ProfileRep& profile);

/// Closed-form profile for Jin-Xin with quadratic flux:
///   u(x) = m - d tanh(kappa x), v = s u + vbar.
ProfileRep exact_jinxin_profile(const ModelSpec& model, const Grid& grid);

/// Shooting along the unstable direction of U-, pinned so that the first
/// component passes the midpoint of its endstates at x = 0.
ProfileRep solve_profile(const ModelSpec& model, double half_width, int n, double tol);
ProfileRep solve_profile_on(const ModelSpec& model, const Grid& grid, double tol);

/// Least-squares fit of log|d^k(Ubar - U±)| against |x| on the tail half of
/// each side: {minus, plus}.
std::array<DecayFit, 2> fit_decay(const ProfileRep& profile, int k);

/// Like fit_decay, but falls back to a lower-bound fit on the part of the tail
/// above the noise floor instead of throwing.
std::array<DecayFit, 2> fit_decay_or_bound(const ProfileRep& profile, int k);

/// Fits k = 0, 1, 2 on both sides and stores them in the profile.
void attach_decay_fits(ProfileRep& profile);

/// sup_i ||A(Ubar_i) Ubar_x,i - q(Ubar_i)||_inf with Ubar_x the fourth-order
/// difference of the samples.
double residual(const ModelSpec& model, const ProfileRep& profile);

/// Conservative tail constants (C_tail, theta_tilde): the largest fitted
/// amplitude and the slowest fitted rate for k <= 1 over both sides.
struct TailConstants {
  double amplitude = 0.0;
  double rate = 0.0;
};
TailConstants tail_constants(const ProfileRep& profile);

}  // namespace relaxdamp
