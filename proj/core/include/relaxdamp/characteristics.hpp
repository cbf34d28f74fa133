#pragma once

#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/profile.hpp"

#include <cstdint>
#include <vector>

namespace relaxdamp {

/// One characteristic X_j(s) of family j through a stored trajectory.
/// Samples sit on a fine time grid: `substeps` tracer steps per output
/// interval, so output time m is sample m * substeps.
struct CharPath {
  int family = 0;
  double x0 = 0.0;
  int substeps = 1;
  std::vector<double> s;
  std::vector<double> X;
  std::vector<double> speed;  // lambda_j - delta_dot
  std::vector<double> E;      // diagonal source along the path
  std::vector<double> G;      // forcing along the path (zero beyond the grid)
  std::vector<double> H;      // filled by accumulate_H
  double grid_exit_time = -1.0;  // first time the path leaves the grid; -1 if never

  /// Sample index of output time m.
  size_t at_output(int m) const { return static_cast<size_t>(m) * static_cast<size_t>(substeps); }
};

/// Heun (RK2) tracer of X' = lambda_j(t, X) - delta_dot(t) with fields
/// interpolated cubically in space and time. Beyond the grid the path moves
/// with the endstate speed and sees the endstate E±_jj.
CharPath trace(const Trajectory& traj, int j, double x0, int substeps = 8);

/// Trapezoidal H_j(s) = int_0^s E_jj along the path, stored in path.H.
const std::vector<double>& accumulate_H(CharPath& path);

struct HBoundReport {
  double theta_E = 0.0;
  std::vector<double> C_family;   // per family, full horizon
  double C_emp = 0.0;             // max over families
  double C_half = 0.0;            // same sup restricted to t <= T/2
  double relative_change = 0.0;   // |C_emp - C_half| / max(|C_emp|, |C_half|), 0 when both vanish
  double analytic_bound = 0.0;    // 2 C_tail / (c_nonchar theta_tilde)
  int n_paths = 0;
};

/// C_emp = max over paths and output-time pairs s <= t of
/// H_j(t) - H_j(s) + theta_E (t - s). Throws NotBounded when the sup over the
/// full horizon exceeds the half-horizon sup by more than 5%.
HBoundReport verify_H_bound(const std::vector<CharPath>& paths, double theta_E, double c_nonchar,
                            double C_tail, double theta_tilde, int n_families);

/// C_emp of a single path over output times m <= m_max.
double path_H_sup(const CharPath& path, double theta_E, int m_max);

struct NoDampingRadius {
  double R = 0.0;
  double theta_E = 0.0;
  double C_tail = 0.0;
  double theta_tilde = 0.0;
  double C_lip = 0.0;
  double eps_budget = 0.0;
};

/// Lipschitz constant (sup of the l1 gradient norm) of the diagonal source
/// E_jj over the state box, from seeded random samples.
double diagonal_source_lipschitz(const ModelSpec& model, int n_samples, std::uint64_t seed);

/// Smallest grid radius R with
///   E_jj(Ubar(x)) + C_tail e^{-theta_tilde |x|} + C_lip eps <= -theta_E   for |x| >= R.
NoDampingRadius no_damping_radius(const ModelSpec& model, const ProfileRep& profile, double eps_budget,
                                  std::uint64_t seed = 7, int n_samples = 512);

/// Largest Ediag_jj over all snapshots and nodes with |x| >= R.
double max_diag_source_outside(const Trajectory& traj, double R);

/// First time the path leaves [-R, R]; -1 if it never does.
double exit_time(const CharPath& path, double R);

/// Max over output times (while the path is inside the grid) of
/// |Phi_j(t, X(t)) - [Phi_j(0, x0) e^{H(t)} + int_0^t e^{H(t) - H(s)} G(s) ds]|.
double duhamel_error(const Trajectory& traj, const CharPath& path);

/// Launch points: n per family evenly spread over [-half_span, half_span].
std::vector<CharPath> trace_family_set(const Trajectory& traj, int n_per_family, double half_span,
                                       int substeps = 8);

}  // namespace relaxdamp
