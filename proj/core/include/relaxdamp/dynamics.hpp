#pragma once

#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/model.hpp"
#include "relaxdamp/profile.hpp"
#include "relaxdamp/types.hpp"

#include <string>
#include <vector>

namespace relaxdamp {

/// Prescribed shock location delta(t) with delta(0) = 0.
struct ShiftSpec {
  enum class Kind { Zero, Linear, Sinusoid };
  Kind kind = Kind::Zero;
  double rate = 0.0;       // linear: delta = rate t
  double amplitude = 0.0;  // sinusoid: delta = amplitude sin(frequency t)
  double frequency = 0.0;

  static ShiftSpec zero() { return {}; }
  static ShiftSpec linear(double rate) { return {Kind::Linear, rate, 0.0, 0.0}; }
  static ShiftSpec sinusoid(double amplitude, double frequency) {
    return {Kind::Sinusoid, 0.0, amplitude, frequency};
  }

  double delta(double t) const;
  double delta_dot(double t) const;
  /// sup_t |delta_dot(t)|.
  double eps_delta() const;
};

struct PerturbationSpec {
  enum class Kind { Zero, Gaussian, Offset, ShiftDifference };
  Kind kind = Kind::Zero;
  // gaussian: amplitude * direction * exp(-(x - center)^2 / (2 width^2))
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  Vec direction;  // empty means the first unit vector
  // offset: d_minus (1 - sigma) + d_plus sigma, sigma = (1 + tanh(x / blend_width)) / 2
  Vec d_minus;
  Vec d_plus;
  double blend_width = 2.0;
  // shift_difference: Ubar(x + h) - Ubar(x)
  double h = 0.0;
  /// Smallness budget epsilon for ||U||_{C^1}.
  double eps_budget = 1e-2;

  static PerturbationSpec zero() { return {}; }
  static PerturbationSpec gaussian(double amplitude, double width, double center = 0.0, Vec direction = {});
  static PerturbationSpec offset(Vec d_minus, Vec d_plus, double blend_width = 2.0);
  static PerturbationSpec shift_difference(double h);
};

/// Perturbation field at one output time plus the data the characteristic
/// tracer needs. Everything else is derived on demand.
struct Snapshot {
  double t = 0.0;
  double delta = 0.0;
  double delta_dot = 0.0;
  Field U;       // N x n
  Field W;       // dU/dx
  Field Phi;     // L(V) U with V = Ubar + U
  Field lambda;  // eigenvalues of A(V)
  Field Ediag;   // diagonal of the Phi source matrix
  Field G;       // Phi_j forcing beyond Ediag_jj Phi_j
};

enum class Backend { Moc, Reference };
inline const char* to_string(Backend b) { return b == Backend::Moc ? "moc" : "reference"; }

/// Space-time discretisation of the perturbation equation
///   U_t + (A(V) - delta_dot) U_x = q(V) - q(Ubar) - (A(V) - A(Ubar)) Ubar_x + delta_dot Ubar_x
/// on the profile grid. The two end nodes follow the far-field ODE
///   U_t = q(U± + U) - q(U±) + delta_dot Ubar_x.
class Dynamics {
 public:
  Dynamics(const ModelSpec& model, const ProfileRep& profile, ShiftSpec shift);

  const ModelSpec& model() const { return model_; }
  const ProfileRep& profile() const { return profile_; }
  const Grid& grid() const { return profile_.grid; }
  const ShiftSpec& shift() const { return shift_; }

  /// S(U) at every node (interior formula; end nodes use the far-field form).
  Field source(const Field& u, double delta_dot) const;

  /// Largest |lambda_j(V) - delta_dot| over the grid.
  double max_speed(const Field& u, double delta_dot) const;

  /// One step from t to t + dt. Both throw CFLViolation when
  /// max|lambda - delta_dot| dt / dx exceeds 0.9; return the CFL number used.
  double step_reference(Field& u, double t, double dt) const;
  double step_moc(Field& u, double t, double dt) const;

  /// Frames at V = Ubar + U with signs continued along x, and dL/dx.
  void frames_at(const Field& u, std::vector<EigenFrame>& frames, std::vector<Mat>& dL) const;

  /// Fills Phi, lambda, Ediag and G of a snapshot from its U.
  void characteristic_data(Snapshot& s) const;

  Snapshot snapshot(const Field& u, double t) const;

 private:
  Field reference_rhs(const Field& u, double t, double& speed) const;
  Vec far_field_rhs(const Vec& u, int side, double delta_dot) const;

  ModelSpec model_;
  ProfileRep profile_;
  ShiftSpec shift_;
  bool constant_frame_;
  EigenFrame frame0_;
  Field q_bar_;  // q(Ubar) per node
};

/// Initial perturbation with analytic derivative. Throws BudgetExceeded when
/// ||U_0||_{C^1} exceeds the budget.
Snapshot make_initial(const ProfileRep& profile, const PerturbationSpec& pert);

/// ||U||_{C^1} of sampled field and derivative (all nodes).
double c1_norm(const Field& u, const Field& w);

struct EvolveOptions {
  double T = 80.0;
  Backend backend = Backend::Moc;
  double cfl = 0.45;
  int n_out = 200;
};

struct Trajectory {
  Trajectory(Grid g, ModelSpec m, ProfileRep p, ShiftSpec s)
      : grid(g), model(std::move(m)), profile(std::move(p)), shift(s) {}

  Grid grid;
  ModelSpec model;
  ProfileRep profile;
  ShiftSpec shift;
  Backend backend = Backend::Moc;
  double eps_budget = 0.0;
  double max_cfl = 0.0;
  long n_steps = 0;
  bool budget_violated = false;
  double first_violation_t = -1.0;
  double max_c1 = 0.0;  // max over snapshots of ||U||_{C^1}
  std::vector<Snapshot> snaps;

  double T() const { return snaps.empty() ? 0.0 : snaps.back().t; }
};

Trajectory evolve(const ModelSpec& model, const ProfileRep& profile, const PerturbationSpec& pert,
                  const ShiftSpec& shift, const EvolveOptions& opt);

/// Diagonalised variables of one snapshot. Theta is given per node.
struct DiagonalVars {
  Field Phi;
  Field Psi;
  Field Psi_t;  // Psi + Theta Phi
  Field Ups;    // L Y, Y = U_xx
  Field Ups_t;  // Ups + Theta Psi
};

DiagonalVars diagonal_vars(const ModelSpec& model, const ProfileRep& profile, const Snapshot& s,
                           const std::vector<Mat>& theta);

/// Relative residual of the differentiated equation
///   W_t + (A(V) - delta_dot) W_x + dA(V)[Ubar_x + W] W = d/dx S(U)
/// at snapshot m (centred difference in time, interior nodes).
double w_equation_residual(const Trajectory& traj, int m);

}  // namespace relaxdamp
