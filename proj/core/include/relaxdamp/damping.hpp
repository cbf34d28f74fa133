#pragma once

#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/model.hpp"
#include "relaxdamp/profile.hpp"

#include <string>
#include <vector>

namespace relaxdamp {

/// max over derivative orders k <= K of the interior sup of |d^k U / dx^k|.
/// U_xx is the fourth-order difference of the stored W.
double ckb_norm(const Snapshot& s, int K, double dx);

struct SobolevNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};
SobolevNorms l2_h2_norms(const Snapshot& s, double dx);

struct NormSeries {
  std::vector<double> t;
  std::vector<double> c0, c1, c2;
  std::vector<double> l2, h1, h2;
  std::vector<double> delta_dot;
};
NormSeries norm_series(const Trajectory& traj);

struct WeightFn {
  int family = 0;
  double C_alpha = 0.0;
  double c_alpha = 0.0;
  std::vector<double> alpha;  // per grid node, max = 1
  double min_alpha = 0.0;
  double lower_bound = 0.0;  // exp(-2 C_alpha / (c_alpha c_nonchar))
  double residual = 0.0;     // quadrature residual of d/dx log alpha = -C e^{-c|x|} / lambda_j
};

/// alpha_j(x) = exp(-int_0^x C e^{-c|y|} / lambda_j(Ubar(y)) dy), rescaled to max 1.
WeightFn weight_fn(int j, const ModelSpec& model, const ProfileRep& profile, double C_alpha, double c_alpha,
                   double c_nonchar = 0.0);

/// Envelope constant of the profile-induced terms in the weighted energy
/// identity: sup over x and j of (|E_jj(Ubar) - E_jj(U_side)| + |d_x lambda_j(Ubar)| / 2) e^{rate |x|}.
/// The weights need C_alpha above twice this value.
double weight_tail_constant(const ModelSpec& model, const ProfileRep& profile, double rate);

struct EnergyCheckOptions {
  double theta_E = 0.0;
  double C_delta = 0.0;  // slack coefficient of |delta_dot| sqrt(e_j)
  double C_phi = 0.0;    // slack coefficient of ||Phi||_L2^2 (cross-family coupling)
};

struct EnergySeries {
  std::vector<double> t;
  std::vector<std::vector<double>> e;     // [family][m]
  std::vector<std::vector<double>> edot;  // [family][m]
  std::vector<int> flagged;               // intervals with edot > -2 theta_E e + slack, per family
};

EnergySeries weighted_energy_series(const Trajectory& traj, const std::vector<WeightFn>& weights,
                                    const EnergyCheckOptions& opt);

enum class NormKind { C0, C1, C2, L2, H2 };
const char* to_string(NormKind k);

struct DampingFit {
  std::string kind;
  std::vector<double> theta;
  std::vector<double> C_min;
  std::vector<bool> feasible;
  double max_feasible_theta = 0.0;
  double C_at_max = 0.0;
  double C_cap = 0.0;
  bool degenerate = false;  // identically zero norm
};

/// C_min(theta) = max_m N(t_m) / [e^{-theta t_m} N(0) + int_0^{t_m} e^{-theta (t_m - s)} f(s) ds]
/// with the integral by trapezoid on the sample times. Throws EmptyFeasible
/// when no theta admits C_min <= C_cap.
DampingFit fit_damping_series(const std::vector<double>& t, const std::vector<double>& N,
                              const std::vector<double>& forcing, const std::vector<double>& theta_grid,
                              double C_cap, const std::string& kind = "series");

/// Damping-estimate fit: C^K_b norms are forced by ||U||_C0 + |delta_dot|; the
/// L2 and H2 kinds use squared norms forced by ||U||_L2^2 + |delta_dot|^2.
DampingFit fit_damping(const NormSeries& series, NormKind kind, const std::vector<double>& theta_grid,
                       double C_cap);

std::vector<double> default_theta_grid();

struct SlavingReport {
  DampingFit psi_tilde;
  DampingFit ups_tilde;
};

/// Fits ||Psi~||_C0 and ||Ups~||_C0 against ||Phi||_C0 + |delta_dot| only.
SlavingReport slaving_check(const Trajectory& traj, const std::vector<Mat>& theta,
                            const std::vector<double>& theta_grid, double C_cap);

}  // namespace relaxdamp
