#pragma once

#include "relaxdamp/model.hpp"
#include "relaxdamp/types.hpp"

#include <vector>

namespace relaxdamp {

struct ProfileRep;

/// Real diagonalisation L A R = diag(lambda) with L R = I.
///
/// Eigenvalues are sorted ascending. Each right eigenvector r_j is scaled to
/// unit max-abs entry with that entry positive; the rows of L are the
/// biorthogonal dual basis.
struct EigenFrame {
  Vec lambdas;
  Mat L;
  Mat R;
  double min_abs_lambda = 0.0;
  double min_gap = 0.0;

  Mat Lambda() const { return lambdas.asDiagonal(); }
};

/// Absolute eigenvalue gap below which A counts as not strictly hyperbolic.
inline constexpr double kHyperbolicGap = 1e-10;
/// Smallest denominator lambda_k - lambda_j accepted by the commutator solve.
inline constexpr double kThetaGapMin = 1e-6;

EigenFrame decompose(const Mat& a, double c_min = 0.0);

struct FrameSeries {
  std::vector<EigenFrame> frames;
  double min_abs_lambda = 0.0;
  double min_gap = 0.0;
  /// max_i ||frame(x_{i+1}) - frame(x_i)||_inf / dx over L and R.
  double lipschitz = 0.0;
};

/// Flips eigenvector pairs (r_j, l_j) so that <r_j(x_i), r_j(x_{i+1})> > 0.
void continue_signs(std::vector<EigenFrame>& frames);

FrameSeries frame_along_profile(const ModelSpec& model, const ProfileRep& profile,
                                double c_min = 0.0);

/// Diagonal / off-diagonal split of a transformed source matrix plus the
/// commutator solution Theta with [Theta, Lambda] = F.
struct SourceSplit {
  Mat E;
  Mat F;
  Mat Theta;
};

/// E = diag(L Q R), F = L Q R - E. Theta is left zero.
SourceSplit source_split(const EigenFrame& frame, const Mat& q_matrix);

/// Theta_jk = F_jk / (lambda_k - lambda_j), zero diagonal.
Mat theta_matrix(const EigenFrame& frame, const Mat& f_tilde);

/// ||Theta Lambda - Lambda Theta - F||_inf.
double commutator_residual(const Mat& theta, const Vec& lambdas, const Mat& f_tilde);

/// Full linear source seen by Phi = L U at state V = Ubar + U:
///   L Q(V) R - L [dA(V)[r_k] Ubar_x]_k + (Lambda - delta_dot) (dL/dx) R.
Mat phi_source_matrix(const ModelSpec& model, const EigenFrame& frame, const Mat& dL_dx,
                      const Vec& v, const Vec& ubar_x, double delta_dot);

/// Linear source seen by Psi = L W: the Phi source minus L dA(V)[Ubar_x] R.
Mat psi_source_matrix(const ModelSpec& model, const EigenFrame& frame, const Mat& dL_dx,
                      const Vec& v, const Vec& ubar_x, double delta_dot);

/// Source split along a stationary profile, F-tilde including the
/// O(|Ubar_x|) frame-transport contribution, with Theta filled.
struct ProfileSource {
  std::vector<SourceSplit> splits;
  double max_commutator_residual = 0.0;  // relative: residual / (1 + ||F~||_inf)
  double max_theta = 0.0;
};

ProfileSource source_along_profile(const ModelSpec& model, const ProfileRep& profile,
                                   const FrameSeries& frames);

/// diag(L Q R) at a single state.
Vec diagonal_source(const ModelSpec& model, const Vec& u);

/// Damping rate from the endstate diagonal sources.
struct DampingRate {
  double theta_E = 0.0;        // -max_j E_jj^pm / 2 > 0
  double theta_E_signed = 0.0;  // max_j E_jj^pm / 2 as literally defined (negative)
  Vec E_minus;
  Vec E_plus;
};

DampingRate damping_rate(const ModelSpec& model);

/// Central difference of a per-node matrix sequence (one-sided at the ends).
std::vector<Mat> differentiate_frames_L(const std::vector<EigenFrame>& frames, double dx);

}  // namespace relaxdamp
