#pragma once

#include "relaxdamp/polynomial.hpp"
#include "relaxdamp/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relaxdamp {

/// Closed axis-aligned box in state space.
struct StateBox {
  Vec lo;
  Vec hi;

  bool contains(const Vec& u) const;
};

/// Relaxation system U_t + A(U) U_x = q(U) written in the shock frame.
///
/// All coefficients are polynomial so that every derivative the toolkit needs
/// (Q = dq, dA, and the second differentials used for the profile's third
/// derivative) is available in closed form. A hand-coded Jacobian may replace
/// the derived one; `validate_model` exists to catch it being wrong.
class ModelSpec {
 public:
  ModelSpec(std::string name, int dim, PolyMatrix a, PolyVector q, Vec u_minus, Vec u_plus,
            double shock_speed, std::map<std::string, double> params = {},
            std::optional<PolyMatrix> q_jacobian_override = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::map<std::string, double>& params() const { return params_; }
  double param(const std::string& key) const;
  const StateBox& state_box() const { return box_; }
  double shock_speed() const { return shock_speed_; }
  const Vec& u_minus() const { return u_minus_; }
  const Vec& u_plus() const { return u_plus_; }
  const Vec& endstate(int side) const { return side < 0 ? u_minus_ : u_plus_; }
  bool is_jinxin() const { return name_ == "jinxin"; }

  /// True when A does not depend on U (frames can be computed once).
  bool constant_coefficients() const { return a_constant_; }

  // Checked evaluators: throw OutOfDomain outside the state box.
  Mat A(const Vec& u) const;
  Vec q(const Vec& u) const;
  Mat Q(const Vec& u) const;

  /// dA(U)[v] = sum_k v_k dA/dU_k.
  Mat dA(const Vec& u, const Vec& v) const;
  /// d^2A(U)[v, w].
  Mat d2A(const Vec& u, const Vec& v, const Vec& w) const;
  /// d^2q(U)[v, w].
  Vec d2q(const Vec& u, const Vec& v, const Vec& w) const;

  const PolyMatrix& a_poly() const { return a_; }
  const PolyVector& q_poly() const { return q_; }

 private:
  void check_domain(const Vec& u) const;

  std::string name_;
  int dim_;
  std::map<std::string, double> params_;
  PolyMatrix a_;
  PolyVector q_;
  PolyMatrix q_jac_;
  std::vector<PolyMatrix> a_partials_;               // dA/dU_k
  std::vector<std::vector<PolyMatrix>> a_partials2_;  // d2A/dU_k dU_l
  std::vector<PolyMatrix> q_hessian_rows_;           // (d2q_i/dU_k dU_l) for each i
  Vec u_minus_;
  Vec u_plus_;
  double shock_speed_;
  StateBox box_;
  bool a_constant_;
};

/// Padded bounding box of {U-, U+}: 50% of each component's width plus 0.5.
StateBox padded_box(const Vec& a, const Vec& b);

/// Jin-Xin relaxation of u_t + f(u)_x = 0 with state (u, v), written in the
/// frame moving with the Rankine-Hugoniot speed of the reduced law.
ModelSpec build_jinxin(double a, double eps, const std::vector<double>& flux, double u_minus,
                       double u_plus);

Mat eval_A(const ModelSpec& model, const Vec& u);
Vec eval_q(const ModelSpec& model, const Vec& u);
Mat eval_Q(const ModelSpec& model, const Vec& u);

struct ModelValidation {
  bool passed = true;
  double max_jacobian_error = 0.0;  // relative, ||Q - FD||_inf / (1 + ||Q||_inf)
  Vec worst_state;
  int n_samples = 0;
};

/// Central-difference Jacobian of q, step h_i = 1e-6 (1 + |U_i|).
Mat fd_jacobian(const ModelSpec& model, const Vec& u);

/// Samples the state box (seeded, deterministic) and cross-checks Q against
/// finite differences of q. Throws ValidationFailed on a mismatch above 1e-6.
ModelValidation validate_model(const ModelSpec& model, int n_samples, unsigned long seed = 0);

}  // namespace relaxdamp
