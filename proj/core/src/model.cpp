#include "relaxdamp/model.hpp"

#include "relaxdamp/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace relaxdamp {

namespace {

std::string format_state(const Vec& u) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
  os << ")";
  return os.str();
}

}  // namespace

bool StateBox::contains(const Vec& u) const {
  if (u.size() != lo.size()) return false;
  for (int i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || u[i] < lo[i] || u[i] > hi[i]) return false;
  }
  return true;
}

StateBox padded_box(const Vec& a, const Vec& b) {
  StateBox box{a.cwiseMin(b), a.cwiseMax(b)};
  for (int i = 0; i < a.size(); ++i) {
    const double pad = 0.5 * (box.hi[i] - box.lo[i]) + 0.5;
    box.lo[i] -= pad;
    box.hi[i] += pad;
  }
  return box;
}

ModelSpec::ModelSpec(std::string name, int dim, PolyMatrix a, PolyVector q, Vec u_minus,
                     Vec u_plus, double shock_speed, std::map<std::string, double> params,
                     std::optional<PolyMatrix> q_jacobian_override)
    : name_(std::move(name)),
      dim_(dim),
      params_(std::move(params)),
      a_(std::move(a)),
      q_(std::move(q)),
      u_minus_(std::move(u_minus)),
      u_plus_(std::move(u_plus)),
      shock_speed_(shock_speed) {
  if (dim_ < 1 || dim_ > kMaxDim) {
    fail(ErrorKind::InvalidParam, "state dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (a_.rows != dim_ || a_.cols != dim_ || q_.size() != dim_ || u_minus_.size() != dim_ ||
      u_plus_.size() != dim_) {
    fail(ErrorKind::InvalidParam, "model '" + name_ + "': coefficient shapes do not match N");
  }
  q_jac_ = q_jacobian_override ? std::move(*q_jacobian_override) : q_.jacobian();
  if (q_jac_.rows != dim_ || q_jac_.cols != dim_) {
    fail(ErrorKind::InvalidParam, "model '" + name_ + "': Q override must be N x N");
  }
  a_partials_.reserve(static_cast<size_t>(dim_));
  a_partials2_.resize(static_cast<size_t>(dim_));
  for (int k = 0; k < dim_; ++k) {
    a_partials_.push_back(a_.partial(k));
    for (int l = 0; l < dim_; ++l) {
      a_partials2_[static_cast<size_t>(k)].push_back(a_partials_.back().partial(l));
    }
  }
  for (int i = 0; i < dim_; ++i) {
    PolyMatrix h(dim_, dim_, dim_);
    for (int k = 0; k < dim_; ++k)
      for (int l = 0; l < dim_; ++l) h.at(k, l) = q_.at(i).partial(k).partial(l);
    q_hessian_rows_.push_back(std::move(h));
  }
  box_ = padded_box(u_minus_, u_plus_);
  a_constant_ = a_.is_constant();
}

double ModelSpec::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) fail(ErrorKind::InvalidParam, "model has no parameter '" + key + "'");
  return it->second;
}

void ModelSpec::check_domain(const Vec& u) const {
  if (!box_.contains(u)) {
    fail(ErrorKind::OutOfDomain, "state " + format_state(u) + " outside the state box of model '" +
                                     name_ + "'");
  }
}

Mat ModelSpec::A(const Vec& u) const {
  check_domain(u);
  return a_.eval(u);
}

Vec ModelSpec::q(const Vec& u) const {
  check_domain(u);
  return q_.eval(u);
}

Mat ModelSpec::Q(const Vec& u) const {
  check_domain(u);
  return q_jac_.eval(u);
}

Mat ModelSpec::dA(const Vec& u, const Vec& v) const {
  Mat m = Mat::Zero(dim_, dim_);
  if (a_constant_) return m;
  for (int k = 0; k < dim_; ++k) {
    if (v[k] != 0.0) m += v[k] * a_partials_[static_cast<size_t>(k)].eval(u);
  }
  return m;
}

Mat ModelSpec::d2A(const Vec& u, const Vec& v, const Vec& w) const {
  Mat m = Mat::Zero(dim_, dim_);
  if (a_constant_) return m;
  for (int k = 0; k < dim_; ++k)
    for (int l = 0; l < dim_; ++l) {
      const double c = v[k] * w[l];
      if (c != 0.0) m += c * a_partials2_[static_cast<size_t>(k)][static_cast<size_t>(l)].eval(u);
    }
  return m;
}

Vec ModelSpec::d2q(const Vec& u, const Vec& v, const Vec& w) const {
  Vec r(dim_);
  for (int i = 0; i < dim_; ++i) {
    r[i] = v.dot(q_hessian_rows_[static_cast<size_t>(i)].eval(u) * w);
  }
  return r;
}

ModelSpec build_jinxin(double a, double eps, const std::vector<double>& flux, double u_minus,
                       double u_plus) {
  if (!(a > 0.0)) fail(ErrorKind::InvalidParam, "jinxin: wave speed a must be positive");
  if (!(eps > 0.0)) fail(ErrorKind::InvalidParam, "jinxin: relaxation time eps must be positive");
  if (flux.empty()) fail(ErrorKind::InvalidParam, "jinxin: flux needs at least one coefficient");
  if (u_minus == u_plus) fail(ErrorKind::DegenerateShock, "jinxin: u_minus equals u_plus");

  auto f = [&](double u) {
    double r = 0.0;
    for (size_t i = flux.size(); i-- > 0;) r = r * u + flux[i];
    return r;
  };
  const double s = (f(u_plus) - f(u_minus)) / (u_plus - u_minus);

  PolyMatrix A(2, 2, 2);
  A.at(0, 0) = Polynomial::constant(2, -s);
  A.at(0, 1) = Polynomial::constant(2, 1.0);
  A.at(1, 0) = Polynomial::constant(2, a * a);
  A.at(1, 1) = Polynomial::constant(2, -s);

  PolyVector q(2, 2);
  // (f(u) - v) / eps
  q.at(1) = (1.0 / eps) * (Polynomial::univariate(2, 0, flux) + Polynomial::linear(2, 1, -1.0));

  Vec um(2), up(2);
  um << u_minus, f(u_minus);
  up << u_plus, f(u_plus);

  std::map<std::string, double> params{{"a", a}, {"eps", eps}, {"s", s},
                                       {"u_minus", u_minus}, {"u_plus", u_plus}};
  for (size_t i = 0; i < flux.size(); ++i) params["flux_c" + std::to_string(i)] = flux[i];
  params["flux_degree"] = static_cast<double>(flux.size() - 1);

  return ModelSpec("jinxin", 2, std::move(A), std::move(q), um, up, s, std::move(params));
}

Mat eval_A(const ModelSpec& model, const Vec& u) { return model.A(u); }
Vec eval_q(const ModelSpec& model, const Vec& u) { return model.q(u); }
Mat eval_Q(const ModelSpec& model, const Vec& u) { return model.Q(u); }

Mat fd_jacobian(const ModelSpec& model, const Vec& u) {
  const int n = model.dim();
  Mat J(n, n);
  for (int k = 0; k < n; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(u[k]));
    Vec up = u, um = u;
    up[k] += h;
    um[k] -= h;
    J.col(k) = (model.q_poly().eval(up) - model.q_poly().eval(um)) / (2.0 * h);
  }
  return J;
}

ModelValidation validate_model(const ModelSpec& model, int n_samples, unsigned long seed) {
  if (n_samples < 1) fail(ErrorKind::Precondition, "validate_model: n_samples must be >= 1");
  const auto& box = model.state_box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ModelValidation report;
  report.worst_state = model.u_minus();
  auto check = [&](const Vec& u) {
    const Mat a = model.A(u);
    if (!a.allFinite()) {
      fail(ErrorKind::ValidationFailed, "A is not finite at " + format_state(u));
    }
    const Mat q_exact = model.Q(u);
    const double err = max_abs(Mat(q_exact - fd_jacobian(model, u))) / (1.0 + max_abs(q_exact));
    if (err > report.max_jacobian_error) {
      report.max_jacobian_error = err;
      report.worst_state = u;
    }
    ++report.n_samples;
  };

  check(model.u_minus());
  check(model.u_plus());
  for (int s = 0; s < n_samples; ++s) {
    Vec u(model.dim());
    for (int i = 0; i < u.size(); ++i) u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    check(u);
  }
  if (report.max_jacobian_error > 1e-6) {
    report.passed = false;
    std::ostringstream os;
    os << "Q disagrees with the finite-difference Jacobian of q (relative error "
       << report.max_jacobian_error << ") at " << format_state(report.worst_state);
    fail(ErrorKind::ValidationFailed, os.str());
  }
  return report;
}

}  // namespace relaxdamp
