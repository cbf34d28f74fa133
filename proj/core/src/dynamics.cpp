#include "relaxdamp/dynamics.hpp"

#include "relaxdamp/errors.hpp"
#include "relaxdamp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaxdamp {

namespace {

using RowField = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kMaxCfl = 0.9;

double linear_at(const double* row, int n, double s) {
  if (s <= 0.0) return row[0];
  if (s >= n - 1) return row[n - 1];
  const int k = static_cast<int>(s);
  const double t = s - k;
  return (1.0 - t) * row[k] + t * row[k + 1];
}

Vec first_unit(int n) {
  Vec e = Vec::Zero(n);
  e[0] = 1.0;
  return e;
}

}  // namespace

double ShiftSpec::delta(double t) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return rate * t;
    case Kind::Sinusoid: return amplitude * std::sin(frequency * t);
  }
  return 0.0;
}

double ShiftSpec::delta_dot(double t) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return rate;
    case Kind::Sinusoid: return amplitude * frequency * std::cos(frequency * t);
  }
  return 0.0;
}

double ShiftSpec::eps_delta() const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return std::abs(rate);
    case Kind::Sinusoid: return std::abs(amplitude * frequency);
  }
  return 0.0;
}

PerturbationSpec PerturbationSpec::gaussian(double amplitude, double width, double center, Vec direction) {
  PerturbationSpec p;
  p.kind = Kind::Gaussian;
  p.amplitude = amplitude;
  p.width = width;
  p.center = center;
  p.direction = std::move(direction);
  return p;
}

PerturbationSpec PerturbationSpec::offset(Vec d_minus, Vec d_plus, double blend_width) {
  PerturbationSpec p;
  p.kind = Kind::Offset;
  p.d_minus = std::move(d_minus);
  p.d_plus = std::move(d_plus);
  p.blend_width = blend_width;
  return p;
}

PerturbationSpec PerturbationSpec::shift_difference(double h) {
  PerturbationSpec p;
  p.kind = Kind::ShiftDifference;
  p.h = h;
  return p;
}

double c1_norm(const Field& u, const Field& w) {
  return std::max(sup_abs(u), sup_abs(w));
}

Snapshot make_initial(const ProfileRep& profile, const PerturbationSpec& pert) {
  const Grid& g = profile.grid;
  const int dim = profile.dim();
  Snapshot s;
  s.U = Field::Zero(dim, g.n);
  s.W = Field::Zero(dim, g.n);
  switch (pert.kind) {
    case PerturbationSpec::Kind::Zero:
      break;
    case PerturbationSpec::Kind::Gaussian: {
      if (!(pert.width > 0.0)) fail(ErrorKind::Precondition, "gaussian width must be positive");
      const Vec dir = pert.direction.size() == 0 ? first_unit(dim) : pert.direction;
      if (dir.size() != dim) fail(ErrorKind::Precondition, "gaussian direction has the wrong dimension");
      for (int i = 0; i < g.n; ++i) {
        const double z = (g.x(i) - pert.center) / pert.width;
        const double e = pert.amplitude * std::exp(-0.5 * z * z);
        s.U.col(i) = e * dir;
        s.W.col(i) = (-z / pert.width * e) * dir;
      }
      break;
    }
    case PerturbationSpec::Kind::Offset: {
      if (pert.d_minus.size() != dim || pert.d_plus.size() != dim) {
        fail(ErrorKind::Precondition, "offset vectors have the wrong dimension");
      }
      if (!(pert.blend_width > 0.0)) fail(ErrorKind::Precondition, "blend width must be positive");
      for (int i = 0; i < g.n; ++i) {
        const double th = std::tanh(g.x(i) / pert.blend_width);
        const double sigma = 0.5 * (1.0 + th);
        const double dsigma = 0.5 * (1.0 - th * th) / pert.blend_width;
        s.U.col(i) = (1.0 - sigma) * pert.d_minus + sigma * pert.d_plus;
        s.W.col(i) = dsigma * (pert.d_plus - pert.d_minus);
      }
      break;
    }
    case PerturbationSpec::Kind::ShiftDifference: {
      for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        s.U.col(i) = profile.interpolate(x + pert.h, 0) - profile.value(i);
        s.W.col(i) = profile.interpolate(x + pert.h, 1) - profile.d1.col(i);
      }
      break;
    }
  }
  const double c1 = c1_norm(s.U, s.W);
  if (c1 > pert.eps_budget) {
    std::ostringstream os;
    os << "initial perturbation has ||U_0||_C1 = " << c1 << " above the budget " << pert.eps_budget;
    fail(ErrorKind::BudgetExceeded, os.str());
  }
  return s;
}

Dynamics::Dynamics(const ModelSpec& model, const ProfileRep& profile, ShiftSpec shift)
    : model_(model), profile_(profile), shift_(shift), constant_frame_(model.constant_coefficients()) {
  if (profile_.dim() != model_.dim()) fail(ErrorKind::Precondition, "profile and model dimensions differ");
  if (profile_.grid.n < 5) fail(ErrorKind::Precondition, "dynamics needs at least five nodes");
  frame0_ = decompose(model_.A(profile_.value(0)));
  q_bar_.resize(model_.dim(), profile_.grid.n);
  for (int i = 0; i < profile_.grid.n; ++i) q_bar_.col(i) = model_.q(profile_.value(i));
}

Vec Dynamics::far_field_rhs(const Vec& u, int side, double delta_dot) const {
  const Vec& end = side < 0 ? model_.u_minus() : model_.u_plus();
  const int node = side < 0 ? 0 : profile_.grid.n - 1;
  return model_.q(Vec(end + u)) - model_.q(end) + delta_dot * profile_.d1.col(node);
}

Field Dynamics::source(const Field& u, double delta_dot) const {
  const int n = profile_.grid.n;
  Field s(u.rows(), n);
  for (int i = 1; i + 1 < n; ++i) {
    const Vec v = profile_.values.col(i) + u.col(i);
    Vec si = model_.q(v) - q_bar_.col(i) + delta_dot * profile_.d1.col(i);
    if (!constant_frame_) {
      si -= (model_.A(v) - model_.A(profile_.value(i))) * profile_.d1.col(i);
    }
    s.col(i) = si;
  }
  s.col(0) = far_field_rhs(u.col(0), -1, delta_dot);
  s.col(n - 1) = far_field_rhs(u.col(n - 1), 1, delta_dot);
  return s;
}

void Dynamics::frames_at(const Field& u, std::vector<EigenFrame>& frames, std::vector<Mat>& dL) const {
  const int n = profile_.grid.n;
  frames.resize(static_cast<size_t>(n));
  if (constant_frame_) {
    std::fill(frames.begin(), frames.end(), frame0_);
    dL.assign(static_cast<size_t>(n), Mat::Zero(model_.dim(), model_.dim()));
    return;
  }
  for (int i = 0; i < n; ++i) {
    frames[static_cast<size_t>(i)] = decompose(model_.A(Vec(profile_.values.col(i) + u.col(i))));
  }
  continue_signs(frames);
  dL = differentiate_frames_L(frames, profile_.grid.dx);
}

double Dynamics::max_speed(const Field& u, double delta_dot) const {
  if (constant_frame_) return (frame0_.lambdas.array() - delta_dot).abs().maxCoeff();
  double m = 0.0;
  for (int i = 0; i < profile_.grid.n; ++i) {
    const EigenFrame f = decompose(model_.A(Vec(profile_.values.col(i) + u.col(i))));
    m = std::max(m, (f.lambdas.array() - delta_dot).abs().maxCoeff());
  }
  return m;
}

Field Dynamics::reference_rhs(const Field& u, double t, double& speed) const {
  const double dd = shift_.delta_dot(t);
  const int n = profile_.grid.n;
  const int dim = model_.dim();
  const double inv_dx = 1.0 / profile_.grid.dx;
  Field out = source(u, dd);
  std::vector<EigenFrame> frames;
  std::vector<Mat> dL;
  if (!constant_frame_) frames_at(u, frames, dL);
  speed = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const EigenFrame& f = constant_frame_ ? frame0_ : frames[static_cast<size_t>(i)];
    const Vec back = u.col(i) - u.col(i - 1);
    const Vec fwd = u.col(i + 1) - u.col(i);
    Vec adv = Vec::Zero(dim);
    for (int j = 0; j < dim; ++j) {
      const double d = f.lambdas[j] - dd;
      speed = std::max(speed, std::abs(d));
      const double slope = f.L.row(j).dot(d > 0.0 ? back : fwd);
      adv += (d * slope * inv_dx) * f.R.col(j);
    }
    out.col(i) -= adv;
  }
  return out;
}

double Dynamics::step_reference(Field& u, double t, double dt) const {
  double speed = 0.0;
  const Field k1 = reference_rhs(u, t, speed);
  const double cfl = speed * dt / profile_.grid.dx;
  if (cfl > kMaxCfl) {
    std::ostringstream os;
    os << "CFL number " << cfl << " exceeds " << kMaxCfl << " at t = " << t;
    fail(ErrorKind::CFLViolation, os.str());
  }
  const Field mid = u + 0.5 * dt * k1;
  double speed2 = 0.0;
  u += dt * reference_rhs(mid, t + 0.5 * dt, speed2);
  return std::max(cfl, speed2 * dt / profile_.grid.dx);
}

namespace {

struct PhiData {
  RowField phi, lam, ed, g;
};

// Per-node Phi, lambda, diag source and forcing for the frame frozen at u.
PhiData phi_data(const ModelSpec& model, const ProfileRep& profile, const Field& src,
                        const Field& u, double dd, bool constant_frame, const EigenFrame& frame0,
                        const std::vector<EigenFrame>& frames, const std::vector<Mat>& dL) {
  const int n = profile.grid.n;
  const int dim = model.dim();
  PhiData d;
  d.phi.resize(dim, n);
  d.lam.resize(dim, n);
  d.ed.resize(dim, n);
  d.g.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    const EigenFrame& f = constant_frame ? frame0 : frames[static_cast<size_t>(i)];
    const Vec v = profile.values.col(i) + u.col(i);
    const Vec phi = f.L * u.col(i);
    Mat m;
    Vec g = f.L * src.col(i);
    if (constant_frame) {
      m = f.L * model.Q(v) * f.R;
    } else {
      const Mat& dl = dL[static_cast<size_t>(i)];
      m = phi_source_matrix(model, f, dl, v, profile.d1.col(i), dd);
      g += (f.lambdas.array() - dd).matrix().asDiagonal() * (dl * (f.R * phi));
    }
    const Vec e = m.diagonal();
    g -= e.cwiseProduct(phi);
    d.phi.col(i) = phi;
    d.lam.col(i) = f.lambdas;
    d.ed.col(i) = e;
    d.g.col(i) = g;
  }
  return d;
}

}  // namespace

double Dynamics::step_moc(Field& u, double t, double dt) const {
  const int n = profile_.grid.n;
  const int dim = model_.dim();
  const double dx = profile_.grid.dx;
  const double tm = t + 0.5 * dt;
  const double dd = shift_.delta_dot(tm);

  std::vector<EigenFrame> frames;
  std::vector<Mat> dL;
  if (!constant_frame_) frames_at(u, frames, dL);
  const Field src = source(u, dd);
  const PhiData pd = phi_data(model_, profile_, src, u, dd, constant_frame_, frame0_, frames, dL);

  const double speed = (pd.lam.array() - dd).abs().maxCoeff();
  const double cfl = speed * dt / dx;
  if (cfl > kMaxCfl) {
    std::ostringstream os;
    os << "CFL number " << cfl << " exceeds " << kMaxCfl << " at t = " << t;
    fail(ErrorKind::CFLViolation, os.str());
  }

  Field next(dim, n);
  Vec phi_new(dim);
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double* lam = pd.lam.row(j).data();
      const double c_i = lam[i] - dd;
      const double s_mid = i - 0.5 * dt * c_i / dx;
      const double c_mid = linear_at(lam, n, s_mid) - dd;
      const double s_foot = i - dt * c_mid / dx;
      const double s_m = i - 0.5 * dt * c_mid / dx;
      const double phi_f = cubic_at(pd.phi.row(j).data(), n, s_foot);
      const double h = 0.5 * dt * (linear_at(pd.ed.row(j).data(), n, s_foot) + pd.ed(j, i));
      const double g_m = cubic_at(pd.g.row(j).data(), n, s_m);
      phi_new[j] = phi_f * std::exp(h) + dt * std::exp(0.5 * h) * g_m;
    }
    const Mat& r = constant_frame_ ? frame0_.R : frames[static_cast<size_t>(i)].R;
    next.col(i) = r * phi_new;
  }
  // Far-field end nodes: explicit midpoint.
  const double d0 = shift_.delta_dot(t);
  for (int side : {-1, 1}) {
    const int node = side < 0 ? 0 : n - 1;
    const Vec y = u.col(node);
    const Vec ymid = y + 0.5 * dt * far_field_rhs(y, side, d0);
    next.col(node) = y + dt * far_field_rhs(ymid, side, dd);
  }
  u = std::move(next);
  return cfl;
}

void Dynamics::characteristic_data(Snapshot& s) const {
  const double dd = s.delta_dot;
  std::vector<EigenFrame> frames;
  std::vector<Mat> dL;
  if (!constant_frame_) frames_at(s.U, frames, dL);
  const Field src = source(s.U, dd);
  const PhiData pd = phi_data(model_, profile_, src, s.U, dd, constant_frame_, frame0_, frames, dL);
  s.Phi = pd.phi;
  s.lambda = pd.lam;
  s.Ediag = pd.ed;
  s.G = pd.g;
}

Snapshot Dynamics::snapshot(const Field& u, double t) const {
  Snapshot s;
  s.t = t;
  s.delta = shift_.delta(t);
  s.delta_dot = shift_.delta_dot(t);
  s.U = u;
  s.W = diff4(u, profile_.grid.dx);
  characteristic_data(s);
  return s;
}

Trajectory evolve(const ModelSpec& model, const ProfileRep& profile, const PerturbationSpec& pert,
                  const ShiftSpec& shift, const EvolveOptions& opt) {
  if (!(opt.T > 0.0)) fail(ErrorKind::Precondition, "evolve: T must be positive");
  if (opt.n_out < 1) fail(ErrorKind::Precondition, "evolve: n_out must be at least 1");
  if (!(opt.cfl > 0.0) || opt.cfl > kMaxCfl) fail(ErrorKind::Precondition, "evolve: cfl must lie in (0, 0.9]");

  const Snapshot init = make_initial(profile, pert);
  const Dynamics dyn(model, profile, shift);
  const double dx = profile.grid.dx;

  Trajectory traj(profile.grid, model, profile, shift);
  traj.backend = opt.backend;
  traj.eps_budget = pert.eps_budget;
  Snapshot s0 = dyn.snapshot(init.U, 0.0);
  s0.W = init.W;  // analytic at t = 0
  traj.snaps.reserve(static_cast<size_t>(opt.n_out) + 1);
  traj.max_c1 = c1_norm(s0.U.middleCols(kInteriorSkip, profile.grid.n - 2 * kInteriorSkip),
                        s0.W.middleCols(kInteriorSkip, profile.grid.n - 2 * kInteriorSkip));
  traj.snaps.push_back(std::move(s0));

  const double dt_out = opt.T / opt.n_out;
  const double lam_max = dyn.max_speed(init.U, 0.0);
  const double dt_cfl = opt.cfl * dx / (lam_max + shift.eps_delta());
  const long m = std::max<long>(1, static_cast<long>(std::ceil(dt_out / dt_cfl - 1e-12)));
  const double dt = dt_out / static_cast<double>(m);
  const double blowup = 10.0 * pert.eps_budget;

  Field u = init.U;
  double t = 0.0;
  for (int k = 1; k <= opt.n_out; ++k) {
    for (long step = 0; step < m; ++step) {
      try {
        const double cfl = opt.backend == Backend::Moc ? dyn.step_moc(u, t, dt) : dyn.step_reference(u, t, dt);
        traj.max_cfl = std::max(traj.max_cfl, cfl);
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " (step at t = " << t << ")";
        fail(e.kind(), os.str());
      }
      ++traj.n_steps;
      t = (static_cast<double>(k - 1) + static_cast<double>(step + 1) / static_cast<double>(m)) * dt_out;
      const double c0 = u.cwiseAbs().maxCoeff();
      if (!std::isfinite(c0) || c0 > blowup) {
        std::ostringstream os;
        os << "||U||_C0 = " << c0 << " exceeds 10x the budget at t = " << t;
        fail(ErrorKind::BlowUp, os.str());
      }
    }
    t = k * dt_out;
    Snapshot s = dyn.snapshot(u, t);
    const int inner = profile.grid.n - 2 * kInteriorSkip;
    const double c1 = c1_norm(s.U.middleCols(kInteriorSkip, inner), s.W.middleCols(kInteriorSkip, inner));
    traj.max_c1 = std::max(traj.max_c1, c1);
    if (c1 > pert.eps_budget && !traj.budget_violated) {
      traj.budget_violated = true;
      traj.first_violation_t = t;
    }
    traj.snaps.push_back(std::move(s));
  }
  return traj;
}

DiagonalVars diagonal_vars(const ModelSpec& model, const ProfileRep& profile, const Snapshot& s,
                           const std::vector<Mat>& theta) {
  const int n = profile.grid.n;
  const int dim = model.dim();
  if (static_cast<int>(theta.size()) != n) fail(ErrorKind::Precondition, "theta must be given per node");
  const Field y = diff4(s.W, profile.grid.dx);
  DiagonalVars d;
  d.Phi.resize(dim, n);
  d.Psi.resize(dim, n);
  d.Psi_t.resize(dim, n);
  d.Ups.resize(dim, n);
  d.Ups_t.resize(dim, n);
  const bool constant = model.constant_coefficients();
  const EigenFrame f0 = decompose(model.A(profile.value(0)));
  std::vector<EigenFrame> frames;
  if (!constant) {
    frames.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) frames.push_back(decompose(model.A(Vec(profile.values.col(i) + s.U.col(i)))));
    continue_signs(frames);
  }
  for (int i = 0; i < n; ++i) {
    const Mat& l = constant ? f0.L : frames[static_cast<size_t>(i)].L;
    const Mat& th = theta[static_cast<size_t>(i)];
    d.Phi.col(i) = l * s.U.col(i);
    d.Psi.col(i) = l * s.W.col(i);
    d.Ups.col(i) = l * y.col(i);
    d.Psi_t.col(i) = d.Psi.col(i) + th * d.Phi.col(i);
    d.Ups_t.col(i) = d.Ups.col(i) + th * d.Psi.col(i);
  }
  return d;
}

double w_equation_residual(const Trajectory& traj, int m) {
  if (m < 1 || m + 1 >= static_cast<int>(traj.snaps.size())) {
    fail(ErrorKind::Precondition, "w_equation_residual needs neighbouring snapshots");
  }
  const Snapshot& prev = traj.snaps[static_cast<size_t>(m - 1)];
  const Snapshot& cur = traj.snaps[static_cast<size_t>(m)];
  const Snapshot& next = traj.snaps[static_cast<size_t>(m + 1)];
  const double dx = traj.grid.dx;
  const Dynamics dyn(traj.model, traj.profile, traj.shift);
  const Field wt = (next.W - prev.W) / (next.t - prev.t);
  const Field wx = diff4(cur.W, dx);
  const Field sx = diff4(dyn.source(cur.U, cur.delta_dot), dx);
  double worst = 0.0, scale = 0.0;
  for (int i = 2 * kInteriorSkip; i + 2 * kInteriorSkip < traj.grid.n; ++i) {
    const Vec v = traj.profile.values.col(i) + cur.U.col(i);
    const Mat a = traj.model.A(v) - cur.delta_dot * Mat::Identity(v.size(), v.size());
    const Vec vx = traj.profile.d1.col(i) + cur.W.col(i);
    const Vec res = wt.col(i) + a * wx.col(i) + traj.model.dA(v, vx) * cur.W.col(i) - sx.col(i);
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
    scale = std::max(scale, std::max(wt.col(i).cwiseAbs().maxCoeff(), (a * wx.col(i)).cwiseAbs().maxCoeff()));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace relaxdamp
