#include "relaxdamp/characteristics.hpp"

#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace relaxdamp {

namespace {

// Cubic space-time interpolation of one family's row in a snapshot field.
class Sampler {
 public:
  explicit Sampler(const Trajectory& traj)
      : traj_(traj),
        g_(traj.grid),
        n_snap_(static_cast<int>(traj.snaps.size())),
        dt_out_(n_snap_ > 1 ? traj.snaps[1].t - traj.snaps[0].t : 1.0) {
    const ModelSpec& m = traj.model;
    for (int side = 0; side < 2; ++side) {
      const Vec& u = side == 0 ? m.u_minus() : m.u_plus();
      const EigenFrame f = decompose(m.A(u));
      lam_end_[side] = f.lambdas;
      e_end_[side] = (f.L * m.Q(u) * f.R).diagonal();
    }
  }

  bool inside(double x) const { return x >= g_.x_min && x <= g_.x_max(); }
  int side_of(double x) const { return x < g_.x_min ? 0 : 1; }
  double lambda_end(int side, int j) const { return lam_end_[side][j]; }
  double e_end(int side, int j) const { return e_end_[side][j]; }

  double at_snapshot(const Field Snapshot::*member, int m, int j, double x) const {
    const Field& f = traj_.snaps[static_cast<size_t>(m)].*member;
    const double s = (x - g_.x_min) / g_.dx;
    return cubic_at(f.data() + j, g_.n, s, static_cast<int>(f.rows()));
  }

  double sample(const Field Snapshot::*member, int j, double t, double x) const {
    if (n_snap_ == 1) return at_snapshot(member, 0, j, x);
    const double tau = t / dt_out_;
    int m = static_cast<int>(std::floor(tau));
    m = std::clamp(m, 0, n_snap_ - 2);
    const double r = tau - m;
    if (r == 0.0) return at_snapshot(member, m, j, x);
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      vals[k] = at_snapshot(member, std::clamp(m - 1 + k, 0, n_snap_ - 1), j, x);
    }
    return cubic_at(vals, 4, 1.0 + r);
  }

 private:
  const Trajectory& traj_;
  Grid g_;
  int n_snap_;
  double dt_out_;
  Vec lam_end_[2];
  Vec e_end_[2];
};

}  // namespace

CharPath trace(const Trajectory& traj, int j, double x0, int substeps) {
  if (traj.snaps.empty()) fail(ErrorKind::Precondition, "trace needs a non-empty trajectory");
  if (j < 0 || j >= traj.model.dim()) fail(ErrorKind::Precondition, "family index out of range");
  if (substeps < 1) fail(ErrorKind::Precondition, "substeps must be positive");
  const Sampler smp(traj);
  const int n_out = static_cast<int>(traj.snaps.size()) - 1;
  const double dt_out = n_out > 0 ? traj.snaps[1].t - traj.snaps[0].t : 0.0;
  const double h = dt_out / substeps;
  const ShiftSpec& shift = traj.shift;

  auto speed = [&](double t, double x) {
    const double lam = smp.inside(x) ? smp.sample(&Snapshot::lambda, j, t, x) : smp.lambda_end(smp.side_of(x), j);
    return lam - shift.delta_dot(t);
  };

  CharPath p;
  p.family = j;
  p.x0 = x0;
  p.substeps = substeps;
  const size_t total = static_cast<size_t>(n_out) * static_cast<size_t>(substeps) + 1;
  p.s.reserve(total);
  p.X.reserve(total);
  double x = x0;
  for (size_t k = 0; k < total; ++k) {
    const double t = static_cast<double>(k) * h;
    const bool in = smp.inside(x);
    if (!in && p.grid_exit_time < 0.0) p.grid_exit_time = t;
    const double v = speed(t, x);
    p.s.push_back(t);
    p.X.push_back(x);
    p.speed.push_back(v);
    p.E.push_back(in ? smp.sample(&Snapshot::Ediag, j, t, x) : smp.e_end(smp.side_of(x), j));
    p.G.push_back(in ? smp.sample(&Snapshot::G, j, t, x) : 0.0);
    if (k + 1 < total) {
      const double xp = x + h * v;
      x += 0.5 * h * (v + speed(t + h, xp));
    }
  }
  accumulate_H(p);
  return p;
}

const std::vector<double>& accumulate_H(CharPath& path) {
  path.H.assign(path.s.size(), 0.0);
  for (size_t k = 1; k < path.s.size(); ++k) {
    path.H[k] = path.H[k - 1] + 0.5 * (path.s[k] - path.s[k - 1]) * (path.E[k] + path.E[k - 1]);
  }
  return path.H;
}

double path_H_sup(const CharPath& path, double theta_E, int m_max) {
  double best = -std::numeric_limits<double>::infinity();
  double min_a = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= m_max; ++m) {
    const size_t k = path.at_output(m);
    if (k >= path.s.size()) break;
    const double a = path.H[k] + theta_E * path.s[k];
    min_a = std::min(min_a, a);
    best = std::max(best, a - min_a);
  }
  return best;
}

HBoundReport verify_H_bound(const std::vector<CharPath>& paths, double theta_E, double c_nonchar,
                            double C_tail, double theta_tilde, int n_families) {
  HBoundReport r;
  r.theta_E = theta_E;
  r.n_paths = static_cast<int>(paths.size());
  std::vector<int> count(static_cast<size_t>(n_families), 0);
  r.C_family.assign(static_cast<size_t>(n_families), -std::numeric_limits<double>::infinity());
  r.C_emp = -std::numeric_limits<double>::infinity();
  r.C_half = -std::numeric_limits<double>::infinity();
  for (const auto& p : paths) {
    if (p.H.size() != p.s.size()) fail(ErrorKind::Precondition, "paths must carry accumulated H");
    const int n_out = static_cast<int>((p.s.size() - 1) / static_cast<size_t>(p.substeps));
    const double full = path_H_sup(p, theta_E, n_out);
    const double half = path_H_sup(p, theta_E, n_out / 2);
    auto& cf = r.C_family[static_cast<size_t>(p.family)];
    cf = std::max(cf, full);
    r.C_emp = std::max(r.C_emp, full);
    r.C_half = std::max(r.C_half, half);
    ++count[static_cast<size_t>(p.family)];
  }
  for (int j = 0; j < n_families; ++j) {
    if (count[static_cast<size_t>(j)] < 10) {
      fail(ErrorKind::Precondition, "H-bound verification needs at least 10 paths per family");
    }
  }
  if (!std::isfinite(r.C_emp)) fail(ErrorKind::NotBounded, "H-bound sup is not finite");
  const double scale = std::max(std::abs(r.C_emp), std::abs(r.C_half));
  r.relative_change = scale > 0.0 ? std::abs(r.C_emp - r.C_half) / scale : 0.0;
  r.analytic_bound = (c_nonchar > 0.0 && theta_tilde > 0.0) ? 2.0 * C_tail / (c_nonchar * theta_tilde)
                                                            : std::numeric_limits<double>::infinity();
  if (r.C_emp > r.C_half + 0.05 * scale + 1e-12) {
    std::ostringstream os;
    os << "H-bound constant grows with the horizon: " << r.C_half << " at T/2 vs " << r.C_emp
       << " at T (theta_E = " << theta_E << ")";
    fail(ErrorKind::NotBounded, os.str());
  }
  return r;
}

double diagonal_source_lipschitz(const ModelSpec& model, int n_samples, std::uint64_t seed) {
  const StateBox& box = model.state_box();
  const int dim = model.dim();
  std::mt19937_64 rng(seed);
  double lip = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    Vec u(dim), hstep(dim);
    for (int k = 0; k < dim; ++k) {
      hstep[k] = 1e-6 * (1.0 + std::max(std::abs(box.lo[k]), std::abs(box.hi[k])));
      std::uniform_real_distribution<double> d(box.lo[k] + hstep[k], box.hi[k] - hstep[k]);
      u[k] = d(rng);
    }
    Vec grad_l1 = Vec::Zero(dim);
    for (int k = 0; k < dim; ++k) {
      Vec up = u, dn = u;
      up[k] += hstep[k];
      dn[k] -= hstep[k];
      grad_l1 += ((diagonal_source(model, up) - diagonal_source(model, dn)) / (2.0 * hstep[k])).cwiseAbs();
    }
    lip = std::max(lip, grad_l1.maxCoeff());
  }
  return lip;
}

NoDampingRadius no_damping_radius(const ModelSpec& model, const ProfileRep& profile, double eps_budget,
                                  std::uint64_t seed, int n_samples) {
  NoDampingRadius out;
  out.eps_budget = eps_budget;
  out.theta_E = damping_rate(model).theta_E;
  const TailConstants tc = tail_constants(profile);
  out.C_tail = tc.amplitude;
  out.theta_tilde = tc.rate;
  out.C_lip = diagonal_source_lipschitz(model, n_samples, seed);

  const double margin = out.C_lip * eps_budget;
  double limit[2];
  for (int side = 0; side < 2; ++side) {
    limit[side] = diagonal_source(model, side == 0 ? model.u_minus() : model.u_plus()).maxCoeff() + margin;
    if (limit[side] >= -out.theta_E) {
      std::ostringstream os;
      os << "no radius exists: E_jj at the " << (side ? "plus" : "minus") << " endstate plus C_lip eps = "
         << limit[side] << " is not below -theta_E = " << -out.theta_E;
      fail(ErrorKind::EpsilonTooLarge, os.str());
    }
  }
  auto tail = [&](double ax) {
    return out.theta_tilde > 0.0 ? out.C_tail * std::exp(-out.theta_tilde * ax) : out.C_tail;
  };
  const Grid& g = profile.grid;
  double bad = -1.0;
  bool edge_bad[2] = {false, false};
  const double edge = std::min(-g.x_min, g.x_max()) - 0.5 * g.dx;
  for (int i = 0; i < g.n; ++i) {
    const double ax = std::abs(g.x(i));
    const double val = diagonal_source(model, profile.value(i)).maxCoeff() + tail(ax) + margin;
    if (val > -out.theta_E) {
      bad = std::max(bad, ax);
      if (ax >= edge) edge_bad[g.x(i) < 0 ? 0 : 1] = true;
    }
  }
  if (bad < 0.0) {
    out.R = 0.0;
  } else if (edge_bad[0] || edge_bad[1]) {
    // Beyond the grid: profile at its endstate, only the tail term decays.
    out.R = bad;
    for (int side = 0; side < 2; ++side) {
      if (!edge_bad[side]) continue;
      if (out.theta_tilde <= 0.0) fail(ErrorKind::EpsilonTooLarge, "tail does not decay; no radius exists");
      out.R = std::max(out.R, std::log(out.C_tail / (-out.theta_E - limit[side])) / out.theta_tilde);
    }
  } else {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
      const double ax = std::abs(g.x(i));
      if (ax > bad) r = std::min(r, ax);
    }
    out.R = r;
  }
  return out;
}

double max_diag_source_outside(const Trajectory& traj, double R) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snaps) {
    for (int i = 0; i < traj.grid.n; ++i) {
      if (std::abs(traj.grid.x(i)) >= R) worst = std::max(worst, s.Ediag.col(i).maxCoeff());
    }
  }
  return worst;
}

double exit_time(const CharPath& path, double R) {
  if (path.X.empty()) return -1.0;
  if (std::abs(path.X[0]) > R) return 0.0;
  for (size_t k = 1; k < path.X.size(); ++k) {
    if (std::abs(path.X[k]) > R) {
      const double bound = path.X[k] > 0.0 ? R : -R;
      const double w = (bound - path.X[k - 1]) / (path.X[k] - path.X[k - 1]);
      return path.s[k - 1] + w * (path.s[k] - path.s[k - 1]);
    }
  }
  return -1.0;
}

double duhamel_error(const Trajectory& traj, const CharPath& path) {
  const Sampler smp(traj);
  const int j = path.family;
  const int n_out = static_cast<int>(traj.snaps.size()) - 1;
  const double phi0 = smp.at_snapshot(&Snapshot::Phi, 0, j, path.x0);
  double integral = 0.0;
  double worst = 0.0;
  for (size_t k = 1; k < path.s.size(); ++k) {
    const double decay = std::exp(path.H[k] - path.H[k - 1]);
    integral = decay * integral + 0.5 * (path.s[k] - path.s[k - 1]) * (decay * path.G[k - 1] + path.G[k]);
    if (k % static_cast<size_t>(path.substeps) != 0) continue;
    const int m = static_cast<int>(k / static_cast<size_t>(path.substeps));
    if (m > n_out) break;
    if (path.grid_exit_time >= 0.0 && path.s[k] >= path.grid_exit_time) break;
    const double predicted = phi0 * std::exp(path.H[k]) + integral;
    const double stored = smp.at_snapshot(&Snapshot::Phi, m, j, path.X[k]);
    worst = std::max(worst, std::abs(predicted - stored));
  }
  return worst;
}

std::vector<CharPath> trace_family_set(const Trajectory& traj, int n_per_family, double half_span,
                                       int substeps) {
  if (n_per_family < 2) fail(ErrorKind::Precondition, "need at least two paths per family");
  const double reach = std::min(half_span, std::min(-traj.grid.x_min, traj.grid.x_max()) - traj.grid.dx);
  std::vector<CharPath> paths;
  for (int j = 0; j < traj.model.dim(); ++j) {
    for (int k = 0; k < n_per_family; ++k) {
      const double x0 = -reach + 2.0 * reach * k / (n_per_family - 1);
      paths.push_back(trace(traj, j, x0, substeps));
    }
  }
  return paths;
}

}  // namespace relaxdamp
