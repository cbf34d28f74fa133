#include "relaxdamp/damping.hpp"

#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relaxdamp {

namespace {

// Five-point Gauss-Legendre on [a, b].
template <class F>
double gauss5(F&& f, double a, double b) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                               0.2369268850561891, 0.2369268850561891};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += ws[k] * f(c + h * xs[k]);
  return s * h;
}

}  // namespace

double ckb_norm(const Snapshot& s, int K, double dx) {
  if (K < 0 || K > 2) fail(ErrorKind::Unsupported, "C^K_b norms are available for K <= 2");
  double n = sup_abs(s.U, kInteriorSkip);
  if (K >= 1) n = std::max(n, sup_abs(s.W, kInteriorSkip));
  if (K >= 2) n = std::max(n, sup_abs(diff4(s.W, dx), kInteriorSkip));
  return n;
}

SobolevNorms l2_h2_norms(const Snapshot& s, double dx) {
  const double u2 = integrate_sq(s.U, dx);
  const double w2 = integrate_sq(s.W, dx);
  const double y2 = integrate_sq(diff4(s.W, dx), dx);
  return {std::sqrt(u2), std::sqrt(u2 + w2), std::sqrt(u2 + w2 + y2)};
}

NormSeries norm_series(const Trajectory& traj) {
  NormSeries ns;
  const double dx = traj.grid.dx;
  for (const auto& s : traj.snaps) {
    const Field y = diff4(s.W, dx);
    const double c0 = sup_abs(s.U, kInteriorSkip);
    const double c1 = std::max(c0, sup_abs(s.W, kInteriorSkip));
    const double c2 = std::max(c1, sup_abs(y, kInteriorSkip));
    const double u2 = integrate_sq(s.U, dx), w2 = integrate_sq(s.W, dx), y2 = integrate_sq(y, dx);
    ns.t.push_back(s.t);
    ns.c0.push_back(c0);
    ns.c1.push_back(c1);
    ns.c2.push_back(c2);
    ns.l2.push_back(std::sqrt(u2));
    ns.h1.push_back(std::sqrt(u2 + w2));
    ns.h2.push_back(std::sqrt(u2 + w2 + y2));
    ns.delta_dot.push_back(s.delta_dot);
  }
  return ns;
}

WeightFn weight_fn(int j, const ModelSpec& model, const ProfileRep& profile, double C_alpha, double c_alpha,
                   double c_nonchar) {
  if (!(C_alpha > 0.0) || !(c_alpha > 0.0)) fail(ErrorKind::Precondition, "weight constants must be positive");
  if (j < 0 || j >= model.dim()) fail(ErrorKind::Precondition, "family index out of range");
  const bool constant = model.constant_coefficients();
  const double lam_const = decompose(model.A(profile.value(0)), c_nonchar).lambdas[j];
  auto lambda_at = [&](double y) {
    if (constant) return lam_const;
    return decompose(model.A(profile.interpolate(y, 0)), c_nonchar).lambdas[j];
  };
  // Check non-characteristicity on the nodes (throws Characteristic).
  if (!constant) {
    for (int i = 0; i < profile.grid.n; ++i) decompose(model.A(profile.value(i)), c_nonchar);
  }
  auto integrand = [&](double y) { return C_alpha * std::exp(-c_alpha * std::abs(y)) / lambda_at(y); };
  auto cell = [&](double a, double b, bool refined) {
    // Split at the kink of |y|.
    if (a < 0.0 && b > 0.0) {
      return refined ? gauss5(integrand, a, 0.5 * a) + gauss5(integrand, 0.5 * a, 0.0) +
                           gauss5(integrand, 0.0, 0.5 * b) + gauss5(integrand, 0.5 * b, b)
                     : gauss5(integrand, a, 0.0) + gauss5(integrand, 0.0, b);
    }
    if (!refined) return gauss5(integrand, a, b);
    const double m = 0.5 * (a + b);
    return gauss5(integrand, a, m) + gauss5(integrand, m, b);
  };

  const Grid& g = profile.grid;
  std::vector<double> log_alpha(static_cast<size_t>(g.n), 0.0);
  WeightFn w;
  w.family = j;
  w.C_alpha = C_alpha;
  w.c_alpha = c_alpha;
  // Cumulative integral from the left end; the additive constant drops out
  // after normalisation.
  for (int i = 1; i < g.n; ++i) {
    const double a = g.x(i - 1), b = g.x(i);
    const double coarse = cell(a, b, false);
    const double fine = cell(a, b, true);
    w.residual = std::max(w.residual, std::abs(coarse - fine));
    log_alpha[static_cast<size_t>(i)] = log_alpha[static_cast<size_t>(i - 1)] - coarse;
  }
  const double top = *std::max_element(log_alpha.begin(), log_alpha.end());
  w.alpha.resize(log_alpha.size());
  for (size_t i = 0; i < log_alpha.size(); ++i) w.alpha[i] = std::exp(log_alpha[i] - top);
  w.min_alpha = *std::min_element(w.alpha.begin(), w.alpha.end());
  const double c = c_nonchar > 0.0 ? c_nonchar : std::abs(lam_const);
  w.lower_bound = std::exp(-2.0 * C_alpha / (c_alpha * c));
  return w;
}

double weight_tail_constant(const ModelSpec& model, const ProfileRep& profile, double rate) {
  if (!(rate > 0.0)) fail(ErrorKind::Precondition, "tail rate must be positive");
  const Grid& g = profile.grid;
  const FrameSeries fs = frame_along_profile(model, profile);
  const int dim = model.dim();
  Field lam(dim, g.n);
  for (int i = 0; i < g.n; ++i) lam.col(i) = fs.frames[static_cast<size_t>(i)].lambdas;
  const Field dlam = diff4(lam, g.dx);
  const Vec e_minus = diagonal_source(model, model.u_minus());
  const Vec e_plus = diagonal_source(model, model.u_plus());
  double C = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    const Vec e = diagonal_source(model, profile.value(i));
    const Vec& far = x < 0.0 ? e_minus : e_plus;
    for (int j = 0; j < dim; ++j) {
      const double v = std::abs(e[j] - far[j]) + 0.5 * std::abs(dlam(j, i));
      C = std::max(C, v * std::exp(rate * std::abs(x)));
    }
  }
  return C;
}

EnergySeries weighted_energy_series(const Trajectory& traj, const std::vector<WeightFn>& weights,
                                    const EnergyCheckOptions& opt) {
  EnergySeries es;
  const int nf = static_cast<int>(weights.size());
  const size_t nm = traj.snaps.size();
  const double dx = traj.grid.dx;
  es.e.assign(static_cast<size_t>(nf), std::vector<double>(nm, 0.0));
  es.edot.assign(static_cast<size_t>(nf), std::vector<double>(nm, 0.0));
  es.flagged.assign(static_cast<size_t>(nf), 0);
  std::vector<double> phi_l2sq(nm), buf(static_cast<size_t>(traj.grid.n));
  for (size_t m = 0; m < nm; ++m) {
    const Snapshot& s = traj.snaps[m];
    es.t.push_back(s.t);
    phi_l2sq[m] = integrate_sq(s.Phi, dx);
    for (int jj = 0; jj < nf; ++jj) {
      const WeightFn& w = weights[static_cast<size_t>(jj)];
      for (int i = 0; i < traj.grid.n; ++i) {
        const double p = s.Phi(w.family, i);
        buf[static_cast<size_t>(i)] = w.alpha[static_cast<size_t>(i)] * p * p;
      }
      es.e[static_cast<size_t>(jj)][m] = integrate(buf, dx);
    }
  }
  for (int jj = 0; jj < nf; ++jj) {
    auto& e = es.e[static_cast<size_t>(jj)];
    auto& d = es.edot[static_cast<size_t>(jj)];
    if (nm < 3) break;
    for (size_t m = 1; m + 1 < nm; ++m) d[m] = (e[m + 1] - e[m - 1]) / (es.t[m + 1] - es.t[m - 1]);
    d[0] = (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (es.t[2] - es.t[0]);
    d[nm - 1] = (3.0 * e[nm - 1] - 4.0 * e[nm - 2] + e[nm - 3]) / (es.t[nm - 1] - es.t[nm - 3]);
    for (size_t m = 0; m < nm; ++m) {
      const double dd = std::abs(traj.snaps[m].delta_dot);
      const double slack = opt.C_delta * dd * std::sqrt(e[m]) + opt.C_phi * phi_l2sq[m];
      if (d[m] > -2.0 * opt.theta_E * e[m] + slack) ++es.flagged[static_cast<size_t>(jj)];
    }
  }
  return es;
}

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::C0: return "C0";
    case NormKind::C1: return "C1";
    case NormKind::C2: return "C2";
    case NormKind::L2: return "L2";
    case NormKind::H2: return "H2";
  }
  return "?";
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 80; ++k) g.push_back(0.00625 * k);
  return g;
}

DampingFit fit_damping_series(const std::vector<double>& t, const std::vector<double>& N,
                              const std::vector<double>& forcing, const std::vector<double>& theta_grid,
                              double C_cap, const std::string& kind) {
  if (t.size() != N.size() || t.size() != forcing.size() || t.empty()) {
    fail(ErrorKind::Precondition, "fit_damping: series lengths differ or are empty");
  }
  DampingFit fit;
  fit.kind = kind;
  fit.theta = theta_grid;
  fit.C_cap = C_cap;
  const double n_max = *std::max_element(N.begin(), N.end());
  if (n_max == 0.0) {
    fit.degenerate = true;
    fit.C_min.assign(theta_grid.size(), 0.0);
    fit.feasible.assign(theta_grid.size(), true);
    fit.max_feasible_theta = theta_grid.empty() ? 0.0 : *std::max_element(theta_grid.begin(), theta_grid.end());
    return fit;
  }
  bool any = false;
  for (double th : theta_grid) {
    double integral = 0.0;
    double c = 0.0;
    for (size_t m = 0; m < t.size(); ++m) {
      if (m > 0) {
        const double dt = t[m] - t[m - 1];
        const double decay = std::exp(-th * dt);
        integral = decay * integral + 0.5 * dt * (decay * forcing[m - 1] + forcing[m]);
      }
      const double denom = std::exp(-th * t[m]) * N[0] + integral;
      const double ratio = denom > 0.0 ? N[m] / denom
                                       : (N[m] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      c = std::max(c, ratio);
    }
    fit.C_min.push_back(c);
    const bool ok = c <= C_cap;
    fit.feasible.push_back(ok);
    if (ok && (!any || th > fit.max_feasible_theta)) {
      fit.max_feasible_theta = th;
      fit.C_at_max = c;
      any = true;
    }
  }
  if (!any) {
    std::ostringstream os;
    os << "no theta in the grid admits C_min <= " << C_cap << " for " << kind;
    fail(ErrorKind::EmptyFeasible, os.str());
  }
  return fit;
}

DampingFit fit_damping(const NormSeries& s, NormKind kind, const std::vector<double>& theta_grid, double C_cap) {
  std::vector<double> n, f(s.t.size());
  switch (kind) {
    case NormKind::C0: n = s.c0; break;
    case NormKind::C1: n = s.c1; break;
    case NormKind::C2: n = s.c2; break;
    case NormKind::L2: n = s.l2; break;
    case NormKind::H2: n = s.h2; break;
  }
  const bool squared = kind == NormKind::L2 || kind == NormKind::H2;
  for (size_t m = 0; m < s.t.size(); ++m) {
    const double dd = std::abs(s.delta_dot[m]);
    if (squared) {
      n[m] *= n[m];
      f[m] = s.l2[m] * s.l2[m] + dd * dd;
    } else {
      f[m] = s.c0[m] + dd;
    }
  }
  return fit_damping_series(s.t, n, f, theta_grid, C_cap, to_string(kind));
}

SlavingReport slaving_check(const Trajectory& traj, const std::vector<Mat>& theta,
                            const std::vector<double>& theta_grid, double C_cap) {
  std::vector<double> t, psi, ups, forcing;
  for (const auto& s : traj.snaps) {
    const DiagonalVars d = diagonal_vars(traj.model, traj.profile, s, theta);
    t.push_back(s.t);
    psi.push_back(sup_abs(d.Psi_t, kInteriorSkip));
    ups.push_back(sup_abs(d.Ups_t, kInteriorSkip));
    forcing.push_back(sup_abs(d.Phi, kInteriorSkip) + std::abs(s.delta_dot));
  }
  SlavingReport r;
  r.psi_tilde = fit_damping_series(t, psi, forcing, theta_grid, C_cap, "psi_tilde");
  r.ups_tilde = fit_damping_series(t, ups, forcing, theta_grid, C_cap, "ups_tilde");
  return r;
}

}  // namespace relaxdamp
