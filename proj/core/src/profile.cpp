#include "relaxdamp/profile.hpp"

#include "relaxdamp/errors.hpp"
#include "relaxdamp/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace relaxdamp {

namespace {

Vec solve_with(const Mat& a, const Vec& b) { return a.partialPivLu().solve(b); }

double tail_norm(const ProfileRep& p, int i, int k, int side) {
  if (k == 0) return max_abs(Vec(p.value(i) - (side == 0 ? p.u_minus : p.u_plus)));
  return max_abs(p.derivative(i, k));
}

std::vector<int> tail_nodes(const Grid& g, int side) {
  std::vector<int> idx;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    if (side == 0 ? (x <= 0.5 * g.x_min) : (x >= 0.5 * g.x_max())) idx.push_back(i);
  }
  return idx;
}

// Least squares of log y = log c - rate |x| followed by raising c until the
// envelope dominates every sample up to a factor 1.05.
DecayFit fit_log_linear(const std::vector<double>& ax, const std::vector<double>& y) {
  const double n = static_cast<double>(ax.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < ax.size(); ++i) {
    const double ly = std::log(y[i]);
    sx += ax[i];
    sy += ly;
    sxx += ax[i] * ax[i];
    sxy += ax[i] * ly;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  DecayFit fit{std::exp(intercept), -slope, false};
  double worst = 0.0;
  for (size_t i = 0; i < ax.size(); ++i) {
    worst = std::max(worst, y[i] / (fit.amplitude * std::exp(-fit.rate * ax[i])));
  }
  if (worst > 1.05) fit.amplitude *= worst / 1.05;
  return fit;
}

}  // namespace

Vec ProfileRep::derivative(int i, int order) const {
  switch (order) {
    case 0: return values.col(i);
    case 1: return d1.col(i);
    case 2: return d2.col(i);
    case 3: return d3.col(i);
    default: fail(ErrorKind::Unsupported, "profile derivatives are stored up to order 3");
  }
}

Vec ProfileRep::interpolate(double x, int order) const {
  if (order < 0 || order > 2) fail(ErrorKind::Unsupported, "interpolation order must be 0..2");
  const Field& f = order == 0 ? values : (order == 1 ? d1 : d2);
  const Field& df = order == 0 ? d1 : (order == 1 ? d2 : d3);
  if (x <= grid.x_min) return f.col(0);
  if (x >= grid.x_max()) return f.col(grid.n - 1);
  const double s = (x - grid.x_min) / grid.dx;
  const int i = std::min(static_cast<int>(s), grid.n - 2);
  const double t = s - i;
  const double h = grid.dx;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * f.col(i) + h10 * h * df.col(i) + h01 * f.col(i + 1) + h11 * h * df.col(i + 1);
}

ProfileRep ProfileRep::constant(const Grid& grid, const Vec& state) {
  ProfileRep p;
  p.grid = grid;
  p.values = state.replicate(1, grid.n);
  p.d1 = Field::Zero(state.size(), grid.n);
  p.d2 = p.d1;
  p.d3 = p.d1;
  p.u_minus = state;
  p.u_plus = state;
  return p;
}

Vec profile_rhs(const ModelSpec& model, const Vec& u) { return solve_with(model.A(u), model.q(u)); }

void fill_derivatives(const ModelSpec& model, ProfileRep& p) {
  const int n = p.grid.n;
  const int dim = model.dim();
  p.d1.resize(dim, n);
  p.d2.resize(dim, n);
  p.d3.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    const Vec u = p.values.col(i);
    const auto lu = model.A(u).partialPivLu();
    const Mat qm = model.Q(u);
    const Vec u1 = lu.solve(model.q(u));
    const Vec u2 = lu.solve(Vec(qm * u1 - model.dA(u, u1) * u1));
    const Vec u3 = lu.solve(Vec(model.d2q(u, u1, u1) + qm * u2 - model.d2A(u, u1, u1) * u1 -
                                model.dA(u, u2) * u1 - 2.0 * (model.dA(u, u1) * u2)));
    p.d1.col(i) = u1;
    p.d2.col(i) = u2;
    p.d3.col(i) = u3;
  }
}

ProfileRep exact_jinxin_profile(const ModelSpec& model, const Grid& grid) {
  if (!model.is_jinxin()) fail(ErrorKind::NotApplicable, "exact profile needs the Jin-Xin model");
  const int degree = static_cast<int>(model.param("flux_degree"));
  std::vector<double> c(static_cast<size_t>(degree + 1));
  for (int i = 0; i <= degree; ++i) c[static_cast<size_t>(i)] = model.param("flux_c" + std::to_string(i));
  for (int i = 3; i <= degree; ++i) {
    if (c[static_cast<size_t>(i)] != 0.0) fail(ErrorKind::NotApplicable, "exact profile needs a quadratic flux");
  }
  if (degree < 2 || c[2] == 0.0) fail(ErrorKind::NotApplicable, "exact profile needs a quadratic flux");

  const double a = model.param("a");
  const double eps = model.param("eps");
  const double s = model.shock_speed();
  const double um = model.param("u_minus");
  const double up = model.param("u_plus");
  auto fprime = [&](double u) { return c[1] + 2.0 * c[2] * u; };
  if (std::abs(fprime(um)) >= a || std::abs(fprime(up)) >= a) {
    fail(ErrorKind::NotApplicable, "endstates violate the subcharacteristic condition |f'(u)| < a");
  }
  const double mid = 0.5 * (um + up);
  const double half_jump = 0.5 * (um - up);
  const double kappa = c[2] * half_jump / ((a * a - s * s) * eps);
  if (!(kappa > 0.0) || a * a <= s * s) {
    fail(ErrorKind::NotApplicable, "endstates violate the entropy ordering");
  }
  const double vbar = model.u_minus()[1] - s * um;

  ProfileRep p;
  p.grid = grid;
  p.u_minus = model.u_minus();
  p.u_plus = model.u_plus();
  p.values.resize(2, grid.n);
  p.d1.resize(2, grid.n);
  p.d2.resize(2, grid.n);
  p.d3.resize(2, grid.n);
  const double d = half_jump;
  for (int i = 0; i < grid.n; ++i) {
    const double th = std::tanh(kappa * grid.x(i));
    const double sech2 = 1.0 - th * th;
    const double u = mid - d * th;
    const double u1 = -d * kappa * sech2;
    const double u2 = 2.0 * d * kappa * kappa * th * sech2;
    const double u3 = 2.0 * d * kappa * kappa * kappa * sech2 * (sech2 - 2.0 * th * th);
    p.values(0, i) = u;
    p.values(1, i) = s * u + vbar;
    p.d1(0, i) = u1;
    p.d1(1, i) = s * u1;
    p.d2(0, i) = u2;
    p.d2(1, i) = s * u2;
    p.d3(0, i) = u3;
    p.d3(1, i) = s * u3;
  }
  attach_decay_fits(p);
  return p;
}

ProfileRep solve_profile(const ModelSpec& model, double half_width, int n, double tol) {
  return solve_profile_on(model, Grid::symmetric(half_width, n), tol);
}

namespace {

struct UnstableDirection {
  int n_positive = 0;
  double rate = 0.0;
  Vec vector;
};

UnstableDirection unstable_direction(const ModelSpec& model, const Vec& u) {
  const Mat a = model.A(u);
  const auto lu = a.partialPivLu();
  if (std::abs(lu.determinant()) < 1e-14 * (1.0 + std::pow(max_abs(a), a.rows()))) {
    fail(ErrorKind::NoUnstableDirection, "A is singular at the endstate");
  }
  const Mat j = lu.solve(model.Q(u));
  Eigen::EigenSolver<Mat> es(j);
  const double thresh = 1e-9 * (1.0 + max_abs(j));
  UnstableDirection out;
  for (int k = 0; k < j.rows(); ++k) {
    const auto mu = es.eigenvalues()[k];
    if (mu.real() > thresh) {
      ++out.n_positive;
      if (std::abs(mu.imag()) > thresh) {
        fail(ErrorKind::NoUnstableDirection, "unstable eigenvalue at U- is not real");
      }
      out.rate = mu.real();
      out.vector = es.eigenvectors().col(k).real();
    }
  }
  return out;
}

}  // namespace

ProfileRep solve_profile_on(const ModelSpec& model, const Grid& grid, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::Precondition, "solve_profile: tol must be positive");
  const Vec um = model.u_minus();
  const Vec up = model.u_plus();

  const UnstableDirection dir = unstable_direction(model, um);
  if (dir.n_positive == 0) {
    // The orbit cannot leave U-. If U+ carries the unstable direction instead,
    // the pair is an entropy-violating (reversed) shock: no connection exists.
    const UnstableDirection rev = unstable_direction(model, up);
    if (rev.n_positive >= 1) {
      fail(ErrorKind::NoConnection,
           "no orbit leaves U-: the endstates are ordered like an entropy-violating shock");
    }
    fail(ErrorKind::NoUnstableDirection, "linearisation at U- has no unstable eigenvalue");
  }
  if (dir.n_positive > 1) {
    fail(ErrorKind::NoUnstableDirection,
         "linearisation at U- has " + std::to_string(dir.n_positive) + " unstable eigenvalues");
  }

  Vec r = dir.vector / dir.vector.norm();
  if (r.dot(up - um) < 0.0) r = -r;

  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  using Stepper = odeint::runge_kutta_dopri5<State>;
  const double rtol = tol / 10.0;
  auto sys = [&](const State& y, State& dy, double) {
    const Vec f = profile_rhs(model, Eigen::Map<const Vec>(y.data(), static_cast<Eigen::Index>(y.size())));
    dy.assign(f.data(), f.data() + f.size());
  };
  auto to_vec = [](const State& y) { return Vec(Eigen::Map<const Vec>(y.data(), static_cast<Eigen::Index>(y.size()))); };

  const double mid = 0.5 * (um[0] + up[0]);
  const double eta = 1e-8 * std::max(1.0, max_abs(Vec(up - um)));
  const Vec y0 = um + eta * r;
  const double side0 = y0[0] - mid;
  if (side0 == 0.0) fail(ErrorKind::NoConnection, "first component does not move along the orbit");

  // Shooting pass: integrate until the pinning crossing is found and the
  // orbit has settled within tol of U+. The crossing is bisected on the
  // dense output of the step that brackets it.
  const double tau_max = 2000.0 / dir.rate;
  Vec y_mid;
  try {
    auto dense = odeint::make_dense_output(rtol, rtol, Stepper());
    dense.initialize(State(y0.data(), y0.data() + y0.size()), 0.0, 0.1 / dir.rate);
    bool crossed = false;
    State tmp(y0.size());
    for (long steps = 0;; ++steps) {
      if (dense.current_time() > tau_max || steps > 5000000) {
        fail(ErrorKind::NoConnection, "orbit from U- does not reach U+ within the arclength budget");
      }
      const auto [t0, t1] = dense.do_step(sys);
      const Vec y = to_vec(dense.current_state());
      if (!y.allFinite()) fail(ErrorKind::NoConnection, "profile integration produced a non-finite state");
      if (!crossed && (y[0] - mid) * side0 <= 0.0) {
        double lo = t0, hi = t1;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (t1 - t0); ++it) {
          const double m = 0.5 * (lo + hi);
          dense.calc_state(m, tmp);
          if ((tmp[0] - mid) * side0 > 0.0) lo = m; else hi = m;
        }
        dense.calc_state(0.5 * (lo + hi), tmp);
        y_mid = to_vec(tmp);
        crossed = true;
      }
      if (crossed && max_abs(Vec(y - up)) <= tol) break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfDomain) {
      fail(ErrorKind::NoConnection, std::string("orbit from U- left the state box: ") + e.what());
    }
    throw;
  } catch (const odeint::odeint_error& e) {
    fail(ErrorKind::NoConnection, std::string("profile integration failed: ") + e.what());
  }

  ProfileRep p;
  p.grid = grid;
  p.u_minus = um;
  p.u_plus = up;
  p.values.resize(model.dim(), grid.n);

  // Sampling pass from the pinned midpoint state, outwards in both directions,
  // landing exactly on each node.
  auto sweep = [&](int first, int last, int stride) {
    auto ctrl = odeint::make_controlled(rtol, rtol, Stepper());
    State yy(y_mid.data(), y_mid.data() + y_mid.size());
    double x_prev = 0.0;
    for (int i = first; i != last; i += stride) {
      try {
        odeint::integrate_adaptive(ctrl, sys, yy, x_prev, grid.x(i), grid.x(i) - x_prev);
      } catch (const odeint::odeint_error& e) {
        fail(ErrorKind::NoConnection, std::string("profile integration failed while sampling the grid: ") + e.what());
      }
      x_prev = grid.x(i);
      p.values.col(i) = to_vec(yy);
    }
  };
  int first_pos = 0;
  while (first_pos < grid.n && grid.x(first_pos) < 0.0) ++first_pos;
  sweep(first_pos, grid.n, 1);
  sweep(first_pos - 1, -1, -1);

  fill_derivatives(model, p);
  attach_decay_fits(p);
  return p;
}

std::array<DecayFit, 2> fit_decay(const ProfileRep& profile, int k) {
  if (k < 0 || k > 2) fail(ErrorKind::Unsupported, "decay fits cover derivative orders 0..2");
  std::array<DecayFit, 2> out{};
  for (int side = 0; side < 2; ++side) {
    const auto idx = tail_nodes(profile.grid, side);
    if (idx.size() < 3) fail(ErrorKind::Precondition, "tail window has fewer than three nodes");
    std::vector<double> ax, y;
    for (int i : idx) {
      const double v = tail_norm(profile, i, k, side);
      if (!(v > kDecayNoiseFloor)) {
        std::ostringstream os;
        os << "tail of derivative order " << k << " on the " << (side ? "plus" : "minus")
           << " side is below the noise floor at x = " << profile.grid.x(i);
        fail(ErrorKind::TailBelowNoise, os.str());
      }
      ax.push_back(std::abs(profile.grid.x(i)));
      y.push_back(v);
    }
    out[static_cast<size_t>(side)] = fit_log_linear(ax, y);
    if (!(out[static_cast<size_t>(side)].rate > 0.0)) {
      fail(ErrorKind::Precondition, "profile tail does not decay");
    }
  }
  return out;
}

std::array<DecayFit, 2> fit_decay_or_bound(const ProfileRep& profile, int k) {
  try {
    return fit_decay(profile, k);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TailBelowNoise) throw;
  }
  std::array<DecayFit, 2> out{};
  constexpr double kSafeFloor = 1e3 * kDecayNoiseFloor;
  for (int side = 0; side < 2; ++side) {
    // Outermost node still clearly above the noise floor, then the outer half
    // of [0, that node].
    double reach = 0.0;
    for (int i = 0; i < profile.grid.n; ++i) {
      const double x = profile.grid.x(i);
      if ((side == 0) != (x < 0.0)) continue;
      if (tail_norm(profile, i, k, side) > kSafeFloor) reach = std::max(reach, std::abs(x));
    }
    std::vector<double> ax, y;
    for (int i = 0; i < profile.grid.n; ++i) {
      const double x = profile.grid.x(i);
      if ((side == 0) != (x < 0.0)) continue;
      const double ab = std::abs(x);
      const double v = tail_norm(profile, i, k, side);
      if (ab >= 0.5 * reach && ab <= reach && v > kSafeFloor) {
        ax.push_back(ab);
        y.push_back(v);
      }
    }
    DecayFit fit;
    if (ax.size() >= 3) {
      fit = fit_log_linear(ax, y);
    } else {
      fit.rate = std::numeric_limits<double>::quiet_NaN();
    }
    fit.lower_bound = true;
    out[static_cast<size_t>(side)] = fit;
  }
  return out;
}

void attach_decay_fits(ProfileRep& profile) {
  for (int k = 0; k < 3; ++k) {
    const auto fits = fit_decay_or_bound(profile, k);
    profile.decay[0][static_cast<size_t>(k)] = fits[0];
    profile.decay[1][static_cast<size_t>(k)] = fits[1];
  }
  profile.has_decay = true;
}

double residual(const ModelSpec& model, const ProfileRep& profile) {
  // Differencing the samples keeps this independent of d1, which is computed
  // from the ODE itself and would make the check vacuous. Sixth order in the
  // interior so truncation stays below 1e-12 on the default grid.
  Field dx = profile.grid.n >= 5 ? diff4(profile.values, profile.grid.dx) : profile.d1;
  const Field& f = profile.values;
  const double h = profile.grid.dx;
  for (int i = 3; i + 3 < profile.grid.n; ++i) {
    dx.col(i) = (-f.col(i - 3) + 9.0 * f.col(i - 2) - 45.0 * f.col(i - 1) + 45.0 * f.col(i + 1) -
                 9.0 * f.col(i + 2) + f.col(i + 3)) /
                (60.0 * h);
  }
  double worst = 0.0;
  for (int i = 0; i < profile.grid.n; ++i) {
    const Vec u = profile.value(i);
    const Vec r = model.A(u) * dx.col(i) - model.q(u);
    worst = std::max(worst, max_abs(r));
  }
  return worst;
}

TailConstants tail_constants(const ProfileRep& profile) {
  TailConstants tc{0.0, std::numeric_limits<double>::infinity()};
  if (!profile.has_decay) return {0.0, 0.0};
  for (int side = 0; side < 2; ++side) {
    for (int k = 0; k < 2; ++k) {
      const DecayFit& f = profile.decay[static_cast<size_t>(side)][static_cast<size_t>(k)];
      if (!std::isfinite(f.rate)) continue;
      tc.amplitude = std::max(tc.amplitude, f.amplitude);
      tc.rate = std::min(tc.rate, f.rate);
    }
  }
  if (!std::isfinite(tc.rate)) tc.rate = 0.0;
  return tc;
}

}  // namespace relaxdamp
