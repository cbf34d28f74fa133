#include "relaxdamp/eigenframe.hpp"

#include "relaxdamp/errors.hpp"
#include "relaxdamp/profile.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace relaxdamp {

EigenFrame decompose(const Mat& a, double c_min) {
  const int n = static_cast<int>(a.rows());
  Eigen::EigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) fail(ErrorKind::NotStrictlyHyperbolic, "eigen solver did not converge");
  const double scale = 1.0 + inf_norm(a);
  for (int k = 0; k < n; ++k) {
    if (std::abs(es.eigenvalues()[k].imag()) > 1e-10 * scale) {
      std::ostringstream os;
      os << "complex eigenvalue " << es.eigenvalues()[k].real() << " + " << es.eigenvalues()[k].imag() << "i";
      fail(ErrorKind::NotStrictlyHyperbolic, os.str());
    }
  }
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return es.eigenvalues()[i].real() < es.eigenvalues()[j].real();
  });

  EigenFrame f;
  f.lambdas.resize(n);
  f.R.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int k = order[static_cast<size_t>(j)];
    f.lambdas[j] = es.eigenvalues()[k].real();
    Vec r = es.eigenvectors().col(k).real();
    int arg = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(r[i]) > std::abs(r[arg]) * (1.0 + 1e-12)) arg = i;
    }
    f.R.col(j) = r / r[arg];
  }
  f.min_gap = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  for (int j = 0; j + 1 < n; ++j) f.min_gap = std::min(f.min_gap, f.lambdas[j + 1] - f.lambdas[j]);
  if (n > 1 && f.min_gap < kHyperbolicGap) {
    std::ostringstream os;
    os << "eigenvalue gap " << f.min_gap << " below " << kHyperbolicGap;
    fail(ErrorKind::NotStrictlyHyperbolic, os.str());
  }
  const auto lu = f.R.fullPivLu();
  if (!lu.isInvertible()) fail(ErrorKind::NotStrictlyHyperbolic, "eigenvectors are linearly dependent");
  f.L = lu.inverse();
  f.min_abs_lambda = f.lambdas.cwiseAbs().minCoeff();
  if (f.min_abs_lambda < c_min) {
    std::ostringstream os;
    os << "characteristic speed " << f.min_abs_lambda << " below c_min = " << c_min;
    fail(ErrorKind::Characteristic, os.str());
  }
  return f;
}

void continue_signs(std::vector<EigenFrame>& frames) {
  for (size_t i = 1; i < frames.size(); ++i) {
    EigenFrame& cur = frames[i];
    const EigenFrame& prev = frames[i - 1];
    for (int j = 0; j < cur.lambdas.size(); ++j) {
      if (cur.R.col(j).dot(prev.R.col(j)) < 0.0) {
        cur.R.col(j) *= -1.0;
        cur.L.row(j) *= -1.0;
      }
    }
  }
}

FrameSeries frame_along_profile(const ModelSpec& model, const ProfileRep& profile, double c_min) {
  FrameSeries out;
  const int n = profile.grid.n;
  out.frames.reserve(static_cast<size_t>(n));
  if (model.constant_coefficients()) {
    const EigenFrame f = decompose(model.A(profile.value(0)), c_min);
    out.frames.assign(static_cast<size_t>(n), f);
  } else {
    for (int i = 0; i < n; ++i) {
      try {
        out.frames.push_back(decompose(model.A(profile.value(i)), c_min));
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " at x = " << profile.grid.x(i);
        fail(e.kind(), os.str());
      }
    }
    continue_signs(out.frames);
  }
  out.min_abs_lambda = std::numeric_limits<double>::infinity();
  out.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& f : out.frames) {
    out.min_abs_lambda = std::min(out.min_abs_lambda, f.min_abs_lambda);
    out.min_gap = std::min(out.min_gap, f.min_gap);
  }
  for (size_t i = 1; i < out.frames.size(); ++i) {
    const double jump = std::max(max_abs(Mat(out.frames[i].L - out.frames[i - 1].L)),
                                 max_abs(Mat(out.frames[i].R - out.frames[i - 1].R)));
    out.lipschitz = std::max(out.lipschitz, jump / profile.grid.dx);
  }
  return out;
}

SourceSplit source_split(const EigenFrame& frame, const Mat& q_matrix) {
  const Mat m = frame.L * q_matrix * frame.R;
  SourceSplit s;
  s.E = m.diagonal().asDiagonal();
  s.F = m - s.E;
  s.Theta = Mat::Zero(m.rows(), m.cols());
  return s;
}

Mat theta_matrix(const EigenFrame& frame, const Mat& f_tilde) {
  const int n = static_cast<int>(frame.lambdas.size());
  Mat theta = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const double gap = frame.lambdas[k] - frame.lambdas[j];
      if (std::abs(gap) < kThetaGapMin) {
        std::ostringstream os;
        os << "eigenvalue gap " << std::abs(gap) << " below " << kThetaGapMin;
        fail(ErrorKind::GapTooSmall, os.str());
      }
      theta(j, k) = f_tilde(j, k) / gap;
    }
  }
  return theta;
}

double commutator_residual(const Mat& theta, const Vec& lambdas, const Mat& f_tilde) {
  const Mat lam = lambdas.asDiagonal();
  return inf_norm(Mat(theta * lam - lam * theta - f_tilde));
}

Mat phi_source_matrix(const ModelSpec& model, const EigenFrame& frame, const Mat& dL_dx,
                      const Vec& v, const Vec& ubar_x, double delta_dot) {
  const int n = static_cast<int>(frame.lambdas.size());
  Mat transport(n, n);
  for (int k = 0; k < n; ++k) transport.col(k) = model.dA(v, frame.R.col(k)) * ubar_x;
  Vec shifted = frame.lambdas.array() - delta_dot;
  return frame.L * model.Q(v) * frame.R - frame.L * transport +
         shifted.asDiagonal() * (dL_dx * frame.R);
}

Mat psi_source_matrix(const ModelSpec& model, const EigenFrame& frame, const Mat& dL_dx,
                      const Vec& v, const Vec& ubar_x, double delta_dot) {
  return phi_source_matrix(model, frame, dL_dx, v, ubar_x, delta_dot) -
         frame.L * model.dA(v, ubar_x) * frame.R;
}

ProfileSource source_along_profile(const ModelSpec& model, const ProfileRep& profile,
                                   const FrameSeries& frames) {
  ProfileSource out;
  const auto dL = differentiate_frames_L(frames.frames, profile.grid.dx);
  out.splits.reserve(frames.frames.size());
  for (int i = 0; i < profile.grid.n; ++i) {
    const EigenFrame& f = frames.frames[static_cast<size_t>(i)];
    const Mat m = psi_source_matrix(model, f, dL[static_cast<size_t>(i)], profile.value(i),
                                    profile.d1.col(i), 0.0);
    SourceSplit s;
    s.E = m.diagonal().asDiagonal();
    s.F = m - s.E;
    s.Theta = theta_matrix(f, s.F);
    out.max_commutator_residual =
        std::max(out.max_commutator_residual,
                 commutator_residual(s.Theta, f.lambdas, s.F) / (1.0 + inf_norm(s.F)));
    out.max_theta = std::max(out.max_theta, max_abs(s.Theta));
    out.splits.push_back(std::move(s));
  }
  return out;
}

Vec diagonal_source(const ModelSpec& model, const Vec& u) {
  const EigenFrame f = decompose(model.A(u));
  return (f.L * model.Q(u) * f.R).diagonal();
}

DampingRate damping_rate(const ModelSpec& model) {
  DampingRate d;
  d.E_minus = diagonal_source(model, model.u_minus());
  d.E_plus = diagonal_source(model, model.u_plus());
  const double worst = std::max(d.E_minus.maxCoeff(), d.E_plus.maxCoeff());
  if (worst >= 0.0) {
    std::ostringstream os;
    os << "endstate diagonal source has a non-negative entry (max E_jj = " << worst << ")";
    fail(ErrorKind::NotDissipative, os.str());
  }
  d.theta_E = -0.5 * worst;
  d.theta_E_signed = 0.5 * worst;
  return d;
}

std::vector<Mat> differentiate_frames_L(const std::vector<EigenFrame>& frames, double dx) {
  const size_t n = frames.size();
  std::vector<Mat> out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = Mat::Zero(frames[0].L.rows(), frames[0].L.cols());
    return out;
  }
  if (n == 2) {
    out[0] = out[1] = (frames[1].L - frames[0].L) / dx;
    return out;
  }
  for (size_t i = 1; i + 1 < n; ++i) out[i] = (frames[i + 1].L - frames[i - 1].L) / (2.0 * dx);
  out[0] = (-3.0 * frames[0].L + 4.0 * frames[1].L - frames[2].L) / (2.0 * dx);
  out[n - 1] = (3.0 * frames[n - 1].L - 4.0 * frames[n - 2].L + frames[n - 3].L) / (2.0 * dx);
  return out;
}

}  // namespace relaxdamp
