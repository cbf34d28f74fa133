#include "relaxdamp/spectral.hpp"

#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaxdamp {

namespace {

const Vec& endstate(const ModelSpec& model, Side side) {
  return side == Side::Minus ? model.u_minus() : model.u_plus();
}

}  // namespace

CVec symbol_spectrum(const ModelSpec& model, Side side, double xi) {
  const Vec& u = endstate(model, side);
  const CMat m = std::complex<double>(0.0, xi) * model.A(u).cast<std::complex<double>>() +
                 model.Q(u).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  CVec mu = es.eigenvalues();
  std::sort(mu.begin(), mu.end(), [](const auto& a, const auto& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return mu;
}

SpectralScan scan_symbol(const ModelSpec& model, Side side, double xi_min, double xi_max, int n_xi) {
  SpectralScan s;
  s.side = side;
  s.xi.resize(static_cast<size_t>(n_xi));
  const double l0 = std::log(xi_min), l1 = std::log(xi_max);
  for (int k = 0; k < n_xi; ++k) {
    const double xi = n_xi == 1 ? xi_max : std::exp(l0 + (l1 - l0) * k / (n_xi - 1));
    s.xi[static_cast<size_t>(k)] = xi;
    s.spectra.push_back(symbol_spectrum(model, side, xi));
    s.max_re.push_back(s.spectra.back().real().maxCoeff());
  }
  return s;
}

SpectralCertificate dissipativity_certificate(const ModelSpec& model, double xi_max, int n_xi,
                                              double margin, double xi_min) {
  if (!(xi_max > xi_min) || !(xi_min > 0.0)) fail(ErrorKind::Precondition, "need 0 < xi_min < xi_max");
  if (n_xi < 100) fail(ErrorKind::Precondition, "n_xi must be at least 100");
  if (!(margin > 0.0)) fail(ErrorKind::Precondition, "margin must be positive");

  SpectralCertificate cert;
  cert.C = xi_min;
  double observed = std::numeric_limits<double>::infinity();
  bool any_failure = false;
  for (int side = 0; side < 2; ++side) {
    const Side sd = side == 0 ? Side::Minus : Side::Plus;
    SpectralScan s = scan_symbol(model, sd, xi_min, xi_max, n_xi);
    for (size_t k = 1; k < s.xi.size(); ++k) {
      const double jump = std::abs(s.max_re[k] - s.max_re[k - 1]);
      if (jump > 10.0 * margin) {
        std::ostringstream os;
        os << "max Re mu jumps by " << jump << " between xi = " << s.xi[k - 1] << " and " << s.xi[k]
           << " on the " << to_string(sd) << " side";
        fail(ErrorKind::ScanTooCoarse, os.str());
      }
    }
    // Conjugate symmetry spot check at a few frequencies.
    for (size_t k = 0; k < s.xi.size(); k += std::max<size_t>(1, s.xi.size() / 8)) {
      CVec neg = symbol_spectrum(model, sd, -s.xi[k]);
      CVec pos = s.spectra[k].conjugate();
      std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
      });
      cert.conjugate_error = std::max(cert.conjugate_error, (neg - pos).cwiseAbs().maxCoeff());
    }
    // Threshold: first grid point after the last violation.
    int last_bad = -1;
    for (size_t k = 0; k < s.xi.size(); ++k) {
      if (s.max_re[k] > -margin) last_bad = static_cast<int>(k);
    }
    if (last_bad == static_cast<int>(s.xi.size()) - 1) {
      if (!any_failure || s.max_re[static_cast<size_t>(last_bad)] > cert.witness_re) {
        cert.witness_xi = s.xi.back();
        cert.witness_re = s.max_re.back();
        cert.witness_side = sd;
      }
      any_failure = true;
    } else {
      const size_t first_ok = static_cast<size_t>(last_bad + 1);
      cert.C = std::max(cert.C, s.xi[first_ok]);
    }
    cert.scans[side] = std::move(s);
  }
  if (!any_failure) {
    for (const auto& s : cert.scans) {
      for (size_t k = 0; k < s.xi.size(); ++k) {
        if (s.xi[k] >= cert.C) observed = std::min(observed, -s.max_re[k]);
      }
    }
    cert.certified = true;
    cert.c = observed;
  }
  return cert;
}

ExpansionCheck expansion_check(const ModelSpec& model, Side side, const std::vector<double>& xi_list) {
  const Vec& u = endstate(model, side);
  const Mat a = model.A(u);
  ExpansionCheck out;
  const bool zero_a = max_abs(a) == 0.0;
  if (zero_a) {
    Eigen::EigenSolver<Mat> es(model.Q(u));
    Vec e = es.eigenvalues().real();
    std::sort(e.begin(), e.end());
    out.E = e;
    out.lambdas = Vec::Zero(e.size());
  } else {
    const EigenFrame f = decompose(a);
    out.lambdas = f.lambdas;
    out.E = (f.L * model.Q(u) * f.R).diagonal();
  }
  const double lam_max = out.lambdas.cwiseAbs().maxCoeff();
  for (double xi : xi_list) {
    if (std::abs(xi) < 10.0 * lam_max) {
      std::ostringstream os;
      os << "expansion check needs |xi| >= 10 max|lambda| = " << 10.0 * lam_max << ", got " << xi;
      fail(ErrorKind::Precondition, os.str());
    }
    CVec mu = symbol_spectrum(model, side, xi);
    const int n = static_cast<int>(mu.size());
    Vec re(n), im(n);
    if (zero_a) {
      std::sort(mu.begin(), mu.end(), [](const auto& p, const auto& q) { return p.real() < q.real(); });
    } else {
      // Branch j has Im mu ~ lambda_j xi; for xi < 0 the order reverses.
      std::sort(mu.begin(), mu.end(), [&](const auto& p, const auto& q) {
        return xi > 0 ? p.imag() < q.imag() : p.imag() > q.imag();
      });
      for (int j = 0; j + 1 < n; ++j) {
        if (std::abs(mu[j + 1].imag() - mu[j].imag()) < 1e-8 * (1.0 + std::abs(xi) * lam_max)) {
          std::ostringstream os;
          os << "symbol branches " << j << " and " << j + 1 << " cross at xi = " << xi;
          fail(ErrorKind::PairingAmbiguous, os.str());
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      re[j] = mu[j].real();
      im[j] = mu[j].imag() / xi;
    }
    Vec rem = (re - out.E).cwiseAbs() * std::abs(xi);
    out.constant = std::max(out.constant, rem.maxCoeff());
    out.xi.push_back(xi);
    out.remainder.push_back(rem);
    out.re_mu.push_back(re);
    out.im_over_xi.push_back(im);
  }
  return out;
}

HyperbolicityReport hyperbolicity_scan(const ModelSpec& model, const ProfileRep& profile, double c_min) {
  HyperbolicityReport r;
  r.min_abs_lambda = std::numeric_limits<double>::infinity();
  r.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < profile.grid.n; ++i) {
    EigenFrame f;
    try {
      f = decompose(model.A(profile.value(i)));
    } catch (const Error& e) {
      std::ostringstream os;
      os << e.what() << " at x = " << profile.grid.x(i);
      fail(e.kind(), os.str());
    }
    if (f.min_abs_lambda < r.min_abs_lambda) {
      r.min_abs_lambda = f.min_abs_lambda;
      r.x_min_abs_lambda = profile.grid.x(i);
    }
    r.min_gap = std::min(r.min_gap, f.min_gap);
    if (model.constant_coefficients()) break;
  }
  r.pass = r.min_abs_lambda >= c_min && r.min_abs_lambda > 0.0 && r.min_gap > 0.0;
  return r;
}

}  // namespace relaxdamp
