#pragma once

#include "relaxdamp/model.hpp"
#include "relaxdamp/profile.hpp"
#include "relaxdamp/types.hpp"

#include <string>
#include <vector>

namespace relaxdamp {

enum class Side { Minus, Plus };
inline const char* to_string(Side s) { return s == Side::Minus ? "minus" : "plus"; }

/// Eigenvalues of i xi A(U±) + Q(U±), sorted by imaginary then real part.
CVec symbol_spectrum(const ModelSpec& model, Side side, double xi);

struct SpectralScan {
  Side side = Side::Minus;
  std::vector<double> xi;       // positive, log-spaced; negatives follow by conjugation
  std::vector<CVec> spectra;    // one entry per xi
  std::vector<double> max_re;   // max_j Re mu_j(xi)
};

struct SpectralCertificate {
  bool certified = false;
  double C = 0.0;  // frequency threshold
  double c = 0.0;  // decay margin actually observed beyond C
  // Failure witness: the largest scanned |xi| where max Re mu > -margin.
  double witness_xi = 0.0;
  double witness_re = 0.0;
  Side witness_side = Side::Minus;
  double conjugate_error = 0.0;  // |spectrum(-xi) - conj(spectrum(xi))|, spot-checked
  SpectralScan scans[2];
};

SpectralScan scan_symbol(const ModelSpec& model, Side side, double xi_min, double xi_max, int n_xi);

SpectralCertificate dissipativity_certificate(const ModelSpec& model, double xi_max, int n_xi,
                                              double margin, double xi_min = 0.01);

struct ExpansionCheck {
  double constant = 0.0;             // max over xi, j of |xi| |Re mu_j - E_jj|
  std::vector<double> xi;
  std::vector<Vec> remainder;        // |xi| |Re mu_j - E_jj| per branch
  std::vector<Vec> re_mu;            // paired Re mu_j
  std::vector<Vec> im_over_xi;       // paired Im mu_j / xi
  Vec E;                             // E_jj at the endstate
  Vec lambdas;
};

ExpansionCheck expansion_check(const ModelSpec& model, Side side, const std::vector<double>& xi_list);

struct HyperbolicityReport {
  bool pass = false;
  double min_abs_lambda = 0.0;
  double min_gap = 0.0;
  double x_min_abs_lambda = 0.0;  // where the smallest |lambda| sits
};

HyperbolicityReport hyperbolicity_scan(const ModelSpec& model, const ProfileRep& profile, double c_min);

}  // namespace relaxdamp
