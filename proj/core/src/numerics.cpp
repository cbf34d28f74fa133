#include "relaxdamp/numerics.hpp"

#include "relaxdamp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relaxdamp {

Field diff4(const Field& f, double dx) {
  const Eigen::Index n = f.cols();
  if (n < 5) fail(ErrorKind::Precondition, "diff4 needs at least five nodes");
  Field d(f.rows(), n);
  const double c = 1.0 / (12.0 * dx);
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    d.col(i) = c * (f.col(i - 2) - 8.0 * f.col(i - 1) + 8.0 * f.col(i + 1) - f.col(i + 2));
  }
  d.col(0) = c * (-25.0 * f.col(0) + 48.0 * f.col(1) - 36.0 * f.col(2) + 16.0 * f.col(3) - 3.0 * f.col(4));
  d.col(1) = c * (-3.0 * f.col(0) - 10.0 * f.col(1) + 18.0 * f.col(2) - 6.0 * f.col(3) + f.col(4));
  d.col(n - 1) = -c * (-25.0 * f.col(n - 1) + 48.0 * f.col(n - 2) - 36.0 * f.col(n - 3) +
                       16.0 * f.col(n - 4) - 3.0 * f.col(n - 5));
  d.col(n - 2) = -c * (-3.0 * f.col(n - 1) - 10.0 * f.col(n - 2) + 18.0 * f.col(n - 3) -
                       6.0 * f.col(n - 4) + f.col(n - 5));
  return d;
}

double cubic_at(const double* row, int n, double s, int stride) {
  const int k = static_cast<int>(std::floor(s));
  const double t = s - k;
  auto at = [&](int i) { return row[static_cast<long>(std::clamp(i, 0, n - 1)) * stride]; };
  const double f0 = at(k - 1), f1 = at(k), f2 = at(k + 1), f3 = at(k + 2);
  // Lagrange basis on nodes -1, 0, 1, 2 evaluated at t.
  const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3;
}

namespace {

// Weights 3/8, 7/6, 23/24, 1, ..., 1, 23/24, 7/6, 3/8.
double end_weight(size_t i, size_t n) {
  const size_t e = std::min(i, n - 1 - i);
  if (e == 0) return 3.0 / 8.0;
  if (e == 1) return 7.0 / 6.0;
  if (e == 2) return 23.0 / 24.0;
  return 1.0;
}

}  // namespace

double integrate(const std::vector<double>& f, double dx) {
  const size_t n = f.size();
  if (n < 2) return 0.0;
  if (n < 6) {
    double s = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < n; ++i) s += f[i];
    return s * dx;
  }
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += end_weight(i, n) * f[i];
  return s * dx;
}

double integrate_sq(const Field& f, double dx) {
  std::vector<double> g(static_cast<size_t>(f.cols()));
  for (Eigen::Index i = 0; i < f.cols(); ++i) g[static_cast<size_t>(i)] = f.col(i).squaredNorm();
  return integrate(g, dx);
}

double sup_abs(const Field& f, int first) {
  const Eigen::Index n = f.cols();
  if (n == 0 || f.rows() == 0) return 0.0;
  const Eigen::Index lo = std::min<Eigen::Index>(first, n - 1);
  const Eigen::Index hi = std::max<Eigen::Index>(n - 1 - first, lo);
  return f.middleCols(lo, hi - lo + 1).cwiseAbs().maxCoeff();
}

}  // namespace relaxdamp
