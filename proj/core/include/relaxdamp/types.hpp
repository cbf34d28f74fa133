#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>

namespace relaxdamp {

/// Upper bound on the state dimension. Small fixed-capacity matrices keep the
/// per-node kernels free of heap traffic.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using CVec = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                           kMaxDim, kMaxDim>;

/// A vector field sampled on a grid: one column per node, one row per component.
using Field = Eigen::MatrixXd;

/// Uniform grid x_i = x_min + i * dx, i = 0 .. n-1.
struct Grid {
  double x_min = 0.0;
  double dx = 1.0;
  int n = 0;

  static Grid symmetric(double half_width, int n_nodes);
  static Grid with_spacing(double half_width, double spacing);

  double x(int i) const { return x_min + dx * static_cast<double>(i); }
  double x_max() const { return x(n - 1); }
  bool operator==(const Grid& other) const = default;
};

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Induced infinity norm (max absolute row sum).
inline double inf_norm(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace relaxdamp
