#pragma once

#include "relaxdamp/types.hpp"

#include <array>
#include <vector>

namespace relaxdamp {

/// Multivariate polynomial in the state components U_1..U_N, stored as a list
/// of monomials coef * prod_k U_k^{e_k}.
class Polynomial {
 public:
  struct Term {
    double coef = 0.0;
    std::array<int, kMaxDim> exps{};
  };

  Polynomial() = default;
  explicit Polynomial(int n_vars) : n_vars_(n_vars) {}

  static Polynomial constant(int n_vars, double c);
  /// coef * U_k (k zero-based).
  static Polynomial linear(int n_vars, int k, double coef = 1.0);
  /// Univariate polynomial sum_i coeffs[i] * U_k^i.
  static Polynomial univariate(int n_vars, int k, const std::vector<double>& coeffs);

  void add_term(double coef, const std::array<int, kMaxDim>& exps);

  int n_vars() const { return n_vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;

  double operator()(const Vec& u) const;
  Polynomial partial(int k) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double s);

 private:
  void compact();

  int n_vars_ = 0;
  std::vector<Term> terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator*(double s, Polynomial p);

/// Row-major N x M matrix of polynomials.
struct PolyMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Polynomial> entries;

  PolyMatrix() = default;
  PolyMatrix(int r, int c, int n_vars);

  Polynomial& at(int i, int j) { return entries[static_cast<size_t>(i * cols + j)]; }
  const Polynomial& at(int i, int j) const { return entries[static_cast<size_t>(i * cols + j)]; }

  Mat eval(const Vec& u) const;
  PolyMatrix partial(int k) const;
  bool is_constant() const;
};

struct PolyVector {
  std::vector<Polynomial> entries;

  PolyVector() = default;
  PolyVector(int n, int n_vars);

  int size() const { return static_cast<int>(entries.size()); }
  Polynomial& at(int i) { return entries[static_cast<size_t>(i)]; }
  const Polynomial& at(int i) const { return entries[static_cast<size_t>(i)]; }

  Vec eval(const Vec& u) const;
  PolyVector partial(int k) const;
  /// Jacobian: entry (i, k) = d entries[i] / d U_k.
  PolyMatrix jacobian() const;
};

}  // namespace relaxdamp
