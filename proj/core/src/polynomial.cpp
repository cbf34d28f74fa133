#include "relaxdamp/polynomial.hpp"

#include <algorithm>

namespace relaxdamp {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial Polynomial::constant(int n_vars, double c) {
  Polynomial p(n_vars);
  p.add_term(c, {});
  return p;
}

Polynomial Polynomial::linear(int n_vars, int k, double coef) {
  Polynomial p(n_vars);
  std::array<int, kMaxDim> e{};
  e[static_cast<size_t>(k)] = 1;
  p.add_term(coef, e);
  return p;
}

Polynomial Polynomial::univariate(int n_vars, int k, const std::vector<double>& coeffs) {
  Polynomial p(n_vars);
  for (size_t i = 0; i < coeffs.size(); ++i) {
    std::array<int, kMaxDim> e{};
    e[static_cast<size_t>(k)] = static_cast<int>(i);
    p.add_term(coeffs[i], e);
  }
  return p;
}

void Polynomial::add_term(double coef, const std::array<int, kMaxDim>& exps) {
  if (coef == 0.0) return;
  for (auto& t : terms_) {
    if (t.exps == exps) {
      t.coef += coef;
      compact();
      return;
    }
  }
  terms_.push_back({coef, exps});
}

void Polynomial::compact() {
  std::erase_if(terms_, [](const Term& t) { return t.coef == 0.0; });
}

bool Polynomial::is_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
    return std::all_of(t.exps.begin(), t.exps.end(), [](int e) { return e == 0; });
  });
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::operator()(const Vec& u) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int k = 0; k < n_vars_; ++k) {
      if (t.exps[static_cast<size_t>(k)] != 0) m *= ipow(u[k], t.exps[static_cast<size_t>(k)]);
    }
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::partial(int k) const {
  Polynomial d(n_vars_);
  const auto kk = static_cast<size_t>(k);
  for (const auto& t : terms_) {
    if (t.exps[kk] == 0) continue;
    auto e = t.exps;
    const double c = t.coef * e[kk];
    e[kk] -= 1;
    d.add_term(c, e);
  }
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  n_vars_ = std::max(n_vars_, other.n_vars_);
  for (const auto& t : other.terms_) add_term(t.coef, t.exps);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& t : terms_) t.coef *= s;
  compact();
  return *this;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator*(double s, Polynomial p) { return p *= s; }

PolyMatrix::PolyMatrix(int r, int c, int n_vars)
    : rows(r), cols(c), entries(static_cast<size_t>(r * c), Polynomial(n_vars)) {}

Mat PolyMatrix::eval(const Vec& u) const {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = at(i, j)(u);
  return m;
}

PolyMatrix PolyMatrix::partial(int k) const {
  PolyMatrix d = *this;
  for (auto& e : d.entries) e = e.partial(k);
  return d;
}

bool PolyMatrix::is_constant() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Polynomial& p) { return p.is_constant(); });
}

PolyVector::PolyVector(int n, int n_vars) : entries(static_cast<size_t>(n), Polynomial(n_vars)) {}

Vec PolyVector::eval(const Vec& u) const {
  Vec v(size());
  for (int i = 0; i < size(); ++i) v[i] = at(i)(u);
  return v;
}

PolyVector PolyVector::partial(int k) const {
  PolyVector d = *this;
  for (auto& e : d.entries) e = e.partial(k);
  return d;
}

PolyMatrix PolyVector::jacobian() const {
  const int n = size();
  const int nv = n == 0 ? 0 : at(0).n_vars();
  PolyMatrix j(n, nv, nv);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < nv; ++k) j.at(i, k) = at(i).partial(k);
  return j;
}

}  // namespace relaxdamp
