#include "relaxdamp/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace relaxdamp;

TEST(Numerics, Diff4IsFourthOrder) {
  auto err_at = [](int n) {
    const double dx = 4.0 / (n - 1);
    Field f(1, n);
    for (int i = 0; i < n; ++i) f(0, i) = std::sin(1.3 * (-2.0 + i * dx));
    const Field d = diff4(f, dx);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(d(0, i) - 1.3 * std::cos(1.3 * (-2.0 + i * dx))));
    return e;
  };
  const double e1 = err_at(101), e2 = err_at(201);
  EXPECT_GT(std::log2(e1 / e2), 3.7);
}

TEST(Numerics, Diff4ExactOnQuartics) {
  const int n = 30;
  const double dx = 0.1;
  Field f(1, n);
  for (int i = 0; i < n; ++i) {
    const double x = i * dx;
    f(0, i) = x * x * x * x - 2.0 * x;
  }
  const Field d = diff4(f, dx);
  for (int i = 0; i < n; ++i) {
    const double x = i * dx;
    EXPECT_NEAR(d(0, i), 4.0 * x * x * x - 2.0, 1e-10);
  }
}

TEST(Numerics, CubicInterpolation) {
  std::vector<double> row;
  for (int i = 0; i < 10; ++i) row.push_back(0.5 * i * i * i - i + 2.0);
  const double s = 4.3;
  EXPECT_NEAR(cubic_at(row.data(), 10, s), 0.5 * s * s * s - s + 2.0, 1e-12);
  EXPECT_EQ(cubic_at(row.data(), 10, 3.0), row[3]);
  // Constant extension beyond the ends.
  EXPECT_EQ(cubic_at(row.data(), 10, -3.0), row[0]);
  EXPECT_EQ(cubic_at(row.data(), 10, 20.0), row[9]);
}

TEST(Numerics, EndCorrectedTrapezoid) {
  auto err_at = [](int n) {
    const double dx = 3.0 / (n - 1);
    std::vector<double> f;
    for (int i = 0; i < n; ++i) f.push_back(std::exp(i * dx));
    return std::abs(integrate(f, dx) - (std::exp(3.0) - 1.0));
  };
  const double e1 = err_at(41), e2 = err_at(81);
  EXPECT_GE(e1 / e2, 4.0);
  EXPECT_GT(std::log2(e1 / e2), 3.5);
}

TEST(Numerics, SupSkipsEnds) {
  Field f = Field::Zero(2, 10);
  f(1, 0) = 5.0;
  f(0, 4) = -2.0;
  EXPECT_EQ(sup_abs(f), 5.0);
  EXPECT_EQ(sup_abs(f, kInteriorSkip), 2.0);
}
