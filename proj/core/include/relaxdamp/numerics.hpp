#pragma once

#include "relaxdamp/types.hpp"

#include <vector>

namespace relaxdamp {

/// Fourth-order first derivative along the node axis. Central in the
/// interior, one-sided five-point stencils on the two outermost nodes.
Field diff4(const Field& f, double dx);

/// 4-point Lagrange interpolation of a row of samples at a fractional node
/// index. Indices beyond the ends read the end values (constant extension).
double cubic_at(const double* row, int n, double s, int stride = 1);

/// End-corrected trapezoid rule (fourth order for smooth integrands).
double integrate(const std::vector<double>& f, double dx);

/// Sum over components of the squared field, integrated over the grid.
double integrate_sq(const Field& f, double dx);

/// Componentwise sup over nodes [first, n-1-first].
double sup_abs(const Field& f, int first = 0);

/// Nodes skipped on each side by interior sup norms.
inline constexpr int kInteriorSkip = 2;

}  // namespace relaxdamp
