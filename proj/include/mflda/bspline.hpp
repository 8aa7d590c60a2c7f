#pragma once

#include "mflda/types.hpp"

namespace mflda {

// Clamped B-spline basis on [t_min, t_max]. The knot vector repeats each
// boundary knot degree+1 times, so the basis spans size() = degree + 1 +
// (number of interior knots) functions and sums to one everywhere on the
// domain.
struct SplineBasis {
  int degree = 3;
  Vector knots;  // full clamped vector, size() + degree + 1 entries
  double t_min = 0.0;
  double t_max = 1.0;

  Index size() const { return knots.size() - degree - 1; }
};

// Equally spaced interior knots; degree >= 0, interior_knots >= 0,
// t_min < t_max.
SplineBasis make_basis(double t_min, double t_max, int degree = 3,
                       int interior_knots = 4);

// One evaluation row phi(t)^T, length size(). Throws DataError when t lies
// outside the domain.
Vector basis_row(const SplineBasis& basis, double t);

// Stacked rows for a set of times: |times| x size().
Matrix evaluate_basis(const SplineBasis& basis, const Vector& times);

}  // namespace mflda
