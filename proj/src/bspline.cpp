#include "mflda/bspline.hpp"

#include <cmath>
#include <sstream>

namespace mflda {

SplineBasis make_basis(double t_min, double t_max, int degree,
                       int interior_knots) {
  if (degree < 0) throw ConfigError("spline degree must be >= 0");
  if (interior_knots < 0) throw ConfigError("interior knot count must be >= 0");
  if (!(t_min < t_max))
    throw ConfigError("spline domain requires t_min < t_max");

  SplineBasis basis;
  basis.degree = degree;
  basis.t_min = t_min;
  basis.t_max = t_max;
  Index order = degree + 1;
  basis.knots.resize(2 * order + interior_knots);
  for (Index i = 0; i < order; ++i) {
    basis.knots[i] = t_min;
    basis.knots[basis.knots.size() - 1 - i] = t_max;
  }
  double step = (t_max - t_min) / (interior_knots + 1);
  for (Index k = 0; k < interior_knots; ++k)
    basis.knots[order + k] = t_min + step * (k + 1);
  return basis;
}

namespace {

// Index of the knot span [knots[s], knots[s+1]) containing t, restricted to
// the nonempty spans degree..m-1; t == t_max maps to the last span.
Index find_span(const SplineBasis& basis, double t) {
  Index m = basis.size();
  if (t >= basis.knots[m]) return m - 1;
  Index lo = basis.degree;
  Index hi = m;
  while (lo + 1 < hi) {
    Index mid = (lo + hi) / 2;
    if (t < basis.knots[mid])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

}  // namespace

Vector basis_row(const SplineBasis& basis, double t) {
  double slack = 1e-9 * (basis.t_max - basis.t_min);
  if (t < basis.t_min - slack || t > basis.t_max + slack) {
    std::ostringstream msg;
    msg << "time " << t << " outside spline domain [" << basis.t_min << ", "
        << basis.t_max << "]";
    throw DataError(msg.str());
  }
  if (t < basis.t_min) t = basis.t_min;
  if (t > basis.t_max) t = basis.t_max;

  Index m = basis.size();
  int d = basis.degree;
  Index span = find_span(basis, t);

  // Cox-de Boor triangle for the d+1 basis functions alive on this span.
  Vector local = Vector::Zero(d + 1);
  local[0] = 1.0;
  Vector left(d + 1), right(d + 1);
  for (int j = 1; j <= d; ++j) {
    left[j] = t - basis.knots[span + 1 - j];
    right[j] = basis.knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[r + 1] + left[j - r];
      double term = denom != 0.0 ? local[r] / denom : 0.0;
      local[r] = saved + right[r + 1] * term;
      saved = left[j - r] * term;
    }
    local[j] = saved;
  }

  Vector row = Vector::Zero(m);
  for (int j = 0; j <= d; ++j) row[span - d + j] = local[j];
  return row;
}

Matrix evaluate_basis(const SplineBasis& basis, const Vector& times) {
  Matrix out(times.size(), basis.size());
  for (Index i = 0; i < times.size(); ++i)
    out.row(i) = basis_row(basis, times[i]).transpose();
  return out;
}

}  // namespace mflda
