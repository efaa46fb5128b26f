#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace sparsedom {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;

/// Axis-aligned cube [corner, corner + side)^dim.  Not necessarily dyadic.
struct Box {
  int dim = 1;
  Point corner{};
  double side = 1.0;

  double lo(int axis) const { return corner[axis]; }
  double hi(int axis) const { return corner[axis] + side; }
  double center(int axis) const { return corner[axis] + 0.5 * side; }

  Point center() const {
    Point c{};
    for (int a = 0; a < dim; ++a) c[a] = center(a);
    return c;
  }

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= side;
    return v;
  }

  bool contains_point(const Point& x, double tol = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (x[a] < corner[a] - tol || x[a] >= corner[a] + side + tol) return false;
    return true;
  }

  bool contains_box(const Box& q, double tol = 0.0) const {
    for (int a = 0; a < dim; ++a)
      if (q.lo(a) < lo(a) - tol || q.hi(a) > hi(a) + tol) return false;
    return true;
  }
};

/// Concentric rescaling: same center, side multiplied by `factor`.
inline Box dilate(const Box& q, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
  Box r = q;
  r.side = q.side * factor;
  for (int a = 0; a < q.dim; ++a)
    r.corner[a] = q.center(a) - 0.5 * r.side;
  return r;
}

inline double diameter(const Box& q) {
  return q.side * std::sqrt(static_cast<double>(q.dim));
}

}  // namespace sparsedom
