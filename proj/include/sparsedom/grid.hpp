#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sparsedom/geometry.hpp"

#include <json.hpp>

namespace sparsedom {

/// Cube of the shifted dyadic system D^u = {2^-j([0,1)^d + m + (-1)^j u)}.
///
/// The shift u has entries in {0, 1/3, 2/3}, stored as integer thirds.
/// Endpoints are rationals with denominator 3*2^j, so all arithmetic between
/// cubes of one system is exact in 64-bit integers.  The alternating sign
/// (-1)^j is what makes consecutive scales of one system nest.
struct ShiftedDyadicCube {
  int dim = 1;
  std::array<int, kMaxDim> shift_thirds{};   // u_i = thirds_i / 3, thirds_i in {0,1,2}
  int scale = 0;                             // side length 2^-scale (scale may be negative)
  std::array<std::int64_t, kMaxDim> offset{};  // m

  int sign() const { return (scale % 2 == 0) ? 1 : -1; }  // (-1)^scale
  double side() const { return std::ldexp(1.0, -scale); }

  /// Low endpoint on `axis`: (3 m + (-1)^j t) * 2^-j / 3, rounded once.
  double lo(int axis) const {
    const std::int64_t num = 3 * offset[axis] + sign() * shift_thirds[axis];
    return std::ldexp(static_cast<double>(num), -scale) / 3.0;
  }
  double hi(int axis) const {
    const std::int64_t num = 3 * offset[axis] + sign() * shift_thirds[axis] + 3;
    return std::ldexp(static_cast<double>(num), -scale) / 3.0;
  }

  Box to_box() const {
    Box b;
    b.dim = dim;
    b.side = side();
    for (int a = 0; a < dim; ++a) b.corner[a] = lo(a);
    return b;
  }

  bool same_system(const ShiftedDyadicCube& other) const {
    if (dim != other.dim) return false;
    for (int a = 0; a < dim; ++a)
      if (shift_thirds[a] != other.shift_thirds[a]) return false;
    return true;
  }

  friend bool operator==(const ShiftedDyadicCube&, const ShiftedDyadicCube&) = default;
};

/// Dyadic parent within the same system (side doubles).
ShiftedDyadicCube parent(const ShiftedDyadicCube& r);

/// k-th ancestor: same system, side 2^k * side(r), contains r.  k = 0 is r.
ShiftedDyadicCube ancestor(const ShiftedDyadicCube& r, int k);

/// Exact containment test for cubes of the same system.
bool cube_contains(const ShiftedDyadicCube& outer, const ShiftedDyadicCube& inner);

/// The unique cube of D^u at the given scale whose half-open box contains x.
ShiftedDyadicCube cube_at(int dim, const std::array<int, kMaxDim>& shift_thirds,
                          int scale, const Point& x);

/// Shifted dyadic cover of an arbitrary cube.
///
/// Returns R in some D^u with Q ⊆ R, dilate(Q, 2^k) ⊆ ancestor(R, k) and
/// 3 ℓ(Q) < ℓ(R) ≤ 6 ℓ(Q).  The shift is chosen per coordinate by endpoint
/// avoidance over u_i in {0, 1/3, 2/3}; ties break to the smallest u_i.
/// Existence is guaranteed, so a postcondition failure throws logic_error.
ShiftedDyadicCube cover_cube(const Box& q, int k);

nlohmann::json cube_to_json(const ShiftedDyadicCube& c);
ShiftedDyadicCube cube_from_json(const nlohmann::json& j);

}  // namespace sparsedom
