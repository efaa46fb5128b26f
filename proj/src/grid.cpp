#include "sparsedom/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsedom {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int mod3(std::int64_t x) { return static_cast<int>(((x % 3) + 3) % 3); }

double endpoint_tol(double a, double b) {
  return 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

ShiftedDyadicCube parent(const ShiftedDyadicCube& r) {
  ShiftedDyadicCube p = r;
  p.scale = r.scale - 1;
  // Child low endpoint in units of 2^-j is m + s*t/3; the parent offset is
  // determined by floor((m + s*t)/2) because the shift sign flips per level.
  for (int a = 0; a < r.dim; ++a) {
    const std::int64_t shifted = r.offset[a] + r.sign() * r.shift_thirds[a];
    p.offset[a] = floor_div(shifted, 2);
  }
  return p;
}

ShiftedDyadicCube ancestor(const ShiftedDyadicCube& r, int k) {
  if (k < 0) throw std::invalid_argument("ancestor: k must be nonnegative");
  ShiftedDyadicCube a = r;
  for (int i = 0; i < k; ++i) a = parent(a);
  return a;
}

bool cube_contains(const ShiftedDyadicCube& outer, const ShiftedDyadicCube& inner) {
  if (!outer.same_system(inner)) throw std::invalid_argument("cube_contains: different systems");
  if (outer.scale > inner.scale) return false;  // outer smaller than inner
  const int shift = inner.scale - outer.scale;
  if (shift > 60) throw std::overflow_error("cube_contains: scale gap too large");
  for (int a = 0; a < outer.dim; ++a) {
    // Everything in units of 2^-inner.scale / 3 -- exact integers.
    const std::int64_t lo_in = 3 * inner.offset[a] + inner.sign() * inner.shift_thirds[a];
    const std::int64_t lo_out =
        (3 * outer.offset[a] + outer.sign() * outer.shift_thirds[a]) << shift;
    const std::int64_t w_out = std::int64_t{3} << shift;
    if (lo_in < lo_out || lo_in + 3 > lo_out + w_out) return false;
  }
  return true;
}

ShiftedDyadicCube cube_at(int dim, const std::array<int, kMaxDim>& shift_thirds,
                          int scale, const Point& x) {
  ShiftedDyadicCube c;
  c.dim = dim;
  c.shift_thirds = shift_thirds;
  c.scale = scale;
  const double side = c.side();
  for (int a = 0; a < dim; ++a) {
    const double u = shift_thirds[a] / 3.0;
    c.offset[a] = static_cast<std::int64_t>(std::floor(x[a] / side - c.sign() * u));
  }
  return c;
}

namespace {

struct AxisPick {
  int thirds = 0;
  std::int64_t offset = 0;
};

// One coordinate of the covering construction: interval I must avoid the
// scale-sideR endpoints of the chosen family, J the scale-(2^k sideR) ones.
bool axis_ok(double a, double b, double ja, double jb, int thirds, int scale_r, int k,
             std::int64_t* offset_out) {
  ShiftedDyadicCube probe;
  probe.dim = 1;
  probe.shift_thirds = {thirds, 0};
  probe.scale = scale_r;
  const double side = probe.side();
  const double u = thirds / 3.0;
  probe.offset[0] = static_cast<std::int64_t>(std::floor(a / side - probe.sign() * u));
  const double tol_i = endpoint_tol(a, b);
  if (probe.lo(0) > a + tol_i || b > probe.hi(0) + tol_i) return false;
  const ShiftedDyadicCube anc = ancestor(probe, k);
  const double tol_j = endpoint_tol(ja, jb);
  if (anc.lo(0) > ja + tol_j || jb > anc.hi(0) + tol_j) return false;
  *offset_out = probe.offset[0];
  return true;
}

}  // namespace

ShiftedDyadicCube cover_cube(const Box& q, int k) {
  if (k < 0) throw std::invalid_argument("cover_cube: k must be nonnegative");
  const double ell = q.side;
  if (!(ell > 0.0)) throw std::invalid_argument("cover_cube: degenerate cube");

  // The unique power of two in (3 ell, 6 ell].
  int expo = 0;
  std::frexp(3.0 * ell, &expo);
  const double side_r = std::ldexp(1.0, expo);
  const int scale_r = -expo;
  const int sign_r = (expo % 2 == 0) ? 1 : -1;          // (-1)^scale at R's level
  const int sign_anc = ((expo + k) % 2 == 0) ? 1 : -1;  // at the k-th ancestor's level

  ShiftedDyadicCube r;
  r.dim = q.dim;
  r.scale = scale_r;

  const Box big = dilate(q, std::ldexp(1.0, k));

  bool all_axes_ok = true;
  for (int axis = 0; axis < q.dim; ++axis) {
    const double a = q.lo(axis), b = q.hi(axis);
    const double ja = big.lo(axis), jb = big.hi(axis);

    // Endpoints of the union of the three families form the lattice
    // (side/3) Z; each point belongs to the family with t = (sign*n) mod 3.
    int excluded_i = -1, excluded_j = -1;
    {
      const double step = side_r / 3.0;
      const auto n = static_cast<std::int64_t>(std::ceil(a / step));
      if (static_cast<double>(n) * step < b) excluded_i = mod3(sign_r * n);
    }
    {
      const double step = std::ldexp(side_r, k) / 3.0;
      const auto n = static_cast<std::int64_t>(std::ceil(ja / step));
      if (static_cast<double>(n) * step < jb) excluded_j = mod3(sign_anc * n);
    }

    int picked = -1;
    std::int64_t off = 0;
    for (int t = 0; t < 3; ++t) {
      if (t == excluded_i || t == excluded_j) continue;
      if (axis_ok(a, b, ja, jb, t, scale_r, k, &off)) {
        picked = t;
        break;
      }
    }
    if (picked < 0) {
      all_axes_ok = false;
      break;
    }
    r.shift_thirds[axis] = picked;
    r.offset[axis] = off;
  }

  if (!all_axes_ok) {
    // Floating-point endpoint coincidence: scan all shifts per axis directly.
    for (int axis = 0; axis < q.dim; ++axis) {
      const double a = q.lo(axis), b = q.hi(axis);
      const double ja = big.lo(axis), jb = big.hi(axis);
      int picked = -1;
      std::int64_t off = 0;
      for (int t = 0; t < 3 && picked < 0; ++t)
        if (axis_ok(a, b, ja, jb, t, scale_r, k, &off)) picked = t;
      if (picked < 0) throw std::logic_error("cover_cube: no admissible shift (bug)");
      r.shift_thirds[axis] = picked;
      r.offset[axis] = off;
    }
  }

  const double tol = endpoint_tol(q.lo(0), q.hi(0)) * std::ldexp(1.0, k);
  const ShiftedDyadicCube anc = ancestor(r, k);
  if (!r.to_box().contains_box(q, tol) || !anc.to_box().contains_box(big, tol) ||
      !(3.0 * ell < side_r && side_r <= 6.0 * ell))
    throw std::logic_error("cover_cube: postcondition violated (bug)");
  return r;
}

nlohmann::json cube_to_json(const ShiftedDyadicCube& c) {
  nlohmann::json j;
  auto& u = j["u"] = nlohmann::json::array();
  auto& m = j["m"] = nlohmann::json::array();
  for (int a = 0; a < c.dim; ++a) {
    u.push_back(c.shift_thirds[a] / 3.0);
    m.push_back(c.offset[a]);
  }
  j["j"] = c.scale;
  return j;
}

ShiftedDyadicCube cube_from_json(const nlohmann::json& j) {
  ShiftedDyadicCube c;
  const auto& u = j.at("u");
  const auto& m = j.at("m");
  c.dim = static_cast<int>(u.size());
  if (c.dim < 1 || c.dim > kMaxDim || m.size() != u.size())
    throw std::invalid_argument("cube_from_json: bad dimension");
  for (int a = 0; a < c.dim; ++a) {
    c.shift_thirds[a] = static_cast<int>(std::llround(3.0 * u[a].get<double>()));
    c.offset[a] = m[a].get<std::int64_t>();
  }
  c.scale = j.at("j").get<int>();
  return c;
}

}  // namespace sparsedom
