#include "sparsedom/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sparsedom/grid.hpp"
#include "sparsedom/quadrature.hpp"

namespace sparsedom {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t family_fingerprint(const std::vector<Box>& cubes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Box& b : cubes) {
    h = fnv1a(h, &b.side, sizeof(double));
    h = fnv1a(h, b.corner.data(), sizeof(double) * b.dim);
  }
  return h;
}

// int_[0,X] x [0,Y] (x^2+y^2)^(alpha/2) via polar coordinates; the radial
// integral is closed form and the angular one is smooth.
double corner_power_integral_2d(double alpha, double x_len, double y_len) {
  if (x_len <= 0.0 || y_len <= 0.0) return 0.0;
  const double p = alpha + 2.0;
  const double theta_c = std::atan2(y_len, x_len);
  auto lower = [&](double th) { return std::pow(x_len / std::cos(th), p) / p; };
  auto upper = [&](double th) { return std::pow(y_len / std::sin(th), p) / p; };
  const double half_pi = 1.5707963267948966;
  return adaptive_integrate(lower, 0.0, theta_c, 1e-13) +
         adaptive_integrate(upper, theta_c, half_pi, 1e-13);
}

double signed_corner_power_2d(double alpha, double x, double y) {
  const double s = (x < 0 ? -1.0 : 1.0) * (y < 0 ? -1.0 : 1.0);
  return s * corner_power_integral_2d(alpha, std::fabs(x), std::fabs(y));
}

}  // namespace

Weight::Weight(GridFunction w) : g_(std::move(w)) {
  for (double v : g_.values)
    if (!(v > 0.0)) throw std::invalid_argument("Weight: values must be strictly positive");
}

double Weight::cached_or_compute(const std::string& key,
                                 const std::function<double()>& compute) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double value = compute();
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, value);
  return value;
}

std::vector<Box> characteristic_cube_family(const Box& domain, double h) {
  if (!(h > 0.0) || h > domain.side)
    throw std::invalid_argument("characteristic_cube_family: bad cell width");
  std::vector<Box> family;
  family.push_back(domain);
  const int d = domain.dim;

  int scale_lo = 0;  // smallest scale index: side 2^-j <= domain.side
  while (std::ldexp(1.0, -scale_lo) > domain.side * (1.0 + 1e-12)) ++scale_lo;
  while (std::ldexp(1.0, -(scale_lo - 1)) <= domain.side * (1.0 + 1e-12)) --scale_lo;
  int scale_hi = scale_lo;  // largest scale index: side >= h
  while (std::ldexp(1.0, -(scale_hi + 1)) >= h * (1.0 - 1e-12)) ++scale_hi;

  std::array<int, kMaxDim> thirds{};
  for (int scale = scale_lo; scale <= scale_hi; ++scale) {
    const int combos = (d == 1) ? 3 : 9;
    for (int c = 0; c < combos; ++c) {
      thirds[0] = c % 3;
      thirds[1] = c / 3;
      Point lo_pt{}, hi_pt{};
      for (int a = 0; a < d; ++a) {
        lo_pt[a] = domain.lo(a);
        hi_pt[a] = domain.hi(a) - 1e-12 * domain.side;
      }
      const ShiftedDyadicCube first = cube_at(d, thirds, scale, lo_pt);
      const ShiftedDyadicCube last = cube_at(d, thirds, scale, hi_pt);
      const std::int64_t my_hi = (d == 2) ? last.offset[1] : first.offset[1];
      for (std::int64_t mx = first.offset[0]; mx <= last.offset[0]; ++mx) {
        for (std::int64_t my = first.offset[1]; my <= my_hi; ++my) {
          ShiftedDyadicCube c0 = first;
          c0.offset[0] = mx;
          c0.offset[1] = my;
          const Box b = c0.to_box();
          // Clip to the domain; in d = 2 take the inscribed square of the
          // overlap, anchored at the clipped corner.
          Box clipped;
          clipped.dim = d;
          double side = b.side;
          bool ok = true;
          for (int a = 0; a < d; ++a) {
            const double lo = std::max(b.lo(a), domain.lo(a));
            const double hi = std::min(b.hi(a), domain.hi(a));
            if (hi - lo <= 1e-12 * domain.side) {
              ok = false;
              break;
            }
            clipped.corner[a] = lo;
            side = std::min(side, hi - lo);
          }
          if (!ok) continue;
          clipped.side = side;
          for (int a = 0; a < d; ++a)
            clipped.corner[a] = std::min(clipped.corner[a], domain.hi(a) - side);
          family.push_back(clipped);
        }
      }
    }
  }
  return family;
}

double ap_char(const Weight& w, double p, const std::vector<Box>& cubes) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("ap_char: p must be in (1,inf)");
  const std::string key =
      "ap:" + std::to_string(p) + ":" + std::to_string(family_fingerprint(cubes));
  return w.cached_or_compute(key, [&] {
    GridFunction dual = w.grid();
    const double expo = 1.0 / (1.0 - p);
    for (double& v : dual.values) v = std::pow(v, expo);
    const PrefixIntegral pw(w.grid());
    const PrefixIntegral pd(dual);
    double sup = 0.0;
    for (const Box& q : cubes) {
      const double aw = pw.box_average(q);
      const double ad = pd.box_average(q);
      sup = std::max(sup, aw * std::pow(ad, p - 1.0));
    }
    return sup;
  });
}

double joint_ap(const Weight& w, const Weight& sigma, double p, const std::vector<Box>& cubes) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("joint_ap: p must be in (1,inf)");
  const PrefixIntegral pw(w.grid());
  const PrefixIntegral ps(sigma.grid());
  double sup = 0.0;
  for (const Box& q : cubes) {
    const double aw = pw.box_average(q);
    const double as = ps.box_average(q);
    sup = std::max(sup, aw * std::pow(as, p - 1.0));
  }
  return sup;
}

double ainfty(const Weight& w, const std::vector<Box>& cubes, int threads) {
  const std::string key = "ainfty:" + std::to_string(family_fingerprint(cubes));
  return w.cached_or_compute(key, [&] {
    const PrefixIntegral pw(w.grid());
    double sup = 0.0;
    for (const Box& q : cubes) {
      const GridFunction wloc = restrict_to(w.grid(), q);
      const GridFunction mloc = maximal(wloc, q, threads);
      const double num = PrefixIntegral(mloc).box_integral(q);
      const double den = pw.box_integral(q);
      if (den > 0.0) sup = std::max(sup, num / den);
    }
    return sup;
  });
}

Weight power_weight(double alpha, const Box& domain, int n) {
  const int d = domain.dim;
  if (alpha <= -static_cast<double>(d))
    throw std::invalid_argument("power_weight: alpha must exceed -d for local integrability");
  GridFunction g = GridFunction::constant(domain, n, 1.0);
  for (std::int64_t i = 0; i < g.cell_count(); ++i) {
    const Box cell = g.cell_box(i);
    bool touches_origin = true;
    for (int a = 0; a < d; ++a)
      touches_origin = touches_origin && cell.lo(a) <= 0.0 && cell.hi(a) >= 0.0;
    if (!touches_origin) {
      const Point c = g.cell_center(i);
      const double r = (d == 1) ? std::fabs(c[0]) : std::hypot(c[0], c[1]);
      g.values[i] = std::pow(r, alpha);
    } else if (d == 1) {
      const double a = cell.lo(0), b = cell.hi(0);
      g.values[i] = (std::pow(std::fabs(a), 1.0 + alpha) + std::pow(b, 1.0 + alpha)) /
                    ((1.0 + alpha) * (b - a));
    } else {
      const double x1 = cell.lo(0), x2 = cell.hi(0);
      const double y1 = cell.lo(1), y2 = cell.hi(1);
      const double integral = signed_corner_power_2d(alpha, x2, y2) -
                              signed_corner_power_2d(alpha, x1, y2) -
                              signed_corner_power_2d(alpha, x2, y1) +
                              signed_corner_power_2d(alpha, x1, y1);
      g.values[i] = integral / cell.volume();
    }
  }
  return Weight(std::move(g));
}

Weight step_weight(const std::vector<double>& breakpoints, const std::vector<double>& values,
                   const Box& domain, int n) {
  if (domain.dim != 1) throw std::invalid_argument("step_weight: d = 1 only");
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("step_weight: need one more value than breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("step_weight: breakpoints must be sorted");
  GridFunction g = GridFunction::sample(domain, n, [&](const Point& x) {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x[0]);
    return values[static_cast<size_t>(it - breakpoints.begin())];
  });
  return Weight(std::move(g));
}

double weighted_norm(const GridFunction& g, const Weight& w, double p) {
  return weighted_lp_norm(g, w.grid(), p);
}

}  // namespace sparsedom
