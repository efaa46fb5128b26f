#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sparsedom/geometry.hpp"

#include <json.hpp>

namespace sparsedom {

/// Piecewise-constant function on a uniform grid over a box, extended by
/// zero outside the box.  The universal signal/weight representation.
struct GridFunction {
  Box domain;
  int n = 1;                   // cells per axis
  std::vector<double> values;  // size n^dim, x-fastest

  int dim() const { return domain.dim; }
  double h() const { return domain.side / n; }
  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim(); ++a) c *= n;
    return c;
  }

  std::int64_t index(int ix, int iy = 0) const {
    return static_cast<std::int64_t>(iy) * n + ix;
  }

  Point cell_center(std::int64_t idx) const {
    Point p{};
    const double hh = h();
    p[0] = domain.corner[0] + (static_cast<double>(idx % n) + 0.5) * hh;
    if (dim() == 2) p[1] = domain.corner[1] + (static_cast<double>(idx / n) + 0.5) * hh;
    return p;
  }

  Box cell_box(std::int64_t idx) const {
    Box b;
    b.dim = dim();
    b.side = h();
    b.corner[0] = domain.corner[0] + static_cast<double>(idx % n) * b.side;
    if (dim() == 2) b.corner[1] = domain.corner[1] + static_cast<double>(idx / n) * b.side;
    return b;
  }

  static GridFunction constant(const Box& domain, int n, double c);
  static GridFunction sample(const Box& domain, int n,
                             const std::function<double(const Point&)>& f);

  double max_abs() const;
};

GridFunction abs_of(const GridFunction& f);
GridFunction multiply(const GridFunction& f, const GridFunction& g);

/// 1_Q f with Q weighted by cell overlap fractions, so integrals over
/// sub-boxes of Q are preserved exactly.
GridFunction restrict_to(const GridFunction& f, const Box& q);

/// Exact box integrals of a cell-constant function in O(1) per query.
/// Antiderivative tables are piecewise (bi)linear, which is exact here.
class PrefixIntegral {
 public:
  explicit PrefixIntegral(const GridFunction& f);

  /// Integral of f (zero-extended) over q ∩ domain.
  double box_integral(const Box& q) const;

  /// Average |q|^-1 * integral, full measure of q in the denominator.
  double box_average(const Box& q) const;

 private:
  double corner_antiderivative(double x, double y) const;
  double antiderivative_1d(double x) const;

  Box domain_;
  int n_ = 1;
  int dim_ = 1;
  double h_ = 1.0;
  std::vector<double> values_;
  std::vector<double> cum1_;   // d=1 edge cumulative
  std::vector<double> sat_;    // d=2 summed area, (n+1)^2
  std::vector<double> cumy_;   // d=2 per-column partial sums, n*(n+1)
  std::vector<double> cumx_;   // d=2 per-row partial sums, (n+1)*n
};

/// Mean value of f over Q with zero extension; |Q| in the denominator.
double average(const GridFunction& f, const Box& q);

/// Non-increasing rearrangement of 1_Q g evaluated at t:
/// inf{ s >= 0 : |{x in Q : |g(x)| > s}| <= t }.
double rearrangement_value(const GridFunction& g, const Box& q, double t);

/// Lower median of g on Q: both strict-side measures at most |Q|/2.
double median(const GridFunction& g, const Box& q);

/// Local mean oscillation inf_c (1_Q (g - c))^* (lambda |Q|), computed
/// exactly for cell data via the shortest window covering enough mass.
double oscillation(const GridFunction& g, const Box& q, double lambda);

/// Uncentered cube maximal function over a discrete cube family: sides
/// h*2^i, corners on half-side and half-cell lattices anchored at the
/// domain corner, plus the cube of each of the 3^d shifted dyadic systems
/// through the point.  Optionally restricted to cubes inside `within`.
GridFunction maximal(const GridFunction& f,
                     const std::optional<Box>& within = std::nullopt,
                     int threads = 0);

/// (h^d sum |g|^p w)^(1/p); w must share g's grid.
double weighted_lp_norm(const GridFunction& g, const GridFunction& w, double p);
double lp_norm(const GridFunction& g, double p);

std::string gridfunction_csv(const GridFunction& f);
nlohmann::json gridfunction_header(const GridFunction& f);
GridFunction gridfunction_from_csv(const nlohmann::json& header, const std::string& csv);

}  // namespace sparsedom
