#include "sparsedom/domination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "sparsedom/parallel.hpp"

namespace sparsedom {

namespace {

struct CubeAddress {
  int scale;
  std::int64_t m0, m1;
  bool operator<(const CubeAddress& o) const {
    return std::tie(scale, m0, m1) < std::tie(o.scale, o.m0, o.m1);
  }
};

CubeAddress address_of(const ShiftedDyadicCube& c) {
  return CubeAddress{c.scale, c.offset[0], c.dim == 2 ? c.offset[1] : 0};
}

// Cell index range of phi's grid whose centers lie in [lo, hi) on one axis.
std::pair<int, int> center_range(const GridFunction& phi, int axis, double lo, double hi) {
  const double h = phi.h();
  const double base = phi.domain.lo(axis);
  int i_lo = static_cast<int>(std::ceil((lo - base) / h - 0.5 - 1e-12));
  int i_hi = static_cast<int>(std::ceil((hi - base) / h - 0.5 - 1e-12));
  i_lo = std::max(i_lo, 0);
  i_hi = std::min(i_hi, phi.n);
  return {i_lo, i_hi};
}

void add_on_cube(GridFunction* out, const ShiftedDyadicCube& r, double value) {
  const auto [x0, x1] = center_range(*out, 0, r.lo(0), r.hi(0));
  if (out->dim() == 1) {
    for (int x = x0; x < x1; ++x) out->values[static_cast<size_t>(x)] += value;
    return;
  }
  const auto [y0, y1] = center_range(*out, 1, r.lo(1), r.hi(1));
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) out->values[static_cast<size_t>(out->index(x, y))] += value;
}

GridFunction apply_with_prefix(const PositiveShift& shift, const GridFunction& phi,
                               const PrefixIntegral& prefix) {
  GridFunction out = GridFunction::constant(phi.domain, phi.n, 0.0);
  for (const auto& pair : shift.pairs)
    add_on_cube(&out, pair.base, prefix.box_average(pair.ancestor.to_box()));
  return out;
}

// Forest of the (nested or disjoint) base cubes of one shift, with the
// fragment measure of each node after removing its children.
struct ShiftForest {
  std::vector<int> parent;                  // -1 for roots
  std::vector<std::vector<int>> children;
  std::vector<int> order;                   // coarse-to-fine traversal
};

ShiftForest build_forest(const PositiveShift& shift) {
  const auto count = static_cast<int>(shift.pairs.size());
  ShiftForest forest;
  forest.parent.assign(static_cast<size_t>(count), -1);
  forest.children.resize(static_cast<size_t>(count));
  forest.order.resize(static_cast<size_t>(count));

  std::map<CubeAddress, int> index;
  int min_scale = std::numeric_limits<int>::max();
  for (int i = 0; i < count; ++i) {
    index.emplace(address_of(shift.pairs[static_cast<size_t>(i)].base), i);
    min_scale = std::min(min_scale, shift.pairs[static_cast<size_t>(i)].base.scale);
  }
  for (int i = 0; i < count; ++i) {
    ShiftedDyadicCube walk = shift.pairs[static_cast<size_t>(i)].base;
    while (walk.scale > min_scale) {
      walk = parent(walk);
      auto it = index.find(address_of(walk));
      if (it != index.end()) {
        forest.parent[static_cast<size_t>(i)] = it->second;
        forest.children[static_cast<size_t>(it->second)].push_back(i);
        break;
      }
    }
  }
  std::iota(forest.order.begin(), forest.order.end(), 0);
  std::sort(forest.order.begin(), forest.order.end(), [&](int a, int b) {
    return shift.pairs[static_cast<size_t>(a)].base.scale <
           shift.pairs[static_cast<size_t>(b)].base.scale;
  });
  return forest;
}

double forest_norm(const PositiveShift& shift, const std::vector<double>& coeff, double p,
                   const std::function<double(const Box&)>& measure) {
  const ShiftForest forest = build_forest(shift);
  const auto count = static_cast<int>(shift.pairs.size());
  std::vector<double> value(static_cast<size_t>(count), 0.0);
  double sum = 0.0;
  for (int idx : forest.order) {
    const auto ui = static_cast<size_t>(idx);
    const int par = forest.parent[ui];
    value[ui] = coeff[ui] + (par >= 0 ? value[static_cast<size_t>(par)] : 0.0);
    double frag = measure(shift.pairs[ui].base.to_box());
    for (int child : forest.children[ui])
      frag -= measure(shift.pairs[static_cast<size_t>(child)].base.to_box());
    if (frag > 0.0) sum += std::pow(std::fabs(value[ui]), p) * frag;
  }
  return std::pow(sum, 1.0 / p);
}

GridFunction restrict_centers(const GridFunction& f, const Box& q0) {
  GridFunction out = f;
  for (std::int64_t i = 0; i < f.cell_count(); ++i)
    if (!q0.contains_point(f.cell_center(i))) out.values[i] = 0.0;
  return out;
}

}  // namespace

RhoSplit rho_map(const SparseFamily& family, int k) {
  if (k < 0) throw std::invalid_argument("rho_map: k must be nonnegative");
  // Family cube sides must be powers of two for the ell(R) = 4 ell(Q) identity.
  {
    int expo = 0;
    const double mant = std::frexp(family.cell_width, &expo);
    if (std::fabs(mant - 0.5) > 1e-12)
      throw std::invalid_argument("rho_map: family cubes need power-of-two sides");
  }

  RhoSplit split;
  split.assignment.resize(family.cubes.size());
  split.covers.resize(family.cubes.size());
  std::map<std::array<int, kMaxDim>, int> shift_index;
  const int preimage_cap = family.dim == 1 ? 4 : 16;

  for (int i = 0; i < static_cast<int>(family.cubes.size()); ++i) {
    const Box q = family.cube_box(i);
    const ShiftedDyadicCube r = cover_cube(q, k);
    const double ratio = r.side() / q.side;
    if (std::fabs(ratio - 4.0) > 1e-9)
      throw std::logic_error("rho_map: cover side is not 4 ell(Q) (bug)");

    auto [it, inserted] = shift_index.try_emplace(r.shift_thirds,
                                                  static_cast<int>(split.shifts.size()));
    if (inserted) {
      PositiveShift s;
      s.shift_thirds = r.shift_thirds;
      s.complexity = k;
      split.shifts.push_back(std::move(s));
    }
    PositiveShift& target = split.shifts[static_cast<size_t>(it->second)];

    int pair_idx = -1;
    for (int j = 0; j < static_cast<int>(target.pairs.size()); ++j)
      if (target.pairs[static_cast<size_t>(j)].base == r) {
        pair_idx = j;
        break;
      }
    if (pair_idx < 0) {
      target.pairs.push_back({r, ancestor(r, k), 0});
      pair_idx = static_cast<int>(target.pairs.size()) - 1;
    }
    auto& pair = target.pairs[static_cast<size_t>(pair_idx)];
    if (++pair.preimages > preimage_cap)
      throw std::logic_error("rho_map: more than 4^d preimages (bug)");

    split.assignment[static_cast<size_t>(i)] = it->second;
    split.covers[static_cast<size_t>(i)] = r;
  }
  return split;
}

GridFunction shift_apply(const PositiveShift& shift, const GridFunction& phi) {
  const PrefixIntegral prefix(phi);
  return apply_with_prefix(shift, phi, prefix);
}

double shift_lp_norm(const PositiveShift& shift, const GridFunction& phi, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("shift_lp_norm: p must be in (1, inf)");
  const PrefixIntegral prefix(phi);
  std::vector<double> coeff(shift.pairs.size());
  for (size_t i = 0; i < shift.pairs.size(); ++i)
    coeff[i] = prefix.box_average(shift.pairs[i].ancestor.to_box());
  return forest_norm(shift, coeff, p, [](const Box& b) { return b.volume(); });
}

double shift_weighted_lp_norm(const PositiveShift& shift, const GridFunction& phi,
                              const GridFunction& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("shift_weighted_lp_norm: p must be in (1, inf)");
  const PrefixIntegral prefix(phi);
  const PrefixIntegral wpref(w);
  std::vector<double> coeff(shift.pairs.size());
  for (size_t i = 0; i < shift.pairs.size(); ++i)
    coeff[i] = prefix.box_average(shift.pairs[i].ancestor.to_box());
  return forest_norm(shift, coeff, p, [&](const Box& b) { return wpref.box_integral(b); });
}

double shift_norm_ratio(const PositiveShift& shift, const std::vector<GridFunction>& trials,
                        double p) {
  double best = 0.0;
  for (const GridFunction& phi : trials) {
    const double denom = lp_norm(phi, p);
    if (denom == 0.0) continue;
    best = std::max(best, shift_lp_norm(shift, phi, p) / denom);
  }
  return best;
}

nlohmann::json DominationReport::to_json() const {
  nlohmann::json j;
  j["fitted_c"] = fitted_c;
  j["k_max"] = k_max;
  j["per_k_l1"] = per_k_l1;
  j["family_cubes"] = family.cubes.size();
  j["lhs_l2"] = lp_norm(lhs, 2.0);
  j["maximal_l2"] = lp_norm(maximal_f, 2.0);
  j["shift_sum_l2"] = lp_norm(shift_sum, 2.0);
  return j;
}

DominationReport dominate_with_field(const KernelSpec& kernel, const TruncationField& field,
                                     const GridFunction& f, const Box& q0,
                                     const DominationOptions& options) {
  for (std::int64_t i = 0; i < f.cell_count(); ++i)
    if (f.values[i] != 0.0 && !q0.contains_point(f.cell_center(i)))
      throw std::invalid_argument("dominate: f must be supported in Q0");

  DominationReport report;
  GridFunction lhs_raw = options.mode == DominationMode::Maximal
                             ? maximal_truncation(field)
                             : vq_operator(field, options.q, options.threads);
  report.lhs = restrict_centers(lhs_raw, q0);
  report.family = build_sparse(report.lhs, q0, options.lambda);
  report.maximal_f = maximal(f, std::nullopt, options.threads);

  int k_max = options.k_max;
  if (k_max < 0) {
    k_max = 0;
    while (std::ldexp(f.h(), k_max) < 4.0 * diameter(q0)) ++k_max;
    k_max += 2;
  }
  report.k_max = k_max;

  const GridFunction af = abs_of(f);
  const PrefixIntegral af_prefix(af);
  report.shift_sum = GridFunction::constant(f.domain, f.n, 0.0);
  const double hd = std::pow(f.h(), f.dim());

  for (int k = 0; k <= k_max; ++k) {
    const double wk = kernel.omega(std::ldexp(1.0, -k));
    const RhoSplit split = rho_map(report.family, k);
    GridFunction level = GridFunction::constant(f.domain, f.n, 0.0);
    for (const PositiveShift& shift : split.shifts) {
      const GridFunction applied = apply_with_prefix(shift, af, af_prefix);
      for (size_t i = 0; i < level.values.size(); ++i) level.values[i] += applied.values[i];
    }
    double l1 = 0.0;
    for (std::int64_t i = 0; i < level.cell_count(); ++i) {
      if (!q0.contains_point(level.cell_center(i))) continue;
      l1 += std::fabs(level.values[i]) * hd;
    }
    report.per_k_l1.push_back(wk * l1);
    for (size_t i = 0; i < level.values.size(); ++i)
      report.shift_sum.values[i] += wk * level.values[i];
  }

  const double lhs_max = report.lhs.max_abs();
  if (lhs_max == 0.0) {
    report.fitted_c = 0.0;
    return report;
  }
  const double floor_val = 1e-14 * lhs_max;
  double fitted = 0.0;
  for (std::int64_t i = 0; i < f.cell_count(); ++i) {
    if (!q0.contains_point(f.cell_center(i))) continue;
    const double denom =
        std::max(report.maximal_f.values[i] + report.shift_sum.values[i], floor_val);
    fitted = std::max(fitted, report.lhs.values[i] / denom);
  }
  report.fitted_c = fitted;
  return report;
}

DominationReport dominate(const KernelSpec& kernel, const CutoffSpec& cutoff,
                          const GridFunction& f, const Box& q0,
                          const DominationOptions& options) {
  const auto eps = geometric_eps_grid(f, options.eps_per_octave);
  const TruncationField field = truncation_curves(kernel, cutoff, f, eps, options.threads);
  return dominate_with_field(kernel, field, f, q0, options);
}

}  // namespace sparsedom
