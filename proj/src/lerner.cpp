#include "sparsedom/lerner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace sparsedom {

namespace {

// Root window of q0 inside g's grid: per-axis cell offset plus cell count,
// which must be a power of two for the bisection tree.
struct RootWindow {
  std::array<int, kMaxDim> offset{};
  int cells = 1;
  int levels = 0;
};

RootWindow locate_root(const GridFunction& g, const Box& q0) {
  const double h = g.h();
  RootWindow w;
  for (int a = 0; a < g.dim(); ++a) {
    const double off = (q0.lo(a) - g.domain.lo(a)) / h;
    w.offset[a] = static_cast<int>(std::llround(off));
    if (std::fabs(off - w.offset[a]) > 1e-9 || w.offset[a] < 0)
      throw std::invalid_argument("sparse family: q0 must be cell aligned");
  }
  const double cells = q0.side / h;
  w.cells = static_cast<int>(std::llround(cells));
  if (std::fabs(cells - w.cells) > 1e-9 || w.cells < 1)
    throw std::invalid_argument("sparse family: q0 must be cell aligned");
  while ((1 << w.levels) < w.cells) ++w.levels;
  if ((1 << w.levels) != w.cells)
    throw std::invalid_argument("sparse family: q0 cell count must be a power of two");
  for (int a = 0; a < g.dim(); ++a)
    if (w.offset[a] + w.cells > g.n)
      throw std::invalid_argument("sparse family: q0 exceeds the grid");
  return w;
}

struct CubeKey {
  int level;
  std::array<int, kMaxDim> pos;
};

std::uint64_t key_of(const CubeKey& c) {
  return (static_cast<std::uint64_t>(c.level) << 48) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.pos[1])) << 24) |
         static_cast<std::uint32_t>(c.pos[0]);
}

class CubeStats {
 public:
  CubeStats(const GridFunction& g, const RootWindow& win, double lambda)
      : g_(g), win_(win), lambda_(lambda), dim_(g.dim()) {}

  int size_at(int level) const { return win_.cells >> level; }

  std::int64_t cell_count(int level) const {
    const std::int64_t s = size_at(level);
    return dim_ == 1 ? s : s * s;
  }

  void gather(const CubeKey& c, std::vector<double>* out) const {
    const int sz = size_at(c.level);
    out->clear();
    if (dim_ == 1) {
      const int x0 = win_.offset[0] + c.pos[0] * sz;
      out->insert(out->end(), g_.values.begin() + x0, g_.values.begin() + x0 + sz);
    } else {
      const int x0 = win_.offset[0] + c.pos[0] * sz;
      const int y0 = win_.offset[1] + c.pos[1] * sz;
      for (int y = y0; y < y0 + sz; ++y)
        out->insert(out->end(), g_.values.begin() + g_.index(x0, y),
                    g_.values.begin() + g_.index(x0, y) + sz);
    }
  }

  // Lower median over the cube's cells.
  double median(const CubeKey& c) {
    return stats(c).first;
  }

  // Local mean oscillation over the cube's cells: shortest value window
  // keeping all but floor(lambda * cells) of them, halved.
  double oscillation(const CubeKey& c) {
    return stats(c).second;
  }

  std::pair<double, double> stats(const CubeKey& c) {
    const auto key = key_of(c);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    gather(c, &scratch_);
    std::sort(scratch_.begin(), scratch_.end());
    const auto cnt = static_cast<std::int64_t>(scratch_.size());
    const double med = scratch_[static_cast<size_t>((cnt - 1) / 2)];
    const auto allowed_out = static_cast<std::int64_t>(
        std::floor(lambda_ * static_cast<double>(cnt) + 1e-9));
    const std::int64_t need = cnt - allowed_out;
    double osc = 0.0;
    if (need >= 2) {
      osc = std::numeric_limits<double>::infinity();
      for (std::int64_t i = 0; i + need <= cnt; ++i)
        osc = std::min(osc, 0.5 * (scratch_[static_cast<size_t>(i + need - 1)] -
                                   scratch_[static_cast<size_t>(i)]));
    }
    const auto result = std::make_pair(med, osc);
    memo_.emplace(key, result);
    return result;
  }

 private:
  const GridFunction& g_;
  RootWindow win_;
  double lambda_;
  int dim_;
  std::vector<double> scratch_;
  std::unordered_map<std::uint64_t, std::pair<double, double>> memo_;
};

}  // namespace

Box SparseFamily::cube_box(int idx) const {
  const SparseCube& c = cubes.at(static_cast<size_t>(idx));
  Box b;
  b.dim = dim;
  b.side = cube_side(c.level);
  for (int a = 0; a < dim; ++a) b.corner[a] = root.lo(a) + c.pos[a] * b.side;
  return b;
}

Box SparseFamily::cube_parent_box(int idx) const {
  const SparseCube& c = cubes.at(static_cast<size_t>(idx));
  if (c.level == 0) return root;
  Box b;
  b.dim = dim;
  b.side = cube_side(c.level - 1);
  for (int a = 0; a < dim; ++a) b.corner[a] = root.lo(a) + (c.pos[a] / 2) * b.side;
  return b;
}

double SparseFamily::cube_side(int level) const {
  return cell_width * static_cast<double>(cells_per_axis >> level);
}

double SparseFamily::core_measure(int idx) const {
  const double hd = dim == 1 ? cell_width : cell_width * cell_width;
  return static_cast<double>(cubes.at(static_cast<size_t>(idx)).core_cells) * hd;
}

nlohmann::json SparseFamily::to_json() const {
  nlohmann::json j;
  j["root"]["side"] = root.side;
  j["root"]["corner"] = std::vector<double>(root.corner.begin(), root.corner.begin() + dim);
  j["cells_per_axis"] = cells_per_axis;
  auto& arr = j["cubes"] = nlohmann::json::array();
  for (int i = 0; i < static_cast<int>(cubes.size()); ++i) {
    const SparseCube& c = cubes[static_cast<size_t>(i)];
    nlohmann::json e;
    e["level"] = c.level;
    e["pos"] = std::vector<int>(c.pos.begin(), c.pos.begin() + dim);
    e["core_measure"] = core_measure(i);
    e["measure"] = static_cast<double>(c.cells) *
                   (dim == 1 ? cell_width : cell_width * cell_width);
    arr.push_back(std::move(e));
  }
  return j;
}

SparseFamily build_sparse(const GridFunction& g, const Box& q0, double lambda) {
  const int d = g.dim();
  const double lambda_cap = std::ldexp(1.0, -d - 2);
  if (!(lambda > 0.0 && lambda <= lambda_cap * (1.0 + 1e-12)))
    throw std::invalid_argument("build_sparse: lambda must lie in (0, 2^-(d+2)]");
  const RootWindow win = locate_root(g, q0);
  CubeStats stats(g, win, lambda);

  SparseFamily fam;
  fam.root = q0;
  fam.dim = d;
  fam.cell_width = g.h();
  fam.cell_offset = win.offset;
  fam.cells_per_axis = win.cells;
  fam.levels = win.levels;

  struct Active {
    CubeKey key;
    int family_index;
  };
  std::vector<Active> stack;
  fam.cubes.push_back(SparseCube{0, {0, 0}, stats.cell_count(0), stats.cell_count(0), -1});
  stack.push_back({CubeKey{0, {0, 0}}, 0});

  std::vector<CubeKey> selected;
  while (!stack.empty()) {
    const Active active = stack.back();
    stack.pop_back();
    const CubeKey q = active.key;
    if (q.level > fam.levels)
      throw std::runtime_error("build_sparse: recursion exceeded the cell-scale depth cap");
    if (q.level == fam.levels) continue;  // single cell, nothing below

    const double med_q = stats.median(q);
    double tau = 4.0 * stats.oscillation(q);

    // Maximal subcubes whose median deviation or oscillation exceeds tau;
    // raise tau until they cover at most half of q.
    const std::int64_t cell_budget = stats.cell_count(q.level);
    for (int rounds = 0;; ++rounds) {
      if (rounds > 200) throw std::logic_error("build_sparse: threshold loop failed to settle");
      selected.clear();
      double min_stat = std::numeric_limits<double>::infinity();
      std::int64_t covered = 0;

      std::vector<CubeKey> walk;
      auto push_children = [&](const CubeKey& c) {
        const int children = d == 1 ? 2 : 4;
        for (int t = 0; t < children; ++t) {
          CubeKey child{c.level + 1, {c.pos[0] * 2 + (t & 1), c.pos[1] * 2 + (t >> 1)}};
          if (d == 1) child.pos[1] = 0;
          walk.push_back(child);
        }
      };
      push_children(q);
      while (!walk.empty()) {
        const CubeKey c = walk.back();
        walk.pop_back();
        const auto [med_c, osc_c] = stats.stats(c);
        const double stat = std::max(std::fabs(med_c - med_q), osc_c);
        if (stat > tau) {
          selected.push_back(c);
          covered += stats.cell_count(c.level);
          min_stat = std::min(min_stat, stat);
        } else if (c.level < fam.levels) {
          push_children(c);
        }
      }

      if (2 * covered <= cell_budget) break;
      tau = std::max(2.0 * tau, min_stat);
    }

    // Deterministic family order regardless of the DFS walk.
    std::sort(selected.begin(), selected.end(), [](const CubeKey& a, const CubeKey& b) {
      if (a.level != b.level) return a.level < b.level;
      if (a.pos[1] != b.pos[1]) return a.pos[1] < b.pos[1];
      return a.pos[0] < b.pos[0];
    });

    std::int64_t covered = 0;
    for (const CubeKey& c : selected) {
      covered += stats.cell_count(c.level);
      fam.cubes.push_back(
          SparseCube{c.level, c.pos, stats.cell_count(c.level), stats.cell_count(c.level),
                     active.family_index});
      stack.push_back({c, static_cast<int>(fam.cubes.size()) - 1});
    }
    fam.cubes[static_cast<size_t>(active.family_index)].core_cells =
        stats.cell_count(q.level) - covered;
  }
  return fam;
}

GridFunction sharp_max(const GridFunction& g, const Box& q0, double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5))
    throw std::invalid_argument("sharp_max: lambda must lie in (0, 1/2)");
  const RootWindow win = locate_root(g, q0);
  CubeStats stats(g, win, lambda);
  const int d = g.dim();

  GridFunction out = GridFunction::constant(g.domain, g.n, 0.0);

  // Push the running ancestor-sup down the bisection tree level by level.
  std::vector<double> best(1, 0.0);
  for (int level = 0; level <= win.levels; ++level) {
    const int per_axis = 1 << level;
    const int rows = d == 1 ? 1 : per_axis;
    std::vector<double> current(static_cast<size_t>(per_axis) * rows, 0.0);
    for (int y = 0; y < rows; ++y)
      for (int x = 0; x < per_axis; ++x) {
        CubeKey c{level, {x, d == 1 ? 0 : y}};
        const double inherited =
            level == 0 ? 0.0
                       : best[static_cast<size_t>(y / 2) * (static_cast<size_t>(per_axis) / 2) +
                              static_cast<size_t>(x / 2)];
        current[static_cast<size_t>(y) * per_axis + x] =
            std::max(inherited, stats.oscillation(c));
      }
    best.swap(current);
  }

  const int n_cells = win.cells;
  for (int y = 0; y < (d == 1 ? 1 : n_cells); ++y)
    for (int x = 0; x < n_cells; ++x) {
      const double v = best[static_cast<size_t>(y) * n_cells + x];
      const int gx = win.offset[0] + x;
      const int gy = d == 1 ? 0 : win.offset[1] + y;
      out.values[out.index(gx, gy)] = v;
    }
  return out;
}

LernerBound lerner_bound(const GridFunction& g, const Box& q0, double lambda) {
  LernerBound result;
  result.family = build_sparse(g, q0, lambda);
  result.rhs = sharp_max(g, q0, lambda);

  const SparseFamily& fam = result.family;
  const RootWindow win = locate_root(g, q0);
  const int d = g.dim();

  // Oscillation sum over the family: omega_lambda(g, parent(Q)) spread on Q.
  for (int i = 0; i < static_cast<int>(fam.cubes.size()); ++i) {
    const double osc_parent = oscillation(g, fam.cube_parent_box(i), lambda);
    if (osc_parent == 0.0) continue;
    const SparseCube& c = fam.cubes[static_cast<size_t>(i)];
    const int sz = fam.cells_per_axis >> c.level;
    const int x0 = win.offset[0] + c.pos[0] * sz;
    const int y0 = d == 1 ? 0 : win.offset[1] + c.pos[1] * sz;
    for (int y = y0; y < (d == 1 ? 1 : y0 + sz); ++y)
      for (int x = x0; x < x0 + sz; ++x)
        result.rhs.values[result.rhs.index(x, y)] += osc_parent;
  }

  const double med0 = median(g, q0);
  double gmax = 0.0;
  const int n_cells = win.cells;
  for (int y = 0; y < (d == 1 ? 1 : n_cells); ++y)
    for (int x = 0; x < n_cells; ++x)
      gmax = std::max(
          gmax, std::fabs(g.values[g.index(win.offset[0] + x,
                                           d == 1 ? 0 : win.offset[1] + y)]));
  if (gmax == 0.0) {
    result.fitted_c = 0.0;
    return result;
  }
  const double floor_val = 1e-14 * gmax;
  double fitted = 0.0;
  for (int y = 0; y < (d == 1 ? 1 : n_cells); ++y)
    for (int x = 0; x < n_cells; ++x) {
      const int gx = win.offset[0] + x;
      const int gy = d == 1 ? 0 : win.offset[1] + y;
      const double lhs = std::fabs(g.values[g.index(gx, gy)] - med0);
      const double rhs = std::max(result.rhs.values[result.rhs.index(gx, gy)], floor_val);
      fitted = std::max(fitted, lhs / rhs);
    }
  result.fitted_c = fitted;
  return result;
}

}  // namespace sparsedom
