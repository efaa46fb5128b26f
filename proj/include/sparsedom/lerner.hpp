#pragma once

#include <vector>

#include "sparsedom/signal.hpp"

#include <json.hpp>

namespace sparsedom {

/// One cube of a sparse family, addressed inside the root-anchored dyadic
/// grid: `level` bisections below the root, position `pos` per axis.
struct SparseCube {
  int level = 0;
  std::array<int, kMaxDim> pos{};
  std::int64_t cells = 0;       // cell count of the cube
  std::int64_t core_cells = 0;  // |E(Q)| in cells (exact)
  int parent = -1;              // family index of the selecting cube, -1 for the root
};

/// Collection L of dyadic subcubes of Q0 whose cores E(Q) = Q minus the
/// strictly smaller family cubes are pairwise disjoint with |E(Q)| >= |Q|/2.
struct SparseFamily {
  Box root;
  int dim = 1;
  double cell_width = 1.0;             // h of the generating grid
  std::array<int, kMaxDim> cell_offset{};  // root window offset in that grid
  int cells_per_axis = 1;              // N, a power of two
  int levels = 0;                      // log2 N
  std::vector<SparseCube> cubes;       // cubes[0] is the root

  Box cube_box(int idx) const;
  Box cube_parent_box(int idx) const;  // dyadic parent; the root maps to itself
  double cube_side(int level) const;
  double core_measure(int idx) const;

  nlohmann::json to_json() const;
};

/// Local-mean-oscillation stopping construction of a sparse family for g on
/// the cell-aligned cube q0 (whose cell count per axis must be a power of
/// two).  At each active cube the maximal subcubes with median deviation or
/// oscillation above an adaptive threshold are selected; the threshold is
/// raised until the selection covers at most half of the cube, which makes
/// the core bound unconditional.
SparseFamily build_sparse(const GridFunction& g, const Box& q0, double lambda);

/// M^#_{lambda,Q0} g: per cell, the sup of the local mean oscillation over
/// dyadic subcubes of q0 containing the cell.  Zero outside q0.
GridFunction sharp_max(const GridFunction& g, const Box& q0, double lambda);

struct LernerBound {
  GridFunction rhs;      // sharp maximal part plus the sparse oscillation sum
  double fitted_c = 0.0; // max over Q0 cells of |g - median| / rhs (floored)
  SparseFamily family;
};

/// Pointwise bound of |g - median(g, Q0)| by sharp_max + sparse oscillation
/// sum over parents; fitted_c is the smallest constant making it hold on the
/// grid (with a relative floor against 0/0).
LernerBound lerner_bound(const GridFunction& g, const Box& q0, double lambda);

}  // namespace sparsedom
