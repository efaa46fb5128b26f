#pragma once

#include <vector>

#include "sparsedom/czop.hpp"
#include "sparsedom/grid.hpp"
#include "sparsedom/lerner.hpp"
#include "sparsedom/variation.hpp"

#include <json.hpp>

namespace sparsedom {

/// Positive dyadic shift of complexity k: phi -> sum_R 1_R <phi>_{R^(k)}
/// over pairs (R, R^(k)) with R in one shifted dyadic system.
struct PositiveShift {
  std::array<int, kMaxDim> shift_thirds{};
  int complexity = 0;
  struct Pair {
    ShiftedDyadicCube base;      // R
    ShiftedDyadicCube ancestor;  // R^(k)
    int preimages = 0;           // family cubes mapped onto this R
  };
  std::vector<Pair> pairs;
};

/// Result of splitting a sparse family by the covering map rho_u at
/// complexity k: one shift per shift vector u, plus the per-cube assignment.
struct RhoSplit {
  std::vector<PositiveShift> shifts;         // only non-empty systems
  std::vector<int> assignment;               // family index -> shift index
  std::vector<ShiftedDyadicCube> covers;     // family index -> rho_u(Q)
};

/// Assign every family cube Q its shifted dyadic cover R = rho_u(Q) with
/// ell(R) = 4 ell(Q), Q ⊆ R and 2^k Q ⊆ R^(k); group by shift vector and
/// deduplicate repeated R (at most 4^d preimages each).
RhoSplit rho_map(const SparseFamily& family, int k);

/// S phi sampled at cell centers of phi's grid.
GridFunction shift_apply(const PositiveShift& shift, const GridFunction& phi);

/// ||S phi||_p computed exactly from the nested-cube fragment decomposition
/// (S phi is piecewise constant on it); the averages <phi>_{R^(k)} use exact
/// box integrals of the grid function phi.
double shift_lp_norm(const PositiveShift& shift, const GridFunction& phi, double p);

/// Weighted version: (int |S phi|^p w)^(1/p) with w a grid weight.
double shift_weighted_lp_norm(const PositiveShift& shift, const GridFunction& phi,
                              const GridFunction& w, double p);

/// max over trial functions of ||S phi||_p / ||phi||_p.
double shift_norm_ratio(const PositiveShift& shift, const std::vector<GridFunction>& trials,
                        double p);

enum class DominationMode { Maximal, Variation };

struct DominationOptions {
  double lambda = 0.125;  // oscillation level, default 2^-(d+2) in d = 1
  int k_max = -1;         // < 0: smallest k with 2^k h >= 4 diam(Q0), plus 2
  DominationMode mode = DominationMode::Maximal;
  double q = 3.0;         // variation exponent for DominationMode::Variation
  int eps_per_octave = 2;
  int threads = 0;
};

/// Outcome of the pointwise domination of T_*^phi f (or V_q^phi T f) by
/// Mf plus the weighted sum of positive shifts built from its sparse family.
struct DominationReport {
  GridFunction lhs;        // dominated operator on Q0 (zero outside)
  GridFunction maximal_f;  // Mf
  GridFunction shift_sum;  // sum_u sum_k omega(2^-k) S^u_k |f|
  double fitted_c = 0.0;   // max over Q0 cells of lhs / (Mf + shift_sum)
  int k_max = 0;
  std::vector<double> per_k_l1;  // ||omega(2^-k) sum_u S^u_k |f|||_{L^1(Q0)}
  SparseFamily family;

  nlohmann::json to_json() const;
};

DominationReport dominate(const KernelSpec& kernel, const CutoffSpec& cutoff,
                          const GridFunction& f, const Box& q0,
                          const DominationOptions& options);

/// Same assembly when the truncation curves are already available.
DominationReport dominate_with_field(const KernelSpec& kernel, const TruncationField& field,
                                     const GridFunction& f, const Box& q0,
                                     const DominationOptions& options);

}  // namespace sparsedom
