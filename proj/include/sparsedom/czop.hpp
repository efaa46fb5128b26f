#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sparsedom/signal.hpp"

namespace sparsedom {

/// Singular kernel with the standard size bound |K(x,y)| <= C |x-y|^-d and
/// a modulus of continuity omega controlling smoothness off the diagonal.
struct KernelSpec {
  int dim = 1;
  std::string name;
  double size_constant = 1.0;
  std::function<double(const Point&, const Point&)> eval;
  std::function<double(double)> omega;
};

KernelSpec hilbert_kernel();                 // d = 1, K = 1/(pi (x-y)), omega(t) = t
KernelSpec riesz_kernel(int component);      // d = 2, K_j = (x_j-y_j)/(2 pi |x-y|^3)

/// Kernel lookup for experiment configs ("hilbert", "riesz0", "riesz1").
KernelSpec kernel_by_name(const std::string& name);

/// Radial truncation profile: 1_{r>=1} <= phi(r) <= 1_{r>=1/2}, nondecreasing.
/// The smooth kind is a quintic smoothstep ramp, so phi' is Lipschitz.
struct CutoffSpec {
  enum class Kind { Sharp, Smooth };
  Kind kind = Kind::Smooth;

  double operator()(double r) const;
  double derivative(double r) const;  // zero for the sharp kind

  static CutoffSpec sharp() { return CutoffSpec{Kind::Sharp}; }
  static CutoffSpec smooth() { return CutoffSpec{Kind::Smooth}; }
};

/// Geometric epsilon grid eps_j = base_mult*h * 2^(j/per_octave), capped at
/// 2*diam(domain).
std::vector<double> geometric_eps_grid(const GridFunction& f, int per_octave = 2,
                                       double base_mult = 4.0);

/// T_eps^phi f by midpoint quadrature over cells; requires eps >= 4h so the
/// cutoff removes the singular diagonal cells.
GridFunction truncated_apply(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps,
                             const GridFunction& f, int threads = 0);

/// Pointwise evaluation of T_eps^phi f at one point (same quadrature).
double truncated_apply_at(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps,
                          const GridFunction& f, const Point& x);

/// All truncation curves eps -> T_eps^phi f(x) at once.  Kernel values are
/// computed once per (x, y) pair and distributed across the eps grid, so the
/// cost is O(cells^2) nearly independent of the grid size.
struct TruncationField {
  std::vector<double> epsilons;
  GridFunction footprint;        // grid geometry of f
  std::vector<double> curves;    // curves[cell * epsilons.size() + j]

  std::size_t eps_count() const { return epsilons.size(); }
  const double* curve(std::int64_t cell) const {
    return curves.data() + static_cast<std::size_t>(cell) * epsilons.size();
  }
};

TruncationField truncation_curves(const KernelSpec& kernel, const CutoffSpec& cutoff,
                                  const GridFunction& f, const std::vector<double>& eps_grid,
                                  int threads = 0);

/// T_*^phi f over the epsilon grid: pointwise sup of |T_eps^phi f|.
GridFunction maximal_truncation(const TruncationField& field);
GridFunction maximal_truncation(const KernelSpec& kernel, const CutoffSpec& cutoff,
                                const GridFunction& f, const std::vector<double>& eps_grid,
                                int threads = 0);

/// Hilbert transform of a cell-constant function by exact per-cell
/// integration of the kernel (principal value at the diagonal cell).
GridFunction hilbert_transform(const GridFunction& f, int threads = 0);

/// Dini-type functionals of a modulus of continuity.
struct DiniSums {
  double s0 = 0.0;  // sum_{k<=K} omega(2^-k)
  double s1 = 0.0;  // sum_{k<=K} k omega(2^-k)
  double i0 = 0.0;  // int_0^1 omega(t) dt/t
  double i1 = 0.0;  // int_0^1 omega(t) log(1/t) dt/t
};
DiniSums dini_sums(const std::function<double(double)>& omega, int k_max);

/// Sampled audit of the size and smoothness bounds; reports fitted constants
/// (max of |K| |x-y|^d, and of the modulus ratio over admissible triples).
struct KernelAudit {
  double size_fitted = 0.0;
  double smoothness_fitted = 0.0;
};
KernelAudit audit_kernel(const KernelSpec& kernel, const Box& sample_box, int samples,
                         unsigned long long seed);

/// The truncated kernel K_eps^phi as a KernelSpec (for uniformity audits).
KernelSpec truncated_kernel(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps);

}  // namespace sparsedom
