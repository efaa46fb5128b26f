#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "sparsedom/signal.hpp"

namespace sparsedom {

/// Strictly positive grid weight with a small memo for characteristic values.
class Weight {
 public:
  explicit Weight(GridFunction w);

  const GridFunction& grid() const { return g_; }

  double cached_or_compute(const std::string& key,
                           const std::function<double()>& compute) const;

 private:
  GridFunction g_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, double> cache_;
};

/// Deterministic cube family for characteristic suprema: every cube of the
/// three shifted dyadic systems with side in [h, domain side] clipped to the
/// domain, plus the domain itself.  A finite lower bound for the continuum sup.
std::vector<Box> characteristic_cube_family(const Box& domain, double h);

/// [w]_{A_p} = sup_Q <w>_Q <w^{1/(1-p)}>_Q^{p-1} over the family.
double ap_char(const Weight& w, double p, const std::vector<Box>& cubes);

/// Joint characteristic [w, sigma]_{A_p} = sup_Q <w>_Q <sigma>_Q^{p-1}.
double joint_ap(const Weight& w, const Weight& sigma, double p, const std::vector<Box>& cubes);

/// Fujii-Wilson [w]_{A_infty} = sup_Q w(Q)^-1 int_Q M(1_Q w), with the
/// maximal function restricted to subcubes of Q.
double ainfty(const Weight& w, const std::vector<Box>& cubes, int threads = 0);

/// |x|^alpha sampled at cell centers; the cells touching the origin get the
/// exact analytic cell average so the weight stays finite and positive.
Weight power_weight(double alpha, const Box& domain, int n);

/// Piecewise-constant weight from breakpoints (d = 1).
Weight step_weight(const std::vector<double>& breakpoints, const std::vector<double>& values,
                   const Box& domain, int n);

double weighted_norm(const GridFunction& g, const Weight& w, double p);

}  // namespace sparsedom
