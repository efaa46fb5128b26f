#include "sparsedom/variation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsedom/parallel.hpp"

namespace sparsedom {

VariationResult vq_sequence(std::span<const double> y, double q) {
  if (q < 1.0) throw std::invalid_argument("vq_sequence: q must be >= 1");
  if (y.empty()) throw std::invalid_argument("vq_sequence: empty sequence");
  const int n = static_cast<int>(y.size());
  VariationResult result;
  if (n == 1) {
    result.witness = {0};
    return result;
  }

  // Normalize by the largest gap so |gap|^q stays in range for large q.
  double scale = 0.0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) scale = std::max(scale, std::fabs(y[i] - y[j]));
  if (scale == 0.0) {
    result.witness = {0};
    return result;
  }

  std::vector<double> best(n, 0.0);
  std::vector<int> prev(n, -1);
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double cand = best[i] + std::pow(std::fabs(y[j] - y[i]) / scale, q);
      if (cand > best[j]) {
        best[j] = cand;
        prev[j] = i;
      }
    }
  }
  int arg = 0;
  for (int j = 1; j < n; ++j)
    if (best[j] > best[arg]) arg = j;

  result.value = scale * std::pow(best[arg], 1.0 / q);
  for (int j = arg; j >= 0; j = prev[j]) result.witness.push_back(j);
  std::reverse(result.witness.begin(), result.witness.end());
  return result;
}

GridFunction vq_operator(const TruncationField& field, double q, int threads) {
  if (q < 1.0) throw std::invalid_argument("vq_operator: q must be >= 1");
  GridFunction out = field.footprint;
  const std::size_t m = field.eps_count();
  parallel_for(0, out.cell_count(), threads, [&](std::int64_t i) {
    out.values[i] = vq_sequence(std::span<const double>(field.curve(i), m), q).value;
  });
  return out;
}

GridFunction vq_operator(const KernelSpec& kernel, const CutoffSpec& cutoff,
                         const GridFunction& f, double q, const std::vector<double>& eps_grid,
                         int threads) {
  return vq_operator(truncation_curves(kernel, cutoff, f, eps_grid, threads), q, threads);
}

}  // namespace sparsedom
