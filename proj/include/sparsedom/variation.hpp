#pragma once

#include <span>
#include <vector>

#include "sparsedom/czop.hpp"

namespace sparsedom {

/// V^q norm of a finite sequence together with a maximizing subsequence.
struct VariationResult {
  double value = 0.0;
  std::vector<int> witness;  // strictly increasing indices attaining value
};

/// sup over increasing index subsequences of (sum |y_{i_{k+1}} - y_{i_k}|^q)^(1/q),
/// by the O(n^2) dynamic program f(j) = max_{i<j} f(i) + |y_j - y_i|^q.
/// A single point has variation 0.
VariationResult vq_sequence(std::span<const double> y, double q);

/// V_q^phi T f: per cell, the V^q norm of the truncation curve.
GridFunction vq_operator(const TruncationField& field, double q, int threads = 0);
GridFunction vq_operator(const KernelSpec& kernel, const CutoffSpec& cutoff,
                         const GridFunction& f, double q, const std::vector<double>& eps_grid,
                         int threads = 0);

}  // namespace sparsedom
