#include "sparsedom/czop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sparsedom/parallel.hpp"
#include "sparsedom/quadrature.hpp"

namespace sparsedom {

namespace {

constexpr double kPi = 3.14159265358979323846;

double distance(const Point& x, const Point& y, int dim) {
  if (dim == 1) return std::fabs(x[0] - y[0]);
  return std::hypot(x[0] - y[0], x[1] - y[1]);
}

}  // namespace

KernelSpec hilbert_kernel() {
  KernelSpec k;
  k.dim = 1;
  k.name = "hilbert";
  k.size_constant = 1.0 / kPi;
  k.eval = [](const Point& x, const Point& y) { return 1.0 / (kPi * (x[0] - y[0])); };
  k.omega = [](double t) { return t; };
  return k;
}

KernelSpec riesz_kernel(int component) {
  if (component < 0 || component > 1)
    throw std::invalid_argument("riesz_kernel: component must be 0 or 1");
  KernelSpec k;
  k.dim = 2;
  k.name = component == 0 ? "riesz0" : "riesz1";
  k.size_constant = 1.0 / (2.0 * kPi);
  k.eval = [component](const Point& x, const Point& y) {
    const double dx = x[0] - y[0], dy = x[1] - y[1];
    const double r = std::hypot(dx, dy);
    return (component == 0 ? dx : dy) / (2.0 * kPi * r * r * r);
  };
  k.omega = [](double t) { return t; };
  return k;
}

KernelSpec kernel_by_name(const std::string& name) {
  if (name == "hilbert") return hilbert_kernel();
  if (name == "riesz0") return riesz_kernel(0);
  if (name == "riesz1") return riesz_kernel(1);
  throw std::invalid_argument("unknown kernel: " + name);
}

double CutoffSpec::operator()(double r) const {
  if (kind == Kind::Sharp) return r >= 1.0 ? 1.0 : 0.0;
  if (r <= 0.5) return 0.0;
  if (r >= 1.0) return 1.0;
  const double s = 2.0 * r - 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double CutoffSpec::derivative(double r) const {
  if (kind == Kind::Sharp) return 0.0;
  if (r <= 0.5 || r >= 1.0) return 0.0;
  const double s = 2.0 * r - 1.0;
  const double omse = 1.0 - s;
  return 2.0 * 30.0 * s * s * omse * omse;
}

std::vector<double> geometric_eps_grid(const GridFunction& f, int per_octave, double base_mult) {
  if (per_octave < 1) throw std::invalid_argument("geometric_eps_grid: per_octave >= 1");
  const double base = base_mult * f.h();
  const double cap = 2.0 * diameter(f.domain) * (1.0 + 1e-12);
  std::vector<double> eps;
  for (int j = 0;; ++j) {
    const double e = base * std::pow(2.0, static_cast<double>(j) / per_octave);
    if (e > cap && !eps.empty()) break;
    eps.push_back(e);
    if (e > cap) break;
  }
  return eps;
}

GridFunction truncated_apply(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps,
                             const GridFunction& f, int threads) {
  if (kernel.dim != f.dim()) throw std::invalid_argument("truncated_apply: dimension mismatch");
  if (eps < 4.0 * f.h() * (1.0 - 1e-12))
    throw std::invalid_argument("truncated_apply: eps must be at least 4h");
  GridFunction out = GridFunction::constant(f.domain, f.n, 0.0);
  parallel_for(0, f.cell_count(), threads, [&](std::int64_t i) {
    out.values[i] = truncated_apply_at(kernel, cutoff, eps, f, f.cell_center(i));
  });
  return out;
}

double truncated_apply_at(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps,
                          const GridFunction& f, const Point& x) {
  if (eps < 4.0 * f.h() * (1.0 - 1e-12))
    throw std::invalid_argument("truncated_apply_at: eps must be at least 4h");
  const double hd = std::pow(f.h(), f.dim());
  double acc = 0.0;
  for (std::int64_t j = 0; j < f.cell_count(); ++j) {
    const double fy = f.values[j];
    if (fy == 0.0) continue;
    const Point y = f.cell_center(j);
    const double r = distance(x, y, f.dim()) / eps;
    const double w = cutoff(r);
    if (w == 0.0) continue;
    acc += w * kernel.eval(x, y) * fy;
  }
  return acc * hd;
}

TruncationField truncation_curves(const KernelSpec& kernel, const CutoffSpec& cutoff,
                                  const GridFunction& f, const std::vector<double>& eps_grid,
                                  int threads) {
  if (eps_grid.empty()) throw std::invalid_argument("truncation_curves: empty eps grid");
  if (!std::is_sorted(eps_grid.begin(), eps_grid.end()))
    throw std::invalid_argument("truncation_curves: eps grid must be increasing");
  if (eps_grid.front() < 4.0 * f.h() * (1.0 - 1e-12))
    throw std::invalid_argument("truncation_curves: eps grid must start at >= 4h");
  if (kernel.dim != f.dim()) throw std::invalid_argument("truncation_curves: dimension mismatch");

  TruncationField field;
  field.epsilons = eps_grid;
  field.footprint = GridFunction::constant(f.domain, f.n, 0.0);
  const std::size_t m = eps_grid.size();
  field.curves.assign(static_cast<std::size_t>(f.cell_count()) * m, 0.0);

  const double hd = std::pow(f.h(), f.dim());
  const bool smooth = cutoff.kind == CutoffSpec::Kind::Smooth;

  parallel_for(0, f.cell_count(), threads, [&](std::int64_t i) {
    const Point x = f.cell_center(i);
    double* curve = field.curves.data() + static_cast<std::size_t>(i) * m;
    std::vector<double> full_bucket(m, 0.0);
    for (std::int64_t j = 0; j < f.cell_count(); ++j) {
      const double fy = f.values[j];
      if (fy == 0.0) continue;
      const Point y = f.cell_center(j);
      const double z = distance(x, y, f.dim());
      const double c = kernel.eval(x, y) * fy;
      // Full weight for eps <= z; transition band only for the smooth kind.
      auto it = std::upper_bound(eps_grid.begin(), eps_grid.end(), z);
      const auto jz = static_cast<std::ptrdiff_t>(it - eps_grid.begin()) - 1;
      if (jz >= 0) full_bucket[static_cast<std::size_t>(jz)] += c;
      if (smooth) {
        for (std::size_t jj = static_cast<std::size_t>(jz + 1); jj < m; ++jj) {
          const double r = z / eps_grid[jj];
          if (r <= 0.5) break;
          curve[jj] += cutoff(r) * c;
        }
      }
    }
    // full_bucket[k] applies to every eps index <= k.
    double suffix = 0.0;
    for (std::size_t jj = m; jj-- > 0;) {
      suffix += full_bucket[jj];
      curve[jj] = (curve[jj] + suffix) * hd;
    }
  });
  return field;
}

GridFunction maximal_truncation(const TruncationField& field) {
  if (field.epsilons.empty()) throw std::invalid_argument("maximal_truncation: empty eps grid");
  GridFunction out = field.footprint;
  const std::size_t m = field.eps_count();
  for (std::int64_t i = 0; i < out.cell_count(); ++i) {
    const double* curve = field.curve(i);
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) best = std::max(best, std::fabs(curve[j]));
    out.values[i] = best;
  }
  return out;
}

GridFunction maximal_truncation(const KernelSpec& kernel, const CutoffSpec& cutoff,
                                const GridFunction& f, const std::vector<double>& eps_grid,
                                int threads) {
  return maximal_truncation(truncation_curves(kernel, cutoff, f, eps_grid, threads));
}

GridFunction hilbert_transform(const GridFunction& f, int threads) {
  if (f.dim() != 1) throw std::invalid_argument("hilbert_transform: 1-d only");
  GridFunction out = GridFunction::constant(f.domain, f.n, 0.0);
  const double h = f.h();
  const double lo = f.domain.corner[0];
  parallel_for(0, f.cell_count(), threads, [&](std::int64_t i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * h;
    // sum_j v_j * (ln|x - e_j| - ln|x - e_{j+1}|), edges e_j = lo + j h;
    // the diagonal cell vanishes by symmetry (principal value).
    double acc = 0.0;
    double log_prev = std::log(std::fabs(x - lo));
    for (std::int64_t j = 0; j < f.n; ++j) {
      const double edge = lo + static_cast<double>(j + 1) * h;
      const double log_next = std::log(std::fabs(x - edge));
      if (j != i && f.values[j] != 0.0) acc += f.values[j] * (log_prev - log_next);
      log_prev = log_next;
    }
    out.values[i] = acc / kPi;
  });
  return out;
}

DiniSums dini_sums(const std::function<double(double)>& omega, int k_max) {
  if (!std::isfinite(omega(1.0))) throw std::invalid_argument("dini_sums: omega(1) not finite");
  DiniSums d;
  for (int k = 0; k <= k_max; ++k) {
    const double w = omega(std::ldexp(1.0, -k));
    d.s0 += w;
    d.s1 += k * w;
  }
  // Substituting t = e^-s turns dt/t into ds; integrate to t ~ 1e-26.
  const double s_max = 60.0;
  auto g0 = [&](double s) { return omega(std::exp(-s)); };
  auto g1 = [&](double s) { return omega(std::exp(-s)) * s; };
  d.i0 = adaptive_integrate(g0, 0.0, s_max, 1e-11);
  d.i1 = adaptive_integrate(g1, 0.0, s_max, 1e-11);
  return d;
}

KernelAudit audit_kernel(const KernelSpec& kernel, const Box& sample_box, int samples,
                         unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_point = [&] {
    Point p{};
    for (int a = 0; a < kernel.dim; ++a)
      p[a] = sample_box.lo(a) + unit(rng) * sample_box.side;
    return p;
  };

  KernelAudit audit;
  const int d = kernel.dim;
  for (int s = 0; s < samples; ++s) {
    const Point x = random_point();
    const Point y = random_point();
    const double dist = distance(x, y, d);
    if (dist < 1e-9 * sample_box.side) continue;
    audit.size_fitted =
        std::max(audit.size_fitted, std::fabs(kernel.eval(x, y)) * std::pow(dist, d));

    // Perturb x by at most dist/2 to stay in the smoothness regime.
    Point xp = x;
    double step = 0.0;
    for (int a = 0; a < d; ++a) {
      const double delta = (unit(rng) - 0.5) * 0.5 * dist / std::sqrt(static_cast<double>(d));
      xp[a] += delta;
      step += delta * delta;
    }
    step = std::sqrt(step);
    if (step < 1e-12 * dist || dist <= 2.0 * step) continue;
    const double w = kernel.omega(step / dist);
    if (w <= 0.0) continue;
    const double diff = std::fabs(kernel.eval(x, y) - kernel.eval(xp, y)) +
                        std::fabs(kernel.eval(y, x) - kernel.eval(y, xp));
    audit.smoothness_fitted =
        std::max(audit.smoothness_fitted, diff * std::pow(dist, d) / w);
  }
  return audit;
}

KernelSpec truncated_kernel(const KernelSpec& kernel, const CutoffSpec& cutoff, double eps) {
  KernelSpec k = kernel;
  k.name = kernel.name + "_eps";
  k.eval = [kernel, cutoff, eps](const Point& x, const Point& y) {
    double dist = (kernel.dim == 1) ? std::fabs(x[0] - y[0]) : std::hypot(x[0] - y[0], x[1] - y[1]);
    const double w = cutoff(dist / eps);
    return w == 0.0 ? 0.0 : w * kernel.eval(x, y);
  };
  return k;
}

}  // namespace sparsedom
