#include "sparsedom/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sparsedom/grid.hpp"
#include "sparsedom/parallel.hpp"

namespace sparsedom {

namespace {

bool same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.n != b.n || a.dim() != b.dim()) return false;
  const double tol = 1e-12 * std::max(1.0, std::fabs(a.domain.side));
  if (std::fabs(a.domain.side - b.domain.side) > tol) return false;
  for (int ax = 0; ax < a.dim(); ++ax)
    if (std::fabs(a.domain.corner[ax] - b.domain.corner[ax]) > tol) return false;
  return true;
}

struct WeightedValues {
  std::vector<std::pair<double, double>> entries;  // (value, mass)
  double total_mass = 0.0;
};

// Cell values of g seen by the box q, weighted by overlap measure; the part
// of q outside the domain enters as a zero-valued entry (zero extension).
WeightedValues collect_cells(const GridFunction& g, const Box& q) {
  if (!(q.side > 0.0)) throw std::invalid_argument("degenerate box");
  WeightedValues out;
  const double h = g.h();
  const int d = g.dim();

  std::array<int, 2> ilo{0, 0}, ihi{1, 1};
  std::array<std::vector<double>, 2> w;
  for (int ax = 0; ax < d; ++ax) {
    const double lo = g.domain.corner[ax];
    ilo[ax] = std::max(0, static_cast<int>(std::floor((q.lo(ax) - lo) / h)));
    ihi[ax] = std::min(g.n, static_cast<int>(std::ceil((q.hi(ax) - lo) / h)));
    w[ax].resize(std::max(0, ihi[ax] - ilo[ax]));
    for (int i = ilo[ax]; i < ihi[ax]; ++i) {
      const double a = lo + i * h, b = a + h;
      w[ax][i - ilo[ax]] = std::max(0.0, std::min(b, q.hi(ax)) - std::max(a, q.lo(ax)));
    }
  }

  double covered = 0.0;
  if (d == 1) {
    for (int i = ilo[0]; i < ihi[0]; ++i) {
      const double mass = w[0][i - ilo[0]];
      if (mass <= 0.0) continue;
      out.entries.emplace_back(g.values[i], mass);
      covered += mass;
    }
  } else {
    for (int j = ilo[1]; j < ihi[1]; ++j)
      for (int i = ilo[0]; i < ihi[0]; ++i) {
        const double mass = w[0][i - ilo[0]] * w[1][j - ilo[1]];
        if (mass <= 0.0) continue;
        out.entries.emplace_back(g.values[g.index(i, j)], mass);
        covered += mass;
      }
  }
  const double vol = q.volume();
  if (vol - covered > 1e-14 * vol) out.entries.emplace_back(0.0, vol - covered);
  out.total_mass = vol;
  return out;
}

}  // namespace

GridFunction GridFunction::constant(const Box& domain, int n, double c) {
  GridFunction f;
  f.domain = domain;
  f.n = n;
  f.values.assign(static_cast<size_t>(domain.dim == 2 ? std::int64_t(n) * n : n), c);
  return f;
}

GridFunction GridFunction::sample(const Box& domain, int n,
                                  const std::function<double(const Point&)>& fn) {
  GridFunction f = constant(domain, n, 0.0);
  for (std::int64_t i = 0; i < f.cell_count(); ++i) f.values[i] = fn(f.cell_center(i));
  return f;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

GridFunction abs_of(const GridFunction& f) {
  GridFunction g = f;
  for (double& v : g.values) v = std::fabs(v);
  return g;
}

GridFunction multiply(const GridFunction& f, const GridFunction& g) {
  if (!same_grid(f, g)) throw std::invalid_argument("multiply: grid mismatch");
  GridFunction out = f;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] *= g.values[i];
  return out;
}

GridFunction restrict_to(const GridFunction& f, const Box& q) {
  GridFunction out = f;
  for (std::int64_t i = 0; i < f.cell_count(); ++i) {
    const Box cell = f.cell_box(i);
    double overlap = 1.0;
    for (int ax = 0; ax < f.dim(); ++ax) {
      const double o = std::min(cell.hi(ax), q.hi(ax)) - std::max(cell.lo(ax), q.lo(ax));
      overlap *= std::max(0.0, o) / cell.side;
    }
    out.values[i] *= overlap;
  }
  return out;
}

PrefixIntegral::PrefixIntegral(const GridFunction& f)
    : domain_(f.domain), n_(f.n), dim_(f.dim()), h_(f.h()), values_(f.values) {
  if (dim_ == 1) {
    cum1_.assign(n_ + 1, 0.0);
    for (int i = 0; i < n_; ++i) cum1_[i + 1] = cum1_[i] + h_ * values_[i];
  } else {
    const int np = n_ + 1;
    sat_.assign(static_cast<size_t>(np) * np, 0.0);
    cumy_.assign(static_cast<size_t>(n_) * np, 0.0);  // cumy[ix*np + iy] = sum_{j<iy} v(ix,j)
    cumx_.assign(static_cast<size_t>(n_) * np, 0.0);  // cumx[iy*np + ix] = sum_{i<ix} v(i,iy)
    for (int ix = 0; ix < n_; ++ix)
      for (int iy = 0; iy < n_; ++iy)
        cumy_[static_cast<size_t>(ix) * np + iy + 1] =
            cumy_[static_cast<size_t>(ix) * np + iy] + values_[f.index(ix, iy)];
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix)
        cumx_[static_cast<size_t>(iy) * np + ix + 1] =
            cumx_[static_cast<size_t>(iy) * np + ix] + values_[f.index(ix, iy)];
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix)
        sat_[static_cast<size_t>(iy + 1) * np + ix + 1] =
            sat_[static_cast<size_t>(iy) * np + ix + 1] +
            sat_[static_cast<size_t>(iy + 1) * np + ix] -
            sat_[static_cast<size_t>(iy) * np + ix] + h_ * h_ * values_[f.index(ix, iy)];
  }
}

double PrefixIntegral::antiderivative_1d(double x) const {
  const double lo = domain_.corner[0];
  if (x <= lo) return 0.0;
  if (x >= lo + domain_.side) return cum1_[n_];
  const double cx = (x - lo) / h_;
  int i = static_cast<int>(cx);
  if (i >= n_) i = n_ - 1;
  return cum1_[i] + (x - (lo + i * h_)) * values_[i];
}

double PrefixIntegral::corner_antiderivative(double x, double y) const {
  const int np = n_ + 1;
  auto clampi = [&](double coord, int axis, int* idx, double* frac) {
    const double lo = domain_.corner[axis];
    double c = (coord - lo) / h_;
    if (c <= 0.0) {
      *idx = 0;
      *frac = 0.0;
      return;
    }
    if (c >= n_) {
      *idx = n_;
      *frac = 0.0;
      return;
    }
    *idx = static_cast<int>(c);
    *frac = coord - (lo + *idx * h_);
  };
  int ix, iy;
  double fx, fy;
  clampi(x, 0, &ix, &fx);
  clampi(y, 1, &iy, &fy);
  double total = sat_[static_cast<size_t>(iy) * np + ix];
  if (ix < n_ && fx > 0.0) total += fx * h_ * cumy_[static_cast<size_t>(ix) * np + iy];
  if (iy < n_ && fy > 0.0) total += fy * h_ * cumx_[static_cast<size_t>(iy) * np + ix];
  if (ix < n_ && iy < n_ && fx > 0.0 && fy > 0.0)
    total += fx * fy * values_[static_cast<size_t>(iy) * n_ + ix];
  return total;
}

double PrefixIntegral::box_integral(const Box& q) const {
  if (dim_ == 1) return antiderivative_1d(q.hi(0)) - antiderivative_1d(q.lo(0));
  return corner_antiderivative(q.hi(0), q.hi(1)) - corner_antiderivative(q.lo(0), q.hi(1)) -
         corner_antiderivative(q.hi(0), q.lo(1)) + corner_antiderivative(q.lo(0), q.lo(1));
}

double PrefixIntegral::box_average(const Box& q) const {
  return box_integral(q) / q.volume();
}

double average(const GridFunction& f, const Box& q) {
  if (!(q.side > 0.0)) throw std::invalid_argument("average: degenerate box");
  const auto cells = collect_cells(f, q);
  double sum = 0.0;
  for (const auto& [v, mass] : cells.entries) sum += v * mass;
  return sum / q.volume();
}

double rearrangement_value(const GridFunction& g, const Box& q, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rearrangement_value: t must be positive");
  auto cells = collect_cells(g, q);
  auto& e = cells.entries;
  for (auto& [v, mass] : e) v = std::fabs(v);
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  double answer = e.empty() ? 0.0 : e.front().first;
  double cum = 0.0;
  size_t i = 0;
  while (i < e.size()) {
    const double level = e[i].first;
    while (i < e.size() && e[i].first == level) cum += e[i++].second;
    if (cum <= t + 1e-14 * cells.total_mass)
      answer = (i < e.size()) ? e[i].first : 0.0;
    else
      break;
  }
  return answer;
}

double median(const GridFunction& g, const Box& q) {
  auto cells = collect_cells(g, q);
  auto& e = cells.entries;
  if (e.empty()) throw std::invalid_argument("median: empty box");
  std::sort(e.begin(), e.end());
  const double half = 0.5 * cells.total_mass;
  double cum = 0.0;
  for (const auto& [v, mass] : e) {
    cum += mass;
    if (cum >= half - 1e-14 * cells.total_mass) return v;
  }
  return e.back().first;
}

double oscillation(const GridFunction& g, const Box& q, double lambda) {
  if (!(lambda > 0.0 && lambda < 0.5))
    throw std::invalid_argument("oscillation: lambda must lie in (0, 1/2)");
  auto cells = collect_cells(g, q);
  auto& e = cells.entries;
  std::sort(e.begin(), e.end());
  const double need = cells.total_mass * (1.0 - lambda);
  if (need <= 0.0) return 0.0;
  const double eps = 1e-14 * cells.total_mass;

  // Shortest interval [v_i, v_j] of values carrying mass >= (1 - lambda)|Q|;
  // the optimal centering constant is its midpoint.
  double best = std::numeric_limits<double>::infinity();
  double mass = 0.0;
  size_t j = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    if (j < i) {
      j = i;
      mass = 0.0;
    }
    while (j < e.size() && mass < need - eps) mass += e[j++].second;
    if (mass >= need - eps) best = std::min(best, 0.5 * (e[j - 1].first - e[i].first));
    mass -= e[i].second;
  }
  return std::isfinite(best) ? best : 0.0;
}

GridFunction maximal(const GridFunction& f, const std::optional<Box>& within, int threads) {
  const GridFunction af = abs_of(f);
  const PrefixIntegral pref(af);
  const double h = f.h();
  const int d = f.dim();
  const double tol = 1e-12 * std::max(1.0, f.domain.side);

  GridFunction out = GridFunction::constant(f.domain, f.n, 0.0);

  auto admissible = [&](const Box& b) {
    return !within || within->contains_box(b, tol);
  };

  parallel_for(0, f.cell_count(), threads, [&](std::int64_t idx) {
    const Point x = f.cell_center(idx);
    if (within && !within->contains_point(x)) {
      out.values[idx] = 0.0;  // no admissible cube contains x
      return;
    }
    double best = 0.0;
    auto consider = [&](const Box& b) {
      if (!b.contains_point(x)) return;
      if (!admissible(b)) return;
      best = std::max(best, pref.box_average(b));
    };

    for (double s = h; s < 4.0 * f.domain.side; s *= 2.0) {
      // Lattice cubes: corners on (s/2)Z and (s/2)Z + h/2 from the corner.
      std::array<std::vector<double>, 2> corners;
      for (int ax = 0; ax < d; ++ax) {
        const double lo = f.domain.corner[ax];
        for (double off : {0.0, 0.5 * h}) {
          const double kk = std::floor((x[ax] - lo - off) / (0.5 * s));
          for (double shift : {kk, kk - 1.0}) {
            const double c = lo + off + shift * 0.5 * s;
            if (x[ax] >= c && x[ax] < c + s) corners[ax].push_back(c);
          }
        }
      }
      Box b;
      b.dim = d;
      b.side = s;
      if (d == 1) {
        for (double c0 : corners[0]) {
          b.corner[0] = c0;
          consider(b);
        }
      } else {
        for (double c0 : corners[0])
          for (double c1 : corners[1]) {
            b.corner = {c0, c1};
            consider(b);
          }
      }

      // Shifted dyadic cubes through x at the nearest dyadic scale.
      int expo = 0;
      std::frexp(s, &expo);  // 2^(expo-1) <= s < 2^expo
      const int scale = 1 - expo;
      for (int t0 = 0; t0 < 3; ++t0) {
        if (d == 1) {
          consider(cube_at(d, {t0, 0}, scale, x).to_box());
        } else {
          for (int t1 = 0; t1 < 3; ++t1)
            consider(cube_at(d, {t0, t1}, scale, x).to_box());
        }
      }

      if (s >= 2.0 * f.domain.side) break;
    }
    out.values[idx] = best;
  });
  return out;
}

double weighted_lp_norm(const GridFunction& g, const GridFunction& w, double p) {
  if (!same_grid(g, w)) throw std::invalid_argument("weighted_lp_norm: grid mismatch");
  const double hd = std::pow(g.h(), g.dim());
  double sum = 0.0;
  for (size_t i = 0; i < g.values.size(); ++i)
    sum += std::pow(std::fabs(g.values[i]), p) * w.values[i];
  return std::pow(hd * sum, 1.0 / p);
}

double lp_norm(const GridFunction& g, double p) {
  const double hd = std::pow(g.h(), g.dim());
  double sum = 0.0;
  for (double v : g.values) sum += std::pow(std::fabs(v), p);
  return std::pow(hd * sum, 1.0 / p);
}

std::string gridfunction_csv(const GridFunction& f) {
  std::ostringstream os;
  os << "cell,value\n";
  char buf[64];
  for (std::int64_t i = 0; i < f.cell_count(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(i), f.values[i]);
    os << buf;
  }
  return os.str();
}

nlohmann::json gridfunction_header(const GridFunction& f) {
  nlohmann::json j;
  j["n"] = f.n;
  j["domain"]["dim"] = f.dim();
  j["domain"]["side"] = f.domain.side;
  j["domain"]["corner"] = std::vector<double>(f.domain.corner.begin(),
                                              f.domain.corner.begin() + f.dim());
  return j;
}

GridFunction gridfunction_from_csv(const nlohmann::json& header, const std::string& csv) {
  GridFunction f;
  f.n = header.at("n").get<int>();
  f.domain.dim = header.at("domain").at("dim").get<int>();
  f.domain.side = header.at("domain").at("side").get<double>();
  const auto corner = header.at("domain").at("corner").get<std::vector<double>>();
  for (size_t a = 0; a < corner.size(); ++a) f.domain.corner[a] = corner[a];
  f.values.assign(static_cast<size_t>(f.cell_count()), 0.0);

  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header row
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto idx = std::stoll(line.substr(0, comma));
    f.values.at(static_cast<size_t>(idx)) = std::stod(line.substr(comma + 1));
  }
  return f;
}

}  // namespace sparsedom
