#include "sparsedom/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "sparsedom/variation.hpp"

namespace sparsedom {

namespace {

Box unit_interval_domain() {
  Box b;
  b.dim = 1;
  b.corner = {-1.0, 0.0};
  b.side = 2.0;
  return b;
}

// Unbiased uniform double in [lo, hi) from the raw generator; the standard
// distributions are implementation-defined, this is reproducible everywhere.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

GridFunction indicator(int n, double a, double b) {
  return GridFunction::sample(unit_interval_domain(), n, [&](const Point& x) {
    return (x[0] >= a && x[0] < b) ? 1.0 : 0.0;
  });
}

GridFunction two_level(int n, double split, double left, double right) {
  return GridFunction::sample(unit_interval_domain(), n, [&](const Point& x) {
    if (x[0] < -0.5 || x[0] >= 0.5) return 0.0;
    return x[0] < split ? left : right;
  });
}

GridFunction random_step(int n, unsigned long long seed, int blocks) {
  std::mt19937_64 rng(seed);
  std::vector<double> levels(static_cast<size_t>(blocks));
  for (double& v : levels) v = uniform(rng, -1.0, 1.0);
  return GridFunction::sample(unit_interval_domain(), n, [&](const Point& x) {
    if (x[0] < -0.5 || x[0] >= 0.5) return 0.0;
    const int b = std::min(blocks - 1, static_cast<int>((x[0] + 0.5) * blocks));
    return levels[static_cast<size_t>(b)];
  });
}

GridFunction alternating(int n, int blocks) {
  return GridFunction::sample(unit_interval_domain(), n, [&](const Point& x) {
    if (x[0] < -0.5 || x[0] >= 0.5) return 0.0;
    const int b = std::min(blocks - 1, static_cast<int>((x[0] + 0.5) * blocks));
    return (b % 2 == 0) ? 1.0 : -1.0;
  });
}

std::uint64_t fnv1a_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["kernel"] = kernel;
  j["cutoff"] = cutoff;
  j["n"] = n;
  j["lambda"] = lambda;
  j["p"] = p;
  j["q"] = q;
  j["k_max"] = k_max;
  j["eps_per_octave"] = eps_per_octave;
  j["eps_base_mult"] = eps_base_mult;
  j["seed"] = seed;
  j["threads"] = threads;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.kernel = j.value("kernel", c.kernel);
  c.cutoff = j.value("cutoff", c.cutoff);
  c.n = j.value("n", c.n);
  c.lambda = j.value("lambda", c.lambda);
  c.p = j.value("p", c.p);
  c.q = j.value("q", c.q);
  c.k_max = j.value("k_max", c.k_max);
  c.eps_per_octave = j.value("eps_per_octave", c.eps_per_octave);
  c.eps_base_mult = j.value("eps_base_mult", c.eps_base_mult);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

std::string ExperimentConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_string(to_json().dump())));
  return buf;
}

std::vector<std::pair<std::string, GridFunction>> battery(int n, unsigned long long seed) {
  std::vector<std::pair<std::string, GridFunction>> out;
  out.emplace_back("ind_full", indicator(n, -0.5, 0.5));
  out.emplace_back("ind_left", indicator(n, -0.3, 0.1));
  out.emplace_back("ind_right", indicator(n, 0.0, 0.5));
  out.emplace_back("ind_narrow", indicator(n, -0.45, -0.2));
  out.emplace_back("ind_offset", indicator(n, 0.05, 0.45));

  out.emplace_back("step_sign", two_level(n, 0.0, 1.0, -1.0));
  out.emplace_back("step_up", two_level(n, -0.25, 0.5, 2.0));
  out.emplace_back("step_down", two_level(n, 0.25, 1.5, 0.25));
  out.emplace_back("step_skew", two_level(n, -0.1, -0.75, 1.25));
  out.emplace_back("step_gap", two_level(n, 0.3, 0.1, -2.0));

  for (int i = 0; i < 5; ++i)
    out.emplace_back("rand" + std::to_string(i), random_step(n, seed * 1000 + i, 16));

  for (int b = 3; b <= 7; ++b)
    out.emplace_back("alt" + std::to_string(1 << b), alternating(n, 1 << b));
  return out;
}

std::vector<WeightCase> weight_battery(int n, unsigned long long seed) {
  const Box domain = unit_interval_domain();
  std::vector<WeightCase> cases;

  const std::vector<std::pair<double, double>> powers = {
      {0.5, -0.25}, {-0.5, 0.25}, {0.9, -0.45}, {-0.9, 0.45},
      {0.6, 0.3},   {-0.6, -0.3}, {0.8, -0.8},  {0.2, 0.9}};

  auto random_step_weight = [&](unsigned long long s) {
    std::mt19937_64 rng(s);
    std::vector<double> bps = {-0.6, -0.2, 0.1, 0.5};
    std::vector<double> vals(bps.size() + 1);
    for (double& v : vals) v = uniform(rng, 0.2, 5.0);
    return step_weight(bps, vals, domain, n);
  };

  for (size_t i = 0; i < powers.size(); ++i) {
    cases.push_back({"pow" + std::to_string(i),
                     power_weight(powers[i].first, domain, n),
                     power_weight(powers[i].second, domain, n)});
    cases.push_back({"step" + std::to_string(i), random_step_weight(seed * 31 + i),
                     random_step_weight(seed * 37 + i)});
  }
  return cases;
}

std::string Table::csv() const {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) os << header[i] << (i + 1 < header.size() ? "," : "");
  os << "\n";
  for (const TableRow& row : rows) {
    for (size_t i = 0; i < row.cells.size(); ++i)
      os << row.cells[i] << (i + 1 < row.cells.size() ? "," : "");
    os << "\n";
  }
  return os.str();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Table run_a2_scaling(const ExperimentConfig& cfg) {
  if (cfg.n < (1 << 10))
    throw std::invalid_argument("run_a2_scaling: n must be at least 2^10 to resolve delta");
  const Box domain = unit_interval_domain();
  const double h = domain.side / cfg.n;
  const auto family = characteristic_cube_family(domain, h);
  const std::string hash = cfg.hash();

  Table table;
  table.header = {"delta", "a2_char", "norm_ratio", "ratio_over_char", "config"};
  for (int e = 1; e <= 6; ++e) {
    const double delta = std::ldexp(1.0, -e);
    const Weight w = power_weight(1.0 - delta, domain, cfg.n);
    const double cut = h;  // smallest resolvable cell
    const GridFunction f = GridFunction::sample(domain, cfg.n, [&](const Point& x) {
      return (x[0] > cut && x[0] < 1.0) ? std::pow(x[0], delta - 1.0) : 0.0;
    });
    const GridFunction hf = hilbert_transform(f, cfg.threads);
    const double a2 = ap_char(w, 2.0, family);
    const double ratio = weighted_norm(hf, w, 2.0) / weighted_norm(f, w, 2.0);
    table.rows.push_back({{format_double(delta), format_double(a2), format_double(ratio),
                           format_double(ratio / a2), hash}});
  }
  return table;
}

Table run_domination_suite(const ExperimentConfig& cfg) {
  const Box domain = unit_interval_domain();
  const KernelSpec kernel = kernel_by_name(cfg.kernel);
  const CutoffSpec cutoff =
      cfg.cutoff == "sharp" ? CutoffSpec::sharp() : CutoffSpec::smooth();
  const std::string hash = cfg.hash();

  Table table;
  table.header = {"function", "mode",       "n",          "k_max",  "fitted_c",
                  "fitted_c_deep", "lhs_l2", "family_cubes", "config"};

  double max_c_maximal = 0.0, max_c_variation = 0.0;
  for (const auto& [name, f] : battery(cfg.n, cfg.seed)) {
    const auto eps = geometric_eps_grid(f, cfg.eps_per_octave, cfg.eps_base_mult);
    const TruncationField field = truncation_curves(kernel, cutoff, f, eps, cfg.threads);
    for (const DominationMode mode : {DominationMode::Maximal, DominationMode::Variation}) {
      DominationOptions opt;
      opt.lambda = cfg.lambda;
      opt.k_max = cfg.k_max;
      opt.mode = mode;
      opt.q = cfg.q;
      opt.eps_per_octave = cfg.eps_per_octave;
      opt.threads = cfg.threads;
      const DominationReport report = dominate_with_field(kernel, field, f, domain, opt);
      DominationOptions deep = opt;
      deep.k_max = cfg.k_max + 4;
      const DominationReport report_deep = dominate_with_field(kernel, field, f, domain, deep);

      const char* mode_name = mode == DominationMode::Maximal ? "maximal" : "variation";
      if (mode == DominationMode::Maximal)
        max_c_maximal = std::max(max_c_maximal, report.fitted_c);
      else
        max_c_variation = std::max(max_c_variation, report.fitted_c);
      table.rows.push_back({{name, mode_name, std::to_string(cfg.n),
                             std::to_string(cfg.k_max), format_double(report.fitted_c),
                             format_double(report_deep.fitted_c),
                             format_double(lp_norm(report.lhs, 2.0)),
                             std::to_string(report.family.cubes.size()), hash}});
    }
  }
  table.rows.push_back({{"GLOBAL_MAX", "maximal", std::to_string(cfg.n),
                         std::to_string(cfg.k_max), format_double(max_c_maximal), "", "", "",
                         hash}});
  table.rows.push_back({{"GLOBAL_MAX", "variation", std::to_string(cfg.n),
                         std::to_string(cfg.k_max), format_double(max_c_variation), "", "", "",
                         hash}});
  return table;
}

Table run_variation_suite(const ExperimentConfig& cfg) {
  const Box domain = unit_interval_domain();
  const KernelSpec kernel = kernel_by_name(cfg.kernel);
  const std::string hash = cfg.hash();

  Table table;
  table.header = {"kind", "q", "function", "value_l2", "value_max", "extra", "config"};

  for (const auto& [name, f] : battery(cfg.n, cfg.seed)) {
    const auto eps = geometric_eps_grid(f, cfg.eps_per_octave, cfg.eps_base_mult);
    const TruncationField smooth = truncation_curves(kernel, CutoffSpec::smooth(), f, eps,
                                                     cfg.threads);
    for (const double q : {2.5, 3.0, 4.0}) {
      const GridFunction vq = vq_operator(smooth, q, cfg.threads);
      table.rows.push_back({{"battery", format_double(q), name, format_double(lp_norm(vq, 2.0)),
                             format_double(vq.max_abs()), "", hash}});
    }
    // Smooth-vs-sharp comparison at the configured q.
    const TruncationField sharp = truncation_curves(kernel, CutoffSpec::sharp(), f, eps,
                                                    cfg.threads);
    const GridFunction v_smooth = vq_operator(smooth, cfg.q, cfg.threads);
    const GridFunction v_sharp = vq_operator(sharp, cfg.q, cfg.threads);
    const double floor_val = 1e-14 * std::max(v_sharp.max_abs(), 1e-300);
    double fitted = 0.0;
    for (size_t i = 0; i < v_smooth.values.size(); ++i)
      fitted = std::max(fitted, v_smooth.values[i] / std::max(v_sharp.values[i], floor_val));
    table.rows.push_back({{"smooth_vs_sharp", format_double(cfg.q), name, "", "",
                           format_double(fitted), hash}});
  }

  // Weighted scaling rows with the q-variation operator in place of H.
  const double h = domain.side / cfg.n;
  const auto family = characteristic_cube_family(domain, h);
  for (int e = 1; e <= 6; ++e) {
    const double delta = std::ldexp(1.0, -e);
    const Weight w = power_weight(1.0 - delta, domain, cfg.n);
    const GridFunction f = GridFunction::sample(domain, cfg.n, [&](const Point& x) {
      return (x[0] > h && x[0] < 1.0) ? std::pow(x[0], delta - 1.0) : 0.0;
    });
    const auto eps = geometric_eps_grid(f, cfg.eps_per_octave, cfg.eps_base_mult);
    const GridFunction vq =
        vq_operator(kernel, CutoffSpec::smooth(), f, cfg.q, eps, cfg.threads);
    const double a2 = ap_char(w, 2.0, family);
    const double ratio = weighted_norm(vq, w, 2.0) / weighted_norm(f, w, 2.0);
    table.rows.push_back({{"weighted", format_double(cfg.q), "f_delta=" + format_double(delta),
                           format_double(ratio), format_double(a2),
                           format_double(ratio / a2), hash}});
  }
  return table;
}

int run_check(const ExperimentConfig& cfg, std::vector<std::string>* lines) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    lines->push_back(std::string(ok ? "PASS " : "FAIL ") + name +
                     (detail.empty() ? "" : " (" + detail + ")"));
    if (!ok) ++failures;
  };

  // Shifted-cover postconditions on random boxes.
  {
    std::mt19937_64 rng(cfg.seed);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
      Box q;
      q.dim = 1 + static_cast<int>(rng() % 2);
      for (int a = 0; a < q.dim; ++a) q.corner[a] = uniform(rng, -10.0, 10.0);
      q.side = std::pow(2.0, uniform(rng, -8.0, 2.0));
      const int k = static_cast<int>(rng() % 11);
      try {
        cover_cube(q, k);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    report("cover_cube postconditions", ok, "200 random boxes, d in {1,2}, k <= 10");
  }

  // V^q dynamic program against exhaustive subsequence enumeration.
  {
    std::mt19937_64 rng(cfg.seed + 1);
    bool ok = true;
    for (int trial = 0; trial < 300 && ok; ++trial) {
      const int len = 2 + static_cast<int>(rng() % 9);
      std::vector<double> y(static_cast<size_t>(len));
      for (double& v : y) v = std::floor(uniform(rng, -2.0, 3.0));
      const double q = 1.0 + uniform(rng, 0.0, 3.0);
      const double dp = vq_sequence(y, q).value;
      double brute = 0.0;
      const int masks = 1 << len;
      for (int mask = 0; mask < masks; ++mask) {
        double sum = 0.0;
        int prev = -1;
        for (int i = 0; i < len; ++i) {
          if (!(mask & (1 << i))) continue;
          if (prev >= 0)
            sum += std::pow(std::fabs(y[static_cast<size_t>(i)] - y[static_cast<size_t>(prev)]),
                            q);
          prev = i;
        }
        brute = std::max(brute, std::pow(sum, 1.0 / q));
      }
      ok = std::fabs(dp - brute) <= 1e-12 * std::max(1.0, brute);
    }
    report("vq_sequence vs brute force", ok, "300 random sequences");
  }

  // Sparse family invariants on a few battery functions.
  {
    bool ok = true;
    const Box domain = unit_interval_domain();
    const auto funcs = battery(256, cfg.seed);
    for (size_t i = 0; i < funcs.size() && ok; i += 4) {
      const SparseFamily fam = build_sparse(funcs[i].second, domain, cfg.lambda);
      std::int64_t total_core = 0;
      for (size_t c = 0; c < fam.cubes.size(); ++c) {
        if (2 * fam.cubes[c].core_cells < fam.cubes[c].cells) ok = false;
        total_core += fam.cubes[c].core_cells;
      }
      if (total_core > fam.cubes[0].cells) ok = false;  // disjoint cores fit in Q0
    }
    report("sparse family cores", ok, "|E(Q)| >= |Q|/2, disjointness");
  }

  // Dini functionals for omega(t) = t.
  {
    const DiniSums d = dini_sums([](double t) { return t; }, 40);
    const bool ok = std::fabs(d.i0 - 1.0) < 1e-8 && std::fabs(d.i1 - 1.0) < 1e-8;
    report("dini integrals", ok, "omega(t)=t gives I0=I1=1");
  }

  return failures;
}

nlohmann::json run_sidecar(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  j["config_hash"] = cfg.hash();
  j["compiler"] = __VERSION__;
  j["pointer_bits"] = 8 * sizeof(void*);
  return j;
}

}  // namespace sparsedom
