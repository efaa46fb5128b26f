#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sparsedom/domination.hpp"
#include "sparsedom/weights.hpp"

#include <json.hpp>

namespace sparsedom {

/// Batch experiment configuration; JSON round-trips for the CLI.
struct ExperimentConfig {
  std::string kernel = "hilbert";
  std::string cutoff = "smooth";   // "smooth" or "sharp"
  int n = 1 << 10;
  double lambda = 0.125;
  double p = 2.0;
  double q = 3.0;
  int k_max = 8;
  int eps_per_octave = 2;
  double eps_base_mult = 4.0;
  unsigned long long seed = 1;
  int threads = 0;
  std::string out_dir = ".";

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  /// FNV-1a over the canonical JSON dump; stamped onto every CSV row.
  std::string hash() const;
};

/// The 20-function test battery on [-1, 1): five indicators, five two-level
/// steps, five seeded random steps, five sign-alternating profiles, all
/// supported in [-1/2, 1/2].
std::vector<std::pair<std::string, GridFunction>> battery(int n, unsigned long long seed);

/// Named weight/test-function pairs for the weighted-shift experiments.
struct WeightCase {
  std::string name;
  Weight w;
  Weight sigma;
};
std::vector<WeightCase> weight_battery(int n, unsigned long long seed);

struct TableRow {
  std::vector<std::string> cells;
};

struct Table {
  std::vector<std::string> header;
  std::vector<TableRow> rows;

  std::string csv() const;
};

/// A_p-sharpness scaling study: power weights w_delta = |x|^(1-delta) against
/// f_delta = x^(delta-1) 1_(c,1), exact Hilbert transform, p = 2.
Table run_a2_scaling(const ExperimentConfig& cfg);

/// Domination constants over the battery, both operator modes.
Table run_domination_suite(const ExperimentConfig& cfg);

/// q-variation study: V^q norms per battery entry, smooth-vs-sharp variation
/// comparison, and the weighted scaling column at the configured q.
Table run_variation_suite(const ExperimentConfig& cfg);

/// Condensed invariant sweep for the CLI `check` subcommand; returns the
/// failure count and appends one PASS/FAIL line per group to `lines`.
int run_check(const ExperimentConfig& cfg, std::vector<std::string>* lines);

/// Environment echo written next to each CSV.
nlohmann::json run_sidecar(const ExperimentConfig& cfg);

std::string format_double(double v);

}  // namespace sparsedom
