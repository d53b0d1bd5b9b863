#pragma once

// Implementations of the e91sim subcommands. Each returns the process exit
// code; argument parsing lives in tools/e91sim.cpp.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace e91::cli {

struct TradeoffRow {
  double epsilon = 0.0;
  double p_correct = 0.0;
  double mutual_info = 0.0;
};

/// `steps` uniformly spaced error rates from eps_min to eps_max inclusive.
/// Throws std::invalid_argument on a bad range (steps < 2, eps_min >= eps_max
/// when steps >= 2, or values outside [0, 1/2]).
std::vector<TradeoffRow> tradeoff_rows(double eps_min, double eps_max, std::size_t steps);

/// Header `epsilon,p_correct,mutual_info`, shortest round-trip decimals,
/// '\n' line endings.
void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows);

/// Locale-independent shortest round-trip representation.
std::string format_double(double v);

int cmd_tradeoff(double eps_min, double eps_max, std::size_t steps,
                 const std::filesystem::path& out_path, std::ostream& err);

struct SimulateOptions {
  double eps = 0.0;
  std::uint64_t pairs = 0;
  double disclose = 0.1;
  double threshold = 0.11;
  std::uint64_t seed = 0;
  unsigned shards = 1;
};

/// |observed - expected| / sigma with sigma = sqrt(max(p(1-p), 1/n) / n) for
/// the binomial proportion p = expected over n trials. Exactly zero when the
/// observation matches.
double sigma_distance(double observed, double expected, std::uint64_t n);

inline constexpr double report_sigma_gate = 4.0;

struct SimulationOutcome {
  nlohmann::ordered_json report;
  bool within_gate = false;
};

/// Runs the protocol against optimal_attack(eps) and assembles the report
/// (fields: config, analytic, empirical, sigma_distances, accept).
SimulationOutcome simulate(const SimulateOptions& opts);

/// Writes the report; exit code 0 iff every sigma distance is <= 4.
int cmd_simulate(const SimulateOptions& opts, const std::filesystem::path& out_path,
                 std::ostream& err);

nlohmann::ordered_json optimize_report(double eps, std::size_t n_grid);

int cmd_optimize(double eps, std::ostream& out, std::ostream& err);

struct SuiteResult {
  std::string name;
  bool passed = false;
  /// Worst residual observed, compared against the tolerance.
  double worst = 0.0;
  std::string detail;
};

std::vector<SuiteResult> run_verification(double tol, std::uint64_t seed);

int cmd_verify(double tol, std::uint64_t seed, std::ostream& out);

}  // namespace e91::cli
