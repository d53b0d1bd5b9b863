#pragma once

// Monte Carlo run of the four protocol stages with Eve as the source:
// distribution and measurement in random bases, sifting, disclosure of a
// random subset of sifted bits for error estimation, and the threshold
// decision. On every kept sifted bit Eve, told the basis and whether Alice
// and Bob agree, measures her probe and guesses Alice's bit.
//
// Per-trial draw order from TrialStream(seed, trial):
//   1 Alice's basis   2 Bob's basis   3 outcome (inverse CDF over 00,01,10,11)
//   4 disclosure (sifted only)        5 Eve's measurement (kept sifted only)

#include <array>
#include <cstdint>
#include <optional>

#include "e91/attack_model.hpp"
#include "e91/qmath.hpp"
#include "e91/rng.hpp"

namespace e91 {

struct ProtocolConfig {
  std::uint64_t n_pairs = 0;
  double disclose_fraction = 0.1;
  double qber_threshold = 0.11;
  std::uint64_t seed = 0;
  EveSourceState attack = perfect_epr_source();

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Optimal measurement for telling two equally likely pure states apart.
/// The measurement vectors are the eigenvectors of |eta><eta| - |chi><chi|
/// inside span{eta, chi}; in the frame where <eta|chi> = cos(phi) >= 0 they
/// sit at angles phi/2 -/+ pi/4 from eta.
class HelstromMeasurement {
 public:
  HelstromMeasurement(const Ket& eta, const Ket& chi);

  /// True when eta and chi coincide up to phase; measure() then guesses at random.
  bool degenerate() const { return !m0_.has_value(); }

  /// Outcome 0 (eta, alpha = 0) or 1 (chi, alpha = 1); u uniform in [0, 1).
  int measure(const Ket& probe, double u) const;

  /// Probability of reporting 0 for the given probe.
  double probability_zero(const Ket& probe) const;

 private:
  std::optional<Ket> m0_;
  std::optional<Ket> m1_;
};

/// One Helstrom measurement on `probe`, consuming a single draw from rng.
int eve_guess(const Ket& probe, const Ket& eta, const Ket& chi, TrialStream& rng);

struct TrialRecord {
  Basis basis_a = Basis::rectilinear;
  Basis basis_b = Basis::rectilinear;
  int alpha = 0;
  int beta = 0;
  bool sifted = false;
  bool disclosed = false;
  std::optional<int> eve_guess;
  std::optional<bool> eve_correct;
};

enum class Decision { accept, reject, insufficient_disclosure };

const char* to_string(Decision d);

struct QberEstimate {
  std::optional<double> plus;
  std::optional<double> times;
  std::optional<double> pooled;

  friend bool operator==(const QberEstimate&, const QberEstimate&) = default;
};

struct RunStats {
  template <class T>
  using PerBasis = std::array<T, 2>;
  /// Indexed [basis][agree ? 1 : 0].
  template <class T>
  using PerCell = std::array<std::array<T, 2>, 2>;

  double qber_threshold = 0.0;

  std::uint64_t trials = 0;
  /// [alice basis][bob basis][2 alpha + beta]
  std::array<std::array<std::array<std::uint64_t, 4>, 2>, 2> outcome_counts{};
  std::uint64_t sifted_count = 0;
  PerCell<std::uint64_t> cell_counts{};
  PerCell<std::uint64_t> cell_alpha_zero{};
  std::uint64_t disclosed_count = 0;
  PerBasis<std::uint64_t> disclosed{};
  PerBasis<std::uint64_t> disclosed_disagree{};
  std::uint64_t eve_guessed_count = 0;
  std::uint64_t eve_correct_count = 0;
  PerCell<std::uint64_t> eve_guessed_cell{};
  PerCell<std::uint64_t> eve_correct_cell{};

  // Derived by finalize().
  QberEstimate qber;
  Decision decision = Decision::insufficient_disclosure;
  bool accept = false;

  static RunStats empty(double qber_threshold);

  std::optional<double> eve_success_rate() const;

  /// Recompute the QBER estimates and the decision from the counts.
  void finalize();

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

inline std::size_t basis_index(Basis b) { return static_cast<std::size_t>(b); }

/// Per-basis disagreement fraction among disclosed sifted bits; pooled is the
/// disclosure-weighted average over the bases that have disclosures.
QberEstimate estimate_qber(const RunStats& stats);

/// Inclusive: accept iff pooled <= threshold.
bool decide_accept(double pooled_qber, double threshold);

/// Elementwise sum of counts, derived fields recomputed. Throws
/// std::invalid_argument if the thresholds differ.
RunStats merge_stats(const RunStats& a, const RunStats& b);

/// Outcome distributions, collapsed probes and Eve's measurements for one
/// attack, computed once per run.
class SimulationPlan {
 public:
  explicit SimulationPlan(const ProtocolConfig& cfg);

  const ProtocolConfig& config() const { return cfg_; }

  /// Analytic probability of outcome (alpha, beta) under the given bases.
  double outcome_probability(Basis alice, Basis bob, int alpha, int beta) const;

  TrialRecord run_trial(std::uint64_t trial) const;

 private:
  struct EveCell {
    std::optional<HelstromMeasurement> measurement;
    // Used when only one candidate has support: Eve knows alpha outright.
    std::optional<int> known_alpha;
  };

  ProtocolConfig cfg_;
  std::array<std::array<std::array<double, 4>, 2>, 2> probs_{};
  std::array<std::array<std::array<std::optional<Ket>, 4>, 2>, 2> probes_;
  std::array<std::array<EveCell, 2>, 2> eve_;
};

void tally(RunStats& stats, const TrialRecord& r);

/// Trials [begin, end) only. Use merge_stats to combine adjacent ranges.
RunStats run_protocol_range(const SimulationPlan& plan, std::uint64_t begin, std::uint64_t end);

RunStats run_protocol(const ProtocolConfig& cfg);

/// Same result as run_protocol, with trials split into `shards` contiguous
/// ranges executed on separate threads.
RunStats run_protocol_sharded(const ProtocolConfig& cfg, unsigned shards);

}  // namespace e91
