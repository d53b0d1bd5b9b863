#include "e91/protocol_sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace e91 {

namespace {

// Above this |<eta|chi>| the candidates are treated as identical.
constexpr double degenerate_overlap = 1.0 - 1e-12;

std::size_t cell_index(bool agree) { return agree ? 1 : 0; }

}  // namespace

void ProtocolConfig::validate() const {
  std::ostringstream msg;
  if (n_pairs == 0) msg << "n_pairs must be positive; ";
  if (!(disclose_fraction > 0.0 && disclose_fraction < 1.0))
    msg << "disclose_fraction must lie in (0, 1), got " << disclose_fraction << "; ";
  if (!(qber_threshold >= 0.0 && qber_threshold <= 0.5))
    msg << "qber_threshold must lie in [0, 1/2], got " << qber_threshold << "; ";
  const std::string problems = msg.str();
  if (!problems.empty()) throw std::invalid_argument("ProtocolConfig: " + problems);
}

// ---------------------------------------------------------------------------
// Helstrom measurement

HelstromMeasurement::HelstromMeasurement(const Ket& eta, const Ket& chi) {
  const Complex overlap = inner(eta, chi);
  const double c = std::abs(overlap);
  if (c >= degenerate_overlap) return;

  // Rephase chi so that <eta|chi'> = c, then build an orthonormal frame.
  const Ket chi_real = c > 0.0 ? chi * (std::conj(overlap) / c) : chi;
  const Ket u1 = eta;
  Ket u2 = chi_real - Complex(c) * eta;
  u2 *= Complex(1.0 / u2.norm());

  const double phi = std::atan2(std::sqrt(overlap_defect(eta, chi)), c);
  const double angle = 0.5 * phi - 0.25 * std::numbers::pi;
  const double ca = std::cos(angle), sa = std::sin(angle);
  m0_ = Complex(ca) * u1 + Complex(sa) * u2;
  m1_ = Complex(-sa) * u1 + Complex(ca) * u2;
}

double HelstromMeasurement::probability_zero(const Ket& probe) const {
  if (degenerate()) return 0.5;
  const double p0 = std::norm(inner(*m0_, probe));
  const double p1 = std::norm(inner(*m1_, probe));
  const double total = p0 + p1;
  return total > 0.0 ? p0 / total : 0.5;
}

int HelstromMeasurement::measure(const Ket& probe, double u) const {
  return u < probability_zero(probe) ? 0 : 1;
}

int eve_guess(const Ket& probe, const Ket& eta, const Ket& chi, TrialStream& rng) {
  return HelstromMeasurement(eta, chi).measure(probe, rng.uniform());
}

// ---------------------------------------------------------------------------
// Statistics

const char* to_string(Decision d) {
  switch (d) {
    case Decision::accept: return "accept";
    case Decision::reject: return "reject";
    case Decision::insufficient_disclosure: return "insufficient disclosure";
  }
  return "?";
}

RunStats RunStats::empty(double qber_threshold) {
  RunStats s;
  s.qber_threshold = qber_threshold;
  s.finalize();
  return s;
}

std::optional<double> RunStats::eve_success_rate() const {
  if (eve_guessed_count == 0) return std::nullopt;
  return static_cast<double>(eve_correct_count) / static_cast<double>(eve_guessed_count);
}

void RunStats::finalize() {
  qber = estimate_qber(*this);
  if (!qber.pooled) {
    decision = Decision::insufficient_disclosure;
  } else {
    decision = decide_accept(*qber.pooled, qber_threshold) ? Decision::accept : Decision::reject;
  }
  accept = decision == Decision::accept;
}

QberEstimate estimate_qber(const RunStats& stats) {
  QberEstimate q;
  auto rate = [&](Basis b) -> std::optional<double> {
    const auto i = basis_index(b);
    if (stats.disclosed[i] == 0) return std::nullopt;
    return static_cast<double>(stats.disclosed_disagree[i]) / static_cast<double>(stats.disclosed[i]);
  };
  q.plus = rate(Basis::rectilinear);
  q.times = rate(Basis::diagonal);
  const std::uint64_t n = stats.disclosed[0] + stats.disclosed[1];
  if (n > 0) {
    q.pooled = static_cast<double>(stats.disclosed_disagree[0] + stats.disclosed_disagree[1]) /
               static_cast<double>(n);
  }
  return q;
}

bool decide_accept(double pooled_qber, double threshold) { return pooled_qber <= threshold; }

RunStats merge_stats(const RunStats& a, const RunStats& b) {
  if (a.qber_threshold != b.qber_threshold) {
    throw std::invalid_argument("merge_stats: runs use different QBER thresholds");
  }
  RunStats out = a;
  auto add_cells = [](auto& dst, const auto& src) {
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) dst[i][j] += src[i][j];
  };
  out.trials += b.trials;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 4; ++k) out.outcome_counts[i][j][k] += b.outcome_counts[i][j][k];
  out.sifted_count += b.sifted_count;
  add_cells(out.cell_counts, b.cell_counts);
  add_cells(out.cell_alpha_zero, b.cell_alpha_zero);
  out.disclosed_count += b.disclosed_count;
  for (std::size_t i = 0; i < 2; ++i) {
    out.disclosed[i] += b.disclosed[i];
    out.disclosed_disagree[i] += b.disclosed_disagree[i];
  }
  out.eve_guessed_count += b.eve_guessed_count;
  out.eve_correct_count += b.eve_correct_count;
  add_cells(out.eve_guessed_cell, b.eve_guessed_cell);
  add_cells(out.eve_correct_cell, b.eve_correct_cell);
  out.finalize();
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

SimulationPlan::SimulationPlan(const ProtocolConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const Ket& joint = cfg_.attack.joint();
  for (Basis ba : all_bases)
    for (Basis bb : all_bases) {
      const auto coeffs = pair_basis_coefficients(joint, ba, bb);
      for (std::size_t k = 0; k < 4; ++k) {
        const double p = coeffs[k].norm_squared();
        auto& prob = probs_[basis_index(ba)][basis_index(bb)][k];
        auto& probe = probes_[basis_index(ba)][basis_index(bb)][k];
        if (p > absent_threshold) {
          prob = p;
          probe = coeffs[k] * Complex(1.0 / std::sqrt(p));
        }
      }
    }

  for (Basis b : all_bases) {
    for (bool agree : {false, true}) {
      const auto& probes = probes_[basis_index(b)][basis_index(b)];
      const std::size_t zero = agree ? 0 : 1;  // alpha = 0 cell
      const std::size_t one = agree ? 3 : 2;   // alpha = 1 cell
      EveCell& cell = eve_[basis_index(b)][cell_index(agree)];
      if (probes[zero] && probes[one]) {
        cell.measurement.emplace(*probes[zero], *probes[one]);
      } else if (probes[zero]) {
        cell.known_alpha = 0;
      } else if (probes[one]) {
        cell.known_alpha = 1;
      }
    }
  }
}

double SimulationPlan::outcome_probability(Basis alice, Basis bob, int alpha, int beta) const {
  return probs_[basis_index(alice)][basis_index(bob)][static_cast<std::size_t>(2 * alpha + beta)];
}

TrialRecord SimulationPlan::run_trial(std::uint64_t trial) const {
  TrialStream rng(cfg_.seed, trial);
  TrialRecord r;
  r.basis_a = static_cast<Basis>(rng() >> 63);
  r.basis_b = static_cast<Basis>(rng() >> 63);

  const auto& probs = probs_[basis_index(r.basis_a)][basis_index(r.basis_b)];
  const double u = rng.uniform();
  std::size_t outcome = 4;
  double cumulative = 0.0;
  std::size_t last_supported = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (probs[k] <= 0.0) continue;
    last_supported = k;
    cumulative += probs[k];
    if (u < cumulative) {
      outcome = k;
      break;
    }
  }
  if (outcome == 4) outcome = last_supported;  // rounding left the CDF just below 1
  r.alpha = static_cast<int>(outcome >> 1);
  r.beta = static_cast<int>(outcome & 1);

  r.sifted = r.basis_a == r.basis_b;
  if (!r.sifted) return r;

  r.disclosed = rng.uniform() < cfg_.disclose_fraction;
  if (r.disclosed) return r;

  const bool agree = r.alpha == r.beta;
  const EveCell& cell = eve_[basis_index(r.basis_a)][cell_index(agree)];
  const double eve_draw = rng.uniform();
  int guess = 0;
  if (cell.measurement) {
    const auto& probe = probes_[basis_index(r.basis_a)][basis_index(r.basis_a)][outcome];
    guess = cell.measurement->measure(*probe, eve_draw);
  } else if (cell.known_alpha) {
    guess = *cell.known_alpha;
  } else {
    guess = eve_draw < 0.5 ? 0 : 1;
  }
  r.eve_guess = guess;
  r.eve_correct = guess == r.alpha;
  return r;
}

void tally(RunStats& stats, const TrialRecord& r) {
  const auto ia = basis_index(r.basis_a);
  const auto ib = basis_index(r.basis_b);
  ++stats.trials;
  ++stats.outcome_counts[ia][ib][static_cast<std::size_t>(2 * r.alpha + r.beta)];
  if (!r.sifted) return;

  const bool agree = r.alpha == r.beta;
  const auto cell = cell_index(agree);
  ++stats.sifted_count;
  ++stats.cell_counts[ia][cell];
  if (r.alpha == 0) ++stats.cell_alpha_zero[ia][cell];

  if (r.disclosed) {
    ++stats.disclosed_count;
    ++stats.disclosed[ia];
    if (!agree) ++stats.disclosed_disagree[ia];
    return;
  }
  if (r.eve_guess) {
    ++stats.eve_guessed_count;
    ++stats.eve_guessed_cell[ia][cell];
    if (*r.eve_correct) {
      ++stats.eve_correct_count;
      ++stats.eve_correct_cell[ia][cell];
    }
  }
}

RunStats run_protocol_range(const SimulationPlan& plan, std::uint64_t begin, std::uint64_t end) {
  RunStats stats = RunStats::empty(plan.config().qber_threshold);
  for (std::uint64_t i = begin; i < end; ++i) tally(stats, plan.run_trial(i));
  stats.finalize();
  return stats;
}

RunStats run_protocol(const ProtocolConfig& cfg) {
  const SimulationPlan plan(cfg);
  return run_protocol_range(plan, 0, cfg.n_pairs);
}

RunStats run_protocol_sharded(const ProtocolConfig& cfg, unsigned shards) {
  if (shards == 0) throw std::invalid_argument("run_protocol_sharded: need at least one shard");
  const SimulationPlan plan(cfg);
  std::vector<RunStats> parts(shards, RunStats::empty(cfg.qber_threshold));
  {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) {
      const std::uint64_t begin = cfg.n_pairs * s / shards;
      const std::uint64_t end = cfg.n_pairs * (s + 1) / shards;
      workers.emplace_back([&plan, &parts, s, begin, end] {
        parts[s] = run_protocol_range(plan, begin, end);
      });
    }
  }
  RunStats total = RunStats::empty(cfg.qber_threshold);
  for (const auto& p : parts) total = merge_stats(total, p);
  return total;
}

}  // namespace e91
