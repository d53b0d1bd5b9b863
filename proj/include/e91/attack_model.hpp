#pragma once

// Eve as the source of the entangled pairs.
//
// She prepares |psi> = sum_c |E_c> (x) |B_c> over the Bell basis, with probe
// kets |E_c> that need not be normalized or orthogonal. After sifting she is
// told the common basis and whether Alice and Bob agree, and tries to guess
// Alice's bit from her probe alone.

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "e91/qmath.hpp"

namespace e91 {

class EveSourceState {
 public:
  /// Throws std::invalid_argument if the kets differ in dimension or
  /// |sum_c <E_c|E_c> - 1| > tol (the message carries the deficit).
  explicit EveSourceState(std::array<Ket, 4> components, double tol = default_tolerance);

  std::size_t probe_dim() const { return components_[0].dim(); }
  const Ket& component(int c) const { return components_.at(static_cast<std::size_t>(c)); }
  const std::array<Ket, 4>& components() const { return components_; }

  /// sum_c |E_c> (x) |B_c>, probe-major.
  const Ket& joint() const { return joint_; }

 private:
  std::array<Ket, 4> components_;
  Ket joint_;
};

inline EveSourceState make_source_state(std::array<Ket, 4> components,
                                        double tol = default_tolerance) {
  return EveSourceState(std::move(components), tol);
}

/// Perfect EPR source: E = (|0>, 0, 0, 0) on a probe of the given dimension.
EveSourceState perfect_epr_source(std::size_t probe_dim = 1);

struct AttackSummary {
  double x = 0.0;  // <E0|E0>
  double y = 0.0;  // <E1|E1>
  double z = 0.0;  // <E2|E2>
  double t = 0.0;  // <E3|E3>
  Complex o01, o23, o02, o13;  // constrained by symmetry
  Complex o03, o12;            // never enter any guess formula; carried only
};

AttackSummary summarize(const EveSourceState& s);

struct SymmetryViolation {
  std::string term;  // e.g. "Re<E0|E1>"
  double value = 0.0;
};

struct SymmetryReport {
  bool symmetric = true;
  std::vector<SymmetryViolation> violations;
};

/// Symmetric iff |Re o01|, |Re o23|, |Re o02|, |Re o13| are all <= tol.
SymmetryReport is_symmetric(const EveSourceState& s, double tol = default_tolerance);

struct ErrorRates {
  double eps_plus = 0.0;
  double eps_times = 0.0;
  double mean() const { return 0.5 * (eps_plus + eps_times); }
};

/// eps_+ = z + t, eps_x = y + t.
ErrorRates error_rates(const EveSourceState& s);

/// Same quantities from the trace definition: probability that Alice and
/// Bob disagree when both measure in the same basis.
ErrorRates error_rates_by_projection(const EveSourceState& s);

/// Eve's two hypotheses for a sifted bit: her probe is eta if alpha = 0 and
/// chi if alpha = 1. weight is the probability of the conditioning event
/// (agree or disagree) given the basis.
struct CandidatePair {
  Ket eta;
  Ket chi;
  double weight = 0.0;
};

/// Empty when weight <= absent_threshold. Throws std::domain_error when one
/// candidate carries a negligible share of the weight, which a symmetric
/// attack never produces.
std::optional<CandidatePair> conditional_probe_pair(const EveSourceState& s, Basis b, bool agree);

/// 1/2 + 1/2 sqrt(1 - |<eta|chi>|^2) for two equally likely pure states.
double helstrom_success(const Ket& eta, const Ket& chi);

struct ConditionalGuess {
  double share_plus = 0.5;
  double noshare_plus = 0.5;
  double share_times = 0.5;
  double noshare_times = 0.5;
};

/// Helstrom success on the actual candidate overlaps; absent events give 1/2.
ConditionalGuess conditional_guess_probs(const EveSourceState& s);

/// Fast path valid when every constrained overlap vanishes: uses the ratios
/// (x-y)/(x+y), (z-t)/(z+t), (x-z)/(x+z), (y-t)/(y+t).
ConditionalGuess conditional_guess_probs_zero_overlap(const AttackSummary& m);

/// Weighted Helstrom sum over both bases and both agreement outcomes.
/// Throws std::invalid_argument if the state is not symmetric within tol.
double marginal_guess_prob(const EveSourceState& s, double tol = default_tolerance);

/// 1/2 + (sqrt(xy) + sqrt(zt) + sqrt(xz) + sqrt(yt)) / 2.
double marginal_guess_prob_zero_overlap(const AttackSummary& m);

/// x* = (1 - eps_bar)^2. Throws std::invalid_argument outside [0, 1/2].
double optimal_x(double eps_bar);

/// Orthogonal-probe construction achieving the bound: E_c = m_c |c> with
/// m = (1-e, sqrt(e(1-e)), sqrt(e(1-e)), e) on a four-dimensional probe.
EveSourceState optimal_attack(double eps_bar);

/// 1/2 + sqrt(eps_bar (1 - eps_bar)).
double max_guess_prob(double eps_bar);

inline constexpr std::size_t default_grid_points = 2001;

struct GridOptimum {
  double eps_plus = 0.0;
  double eps_times = 0.0;
  double x = 0.0;
  double p_correct = 0.0;
};

/// Brute-force search over eps_+ in [0, 2 eps_bar] (eps_x = 2 eps_bar - eps_+)
/// and x over [1 - eps_+ - eps_x, 1 - max(eps_+, eps_x)], n_grid points per
/// axis, of the zero-overlap guess probability.
GridOptimum grid_search_max(double eps_bar, std::size_t n_grid = default_grid_points);

/// 1 + p log2 p + (1-p) log2 (1-p); exact at both ends of [1/2, 1].
double mutual_information(double p_correct);

struct AnalyticReport {
  double eps_plus = 0.0;
  double eps_times = 0.0;
  double eps_bar = 0.0;
  ConditionalGuess conditional;
  double p_marginal = 0.5;
  double mutual_info = 0.0;
};

AnalyticReport analyze(const EveSourceState& s);

struct RandomStateOptions {
  std::size_t probe_dim = 4;
  /// Keep all constrained overlaps exactly zero (imaginary parts included).
  bool zero_overlaps = false;
};

/// Random symmetric source: four Gaussian probe kets with random weights,
/// projected so the four constrained real overlaps vanish, then renormalized.
EveSourceState random_symmetric_state(std::mt19937_64& rng, const RandomStateOptions& opts = {});

}  // namespace e91
