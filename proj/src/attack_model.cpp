#include "e91/attack_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "e91/kernels.hpp"

namespace e91 {

namespace {

Ket build_joint(const std::array<Ket, 4>& components) {
  const std::size_t d = components[0].dim();
  Ket joint(d * 4);
  for (int c = 0; c < 4; ++c) {
    const Ket bell = bell_ket(c);
    const Ket& e = components[static_cast<std::size_t>(c)];
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t k = 0; k < 4; ++k) joint[p * 4 + k] += e[p] * bell[k];
  }
  return joint;
}

void require_eps_bar(double eps_bar, const char* what) {
  if (!(eps_bar >= 0.0 && eps_bar <= 0.5)) {
    std::ostringstream msg;
    msg << what << ": average error rate must lie in [0, 1/2], got " << eps_bar;
    throw std::invalid_argument(msg.str());
  }
}

// 1/2 + 1/2 sqrt(1 - r^2) for r = (a - b) / (a + b), written as
// 1/2 + sqrt(ab) / (a + b); an empty event gives 1/2.
double ratio_guess(double a, double b) {
  const double sum = a + b;
  if (sum <= absent_threshold) return 0.5;
  return 0.5 + std::sqrt(a * b) / sum;
}

// Candidate indices (alpha = 0, alpha = 1) inside the pair coefficients:
// agree -> |00>, |11>; disagree -> |01>, |10>.
std::array<std::size_t, 2> candidate_cells(bool agree) {
  return agree ? std::array<std::size_t, 2>{0, 3} : std::array<std::size_t, 2>{1, 2};
}

// Remove from v the component along u with respect to the real inner product
// Re<u|v> (complex_inner = false) or the full Hermitian one.
void remove_component(Ket& v, const Ket& u, bool complex_inner) {
  const double uu = u.norm_squared();
  if (uu <= absent_threshold) return;
  Complex coef = inner(u, v) / uu;
  if (!complex_inner) coef = coef.real();
  v -= coef * u;
}

}  // namespace

// ---------------------------------------------------------------------------

EveSourceState::EveSourceState(std::array<Ket, 4> components, double tol)
    : components_(std::move(components)), joint_(1) {
  const std::size_t d = components_[0].dim();
  double total = 0.0;
  for (const auto& e : components_) {
    if (e.dim() != d) throw std::invalid_argument("EveSourceState: probe kets differ in dimension");
    total += e.norm_squared();
  }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream msg;
    msg << "EveSourceState: sum_c <E_c|E_c> = " << total << ", normalization deficit "
        << (1.0 - total);
    throw std::invalid_argument(msg.str());
  }
  joint_ = build_joint(components_);
}

EveSourceState perfect_epr_source(std::size_t probe_dim) {
  return EveSourceState({Ket::basis_vector(probe_dim, 0), Ket(probe_dim), Ket(probe_dim),
                         Ket(probe_dim)});
}

AttackSummary summarize(const EveSourceState& s) {
  const auto& e = s.components();
  AttackSummary m;
  m.x = e[0].norm_squared();
  m.y = e[1].norm_squared();
  m.z = e[2].norm_squared();
  m.t = e[3].norm_squared();
  m.o01 = inner(e[0], e[1]);
  m.o23 = inner(e[2], e[3]);
  m.o02 = inner(e[0], e[2]);
  m.o13 = inner(e[1], e[3]);
  m.o03 = inner(e[0], e[3]);
  m.o12 = inner(e[1], e[2]);
  return m;
}

SymmetryReport is_symmetric(const EveSourceState& s, double tol) {
  const AttackSummary m = summarize(s);
  SymmetryReport report;
  const std::array<std::pair<const char*, double>, 4> terms{{{"Re<E0|E1>", m.o01.real()},
                                                             {"Re<E2|E3>", m.o23.real()},
                                                             {"Re<E0|E2>", m.o02.real()},
                                                             {"Re<E1|E3>", m.o13.real()}}};
  for (const auto& [name, value] : terms) {
    if (std::abs(value) > tol) report.violations.push_back({name, value});
  }
  report.symmetric = report.violations.empty();
  return report;
}

ErrorRates error_rates(const EveSourceState& s) {
  const AttackSummary m = summarize(s);
  return {m.z + m.t, m.y + m.t};
}

ErrorRates error_rates_by_projection(const EveSourceState& s) {
  auto disagree = [&](Basis b) {
    return project_outcome(s.joint(), b, 0, 1).probability +
           project_outcome(s.joint(), b, 1, 0).probability;
  };
  return {disagree(Basis::rectilinear), disagree(Basis::diagonal)};
}

std::optional<CandidatePair> conditional_probe_pair(const EveSourceState& s, Basis b, bool agree) {
  auto coeffs = pair_basis_coefficients(s.joint(), b);
  const auto cells = candidate_cells(agree);
  const Ket& zero = coeffs[cells[0]];
  const Ket& one = coeffs[cells[1]];
  const double n0 = zero.norm_squared();
  const double n1 = one.norm_squared();
  const double weight = n0 + n1;
  if (weight <= absent_threshold) return std::nullopt;
  // Relative test: near the absence threshold both halves can be tiny.
  if (std::min(n0, n1) <= 1e-9 * weight) {
    throw std::domain_error(
        "conditional_probe_pair: only one candidate probe state is present; "
        "the attack is not symmetric");
  }
  return CandidatePair{zero * Complex(1.0 / std::sqrt(n0)), one * Complex(1.0 / std::sqrt(n1)),
                       weight};
}

double helstrom_success(const Ket& eta, const Ket& chi) {
  return 0.5 + 0.5 * std::sqrt(overlap_defect(eta, chi));
}

ConditionalGuess conditional_guess_probs(const EveSourceState& s) {
  auto guess = [&](Basis b, bool agree) {
    const auto pair = conditional_probe_pair(s, b, agree);
    return pair ? helstrom_success(pair->eta, pair->chi) : 0.5;
  };
  return {guess(Basis::rectilinear, true), guess(Basis::rectilinear, false),
          guess(Basis::diagonal, true), guess(Basis::diagonal, false)};
}

ConditionalGuess conditional_guess_probs_zero_overlap(const AttackSummary& m) {
  return {ratio_guess(m.x, m.y), ratio_guess(m.z, m.t), ratio_guess(m.x, m.z),
          ratio_guess(m.y, m.t)};
}

double marginal_guess_prob(const EveSourceState& s, double tol) {
  const SymmetryReport sym = is_symmetric(s, tol);
  if (!sym.symmetric) {
    std::ostringstream msg;
    msg << "marginal_guess_prob: attack is not symmetric (";
    for (const auto& v : sym.violations) msg << ' ' << v.term << '=' << v.value;
    msg << " )";
    throw std::invalid_argument(msg.str());
  }
  double total = 0.0;
  for (Basis b : all_bases) {
    for (bool agree : {true, false}) {
      const auto pair = conditional_probe_pair(s, b, agree);
      if (!pair) continue;
      total += 0.5 * pair->weight * helstrom_success(pair->eta, pair->chi);
    }
  }
  return total;
}

double marginal_guess_prob_zero_overlap(const AttackSummary& m) {
  const double sx = std::sqrt(m.x), sy = std::sqrt(m.y), sz = std::sqrt(m.z), st = std::sqrt(m.t);
  return 0.5 + 0.5 * (sx * sy + sz * st + sx * sz + sy * st);
}

double optimal_x(double eps_bar) {
  require_eps_bar(eps_bar, "optimal_x");
  return (1.0 - eps_bar) * (1.0 - eps_bar);
}

EveSourceState optimal_attack(double eps_bar) {
  require_eps_bar(eps_bar, "optimal_attack");
  const double cross = std::sqrt(eps_bar * (1.0 - eps_bar));
  const std::array<double, 4> mag{1.0 - eps_bar, cross, cross, eps_bar};
  std::array<Ket, 4> e{Ket(4), Ket(4), Ket(4), Ket(4)};
  for (std::size_t c = 0; c < 4; ++c) e[c][c] = mag[c];
  return EveSourceState(std::move(e));
}

double max_guess_prob(double eps_bar) {
  require_eps_bar(eps_bar, "max_guess_prob");
  return 0.5 + std::sqrt(eps_bar * (1.0 - eps_bar));
}

GridOptimum grid_search_max(double eps_bar, std::size_t n_grid) {
  require_eps_bar(eps_bar, "grid_search_max");
  if (n_grid < 3) throw std::invalid_argument("grid_search_max: need at least 3 grid points");

  const double span = 2.0 * eps_bar;
  const double last = static_cast<double>(n_grid - 1);
  GridOptimum best{0.0, 0.0, 0.0, -1.0};
  for (std::size_t i = 0; i < n_grid; ++i) {
    const double eps_plus = span * static_cast<double>(i) / last;
    const double eps_times = span - eps_plus;
    const double x_lo = 1.0 - eps_plus - eps_times;
    const double x_hi = 1.0 - std::max(eps_plus, eps_times);
    const double x_step = std::max(0.0, x_hi - x_lo) / last;
    const kernels::RowMax row = kernels::grid_row_max({eps_plus, eps_times, x_lo, x_step, n_grid});
    if (row.value > best.p_correct) {
      best = {eps_plus, eps_times, x_lo + static_cast<double>(row.index) * x_step, row.value};
    }
  }
  return best;
}

double mutual_information(double p_correct) {
  if (!(p_correct >= 0.5 && p_correct <= 1.0)) {
    std::ostringstream msg;
    msg << "mutual_information: guess probability must lie in [1/2, 1], got " << p_correct;
    throw std::invalid_argument(msg.str());
  }
  auto plogp = [](double p) { return p > 0.0 ? p * std::log2(p) : 0.0; };
  return 1.0 + plogp(p_correct) + plogp(1.0 - p_correct);
}

AnalyticReport analyze(const EveSourceState& s) {
  AnalyticReport r;
  const ErrorRates eps = error_rates(s);
  r.eps_plus = eps.eps_plus;
  r.eps_times = eps.eps_times;
  r.eps_bar = eps.mean();
  r.conditional = conditional_guess_probs(s);
  r.p_marginal = marginal_guess_prob(s);
  r.mutual_info = mutual_information(std::clamp(r.p_marginal, 0.5, 1.0));
  return r;
}

EveSourceState random_symmetric_state(std::mt19937_64& rng, const RandomStateOptions& opts) {
  if (opts.probe_dim == 0) throw std::invalid_argument("random_symmetric_state: probe_dim == 0");
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;

  std::array<Ket, 4> e{Ket(opts.probe_dim), Ket(opts.probe_dim), Ket(opts.probe_dim),
                       Ket(opts.probe_dim)};
  for (auto& k : e)
    for (std::size_t p = 0; p < opts.probe_dim; ++p) k[p] = Complex(gauss(rng), gauss(rng));

  // Constraint graph is the cycle 0-1, 0-2, 1-3, 2-3: clear E1 and E2
  // against E0, then E3 against span{E1, E2}.
  // Small probes leave roundoff-sized residuals in place of vectors that
  // should vanish; they are zeroed so the rescale below cannot inflate them.
  const bool hermitian = opts.zero_overlaps;
  double scale = 0.0;
  for (const auto& k : e) scale = std::max(scale, k.norm());
  auto flush = [&](Ket& k) {
    if (k.norm() <= 1e-10 * scale) k = Ket(opts.probe_dim);
  };
  remove_component(e[1], e[0], hermitian);
  remove_component(e[2], e[0], hermitian);
  flush(e[1]);
  flush(e[2]);
  Ket e2_orth = e[2];
  remove_component(e2_orth, e[1], hermitian);
  flush(e2_orth);
  remove_component(e[3], e[1], hermitian);
  remove_component(e[3], e2_orth, hermitian);
  flush(e[3]);

  // Independent real rescaling keeps every constraint and spreads (x,y,z,t)
  // over the simplex, including nearly-empty components.
  double total = 0.0;
  for (auto& k : e) {
    const double u = unit(rng);
    const double n = k.norm();
    k *= n > 0.0 ? Complex(u * u / n) : Complex(0.0);
    total += k.norm_squared();
  }
  if (total <= absent_threshold) return perfect_epr_source(opts.probe_dim);
  for (auto& k : e) k *= 1.0 / std::sqrt(total);
  return EveSourceState(std::move(e));
}

}  // namespace e91
