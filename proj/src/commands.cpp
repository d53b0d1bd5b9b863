#include "e91/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "e91/attack_model.hpp"
#include "e91/channel_attack.hpp"
#include "e91/kernels.hpp"
#include "e91/protocol_sim.hpp"
#include "e91/qmath.hpp"

namespace e91::cli {

using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// tradeoff

std::vector<TradeoffRow> tradeoff_rows(double eps_min, double eps_max, std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("--steps must be at least 2");
  if (!(eps_min >= 0.0 && eps_max <= 0.5)) {
    throw std::invalid_argument("error rates must lie in [0, 0.5]");
  }
  if (!(eps_min < eps_max)) {
    throw std::invalid_argument("--eps-min must be strictly below --eps-max for uniform spacing");
  }
  std::vector<TradeoffRow> rows;
  rows.reserve(steps);
  const double last = static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) {
    const double eps =
        i + 1 == steps ? eps_max : eps_min + (eps_max - eps_min) * static_cast<double>(i) / last;
    const double p = max_guess_prob(eps);
    rows.push_back({eps, p, mutual_information(p)});
  }
  return rows;
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows) {
  out << "epsilon,p_correct,mutual_info\n";
  for (const auto& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.p_correct) << ','
        << format_double(r.mutual_info) << '\n';
  }
}

int cmd_tradeoff(double eps_min, double eps_max, std::size_t steps,
                 const std::filesystem::path& out_path, std::ostream& err) {
  std::vector<TradeoffRow> rows;
  try {
    rows = tradeoff_rows(eps_min, eps_max, steps);
  } catch (const std::exception& e) {
    err << "tradeoff: " << e.what() << '\n';
    return 2;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "tradeoff: cannot open " << out_path.string() << " for writing\n";
    return 1;
  }
  write_tradeoff_csv(file, rows);
  file.flush();
  if (!file) {
    err << "tradeoff: write to " << out_path.string() << " failed\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

double sigma_distance(double observed, double expected, std::uint64_t n) {
  if (observed == expected || n == 0) return 0.0;
  const double count = static_cast<double>(n);
  const double variance = std::max(expected * (1.0 - expected), 1.0 / count) / count;
  return std::abs(observed - expected) / std::sqrt(variance);
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

SimulationOutcome simulate(const SimulateOptions& opts) {
  ProtocolConfig cfg{opts.pairs, opts.disclose, opts.threshold, opts.seed, optimal_attack(opts.eps)};
  cfg.validate();
  const AnalyticReport analytic = analyze(cfg.attack);
  const RunStats stats = opts.shards <= 1 ? run_protocol(cfg) : run_protocol_sharded(cfg, opts.shards);

  ordered_json report;
  report["config"] = {{"eps", opts.eps},
                      {"pairs", opts.pairs},
                      {"disclose", opts.disclose},
                      {"threshold", opts.threshold},
                      {"seed", opts.seed}};
  report["analytic"] = {{"eps_plus", analytic.eps_plus},
                        {"eps_times", analytic.eps_times},
                        {"eps_bar", analytic.eps_bar},
                        {"p_share_plus", analytic.conditional.share_plus},
                        {"p_noshare_plus", analytic.conditional.noshare_plus},
                        {"p_share_times", analytic.conditional.share_times},
                        {"p_noshare_times", analytic.conditional.noshare_times},
                        {"p_marginal", analytic.p_marginal},
                        {"mutual_info", analytic.mutual_info}};
  report["empirical"] = {{"trials", stats.trials},
                         {"sifted", stats.sifted_count},
                         {"disclosed_plus", stats.disclosed[0]},
                         {"disclosed_times", stats.disclosed[1]},
                         {"disagreements_plus", stats.disclosed_disagree[0]},
                         {"disagreements_times", stats.disclosed_disagree[1]},
                         {"qber_plus", optional_number(stats.qber.plus)},
                         {"qber_times", optional_number(stats.qber.times)},
                         {"qber_pooled", optional_number(stats.qber.pooled)},
                         {"eve_guessed", stats.eve_guessed_count},
                         {"eve_correct", stats.eve_correct_count},
                         {"eve_success_rate", optional_number(stats.eve_success_rate())},
                         {"decision", to_string(stats.decision)}};

  ordered_json sigma = ordered_json::object();
  bool within = true;
  auto record = [&](const char* key, const std::optional<double>& observed, double expected,
                    std::uint64_t n) {
    if (!observed) {
      sigma[key] = nullptr;
      return;
    }
    const double d = sigma_distance(*observed, expected, n);
    sigma[key] = d;
    within = within && d <= report_sigma_gate;
  };
  record("qber_plus", stats.qber.plus, analytic.eps_plus, stats.disclosed[0]);
  record("qber_times", stats.qber.times, analytic.eps_times, stats.disclosed[1]);
  const std::uint64_t disclosed = stats.disclosed[0] + stats.disclosed[1];
  const double pooled_expected =
      disclosed == 0 ? 0.0
                     : (static_cast<double>(stats.disclosed[0]) * analytic.eps_plus +
                        static_cast<double>(stats.disclosed[1]) * analytic.eps_times) /
                           static_cast<double>(disclosed);
  record("qber_pooled", stats.qber.pooled, pooled_expected, disclosed);
  record("eve_success", stats.eve_success_rate(), analytic.p_marginal, stats.eve_guessed_count);
  report["sigma_distances"] = sigma;
  report["accept"] = stats.accept;

  return {std::move(report), within};
}

int cmd_simulate(const SimulateOptions& opts, const std::filesystem::path& out_path,
                 std::ostream& err) {
  SimulationOutcome outcome;
  try {
    outcome = simulate(opts);
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << '\n';
    return 2;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "simulate: cannot open " << out_path.string() << " for writing\n";
    return 1;
  }
  file << outcome.report.dump(2) << '\n';
  file.flush();
  if (!file) {
    err << "simulate: write to " << out_path.string() << " failed\n";
    return 1;
  }
  if (!outcome.within_gate) {
    err << "simulate: an empirical rate is more than " << report_sigma_gate
        << " sigma from its analytic value\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// optimize

ordered_json optimize_report(double eps, std::size_t n_grid) {
  const double x_star = optimal_x(eps);
  const AttackSummary m = summarize(optimal_attack(eps));
  const double p_closed = max_guess_prob(eps);
  const GridOptimum grid = grid_search_max(eps, n_grid);

  ordered_json out;
  out["eps_bar"] = eps;
  out["x_star"] = x_star;
  out["attack"] = {{"x", m.x}, {"y", m.y}, {"z", m.z}, {"t", m.t}};
  out["p_correct"] = p_closed;
  out["mutual_info"] = mutual_information(p_closed);
  out["grid"] = {{"n_grid", n_grid},
                 {"eps_plus", grid.eps_plus},
                 {"eps_times", grid.eps_times},
                 {"x", grid.x},
                 {"p_correct", grid.p_correct},
                 {"gap", std::abs(grid.p_correct - p_closed)}};
  return out;
}

int cmd_optimize(double eps, std::ostream& out, std::ostream& err) {
  try {
    out << optimize_report(eps, default_grid_points).dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "optimize: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

namespace {

Ket random_ket(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Ket v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v;
}

Operator random_operator(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Operator a(2, 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
  return a;
}

// Residual-based suite: passes iff the worst residual is <= tol.
SuiteResult residual_suite(std::string name, double tol, const std::function<double(std::string&)>& body) {
  SuiteResult r{std::move(name), false, 0.0, {}};
  try {
    r.worst = body(r.detail);
    r.passed = r.worst <= tol;
  } catch (const std::exception& e) {
    r.worst = std::numeric_limits<double>::infinity();
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

}  // namespace

std::vector<SuiteResult> run_verification(double tol, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  std::mt19937_64 rng(seed);

  out.push_back(residual_suite("inner-conjugate-symmetry", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Ket a = random_ket(8, rng), b = random_ket(8, rng);
      worst = std::max(worst, std::abs(inner(a, b) - std::conj(inner(b, a))));
    }
    detail = "200 random dim-8 pairs";
    return worst;
  }));

  out.push_back(residual_suite("basis-change-norm-conservation", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Ket psi = random_ket(16, rng);
      const double total = psi.norm_squared();
      for (Basis b : all_bases) {
        const auto coeffs = pair_basis_coefficients(psi, b);
        double sum = 0.0;
        for (const auto& c : coeffs) sum += c.norm_squared();
        worst = std::max(worst, std::abs(sum - total) / total);
        const Ket back = assemble_joint(coeffs, b, b);
        worst = std::max(worst, (back - psi).norm() / std::sqrt(total));
      }
    }
    detail = "200 random probe(4) x pair states, both bases, relative";
    return worst;
  }));

  out.push_back(residual_suite("remote-transpose", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, remote_transpose_residual(random_operator(rng)));
    detail = "100 random complex 2x2 operators";
    return worst;
  }));

  out.push_back(residual_suite("channel-unitarity", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, validate_unitarity(random_channel_attack(rng)).max());
    detail = "100 attacks from random 4x4 unitaries";
    return worst;
  }));

  out.push_back(residual_suite("alice-marginal-witness", tol, [&](std::string& detail) {
    double worst = 0.0;
    const Operator half_identity = Operator{{0.5, 0.0}, {0.0, 0.5}};
    for (int i = 0; i < 100; ++i) {
      const Ket joint = apply_channel_attack(random_channel_attack(rng));
      worst = std::max(worst, (alice_marginal(joint) - half_identity).max_abs());
    }
    // A source attack (E0 = E1 = |0>/sqrt2) puts both photons in |00>.
    const double h = 1.0 / std::sqrt(2.0);
    const EveSourceState source({Ket{h}, Ket{h}, Ket{0.0}, Ket{0.0}});
    const double top = hermitian_eigenvalues(alice_marginal(source.joint()))[0];
    std::ostringstream msg;
    msg << "100 channel attacks vs I/2; source witness top eigenvalue " << top;
    detail = msg.str();
    if (top < 0.9) return std::numeric_limits<double>::infinity();
    return worst;
  }));

  out.push_back(residual_suite("schmidt-local-unitary-invariance", tol, [&](std::string& detail) {
    double worst = 0.0;
    const Ket b0 = bell_ket(0);
    for (int i = 0; i < 100; ++i) {
      const Ket v = kron(random_unitary(2, rng), random_unitary(2, rng)).apply(b0);
      const SchmidtPair s = schmidt_coefficients(v, 1e-8);
      worst = std::max({worst, std::abs(s.major - 1.0 / std::sqrt(2.0)),
                        std::abs(s.minor - 1.0 / std::sqrt(2.0))});
    }
    detail = "100 random (U x V)|B0>";
    return worst;
  }));

  out.push_back(residual_suite("error-rate-routes", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const EveSourceState s = random_symmetric_state(rng);
      const ErrorRates a = error_rates(s), b = error_rates_by_projection(s);
      worst = std::max({worst, std::abs(a.eps_plus - b.eps_plus), std::abs(a.eps_times - b.eps_times)});
    }
    detail = "200 random symmetric attacks, closed form vs projection";
    return worst;
  }));

  out.push_back(residual_suite("closed-form-curve", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double eps = 0.01 * i;
      worst = std::max(worst, std::abs(marginal_guess_prob(optimal_attack(eps)) - max_guess_prob(eps)));
    }
    detail = "eps_bar in 0, 0.01, ..., 0.5";
    return worst;
  }));

  out.push_back(residual_suite("bound-never-beaten", tol, [&](std::string& detail) {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      RandomStateOptions opts;
      opts.probe_dim = 1 + static_cast<std::size_t>(i % 4);
      const EveSourceState s = random_symmetric_state(rng, opts);
      const double eps = error_rates(s).mean();
      // Bob flipping his bits maps eps_bar to 1 - eps_bar, so the bound is
      // symmetric about 1/2.
      const double bound = max_guess_prob(std::min(eps, 1.0 - eps));
      worst = std::max(worst, marginal_guess_prob(s) - bound);
    }
    detail = "10000 random symmetric attacks; worst excess over the bound";
    return std::max(worst, 0.0);
  }));

  out.push_back(residual_suite("kernel-equivalence", tol, [&](std::string& detail) {
    const kernels::KernelTable* simd = kernels::avx2_table();
    if (simd == nullptr) {
      detail = "no SIMD table on this CPU; scalar only";
      return 0.0;
    }
    double worst = 0.0;
    const auto& ref = kernels::scalar_table();
    for (std::size_t n = 1; n <= 33; ++n) {
      const Ket a = random_ket(n, rng), b = random_ket(n, rng);
      worst = std::max(worst, std::abs(ref.cdot(a.amplitudes(), b.amplitudes()) -
                                       simd->cdot(a.amplitudes(), b.amplitudes())));
    }
    for (double ep : {0.0, 0.05, 0.1, 0.2}) {
      const kernels::GridRow row{ep, 0.2 - ep, 0.8, 0.1 / 1000.0, 1001};
      const auto x = ref.grid_row_max(row), y = simd->grid_row_max(row);
      if (x.index != y.index || x.value != y.value) return std::numeric_limits<double>::infinity();
    }
    detail = "scalar vs avx2: cdot dims 1..33, grid rows bit-identical";
    return worst;
  }));

  return out;
}

int cmd_verify(double tol, std::uint64_t seed, std::ostream& out) {
  const auto results = run_verification(tol, seed);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  worst=" << format_double(r.worst)
        << "  tol=" << format_double(tol) << "  (" << r.detail << ")\n";
    ok = ok && r.passed;
  }
  out << (ok ? "all suites passed" : "verification FAILED") << " [kernels: "
      << kernels::active().name << "]\n";
  return ok ? 0 : 1;
}

}  // namespace e91::cli
