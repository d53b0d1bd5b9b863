#include <cmath>
#include <random>

#include "doctest.h"
#include "e91/attack_model.hpp"
#include "e91/protocol_sim.hpp"
#include "oracles.hpp"

using namespace e91;

namespace {

ProtocolConfig config(EveSourceState attack, std::uint64_t pairs, std::uint64_t seed) {
  ProtocolConfig cfg;
  cfg.n_pairs = pairs;
  cfg.disclose_fraction = 0.1;
  cfg.qber_threshold = 0.11;
  cfg.seed = seed;
  cfg.attack = std::move(attack);
  return cfg;
}

// Frequency k/n against probability p, in binomial sigmas.
double sigmas(std::uint64_t k, std::uint64_t n, double p) {
  const double dn = static_cast<double>(n);
  const double s = oracle::binomial_sigma(p, dn);
  const double diff = std::abs(static_cast<double>(k) / dn - p);
  return s > 0.0 ? diff / s : (diff == 0.0 ? 0.0 : 1e9);
}

}  // namespace

TEST_CASE("TrialStream is a pure function of (seed, trial, draw)") {
  TrialStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  const auto a1 = a(), a2 = a();
  CHECK(a1 == b());
  CHECK(a2 == b());
  CHECK(a1 != a2);
  CHECK(a1 != c());
  CHECK(a1 != d());
  CHECK(a.draws() == 2);
  static_assert(TrialStream(1, 2)() == TrialStream(1, 2)());

  // Top bits are balanced across trials.
  std::uint64_t ones = 0;
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) ones += TrialStream(5, i)() >> 63;
  CHECK(sigmas(ones, n, 0.5) <= 4.0);
}

TEST_CASE("Helstrom measurement reaches the bound exactly") {
  std::mt19937_64 rng(89);
  for (int i = 0; i < 100; ++i) {
    const Ket eta = oracle::random_ket(3, rng).normalized();
    const Ket chi = oracle::random_ket(3, rng).normalized();
    const HelstromMeasurement m(eta, chi);
    const double p_eta = m.probability_zero(eta);
    const double p_chi = 1.0 - m.probability_zero(chi);
    CHECK(p_eta == doctest::Approx(p_chi).epsilon(1e-12));
    CHECK(0.5 * (p_eta + p_chi) == doctest::Approx(oracle::helstrom(eta, chi)).epsilon(1e-12));
    // Global phases on the probe are invisible.
    CHECK(m.probability_zero(eta * std::polar(1.0, 0.7)) == doctest::Approx(p_eta).epsilon(1e-12));
  }
}

TEST_CASE("eve_guess") {
  const Ket zero = Ket::basis_vector(2, 0), one = Ket::basis_vector(2, 1);

  SUBCASE("orthogonal candidates are always identified") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      TrialStream rng(1, i);
      CHECK(eve_guess(zero, zero, one, rng) == 0);
      CHECK(eve_guess(one, zero, one, rng) == 1);
    }
  }

  SUBCASE("identical candidates give a coin flip") {
    const std::uint64_t n = 100000;
    std::uint64_t correct = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      TrialStream rng(2, i);
      correct += eve_guess(zero, zero, zero, rng) == static_cast<int>(i & 1) ? 1 : 0;
    }
    CHECK(HelstromMeasurement(zero, zero * Complex(0.0, 1.0)).degenerate());
    CHECK(sigmas(correct, n, 0.5) <= 4.0);
  }

  SUBCASE("overlap 0.8 succeeds with probability 0.8") {
    const Ket chi{0.8, 0.6};
    const std::uint64_t n = 1000000;
    std::uint64_t correct = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      TrialStream rng(3, i);
      const int alpha = static_cast<int>(rng() >> 63);
      const int guess = eve_guess(alpha == 0 ? zero : chi, zero, chi, rng);
      correct += guess == alpha ? 1 : 0;
    }
    CHECK(sigmas(correct, n, helstrom_success(zero, chi)) <= 3.0);
  }
}

TEST_CASE("ProtocolConfig validation") {
  CHECK_THROWS_AS(config(perfect_epr_source(), 0, 1).validate(), std::invalid_argument);
  auto cfg = config(perfect_epr_source(), 10, 1);
  cfg.disclose_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.disclose_fraction = 0.5;
  cfg.qber_threshold = 0.6;
  CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
}

TEST_CASE("trial records respect sifting and disclosure rules") {
  const SimulationPlan plan(config(optimal_attack(0.2), 1000, 9));
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const TrialRecord r = plan.run_trial(i);
    CHECK(r.sifted == (r.basis_a == r.basis_b));
    CHECK(r.eve_guess.has_value() == (r.sifted && !r.disclosed));
    CHECK(r.eve_correct.has_value() == r.eve_guess.has_value());
    if (!r.sifted) CHECK_FALSE(r.disclosed);
  }
}

TEST_CASE("perfect EPR source") {
  const RunStats s = run_protocol(config(perfect_epr_source(), 20000, 4));
  REQUIRE(s.qber.pooled.has_value());
  CHECK(*s.qber.plus == 0.0);
  CHECK(*s.qber.times == 0.0);
  CHECK(s.accept);
  CHECK(s.decision == Decision::accept);
  REQUIRE(s.eve_success_rate().has_value());
  CHECK(sigmas(s.eve_correct_count, s.eve_guessed_count, 0.5) <= 4.0);
  CHECK(s.cell_counts[0][0] + s.cell_counts[1][0] == 0);
}

TEST_CASE("optimal attack statistics match the analytic values") {
  SUBCASE("eps 0.2: pooled QBER") {
    const RunStats s = run_protocol(config(optimal_attack(0.2), 400000, 77));
    const std::uint64_t n = s.disclosed[0] + s.disclosed[1];
    CHECK(sigmas(s.disclosed_disagree[0] + s.disclosed_disagree[1], n, 0.2) <= 3.0);
    CHECK_FALSE(s.accept);
  }
  SUBCASE("eps 0.05: accepted at threshold 0.11") {
    const RunStats s = run_protocol(config(optimal_attack(0.05), 200000, 78));
    CHECK(s.accept);
    CHECK(sigmas(s.eve_correct_count, s.eve_guessed_count, max_guess_prob(0.05)) <= 4.0);
  }
}

TEST_CASE("random symmetric attacks: frequencies match the state") {
  std::mt19937_64 rng(97);
  for (int a = 0; a < 20; ++a) {
    const EveSourceState attack = random_symmetric_state(rng, {1 + static_cast<std::size_t>(a % 4), false});
    const auto cfg = config(attack, 100000, 1000 + static_cast<std::uint64_t>(a));
    const SimulationPlan plan(cfg);
    const RunStats s = run_protocol(cfg);
    CAPTURE(a);

    for (Basis ba : all_bases)
      for (Basis bb : all_bases) {
        const auto ia = basis_index(ba), ib = basis_index(bb);
        std::uint64_t n = 0;
        for (auto c : s.outcome_counts[ia][ib]) n += c;
        for (int al = 0; al < 2; ++al)
          for (int be = 0; be < 2; ++be) {
            const double p = oracle::outcome_probability(attack.joint(), ba, bb, al, be);
            CHECK(plan.outcome_probability(ba, bb, al, be) == doctest::Approx(p).epsilon(1e-12));
            CHECK(sigmas(s.outcome_counts[ia][ib][static_cast<std::size_t>(2 * al + be)], n, p) <= 4.0);
          }
      }

    CHECK(sigmas(s.eve_correct_count, s.eve_guessed_count, marginal_guess_prob(attack)) <= 4.0);

    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        if (s.cell_counts[b][c] > 0) CHECK(sigmas(s.cell_alpha_zero[b][c], s.cell_counts[b][c], 0.5) <= 4.0);
  }
}

TEST_CASE("estimate_qber and decide_accept") {
  RunStats s = RunStats::empty(0.11);
  CHECK_FALSE(s.qber.pooled.has_value());
  CHECK(s.decision == Decision::insufficient_disclosure);
  CHECK_FALSE(s.accept);

  s.disclosed[0] = 100;
  s.disclosed_disagree[0] = 10;
  const QberEstimate q = estimate_qber(s);
  CHECK(*q.plus == doctest::Approx(0.1));
  CHECK_FALSE(q.times.has_value());
  CHECK(*q.pooled == doctest::Approx(0.1));

  s.disclosed[1] = 300;
  s.disclosed_disagree[1] = 30;
  s.finalize();
  CHECK(*s.qber.pooled == doctest::Approx(0.1));
  CHECK(s.accept);

  CHECK(decide_accept(0.05, 0.11));
  CHECK_FALSE(decide_accept(0.15, 0.11));
  CHECK(decide_accept(0.11, 0.11));
}

TEST_CASE("merge_stats") {
  const auto cfg = config(optimal_attack(0.15), 30000, 5);
  const SimulationPlan plan(cfg);
  const RunStats whole = run_protocol(cfg);

  CHECK(merge_stats(whole, RunStats::empty(cfg.qber_threshold)) == whole);
  CHECK(merge_stats(RunStats::empty(cfg.qber_threshold), whole) == whole);
  CHECK_THROWS_AS(merge_stats(whole, RunStats::empty(0.2)), std::invalid_argument);

  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    std::uniform_int_distribution<std::uint64_t> cut(0, cfg.n_pairs);
    std::uint64_t c1 = cut(rng), c2 = cut(rng);
    if (c1 > c2) std::swap(c1, c2);
    const RunStats a = run_protocol_range(plan, 0, c1);
    const RunStats b = run_protocol_range(plan, c1, c2);
    const RunStats c = run_protocol_range(plan, c2, cfg.n_pairs);
    CHECK(merge_stats(a, b) == merge_stats(b, a));
    CHECK(merge_stats(merge_stats(a, b), c) == merge_stats(a, merge_stats(b, c)));
    CHECK(merge_stats(merge_stats(c, a), b) == whole);
  }

  for (unsigned shards : {1u, 2u, 4u, 7u}) CHECK(run_protocol_sharded(cfg, shards) == whole);
}

TEST_CASE("identical configs give identical statistics") {
  const auto cfg = config(optimal_attack(0.1), 50000, 42);
  CHECK(run_protocol(cfg) == run_protocol(cfg));
  auto other = cfg;
  other.seed = 43;
  CHECK_FALSE(run_protocol(other) == run_protocol(cfg));
}
