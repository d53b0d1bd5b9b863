#include <cmath>
#include <random>

#include "doctest.h"
#include "e91/attack_model.hpp"
#include "oracles.hpp"

using namespace e91;

namespace {
const double h = 1.0 / std::sqrt(2.0);
}

TEST_CASE("make_source_state") {
  const Ket e{0.6, Complex(0.0, 0.8)};
  const EveSourceState s = make_source_state({e, Ket(2), Ket(2), Ket(2)});
  CHECK((s.joint() - tensor(e, bell_ket(0))).norm() <= 1e-15);

  const double a = std::sqrt(0.9);
  try {
    make_source_state({Ket{a}, Ket{0.0}, Ket{0.0}, Ket{0.0}});
    FAIL("expected a normalization error");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("deficit 0.1") != std::string::npos);
  }
  CHECK_THROWS_AS(make_source_state({Ket{1.0}, Ket(2), Ket{0.0}, Ket{0.0}}), std::invalid_argument);
  CHECK_NOTHROW(optimal_attack(0.1));
  CHECK(optimal_attack(0.1).joint().norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("summarize") {
  const AttackSummary epr = summarize(perfect_epr_source(3));
  CHECK(epr.x == 1.0);
  CHECK(epr.y + epr.z + epr.t == 0.0);
  CHECK(std::abs(epr.o01) + std::abs(epr.o23) + std::abs(epr.o02) + std::abs(epr.o13) == 0.0);

  const AttackSummary m = summarize(optimal_attack(0.1));
  CHECK(m.x == doctest::Approx(0.81).epsilon(1e-14));
  CHECK(m.y == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(m.z == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(m.t == doctest::Approx(0.01).epsilon(1e-14));
  for (Complex o : {m.o01, m.o23, m.o02, m.o13, m.o03, m.o12}) CHECK(std::abs(o) == 0.0);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const AttackSummary r = summarize(random_symmetric_state(rng));
    CHECK(r.x + r.y + r.z + r.t == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("is_symmetric") {
  CHECK(is_symmetric(perfect_epr_source()).symmetric);

  const Ket e{std::sqrt(0.5)};
  const auto bad = is_symmetric(make_source_state({e, e, Ket{0.0}, Ket{0.0}}));
  CHECK_FALSE(bad.symmetric);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].term == "Re<E0|E1>");
  CHECK(bad.violations[0].value == doctest::Approx(0.5));

  // Mutually orthogonal components.
  std::array<Ket, 4> orth{Ket(4), Ket(4), Ket(4), Ket(4)};
  for (std::size_t c = 0; c < 4; ++c) orth[c][c] = 0.5;
  CHECK(is_symmetric(make_source_state(orth)).symmetric);

  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) CHECK(is_symmetric(random_symmetric_state(rng)).symmetric);
}

TEST_CASE("error_rates") {
  auto r = error_rates(perfect_epr_source());
  CHECK(r.eps_plus == 0.0);
  CHECK(r.eps_times == 0.0);

  r = error_rates(optimal_attack(0.1));
  CHECK(r.eps_plus == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(r.eps_times == doctest::Approx(0.1).epsilon(1e-14));

  r = error_rates(make_source_state({Ket{0.0}, Ket{0.0}, Ket{0.0}, Ket{1.0}}));
  CHECK(r.eps_plus == 1.0);
  CHECK(r.eps_times == 1.0);

  SUBCASE("closed form equals the projection route") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
      const EveSourceState s = random_symmetric_state(rng, {1 + static_cast<std::size_t>(i % 5), false});
      const auto a = error_rates(s), b = error_rates_by_projection(s);
      CHECK(std::abs(a.eps_plus - b.eps_plus) <= 1e-10);
      CHECK(std::abs(a.eps_times - b.eps_times) <= 1e-10);
    }
  }
}

TEST_CASE("conditional_probe_pair") {
  const auto epr = conditional_probe_pair(perfect_epr_source(), Basis::rectilinear, true);
  REQUIRE(epr.has_value());
  CHECK(epr->weight == doctest::Approx(1.0));
  CHECK(std::abs(inner(epr->eta, epr->chi)) == doctest::Approx(1.0));
  CHECK_FALSE(conditional_probe_pair(perfect_epr_source(), Basis::rectilinear, false).has_value());

  const EveSourceState opt = optimal_attack(0.1);
  const auto agree = conditional_probe_pair(opt, Basis::rectilinear, true);
  REQUIRE(agree.has_value());
  CHECK(inner(agree->eta, agree->chi).real() == doctest::Approx(0.8));
  CHECK(agree->weight == doctest::Approx(0.9));

  const auto disagree = conditional_probe_pair(opt, Basis::rectilinear, false);
  REQUIRE(disagree.has_value());
  CHECK(std::abs(inner(disagree->eta, disagree->chi)) == doctest::Approx(0.8));
  CHECK(disagree->weight == doctest::Approx(0.1));

  // E0 = E1 = |0>/sqrt2 leaves the alpha = 1 candidate empty.
  const Ket e{h};
  CHECK_THROWS_AS(conditional_probe_pair(make_source_state({e, e, Ket{0.0}, Ket{0.0}}),
                                         Basis::rectilinear, true),
                  std::domain_error);

  // Both halves below the absence threshold while their sum is above it.
  const double t = 2e-15;
  const auto tiny = conditional_probe_pair(make_source_state({Ket{std::sqrt(1.0 - t)}, Ket{0.0}, Ket{0.0}, Ket{std::sqrt(t)}}),
                                           Basis::rectilinear, false);
  REQUIRE(tiny.has_value());
  CHECK(tiny->weight == doctest::Approx(t));
}

TEST_CASE("helstrom_success") {
  const Ket zero = Ket::basis_vector(2, 0), one = Ket::basis_vector(2, 1);
  CHECK(helstrom_success(zero, one) == 1.0);
  CHECK(helstrom_success(zero, zero) == 0.5);
  const Ket tilted{0.8, 0.6};
  CHECK(helstrom_success(zero, tilted) == doctest::Approx(0.8).epsilon(1e-15));
  const double d = 1e-7;
  CHECK(std::abs(helstrom_success(zero, Ket{std::cos(d), std::sin(d)}) - (0.5 + 0.5 * std::sin(d))) <= 1e-15);

  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const Ket a = oracle::random_ket(3, rng).normalized(), b = oracle::random_ket(3, rng).normalized();
    CHECK(helstrom_success(a, b) == doctest::Approx(oracle::helstrom(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("conditional_guess_probs") {
  const auto opt = conditional_guess_probs(optimal_attack(0.1));
  CHECK(opt.share_plus == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(opt.noshare_plus == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(opt.share_times == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(opt.noshare_times == doctest::Approx(0.8).epsilon(1e-14));

  const auto epr = conditional_guess_probs(perfect_epr_source());
  CHECK(epr.share_plus == 0.5);
  CHECK(epr.noshare_plus == 0.5);
  CHECK(epr.share_times == 0.5);
  CHECK(epr.noshare_times == 0.5);

  SUBCASE("imaginary overlap lowers Eve's odds below the ratio formula") {
    // E0 = a|0>, E1 = i b|0> + c|1>: Re<E0|E1> = 0, Im<E0|E1> = a b.
    const double a = 0.8, b = 0.3, c = std::sqrt(1.0 - a * a - b * b);
    const EveSourceState s = make_source_state({Ket{a, 0.0}, Ket{Complex(0.0, b), c}, Ket(2), Ket(2)});
    REQUIRE(is_symmetric(s).symmetric);
    const AttackSummary m = summarize(s);
    const double general = conditional_guess_probs(s).share_plus;
    const double ratio_form = conditional_guess_probs_zero_overlap(m).share_plus;
    CHECK(general < ratio_form - 1e-6);
    const double overlap2 =
        ((m.x - m.y) * (m.x - m.y) + 4.0 * m.o01.imag() * m.o01.imag()) / ((m.x + m.y) * (m.x + m.y));
    CHECK(general == doctest::Approx(0.5 + 0.5 * std::sqrt(1.0 - overlap2)).epsilon(1e-12));
  }

  SUBCASE("general path equals the ratio path when overlaps vanish") {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 100; ++i) {
      const EveSourceState s = random_symmetric_state(rng, {4, true});
      const auto g = conditional_guess_probs(s);
      const auto r = conditional_guess_probs_zero_overlap(summarize(s));
      CHECK(g.share_plus == doctest::Approx(r.share_plus).epsilon(1e-10));
      CHECK(g.noshare_plus == doctest::Approx(r.noshare_plus).epsilon(1e-10));
      CHECK(g.share_times == doctest::Approx(r.share_times).epsilon(1e-10));
      CHECK(g.noshare_times == doctest::Approx(r.noshare_times).epsilon(1e-10));
    }
  }
}

TEST_CASE("marginal_guess_prob") {
  CHECK(marginal_guess_prob(optimal_attack(0.1)) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(marginal_guess_prob(perfect_epr_source()) == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("two components on orthogonal probe directions") {
    const double x = 0.7, y = 0.3;
    const EveSourceState s = make_source_state({Ket{std::sqrt(x), 0.0}, Ket{0.0, std::sqrt(y)}, Ket(2), Ket(2)});
    const double weighted = marginal_guess_prob(s);
    CHECK(std::abs(weighted - marginal_guess_prob_zero_overlap(summarize(s))) <= 1e-12);
    CHECK(std::abs(weighted - (0.5 + 0.5 * std::sqrt(x * y))) <= 1e-12);
  }

  SUBCASE("weighted sum never exceeds the zero-overlap expression") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 500; ++i) {
      const bool zero = i % 2 == 0;
      const EveSourceState s = random_symmetric_state(rng, {1 + static_cast<std::size_t>(i % 4), zero});
      const double weighted = marginal_guess_prob(s);
      const double closed = marginal_guess_prob_zero_overlap(summarize(s));
      if (zero) {
        CHECK(std::abs(weighted - closed) <= 1e-10);
      } else {
        CHECK(weighted <= closed + 1e-10);
      }
    }
  }

  CHECK_THROWS_AS(marginal_guess_prob(make_source_state({Ket{h}, Ket{h}, Ket{0.0}, Ket{0.0}})),
                  std::invalid_argument);
}

TEST_CASE("optimal_x / max_guess_prob") {
  CHECK(optimal_x(0.0) == 1.0);
  CHECK(optimal_x(0.1) == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(optimal_x(0.5) == 0.25);
  CHECK_THROWS_AS(optimal_x(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(optimal_x(0.51), std::invalid_argument);

  for (double e : {0.0, 0.1, 0.2, 0.37, 0.5}) {
    // x* lies inside [1 - 2e, 1 - e].
    CHECK(optimal_x(e) >= 1.0 - 2.0 * e);
    CHECK(optimal_x(e) <= 1.0 - e);
  }

  CHECK(max_guess_prob(0.0) == 0.5);
  CHECK(max_guess_prob(0.1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(max_guess_prob(0.25) == 0.9330127018922193);
  CHECK_THROWS_AS(max_guess_prob(0.6), std::invalid_argument);
}

TEST_CASE("optimal_attack") {
  const AttackSummary zero = summarize(optimal_attack(0.0));
  CHECK(zero.x == 1.0);

  const AttackSummary half = summarize(optimal_attack(0.5));
  for (double v : {half.x, half.y, half.z, half.t}) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(marginal_guess_prob(optimal_attack(0.5)) == doctest::Approx(1.0).epsilon(1e-14));

  for (int i = 0; i <= 50; ++i) {
    const double e = 0.01 * i;
    const EveSourceState s = optimal_attack(e);
    CHECK(s.probe_dim() == 4);
    CHECK(is_symmetric(s).symmetric);
    const auto r = error_rates(s);
    CHECK(std::abs(r.eps_plus - e) <= 1e-15);
    CHECK(std::abs(r.eps_times - e) <= 1e-15);
    CHECK(std::abs(marginal_guess_prob(s) - max_guess_prob(e)) <= 1e-12);
  }
  CHECK_THROWS_AS(optimal_attack(0.75), std::invalid_argument);
}

TEST_CASE("grid_search_max") {
  const GridOptimum g = grid_search_max(0.1, 2001);
  CHECK(std::abs(g.p_correct - 0.8) <= 1e-6);
  CHECK(std::abs(g.eps_plus - 0.1) <= 0.2 / 2000.0);
  CHECK(std::abs(g.eps_times - 0.1) <= 0.2 / 2000.0);
  CHECK(std::abs(g.x - 0.81) <= 0.1 / 2000.0);

  CHECK(grid_search_max(0.0).p_correct == 0.5);
  CHECK(std::abs(grid_search_max(0.5).p_correct - 1.0) <= 1e-6);
  CHECK_THROWS_AS(grid_search_max(0.1, 2), std::invalid_argument);

  SUBCASE("grid optimum never beats the closed form") {
    for (double e : {0.02, 0.13, 0.31, 0.44}) {
      const GridOptimum o = grid_search_max(e, 401);
      CHECK(o.p_correct <= max_guess_prob(e) + 1e-12);
      CHECK(o.p_correct >= max_guess_prob(e) - 1e-4);
    }
  }
}

TEST_CASE("mutual_information") {
  CHECK(mutual_information(0.5) == 0.0);
  CHECK(mutual_information(1.0) == 1.0);
  CHECK(std::abs(mutual_information(0.8) - 0.2780719051126377) <= 1e-12);
  CHECK_THROWS_AS(mutual_information(0.49), std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(1.01), std::invalid_argument);

  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = 0.5 + 0.0005 * i;
    const double v = mutual_information(p);
    CHECK(v == doctest::Approx(oracle::mutual_information(p)).epsilon(1e-12));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("random symmetric attacks never beat the bound") {
  std::mt19937_64 rng(59);
  double worst = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const EveSourceState s = random_symmetric_state(rng, {1 + static_cast<std::size_t>(i % 4), i % 3 == 0});
    const double eps = error_rates(s).mean();
    const double bound = max_guess_prob(std::min(eps, 1.0 - eps));
    worst = std::max(worst, marginal_guess_prob(s) - bound);
  }
  CHECK(worst <= 1e-9);
}
