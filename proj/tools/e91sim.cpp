// e91sim: tradeoff curves, Monte Carlo protocol runs, optimizer queries and
// the invariant verification suite for source-controlled eavesdropping on E91.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "e91/attack_model.hpp"
#include "e91/commands.hpp"
#include "e91/qmath.hpp"

int main(int argc, char** argv) {
  CLI::App app{"E91 key distribution with Eve controlling the source"};
  app.require_subcommand(1);

  // tradeoff ---------------------------------------------------------------
  double eps_min = 0.0, eps_max = 0.5;
  std::size_t steps = 51;
  std::string tradeoff_out;
  std::uint64_t tradeoff_seed = 0;
  auto* tradeoff = app.add_subcommand("tradeoff", "Write the guess-probability / error-rate curve as CSV");
  tradeoff->add_option("--eps-min", eps_min, "Smallest error rate")->capture_default_str();
  tradeoff->add_option("--eps-max", eps_max, "Largest error rate")->capture_default_str();
  tradeoff->add_option("--steps", steps, "Number of rows")->capture_default_str();
  tradeoff->add_option("--out", tradeoff_out, "Output CSV path")->required();
  tradeoff->add_option("--seed", tradeoff_seed, "Accepted for uniformity; the curve is deterministic");

  // simulate ---------------------------------------------------------------
  e91::cli::SimulateOptions sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run against the optimal attack");
  simulate->add_option("--eps", sim.eps, "Average error rate of the attack")->required();
  simulate->add_option("--pairs", sim.pairs, "Number of distributed pairs")->required();
  simulate->add_option("--disclose", sim.disclose, "Fraction of sifted bits disclosed")->capture_default_str();
  simulate->add_option("--threshold", sim.threshold, "Accept iff pooled QBER <= threshold")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "64-bit seed (required)")->required();
  simulate->add_option("--shards", sim.shards, "Worker threads; the report does not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Output JSON report path")->required();

  // optimize ---------------------------------------------------------------
  double opt_eps = 0.0;
  std::uint64_t opt_seed = 0;
  auto* optimize = app.add_subcommand("optimize", "Closed-form optimum and grid-search confirmation");
  optimize->add_option("--eps", opt_eps, "Average error rate in [0, 0.5]")->required();
  optimize->add_option("--seed", opt_seed, "Accepted for uniformity; the search is deterministic");

  // verify -----------------------------------------------------------------
  double tol = e91::default_tolerance;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--tol", tol, "Residual tolerance")->capture_default_str();
  verify->add_option("--seed", verify_seed, "Seed for the random suites")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (tradeoff->parsed()) return e91::cli::cmd_tradeoff(eps_min, eps_max, steps, tradeoff_out, std::cerr);
  if (simulate->parsed()) return e91::cli::cmd_simulate(sim, sim_out, std::cerr);
  if (optimize->parsed()) return e91::cli::cmd_optimize(opt_eps, std::cout, std::cerr);
  if (verify->parsed()) return e91::cli::cmd_verify(tol, verify_seed, std::cout);
  return EXIT_FAILURE;
}
