#include "sqcqp/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Global solutions and optimality certificates for scalar QCQP"};
  app.require_subcommand(1);

  sqcqp::cli::RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input_path, "problem file (JSON)")->required();
    sub->add_option("--out", cfg.out_path, "report path ('-' = stdout)");
    sub->add_option("--tol", cfg.tol_cert, "certificate tolerance");
    sub->add_option("--tol-feas", cfg.tol_feas, "feasibility tolerance");
    sub->add_option("--tol-gap", cfg.tol_gap, "solver duality-gap target");
    sub->add_option("--samples", cfg.samples, "probe sample count");
    sub->add_option("--seed", cfg.seed, "random seed");
    return sub;
  };

  add_common(app.add_subcommand(
      "solve", "solve through the convex lift, recover and certify"));
  auto* cert = add_common(app.add_subcommand(
      "certify", "verify global optimality of a candidate point"));
  cert->add_option("point", cfg.point_path, "point file (JSON)")->required();
  auto* rel = add_common(app.add_subcommand(
      "relax", "export the semidefinite or cone form of the problem"));
  rel->add_option("--format", cfg.format, "sdpa | socp-json")
      ->check(CLI::IsMember({"sdpa", "socp-json"}));
  add_common(app.add_subcommand(
      "omega-check", "sample the value-set convexity witness construction"));
  add_common(app.add_subcommand(
      "p1", "closed-form projection onto two quadratic constraints"));

  CLI11_PARSE(app, argc, argv);

  cfg.command = app.get_subcommands().front()->get_name();
  return sqcqp::cli::run(cfg, std::cout);
}
