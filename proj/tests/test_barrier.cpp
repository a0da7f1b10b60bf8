#include "sqcqp/barrier.hpp"
#include "sqcqp/relax.hpp"
#include "sqcqp/rng.hpp"

#include "doctest.h"
#include "oracle.hpp"

using namespace sqcqp;

namespace {

// min x subject to x >= 0, one variable.
barrier::Program one_var() {
  barrier::Program prog;
  prog.dim = 1;
  prog.cost = Vector::Ones(1);
  barrier::Constraint c;
  c.lin = -Vector::Ones(1);
  prog.constraints.push_back(std::move(c));
  return prog;
}

barrier::Program lifted(const Problem& p) {
  return relax::to_barrier_program(relax::build_sdp2(p));
}

}  // namespace

TEST_CASE("one-variable analytic optimum and multiplier") {
  const barrier::Program prog = one_var();
  const auto r = barrier::solve(prog, Vector::Ones(1));
  CHECK(r.status == barrier::Status::Optimal);
  CHECK(std::abs(r.u[0]) <= 2.0 * barrier::Options{}.tol_gap);  // x(t) = 1/t
  CHECK(r.multipliers[0] == doctest::Approx(1.0).epsilon(1e-6));
  { barrier::Options defaults; CHECK(r.kkt_residual <= 10.0 * defaults.tol_gap * (1.0 + prog.cost.norm())); }
}

TEST_CASE("phase one finds interior points") {
  SUBCASE("lifted unit ball") {
    const Problem p = Problem::make(QuadForm{1.0, Vector::Zero(1), 0.0},
                                    {QuadForm{1.0, Vector::Zero(1), -1.0}});
    const auto ph = barrier::phase1(lifted(p));
    REQUIRE(ph.feasible);
    CHECK(ph.margin > 0.0);
  }
  SUBCASE("contradictory half-spaces are infeasible") {
    barrier::Program prog;
    prog.dim = 1;
    prog.cost = Vector::Zero(1);
    barrier::Constraint le;  // x <= -1
    le.lin = Vector::Ones(1);
    le.offset = 1.0;
    barrier::Constraint ge;  // x >= 1
    ge.lin = -Vector::Ones(1);
    ge.offset = 1.0;
    prog.constraints = {le, ge};
    CHECK_FALSE(barrier::phase1(prog).feasible);
  }
  SUBCASE("one-dimensional nonconvex instance lift has an interior point") {
    const Problem p = Problem::make(
        QuadForm{-1.0, Vector{{0.5}}, 0.0},
        {QuadForm{1.0, Vector{{0.0}}, -1.0}, QuadForm{0.0, Vector{{-0.5}}, 0.0}});
    const auto ph = barrier::phase1(lifted(p));
    REQUIRE(ph.feasible);
    // e.g. x = 1/2, y = 1/2 satisfies all three rows strictly
  }
}

TEST_CASE("lifted one-dimensional nonconvex instance solves to -1") {
  const Problem p = Problem::make(
      QuadForm{-1.0, Vector{{0.5}}, 0.0},
      {QuadForm{1.0, Vector{{0.0}}, -1.0}, QuadForm{0.0, Vector{{-0.5}}, 0.0}});
  const barrier::Program prog = lifted(p);
  const auto ph = barrier::phase1(prog);
  REQUIRE(ph.feasible);
  const auto r = barrier::solve(prog, ph.u);
  CHECK(r.status == barrier::Status::Optimal);
  CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("convex projection lift matches the closed form") {
  // min ||x - p||^2 over the unit ball, ||p|| = 2: value (||p|| - 1)^2 = 1.
  const int n = 3;
  Vector target = Vector::Zero(n);
  target[0] = 2.0;
  const Problem p = Problem::make(QuadForm{1.0, -target, target.squaredNorm()},
                                  {QuadForm{1.0, Vector::Zero(n), -1.0}});
  const barrier::Program prog = lifted(p);
  const auto ph = barrier::phase1(prog);
  REQUIRE(ph.feasible);
  const auto r = barrier::solve(prog, ph.u);
  CHECK(r.status == barrier::Status::Optimal);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("unbounded program is flagged") {
  barrier::Program prog;  // min -x with x >= 0
  prog.dim = 1;
  prog.cost = -Vector::Ones(1);
  barrier::Constraint c;
  c.lin = -Vector::Ones(1);
  prog.constraints.push_back(std::move(c));
  const auto r = barrier::solve(prog, Vector::Ones(1));
  CHECK(r.status == barrier::Status::Unbounded);
}

TEST_CASE("solver invariants on random lifted instances") {
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    const Problem p = oracle::random_sqcqp(5, 2, rng);
    const barrier::Program prog = lifted(p);
    const auto ph = barrier::phase1(prog);
    REQUIRE(ph.feasible);
    const auto r = barrier::solve(prog, ph.u);
    REQUIRE(r.status == barrier::Status::Optimal);

    const int mtot = static_cast<int>(prog.constraints.size());
    barrier::Options defaults;
    CHECK(r.kkt_residual <= 10.0 * defaults.tol_gap * (1.0 + prog.cost.norm()));
    CHECK(r.max_outer_objective_increase <= 1e-8 * (1.0 + std::abs(r.objective)));
    for (int j = 0; j < mtot; ++j) {
      const double slack = -prog.constraints[j].value(r.u);
      CHECK(slack > 0.0);
      CHECK(std::abs(r.multipliers[j] * slack) <= mtot * defaults.tol_gap);
    }
  }
}

TEST_CASE("identical inputs give bit-identical runs") {
  Rng rng(53);
  const Problem p = oracle::random_sqcqp(6, 3, rng);
  const barrier::Program prog = lifted(p);
  const auto ph1 = barrier::phase1(prog);
  const auto ph2 = barrier::phase1(prog);
  REQUIRE(ph1.feasible);
  CHECK(ph1.newton_iters == ph2.newton_iters);
  CHECK((ph1.u - ph2.u).norm() == 0.0);

  const auto r1 = barrier::solve(prog, ph1.u);
  const auto r2 = barrier::solve(prog, ph2.u);
  CHECK(r1.newton_iters == r2.newton_iters);
  CHECK(r1.outer_iters == r2.outer_iters);
  CHECK((r1.u - r2.u).norm() == 0.0);
  CHECK((r1.multipliers - r2.multipliers).norm() == 0.0);
  CHECK(r1.objective == r2.objective);
}

TEST_CASE("solve rejects an infeasible start") {
  const barrier::Program prog = one_var();
  CHECK_THROWS_AS(barrier::solve(prog, -Vector::Ones(1)), std::invalid_argument);
}
