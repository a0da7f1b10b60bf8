#include "sqcqp/json_io.hpp"
#include "sqcqp/msolve.hpp"
#include "sqcqp/rng.hpp"

#include "doctest.h"
#include "oracle.hpp"

using namespace sqcqp;
using msolve::Branch;
using msolve::OneB;
using msolve::P1Instance;

namespace {

OneB radial(double a, double c, int n) { return {a, Vector::Zero(n), c}; }

P1Instance sphere_case() {  // w = 0 branch: -||x||^2 + 1 <= 0, ||x||^2 <= 9
  return P1Instance::make(Vector::Zero(4), radial(-1.0, 1.0, 4), radial(1.0, -9.0, 4));
}

P1Instance ball_case() {  // unit ball centered at 2 e1, outer ball radius 3
  return P1Instance::make(Vector::Zero(4), OneB{1.0, Vector{{-4.0, 0, 0, 0}}, 3.0},
                          radial(1.0, -9.0, 4));
}

P1Instance halfspace_case() {
  return P1Instance::make(Vector::Zero(4), OneB{0.0, Vector{{1.0, 0, 0, 0}}, 1.0},
                          OneB{0.0, Vector{{0.0, 1.0, 0, 0}}, 1.0});
}

}  // namespace

TEST_CASE("instance shifting and the problem view") {
  Rng rng(3);
  const Vector z = rng.normal_vector(5);
  OneB f{0.7, rng.normal_vector(5), -2.0};
  const P1Instance inst = P1Instance::make(z, f, radial(1.0, -9.0, 5));

  // Shift identity: f(x) = fbar(x - z) for random x.
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.normal_vector(5);
    CHECK(msolve::eval_one_b(inst.constraints[0], x) ==
          doctest::Approx(msolve::eval_one_b(inst.shifted[0], x - z)).epsilon(1e-12));
  }

  const Problem p = msolve::to_problem(inst);
  CHECK(p.objective.a == doctest::Approx(0.5));
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.normal_vector(5);
    CHECK(eval(p.objective, x) == doctest::Approx(0.5 * (x - z).squaredNorm()).epsilon(1e-12));
    CHECK(eval(p.constraints[0], x) ==
          doctest::Approx(msolve::eval_one_b(inst.constraints[0], x)).epsilon(1e-12));
  }
}

TEST_CASE("sphere case solves on the w = 0 branch") {
  const msolve::P1Solution sol = msolve::solve_p1(sphere_case());
  REQUIRE(sol.solved);
  CHECK(sol.best.branch == Branch::SingletonZeroW);
  CHECK(sol.best.gamma[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.best.gamma[1] == 0.0);
  CHECK(sol.best.w == 0.0);
  CHECK(sol.best.x.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.best.objective == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.certificate.verdict == certify::Verdict::CertifiedGlobal);
}

TEST_CASE("ball case solves on the positive-w branch") {
  const msolve::P1Solution sol = msolve::solve_p1(ball_case());
  REQUIRE(sol.solved);
  CHECK(sol.best.branch == Branch::SingletonPositiveW);
  CHECK(sol.best.gamma[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.best.w == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.best.x.isApprox(Vector{{1.0, 0.0, 0.0, 0.0}}, 1e-9));
  CHECK(sol.best.objective == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.certificate.verdict == certify::Verdict::CertifiedGlobal);

  // The multiplier quadratic for the active ball has the advertised
  // coefficients (-4, -4, 3) up to normalization, with roots 1/2 and -3/2.
  const auto cands = msolve::solve_singleton(ball_case(), 0);
  bool saw_half = false, saw_reject = false;
  for (const auto& c : cands) {
    if (c.accepted) {
      saw_half = c.gamma[0] == doctest::Approx(0.5);
    } else if (!c.accepted && c.gamma[0] != 0.0) {
      saw_reject = true;
      CHECK(c.gamma[0] == doctest::Approx(-1.5));
    }
  }
  CHECK(saw_half);
  CHECK(saw_reject);
}

TEST_CASE("half-space intersection solves on the Gram branch") {
  const msolve::P1Solution sol = msolve::solve_p1(halfspace_case());
  REQUIRE(sol.solved);
  CHECK(sol.best.branch == Branch::BothLinear);
  CHECK(sol.best.gamma[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.best.gamma[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.best.x.isApprox(Vector{{-1.0, -1.0, 0.0, 0.0}}, 1e-10));
  CHECK(sol.certificate.verdict == certify::Verdict::CertifiedGlobal);
}

TEST_CASE("single linear constraint activates through the a = 0 root") {
  // b = 2 e1, c = 1: gamma = c/||b||^2 = 1/4, x = -gamma b = -e1/2.
  const P1Instance inst = P1Instance::make(
      Vector::Zero(4), OneB{0.0, Vector{{2.0, 0, 0, 0}}, 1.0}, radial(1.0, -9.0, 4));
  const msolve::P1Solution sol = msolve::solve_p1(inst);
  REQUIRE(sol.solved);
  CHECK(sol.best.branch == Branch::SingletonPositiveW);
  CHECK(sol.best.gamma[0] == doctest::Approx(0.25));
  CHECK(sol.best.w == doctest::Approx(1.0));
  CHECK(sol.best.x.isApprox(Vector{{-0.5, 0.0, 0.0, 0.0}}, 1e-10));
  CHECK(msolve::eval_one_b(inst.constraints[0], sol.best.x) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("feasible target short-circuits to the empty active set") {
  const P1Instance inst =
      P1Instance::make(Vector::Ones(4) * 0.1, radial(1.0, -9.0, 4), radial(1.0, -4.0, 4));
  const msolve::P1Solution sol = msolve::solve_p1(inst);
  REQUIRE(sol.solved);
  CHECK(sol.best.branch == Branch::Empty);
  CHECK(sol.best.x.isApprox(inst.z));
  CHECK(sol.best.gamma.norm() == 0.0);
}

TEST_CASE("index swap keeps the quadratic machinery stable") {
  // a1 = 0 and a2 = 1: the solver must lead with the curved constraint.
  const Vector z = Vector::Zero(6);
  OneB lin{0.0, Vector{{1.0, 1.0, 0, 0, 0, 0}}, 0.0};
  OneB ball{1.0, Vector{{-2.0, 0, 0, 0, 0, 0}}, 0.2};
  const P1Instance inst = P1Instance::make(z, lin, ball);
  const msolve::P1Solution sol = msolve::solve_p1(inst);
  REQUIRE(sol.solved);
  const oracle::Min om = oracle::penalty_multistart_min(msolve::to_problem(inst), 80, 200, 77);
  REQUIRE(om.found);
  CHECK(sol.best.objective <= om.value + 1e-5);
}

TEST_CASE("general both-active instance matches the descent oracle") {
  // Hollow plus ball with offsets chosen so no singleton branch survives.
  Rng rng(7);
  int both_active_seen = 0;
  for (int t = 0; t < 60 && both_active_seen < 5; ++t) {
    const P1Instance inst = oracle::random_p1(6, rng);
    const msolve::P1Solution sol = msolve::solve_p1(inst);
    if (!sol.solved || sol.best.branch != Branch::BothActive) continue;
    ++both_active_seen;
    const oracle::Min om =
        oracle::penalty_multistart_min(msolve::to_problem(inst), 100, 200, 900 + t);
    REQUIRE(om.found);
    CHECK(sol.best.objective <= om.value + 1e-5);
    CHECK(std::abs(sol.best.objective - om.value) <= 1e-4 * (1.0 + std::abs(om.value)));
  }
  CHECK(both_active_seen == 5);
}

TEST_CASE("every accepted candidate re-verifies at 1e-7") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const P1Instance inst = oracle::random_p1(5 + t % 6, rng);
    const msolve::P1Solution sol = msolve::solve_p1(inst);
    if (!sol.solved) continue;
    Problem p = msolve::to_problem(inst);
    if (sol.slater_found) p.slater_point = sol.slater_point;
    for (const auto& cand : sol.audit) {
      if (!cand.accepted) continue;
      const auto cert = certify::verify_kkt(p, cand.x, Vector(cand.gamma), 1e-7);
      CHECK(cert.verdict != certify::Verdict::Failed);
    }
  }
}

TEST_CASE("sphere-branch membership and root audit invariants") {
  Rng rng(13);
  for (int t = 0; t < 60; ++t) {
    const P1Instance inst = oracle::random_p1(6, rng);
    for (int k = 0; k < 2; ++k) {
      for (const auto& cand : msolve::solve_singleton(inst, k)) {
        if (!cand.accepted) continue;
        if (cand.branch == Branch::SingletonZeroW) {
          const double r2 = -inst.shifted[k].c / inst.shifted[k].a;
          CHECK((cand.x - inst.z).squaredNorm() ==
                doctest::Approx(r2).epsilon(1e-10));
        } else {
          const double f = msolve::eval_one_b(inst.constraints[k], cand.x);
          CHECK(std::abs(f) <= 1e-9 * (1.0 + std::abs(inst.constraints[k].c)));
        }
      }
    }
  }
}

TEST_CASE("enumeration always finds a certified candidate on generated instances") {
  Rng rng(17);
  int solved = 0, total = 0;
  for (int t = 0; t < 40; ++t) {
    const P1Instance inst = oracle::random_p1(7, rng);
    ++total;
    const msolve::P1Solution sol = msolve::solve_p1(inst);
    if (sol.solved) ++solved;
  }
  CHECK(solved == total);
}

TEST_CASE("p1 json loading") {
  nlohmann::json j = {{"n", 4},
                      {"z", {0.0, 0.0, 0.0, 0.0}},
                      {"convention", "two-b"},
                      {"constraints",
                       nlohmann::json::array({{{"a", -1.0}, {"b", {0, 0, 0, 0}}, {"c", 1.0}},
                                              {{"a", 1.0}, {"b", {0, 0, 0, 0}}, {"c", -9.0}}})}};
  const P1Instance inst = msolve::p1_from_json(j);  // two-b doubles b internally
  CHECK(inst.constraints[0].a == -1.0);
  CHECK(inst.dim_hypothesis);

  j["constraints"][0]["b"] = {1.0, 0.0};  // wrong length
  CHECK_THROWS_AS(msolve::p1_from_json(j), sqcqp::io::ParseError);
  j.erase("convention");
  CHECK_THROWS_AS(msolve::p1_from_json(j), sqcqp::io::ParseError);
}
