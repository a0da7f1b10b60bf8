#pragma once

#include "sqcqp/certify.hpp"
#include "sqcqp/minimax_descent.hpp"
#include "sqcqp/quadform.hpp"

#include "json.hpp"

#include <array>
#include <string>

namespace sqcqp::msolve {

// Constraint data in the one-b convention used by this module throughout:
// f(x) = a ||x||^2 + b'x + c.
struct OneB {
  double a = 0.0;
  Vector b;
  double c = 0.0;
};

double eval_one_b(const OneB& f, const Vector& x);

// Projection of z onto the set {f_1 <= 0, f_2 <= 0}: minimize
// 0.5 ||x - z||^2. Internally shifted so the target is the origin.
struct P1Instance {
  int n = 0;
  Vector z;
  std::array<OneB, 2> constraints;  // original coordinates
  std::array<OneB, 2> shifted;      // after xbar = x - z
  bool dim_hypothesis = false;      // n > 3

  static P1Instance make(Vector z, OneB f1, OneB f2);
};

// Two-b problem view (J = 0.5 ||x - z||^2) for certification and the
// Slater search.
Problem to_problem(const P1Instance& inst);

enum class Branch { Empty, SingletonPositiveW, SingletonZeroW, BothActive, BothLinear };

std::string to_string(Branch b);

struct Candidate {
  Branch branch = Branch::Empty;
  std::vector<int> active;  // 0-based constraint indices
  Eigen::Vector2d gamma = Eigen::Vector2d::Zero();
  double w = 1.0;  // 1 + 2 sum gamma_k a_k
  Vector x;        // original coordinates
  double objective = 0.0;
  bool accepted = false;
  std::string reason;
  double feasibility_residual = 0.0;     // max(0, f_k(x))
  double complementarity_residual = 0.0; // max over active |f_k(x)|
};

struct P1Solution {
  bool solved = false;
  Candidate best;
  certify::KktCertificate certificate;
  std::vector<Candidate> audit;  // every candidate, accepted or not
  bool slater_found = false;
  Vector slater_point;
  std::string note;
};

// Enumerates the four active-set configurations, filters by primal
// feasibility, dual feasibility w >= 0 and complementarity, certifies the
// survivors and returns the least-objective one (ties: smaller gamma).
P1Solution solve_p1(const P1Instance& inst, double tol = 1e-9,
                    const minimax::Budget& slater_budget = {});

// Single active constraint k: the w = 0 sphere branch (a < 0, b = 0) and
// the cleared quadratic in gamma for w > 0.
std::vector<Candidate> solve_singleton(const P1Instance& inst, int k, double tol = 1e-9);

// Both constraints active: one linear and one quadratic equation in
// (gamma_1, gamma_2); Gram system when both constraints are affine.
std::vector<Candidate> solve_both_active(const P1Instance& inst, double tol = 1e-9);

// P1 input file:
//   { "n": int, "z": [..], "convention": "one-b" | "two-b",
//     "constraints": [ {a, b, c}, {a, b, c} ] }
P1Instance load_p1(const std::string& path);
P1Instance p1_from_json(const nlohmann::json& j);

nlohmann::json p1_report(const P1Solution& sol);

}  // namespace sqcqp::msolve
