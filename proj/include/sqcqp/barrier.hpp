#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace sqcqp::barrier {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Convex inequality g(u) = sum_j q_j u_{i_j}^2 + r'u + s <= 0 with q_j >= 0.
// Covers both the affine rows and the coupling rows of the lifted program.
struct Constraint {
  std::vector<std::pair<int, double>> quad;  // (index, coefficient), q >= 0
  Vector lin;
  double offset = 0.0;

  double value(const Vector& u) const;
  Vector gradient(const Vector& u) const;
};

struct Program {
  int dim = 0;
  Vector cost;
  double cost_offset = 0.0;
  std::vector<Constraint> constraints;

  double objective(const Vector& u) const { return cost.dot(u) + cost_offset; }
};

struct Options {
  double t0 = 1.0;
  double growth = 10.0;       // outer multiplier on t
  double newton_tol = 1e-10;  // on half the squared Newton decrement
  // Duality-gap target m_total / t. The relative stationarity floor of the
  // Newton system grows like eps * t, so targets much below 1e-8 are not
  // resolvable in doubles.
  double tol_gap = 1e-7;
  int max_newton = 500;       // per centering stage
  double armijo_slope = 0.25;
  double backtrack = 0.5;
  double diverge_factor = 1e8;  // ||u|| > factor * (1 + ||u0||) flags divergence
  bool log = false;             // iteration trace on stderr
};

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

std::string to_string(Status s);

struct SolverResult {
  Status status = Status::IterLimit;
  Vector u;
  Vector multipliers;  // 1 / (t * (-g_j)) at termination
  double gap_estimate = 0.0;
  double objective = 0.0;
  int newton_iters = 0;  // total accepted Newton steps
  int outer_iters = 0;
  double kkt_residual = 0.0;  // ||c + sum mu_j grad g_j|| at the final point
  // Largest objective increase seen between consecutive centering stages;
  // the central path keeps this at roundoff level.
  double max_outer_objective_increase = 0.0;
  std::string note;
};

// Central-path follower; u0 must be strictly feasible.
SolverResult solve(const Program& prog, const Vector& u0, const Options& opt = {});

struct Phase1Result {
  bool feasible = false;
  Vector u;
  double margin = 0.0;  // -max_j g_j(u) when feasible
  int newton_iters = 0;
};

// Finds a strictly interior point by minimizing a bounded auxiliary slack
// with the same barrier machinery.
Phase1Result phase1(const Program& prog, const Options& opt = {});
Phase1Result phase1(const Program& prog, const Vector& u_start, const Options& opt = {});

}  // namespace sqcqp::barrier
