#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace sqcqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Scalar quadratic functional f(x) = a*||x||^2 + 2*b'x + c.
// All coefficients are stored in this "two-b" convention; file loaders
// normalize "one-b" inputs (b <- b/2) on the way in.
struct QuadForm {
  double a = 0.0;
  Vector b;
  double c = 0.0;

  int dim() const { return static_cast<int>(b.size()); }
};

double eval(const QuadForm& f, const Vector& x);

// 2a*x + 2b under the two-b convention.
Vector grad(const QuadForm& f, const Vector& x);

double coefficient_scale(const QuadForm& f);

struct ScalarQuadMin {
  bool bounded = false;
  double value = 0.0;
  Vector argmin;
};

// Exact global minimum over R^n: vertex c - ||b||^2/a when a > 0, the
// constant c when a = 0 and b = 0, unbounded otherwise.
ScalarQuadMin global_min_scalar_quadratic(const QuadForm& f);

// sum_k gamma_k f_k; gamma must be componentwise nonnegative.
QuadForm weighted_sum(const Vector& gamma, const std::vector<QuadForm>& fs);

struct Problem {
  int n = 0;
  QuadForm objective;
  std::vector<QuadForm> constraints;

  // m + 1 < n. Recorded, never enforced: solvers still run when it fails,
  // certification strength is downgraded instead.
  bool dimension_ok = false;
  // Some gamma >= 0, gamma != 0 gives a_J + gamma'a >= 0 (scalar test).
  bool assumption2 = false;
  // Strictly feasible point, once one is known.
  std::optional<Vector> slater_point;

  int m() const { return static_cast<int>(constraints.size()); }

  // Validates dimensions and finiteness, fills the derived flags.
  static Problem make(QuadForm objective, std::vector<QuadForm> constraints);
};

double coefficient_scale(const Problem& p);

// J + sum_k gamma_k f_k as a single scalar quadratic (the Lagrangian in x).
QuadForm aggregate(const Vector& gamma, const Problem& p);

// Numerical activity threshold at constraint value f: 1e-8 * (1 + |f|).
double active_tol(double f_value);

struct EvalReport {
  Vector values;                 // f_k(x)
  double objective = 0.0;        // J(x)
  double max_violation = 0.0;    // max(0, max_k f_k(x))
  std::vector<int> active_set;   // 0-based k with |f_k(x)| <= active_tol
};

EvalReport evaluate(const Problem& p, const Vector& x);

}  // namespace sqcqp
