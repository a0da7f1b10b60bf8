#pragma once

#include "sqcqp/minimax_descent.hpp"
#include "sqcqp/quadform.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sqcqp::slemma {

// Raised when the stacked linear-coefficient matrix has full column rank,
// i.e. its null space is trivial and no midpoint witness exists.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orthonormal basis of the null space of B (rows are the b_k'), via SVD.
// Singular values below rank_rtol * sigma_max count as zero.
Matrix null_space_basis(const Matrix& B, double rank_rtol = 1e-10);

struct OmegaWitness {
  Vector x_v, x_w;
  double lambda = 0.0;
  Vector u_star;
  double alpha_star = 0.0;
  Vector x_tilde;
  bool degenerate = false;  // x_v == x_w branch

  double sphere_residual = 0.0;      // | ||xt||^2 - (l*||xv||^2 + (1-l)*||xw||^2) |
  double linsys_residual = 0.0;      // max_k |b_k'(xt - (l*xv + (1-l)*xw))|
  double inequality_residual = 0.0;  // max_k (f_k(xt) - l*f_k(xv) - (1-l)*f_k(xw))+
};

double witness_tol(const Vector& x_v, const Vector& x_w);

// Midpoint-membership witness: a point x_tilde on the interpolating sphere
// whose functional values sit below the convex combination, built from a
// null-space direction of the linear coefficients. Requires 0 < lambda < 1;
// throws RankError when the null space is trivial.
OmegaWitness build_omega_witness(const std::vector<QuadForm>& fs, const Vector& x_v,
                                 const Vector& x_w, double lambda);

// True iff sum_k gamma_k f_k is bounded below with minimum >= -tol.
// gamma must be nonnegative and not all zero.
bool check_multiplier_alternative(const Vector& gamma, const std::vector<QuadForm>& fs,
                                  double tol = -1.0);

struct StrictPointResult {
  bool found = false;
  Vector x;
  double max_f = 0.0;
};

// Multi-start search for x with every f_k(x) < 0; NotFound is inconclusive.
StrictPointResult search_strict_point(const std::vector<QuadForm>& fs,
                                      const minimax::Budget& budget = {});

struct AlternativeResult {
  enum class Kind { StrictPoint, SeparatingMultipliers, Undetermined };
  Kind which = Kind::Undetermined;
  Vector x;       // strict point, when found
  Vector gamma;   // separating multipliers, when found
  double detail = 0.0;  // max_f at x, or aggregate minimum
};

// Runs the strict-point search, then a coarse nonnegative multiplier grid.
AlternativeResult classify_alternative(const std::vector<QuadForm>& fs,
                                       const minimax::Budget& budget = {},
                                       int grid_points = 20, double gamma_max = 2.0);

struct ProbeReport {
  int samples = 0;
  int passes = 0;
  double worst_sphere_residual = 0.0;
  double worst_inequality_residual = 0.0;
  bool structural_failure = false;
  struct Failure {
    int sample = 0;
    std::string error;
    double sphere_residual = 0.0;
    double inequality_residual = 0.0;
  };
  std::vector<Failure> failures;
};

// Random-sample convexity probe: draws (x_v, x_w, lambda) triples, builds
// witnesses and tallies the invariant residuals. With a candidate point the
// objective functional is shifted by J(candidate).
ProbeReport omega_convexity_probe(const std::vector<QuadForm>& fs, int n, int samples,
                                  std::uint64_t seed, bool parallel = true);
ProbeReport omega_convexity_probe(const Problem& p, int samples, std::uint64_t seed,
                                  const std::optional<Vector>& candidate = {},
                                  bool parallel = true);

// Functionals f_0..f_m probed for a problem: the (optionally shifted)
// objective followed by the constraints.
std::vector<QuadForm> probe_functionals(const Problem& p, const std::optional<Vector>& candidate);

nlohmann::json probe_report_json(const ProbeReport& r);

}  // namespace sqcqp::slemma
