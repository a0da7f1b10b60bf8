#pragma once

#include "sqcqp/minimax_descent.hpp"
#include "sqcqp/quadform.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sqcqp::certify {

inline constexpr double kDefaultTol = 1e-8;

enum class Verdict { CertifiedGlobal, FritzJohnOnly, Failed };

std::string to_string(Verdict v);

struct KktCertificate {
  Vector gamma;
  double w = 0.0;  // a_J + sum gamma_k a_k, the scalar curvature condition
  double stationarity_residual = 0.0;
  Vector complementarity;  // gamma_k f_k(x*)
  double primal_violation = 0.0;
  Verdict verdict = Verdict::Failed;
  std::vector<std::string> notes;

  // Assumption snapshot backing the verdict.
  std::optional<bool> slater;
  bool assumption2 = false;
  bool dimension_ok = false;
};

// Checks stationarity, complementarity, the scalar curvature condition and
// primal feasibility at (x, gamma). CertifiedGlobal additionally requires a
// recorded Slater point, the curvature assumption, and either m + 1 < n or
// the m = 2, n >= 3 alternative; without those the residual pass downgrades
// to FritzJohnOnly so global optimality is never over-claimed.
KktCertificate verify_kkt(const Problem& p, const Vector& x, const Vector& gamma,
                          double tol = kDefaultTol);

struct MultiplierResult {
  bool found = false;
  Vector gamma;
  double residual = 0.0;
  std::string reason;
};

// Recovers multipliers at a feasible point: support restricted to the active
// set, nonnegative least squares on the stationarity system, with the scalar
// curvature inequality enforced through a weighted equality retry.
MultiplierResult find_multipliers(const Problem& p, const Vector& x, double tol = kDefaultTol);

struct FritzJohnCertificate {
  double gamma0 = 0.0;
  Vector gamma;
  double stationarity_residual = 0.0;
  Vector complementarity;
  double primal_violation = 0.0;
  double curvature = 0.0;  // gamma0 a_J + sum gamma_k a_k
  bool passes = false;
};

FritzJohnCertificate verify_fritz_john(const Problem& p, const Vector& x, double gamma0,
                                       const Vector& gamma, double tol = kDefaultTol);

struct Assumption2Result {
  bool holds = false;
  Vector gamma;  // witness, valid when holds
};

Assumption2Result check_assumption2(const Problem& p);

struct SlaterResult {
  bool found = false;
  Vector x0;
  double max_f = 0.0;
};

// Phase-1 of the barrier on the lifted feasible set, then multi-start
// descent on max_k f_k. NotFound is inconclusive.
SlaterResult check_slater(const Problem& p, const minimax::Budget& budget = {});

// Strict positivity test for gamma1 H_1 + gamma2 H_2 with the bordered
// coefficient matrices of a two-constraint problem.
bool check_h_condition_m2(const Problem& p, double gamma1, double gamma2);

// Newton polish of the KKT system on the support of gamma. Returns false
// when the system is singular or the polish left the support; x and gamma
// are updated in place only on success.
bool refine_kkt(const Problem& p, Vector& x, Vector& gamma, int iters = 20);

nlohmann::json certificate_report(const KktCertificate& c);

}  // namespace sqcqp::certify
