#pragma once

#include "sqcqp/barrier.hpp"
#include "sqcqp/certify.hpp"
#include "sqcqp/quadform.hpp"

#include "json.hpp"

#include <string>

namespace sqcqp::relax {

// Lifted convex program in (x, y): minimize alpha_J'y + 2 b_J'x + c_J
// subject to alpha_k'y + 2 b_k'x + c_k <= 0 and the per-coordinate coupling
// x_i^2 - y_i <= 0. For this problem class every alpha vector is constant.
struct Sdp2Program {
  int n = 0;
  Vector alpha_J;  // all entries a_J
  Vector b_J;
  double c_J = 0.0;
  struct Row {
    Vector alpha;  // all entries a_k
    Vector b;
    double c = 0.0;
  };
  std::vector<Row> rows;

  double objective(const Vector& x, const Vector& y) const {
    return alpha_J.dot(y) + 2.0 * b_J.dot(x) + c_J;
  }
};

Sdp2Program build_sdp2(const Problem& p);

// Stacks u = [x; y] and hands the lifted program to the barrier solver.
barrier::Program to_barrier_program(const Sdp2Program& prog);

// Per-coordinate second-order-cone view over triples
// ((y_i+1)/2, (y_i-1)/2, x_i). A triple coefficient (t0, t1, t2) contributes
// t0 (y+1)/2 + t1 (y-1)/2 + t2 x, so (a, a, 2b) reproduces a y + 2 b x.
struct SocpView {
  int n = 0;
  struct Tri {
    double t0 = 0.0, t1 = 0.0, t2 = 0.0;
  };
  std::vector<Tri> objective;
  double objective_offset = 0.0;
  struct Row {
    std::vector<Tri> coef;
    double c = 0.0;
  };
  std::vector<Row> rows;
};

SocpView build_socp(const Problem& p);

Eigen::Vector3d lift_triple(double x, double y);

// First component >= norm of the other two, within tol.
bool cone_member(const Eigen::Vector3d& t, double tol);

double socp_objective(const SocpView& v, const Vector& x, const Vector& y);

nlohmann::json socp_to_json(const SocpView& v);

// Shor relaxation in SDPA sparse text format (one PSD block of order n+1
// for the bordered moment matrix, a diagonal slack block for the
// inequality rows). Conventions are documented in the file header comments.
std::string shor_sdp_text(const Problem& p);
void export_shor_sdp(const Problem& p, const std::string& path);

struct RelaxSolution {
  Vector x, y;
  Vector gamma;                 // multipliers of the m lifted rows
  Vector coupling_multipliers;  // per-coordinate multipliers of x_i^2 <= y_i
  double nu = 0.0;              // max(0, a_J + gamma'a), the common coupling multiplier
  double value = 0.0;
  bool unbounded = false;
  bool exact = false;
  Vector coupling_residuals;  // y_i - x_i^2
  double gap_vs_certified = std::numeric_limits<double>::quiet_NaN();
  barrier::Status status = barrier::Status::IterLimit;
  int newton_iters = 0;
  double kkt_residual = 0.0;  // worst residual of the lifted KKT system
  bool certificate_set = false;
  certify::KktCertificate certificate;
  std::string note;
};

// Phase-1 + central path on the lifted program; multipliers come from the
// barrier, nu from the scalar stationarity identity.
RelaxSolution solve_relaxation(const Problem& p, const barrier::Options& opts = {});

// Finalizes exactness: with nu above tol the coupling must close and the
// recovered point is certified with the same multipliers (a short KKT
// polish is tried when the raw pair just misses the certificate tolerance).
RelaxSolution recover_and_check(const Problem& p, RelaxSolution sol, double tol = 1e-6);

// Worst residual of the lifted KKT system at (x, y, gamma, nu_i).
double lifted_kkt_residual(const Sdp2Program& prog, const Vector& x, const Vector& y,
                           const Vector& gamma, const Vector& nu);

nlohmann::json relaxation_report(const RelaxSolution& sol);

}  // namespace sqcqp::relax
