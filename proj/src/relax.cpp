#include "sqcqp/relax.hpp"

#include "sqcqp/json_io.hpp"

#include <cmath>
#include <sstream>

namespace sqcqp::relax {

Sdp2Program build_sdp2(const Problem& p) {
  Sdp2Program prog;
  prog.n = p.n;
  prog.alpha_J = Vector::Constant(p.n, p.objective.a);
  prog.b_J = p.objective.b;
  prog.c_J = p.objective.c;
  for (const auto& f : p.constraints)
    prog.rows.push_back({Vector::Constant(p.n, f.a), f.b, f.c});
  return prog;
}

barrier::Program to_barrier_program(const Sdp2Program& prog) {
  const int n = prog.n;
  barrier::Program bp;
  bp.dim = 2 * n;
  bp.cost = Vector::Zero(2 * n);
  bp.cost.head(n) = 2.0 * prog.b_J;
  bp.cost.tail(n) = prog.alpha_J;
  bp.cost_offset = prog.c_J;

  for (const auto& row : prog.rows) {
    barrier::Constraint c;
    c.lin = Vector::Zero(2 * n);
    c.lin.head(n) = 2.0 * row.b;
    c.lin.tail(n) = row.alpha;
    c.offset = row.c;
    bp.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i) {
    barrier::Constraint c;
    c.quad = {{i, 1.0}};
    c.lin = Vector::Zero(2 * n);
    c.lin[n + i] = -1.0;
    bp.constraints.push_back(std::move(c));
  }
  return bp;
}

SocpView build_socp(const Problem& p) {
  SocpView v;
  v.n = p.n;
  v.objective_offset = p.objective.c;
  for (int i = 0; i < p.n; ++i)
    v.objective.push_back({p.objective.a, p.objective.a, 2.0 * p.objective.b[i]});
  for (const auto& f : p.constraints) {
    SocpView::Row row;
    row.c = f.c;
    for (int i = 0; i < p.n; ++i) row.coef.push_back({f.a, f.a, 2.0 * f.b[i]});
    v.rows.push_back(std::move(row));
  }
  return v;
}

Eigen::Vector3d lift_triple(double x, double y) {
  return {(y + 1.0) / 2.0, (y - 1.0) / 2.0, x};
}

bool cone_member(const Eigen::Vector3d& t, double tol) {
  return t[0] >= std::hypot(t[1], t[2]) - tol;
}

double socp_objective(const SocpView& v, const Vector& x, const Vector& y) {
  double obj = v.objective_offset;
  for (int i = 0; i < v.n; ++i) {
    const Eigen::Vector3d t = lift_triple(x[i], y[i]);
    obj += v.objective[i].t0 * t[0] + v.objective[i].t1 * t[1] + v.objective[i].t2 * t[2];
  }
  return obj;
}

nlohmann::json socp_to_json(const SocpView& v) {
  auto tri = [](const SocpView::Tri& t) { return nlohmann::json::array({t.t0, t.t1, t.t2}); };
  nlohmann::json obj = nlohmann::json::array();
  for (const auto& t : v.objective) obj.push_back(tri(t));
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : v.rows) {
    nlohmann::json coef = nlohmann::json::array();
    for (const auto& t : r.coef) coef.push_back(tri(t));
    rows.push_back({{"coef", coef}, {"c", r.c}});
  }
  return nlohmann::json{
      {"n", v.n},
      {"triple", "((y_i+1)/2, (y_i-1)/2, x_i)"},
      {"cone", "t0 >= norm([t1, t2]) per index"},
      {"objective", obj},
      {"objective_offset", v.objective_offset},
      {"constraints", rows}};
}

std::string shor_sdp_text(const Problem& p) {
  const int n = p.n;
  const int m = p.m();
  std::ostringstream os;
  os.precision(17);
  os << "\"Shor relaxation export, SDPA sparse format.\n";
  os << "\"Block 1 (order " << n + 1 << ") is the bordered moment matrix [[1, x'], [x, X]].\n";
  os << "\"Rows 1.." << m << " encode Tr(A_k X) + 2 b_k'x + c_k <= 0 through nonnegative\n";
  os << "\"slacks in diagonal block 2 (entry k), as equalities F_k . Y = -c_k.\n";
  os << "\"Row " << m + 1 << " pins the corner entry to 1. The exported dual maximum equals\n";
  os << "\"-(minimum of the relaxation) + " << p.objective.c << " (constant objective offset).\n";
  os << m + 1 << " = mDIM\n";
  os << 2 << " = nBLOCK\n";
  os << n + 1 << " -" << m << " = bLOCKsTRUCT\n";
  for (int k = 0; k < m; ++k) os << -p.constraints[k].c + 0.0 << (k + 1 < m ? " " : "");
  os << (m > 0 ? " " : "") << 1.0 << "\n";

  auto entry = [&os](int mat, int blk, int i, int j, double v) {
    if (v != 0.0) os << mat << " " << blk << " " << i << " " << j << " " << v << "\n";
  };

  // F0 = -(objective matrix): block-1 corner row carries -b_J, diagonal -a_J.
  for (int j = 0; j < n; ++j) entry(0, 1, 1, j + 2, -p.objective.b[j]);
  for (int i = 0; i < n; ++i) entry(0, 1, i + 2, i + 2, -p.objective.a);

  for (int k = 0; k < m; ++k) {
    const QuadForm& f = p.constraints[k];
    for (int j = 0; j < n; ++j) entry(k + 1, 1, 1, j + 2, f.b[j]);
    for (int i = 0; i < n; ++i) entry(k + 1, 1, i + 2, i + 2, f.a);
    entry(k + 1, 2, k + 1, k + 1, 1.0);
  }
  entry(m + 1, 1, 1, 1, 1.0);
  return os.str();
}

void export_shor_sdp(const Problem& p, const std::string& path) {
  io::write_text(path, shor_sdp_text(p));
}

double lifted_kkt_residual(const Sdp2Program& prog, const Vector& x, const Vector& y,
                           const Vector& gamma, const Vector& nu) {
  const int n = prog.n;
  const int m = static_cast<int>(prog.rows.size());
  double worst = 0.0;
  double a_sum = prog.alpha_J[0];
  for (int k = 0; k < m; ++k) a_sum += gamma[k] * prog.rows[k].alpha[0];

  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(a_sum - nu[i]));
    double st = 2.0 * prog.b_J[i] + 2.0 * nu[i] * x[i];
    for (int k = 0; k < m; ++k) st += 2.0 * gamma[k] * prog.rows[k].b[i];
    worst = std::max(worst, std::abs(st));
    worst = std::max(worst, std::abs(nu[i] * (x[i] * x[i] - y[i])));
    worst = std::max(worst, std::max(0.0, x[i] * x[i] - y[i]));
  }
  for (int k = 0; k < m; ++k) {
    const double g =
        prog.rows[k].alpha.dot(y) + 2.0 * prog.rows[k].b.dot(x) + prog.rows[k].c;
    worst = std::max(worst, std::abs(gamma[k] * g));
    worst = std::max(worst, std::max(0.0, g));
  }
  return worst;
}

RelaxSolution solve_relaxation(const Problem& p, const barrier::Options& opts) {
  // The barrier works on the coefficient-normalized problem: the feasible
  // set is unchanged, the row multipliers are scale-invariant, and the
  // solver never sees badly scaled data. Value and coupling multipliers
  // scale back by sigma.
  const double sigma = std::max(coefficient_scale(p), 1e-300);
  QuadForm obj{p.objective.a / sigma, p.objective.b / sigma, p.objective.c / sigma};
  std::vector<QuadForm> cons;
  for (const auto& f : p.constraints) cons.push_back({f.a / sigma, f.b / sigma, f.c / sigma});
  const Problem scaled = Problem::make(std::move(obj), std::move(cons));

  const Sdp2Program prog = build_sdp2(p);
  const barrier::Program bp = to_barrier_program(build_sdp2(scaled));

  RelaxSolution sol;
  const barrier::Phase1Result ph = barrier::phase1(bp, opts);
  if (!ph.feasible) {
    sol.status = barrier::Status::Infeasible;
    sol.note = "phase-1 found no strictly interior point for the lifted program";
    return sol;
  }

  const barrier::SolverResult r = barrier::solve(bp, ph.u, opts);
  sol.status = r.status;
  sol.newton_iters = r.newton_iters;
  sol.x = r.u.head(p.n);
  sol.y = r.u.tail(p.n);
  sol.gamma = r.multipliers.head(p.m());
  sol.coupling_multipliers = sigma * r.multipliers.tail(p.n);
  sol.nu = std::max(0.0, p.objective.a + [&] {
    double s = 0.0;
    for (int k = 0; k < p.m(); ++k) s += sol.gamma[k] * p.constraints[k].a;
    return s;
  }());
  sol.value = sigma * r.objective;
  sol.coupling_residuals = sol.y - sol.x.cwiseProduct(sol.x);
  sol.kkt_residual = lifted_kkt_residual(prog, sol.x, sol.y, sol.gamma,
                                         sol.coupling_multipliers);
  sol.note = r.note;

  if (r.status == barrier::Status::Unbounded) {
    sol.unbounded = true;
    sol.value = -std::numeric_limits<double>::infinity();
  }
  return sol;
}

RelaxSolution recover_and_check(const Problem& p, RelaxSolution sol, double tol) {
  // Exactness claims only make sense for a converged solve.
  if (sol.status != barrier::Status::Optimal || sol.unbounded) return sol;
  const double teff = tol * (1.0 + coefficient_scale(p));
  const double coupling_max =
      sol.coupling_residuals.size() ? sol.coupling_residuals.cwiseAbs().maxCoeff() : 0.0;
  const EvalReport rep = evaluate(p, sol.x);

  if (sol.nu > teff) {
    sol.exact = coupling_max <= teff && rep.max_violation <= teff;
    if (!sol.exact)
      sol.note = "positive coupling multiplier but lift did not close: |y - x.^2| = " +
                 std::to_string(coupling_max);
  } else {
    sol.exact = coupling_max <= teff && rep.max_violation <= teff &&
                std::abs(rep.objective - sol.value) <= teff;
    if (!sol.exact) {
      // Vanishing coupling multiplier leaves the optimal face flat in y, and
      // the central path parks at its analytic center. Any sign pattern with
      // x_i^2 = y_i that stays feasible at the same objective closes the lift.
      Vector root_y = sol.y.cwiseMax(0.0).cwiseSqrt();
      std::vector<Vector> patterns;
      Vector sx(sol.x.size());
      for (int i = 0; i < sol.x.size(); ++i) sx[i] = sol.x[i] < 0.0 ? -1.0 : 1.0;
      patterns.push_back(sx);
      patterns.push_back(Vector::Ones(sol.x.size()));
      patterns.push_back(-Vector::Ones(sol.x.size()));
      QuadForm lagr = aggregate(sol.gamma, p);
      Vector sb(sol.x.size());
      for (int i = 0; i < sol.x.size(); ++i) sb[i] = lagr.b[i] > 0.0 ? -1.0 : 1.0;
      patterns.push_back(sb);
      for (const Vector& s : patterns) {
        const Vector xh = s.cwiseProduct(root_y);
        const EvalReport rh = evaluate(p, xh);
        if (rh.max_violation <= teff && std::abs(rh.objective - sol.value) <= teff) {
          sol.x = xh;
          sol.coupling_residuals = sol.y - xh.cwiseProduct(xh);
          sol.exact = true;
          sol.note = "recovered by sign rounding on the flat optimal face";
          break;
        }
      }
    }
  }

  {
    const EvalReport rep_now = evaluate(p, sol.x);
    if (rep_now.max_violation <= teff)
      sol.gap_vs_certified = rep_now.objective - sol.value;
  }

  if (sol.exact) {
    sol.certificate = certify::verify_kkt(p, sol.x, sol.gamma, tol);
    sol.certificate_set = true;
    if (sol.certificate.verdict == certify::Verdict::Failed) {
      Vector xr = sol.x;
      Vector gr = sol.gamma;
      if (certify::refine_kkt(p, xr, gr)) {
        certify::KktCertificate polished = certify::verify_kkt(p, xr, gr, tol);
        if (polished.verdict != certify::Verdict::Failed) {
          polished.notes.push_back("certificate from Newton-polished KKT pair");
          sol.certificate = polished;
          sol.x = xr;
          sol.gamma = gr;
          sol.y = xr.cwiseProduct(xr);
          const EvalReport rep2 = evaluate(p, xr);
          if (rep2.max_violation <= teff) sol.gap_vs_certified = rep2.objective - sol.value;
        }
      }
    }
  }
  return sol;
}

nlohmann::json relaxation_report(const RelaxSolution& sol) {
  nlohmann::json j;
  if (sol.unbounded)
    j["value"] = "-inf";
  else
    j["value"] = sol.value;
  j["x"] = io::vector_to_json(sol.x);
  j["y"] = io::vector_to_json(sol.y);
  j["gamma"] = io::vector_to_json(sol.gamma);
  j["nu"] = sol.nu;
  j["exact"] = sol.exact;
  if (std::isnan(sol.gap_vs_certified))
    j["gap_vs_certified"] = nullptr;
  else
    j["gap_vs_certified"] = sol.gap_vs_certified;
  j["status"] = barrier::to_string(sol.status);
  j["kkt_residual"] = sol.kkt_residual;
  j["newton_iters"] = sol.newton_iters;
  if (!sol.note.empty()) j["note"] = sol.note;
  if (sol.certificate_set) j["certificate"] = certify::certificate_report(sol.certificate);
  return j;
}

}  // namespace sqcqp::relax
