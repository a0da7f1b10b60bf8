#include "sqcqp/barrier.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace sqcqp::barrier {

double Constraint::value(const Vector& u) const {
  double v = lin.dot(u) + offset;
  for (const auto& [i, q] : quad) v += q * u[i] * u[i];
  return v;
}

Vector Constraint::gradient(const Vector& u) const {
  Vector g = lin;
  for (const auto& [i, q] : quad) g[i] += 2.0 * q * u[i];
  return g;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterLimit: return "iter-limit";
  }
  return "?";
}

namespace {

bool strictly_feasible(const Program& prog, const Vector& u) {
  for (const auto& g : prog.constraints)
    if (g.value(u) >= 0.0) return false;
  return true;
}

double barrier_value(const Program& prog, double t, const Vector& u) {
  double psi = t * prog.cost.dot(u);
  for (const auto& g : prog.constraints) {
    const double v = g.value(u);
    if (v >= 0.0) return std::numeric_limits<double>::infinity();
    psi -= std::log(-v);
  }
  return psi;
}

struct CenterOutcome {
  bool converged = false;
  bool diverged = false;
  int steps = 0;
  double grad_norm = 0.0;  // ||grad psi_t|| at exit
};

// Damped Newton on psi_t(u) = t c'u - sum log(-g_j(u)). Armijo backtracking
// carries the normal regime; once the expected decrement drops below the
// floating-point resolution of psi (large t), the step switches to the
// self-concordant rule 1/(1+lambda), pure Newton for lambda <= 1/4, which
// needs no value comparison. When kkt_target > 0 the loop keeps polishing
// past decrement convergence until ||grad psi_t|| <= t * kkt_target, so the
// extracted multipliers satisfy the stationarity bound directly.
CenterOutcome center(const Program& prog, double t, Vector& u, const Options& opt,
                     double u0_norm, double kkt_target) {
  CenterOutcome out;
  const int mcons = static_cast<int>(prog.constraints.size());
  Vector grad(prog.dim);
  Matrix hess(prog.dim, prog.dim);
  double prev_grad_norm = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  int polish_iters = 0;

  for (int it = 0; it < opt.max_newton; ++it) {
    grad = t * prog.cost;
    hess.setZero();
    for (int j = 0; j < mcons; ++j) {
      const auto& g = prog.constraints[j];
      const double v = g.value(u);
      const double inv = 1.0 / (-v);
      const Vector gg = g.gradient(u);
      grad += inv * gg;
      hess.noalias() += (inv * inv) * gg * gg.transpose();
      for (const auto& [i, q] : g.quad) hess(i, i) += 2.0 * q * inv;
    }
    out.grad_norm = grad.norm();

    // Jacobi-equilibrated solve with iterative refinement; the raw system
    // is far too ill-conditioned near the end of the path.
    Vector d = hess.diagonal().cwiseAbs().cwiseSqrt();
    for (int i = 0; i < prog.dim; ++i)
      if (d[i] < 1e-150) d[i] = 1.0;
    const Matrix hs = d.cwiseInverse().asDiagonal() * hess * d.cwiseInverse().asDiagonal();
    Eigen::LDLT<Matrix> ldlt(hs);
    auto solve_scaled = [&](const Vector& rhs) -> Vector {
      Vector y = ldlt.solve(rhs.cwiseQuotient(d));
      for (int refine = 0; refine < 2; ++refine) {
        const Vector res = rhs.cwiseQuotient(d) - hs * y;
        y += ldlt.solve(res);
      }
      return y.cwiseQuotient(d);
    };
    Vector step = solve_scaled(-grad);
    double decrement2 = step.allFinite() ? -grad.dot(step) : -1.0;
    if (decrement2 <= 0.0) {
      hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      step = hess.ldlt().solve(-grad);
      decrement2 = step.allFinite() ? -grad.dot(step) : -1.0;
      if (decrement2 <= 0.0) {
        out.converged = 0.5 * std::abs(decrement2) <= 1e3 * opt.newton_tol;
        return out;
      }
    }
    const double lambda = std::sqrt(decrement2);
    const bool dec_ok = 0.5 * decrement2 <= opt.newton_tol;
    const bool kkt_ok = kkt_target <= 0.0 || out.grad_norm <= t * kkt_target;
    if (dec_ok && kkt_ok) {
      out.converged = true;
      return out;
    }
    if (dec_ok) {
      // Polishing mode: bounded budget, stop once the gradient norm plateaus.
      if (++polish_iters >= 60) {
        out.converged = true;
        return out;
      }
      if (out.grad_norm >= 0.97 * prev_grad_norm) {
        if (++stagnant >= 8) {
          out.converged = true;
          return out;
        }
      } else {
        stagnant = 0;
      }
      prev_grad_norm = std::min(prev_grad_norm, out.grad_norm);
    }

    const double psi = barrier_value(prog, t, u);
    const double fp_noise = 1e-13 * (1.0 + std::abs(psi));
    double alpha;
    bool moved = false;
    if (opt.armijo_slope * decrement2 > fp_noise) {
      alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        const Vector trial = u + alpha * step;
        const double tv = barrier_value(prog, t, trial);
        if (tv <= psi - opt.armijo_slope * alpha * decrement2) {
          u = trial;
          moved = true;
          break;
        }
        alpha *= opt.backtrack;
      }
    } else {
      // Below value resolution: damped self-concordant step, feasibility
      // backoff only.
      alpha = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
      for (int ls = 0; ls < 80; ++ls) {
        if (strictly_feasible(prog, u + alpha * step)) {
          u += alpha * step;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
    }
    if (!moved) {
      out.converged = 0.5 * decrement2 <= 1e3 * opt.newton_tol;
      return out;
    }
    ++out.steps;
    if (opt.log)
      std::cerr << "[barrier] t=" << t << " it=" << it << " dec2=" << decrement2
                << " alpha=" << alpha << " obj=" << prog.cost.dot(u) << "\n";
    if (u.norm() > opt.diverge_factor * (1.0 + u0_norm)) {
      out.diverged = true;
      return out;
    }
  }
  return out;
}

}  // namespace

SolverResult solve(const Program& prog, const Vector& u0, const Options& opt) {
  if (u0.size() != prog.dim) throw std::invalid_argument("solve: start dimension mismatch");
  if (!strictly_feasible(prog, u0))
    throw std::invalid_argument("solve: start point is not strictly feasible");
  const int mcons = static_cast<int>(prog.constraints.size());

  SolverResult res;
  res.u = u0;
  const double u0_norm = u0.norm();
  const double obj0 = prog.cost.dot(u0);
  const double kkt_target = 3.0 * opt.tol_gap * (1.0 + prog.cost.norm());

  double t = opt.t0;
  double prev_stage_obj = std::numeric_limits<double>::infinity();
  while (true) {
    const bool final_stage = mcons / t <= opt.tol_gap;
    const CenterOutcome oc =
        center(prog, t, res.u, opt, u0_norm, final_stage ? kkt_target : -1.0);
    res.newton_iters += oc.steps;
    ++res.outer_iters;
    const double obj = prog.cost.dot(res.u);

    if (oc.diverged) {
      const bool decreasing = obj < obj0 - 1e-8 * (1.0 + std::abs(obj0));
      res.status = decreasing ? Status::Unbounded : Status::IterLimit;
      res.note = decreasing ? "iterates diverged with decreasing objective (heuristic)"
                            : "iterates diverged";
      break;
    }
    if (!oc.converged) {
      res.status = Status::IterLimit;
      res.note = "newton iteration cap reached";
      break;
    }
    if (prev_stage_obj < std::numeric_limits<double>::infinity())
      res.max_outer_objective_increase =
          std::max(res.max_outer_objective_increase, obj - prev_stage_obj);
    prev_stage_obj = obj;
    if (final_stage) {
      res.status = Status::Optimal;
      break;
    }
    t *= opt.growth;
  }

  res.multipliers.resize(mcons);
  for (int j = 0; j < mcons; ++j) {
    const double v = prog.constraints[j].value(res.u);
    res.multipliers[j] = v < 0.0 ? 1.0 / (t * (-v)) : std::numeric_limits<double>::infinity();
  }
  res.gap_estimate = mcons / t;
  res.objective = prog.objective(res.u);

  Vector kkt = prog.cost;
  for (int j = 0; j < mcons; ++j)
    if (std::isfinite(res.multipliers[j]))
      kkt += res.multipliers[j] * prog.constraints[j].gradient(res.u);
  res.kkt_residual = kkt.norm();
  return res;
}

Phase1Result phase1(const Program& prog, const Options& opt) {
  return phase1(prog, Vector::Zero(prog.dim), opt);
}

Phase1Result phase1(const Program& prog, const Vector& u_start, const Options& opt) {
  // Auxiliary program over (u, s): minimize s subject to g_j(u) - s <= 0 and
  // s >= -1. The lower bound keeps the slack bounded so the plain central
  // path applies; any s < 0 certifies an interior point.
  Program aux;
  aux.dim = prog.dim + 1;
  aux.cost = Vector::Zero(aux.dim);
  aux.cost[prog.dim] = 1.0;
  for (const auto& g : prog.constraints) {
    Constraint c;
    c.quad = g.quad;
    c.lin = Vector::Zero(aux.dim);
    c.lin.head(prog.dim) = g.lin;
    c.lin[prog.dim] = -1.0;
    c.offset = g.offset;
    aux.constraints.push_back(std::move(c));
  }
  Constraint bound;
  bound.lin = Vector::Zero(aux.dim);
  bound.lin[prog.dim] = -1.0;
  bound.offset = -1.0;
  aux.constraints.push_back(std::move(bound));

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& g : prog.constraints) worst = std::max(worst, g.value(u_start));

  Vector u0(aux.dim);
  u0.head(prog.dim) = u_start;
  u0[prog.dim] = std::max(worst, 0.0) + 1.0;

  Options popt = opt;
  popt.tol_gap = std::max(opt.tol_gap, 1e-8);
  SolverResult r = solve(aux, u0, popt);

  Phase1Result out;
  out.newton_iters = r.newton_iters;
  out.u = r.u.head(prog.dim);
  double maxg = -std::numeric_limits<double>::infinity();
  for (const auto& g : prog.constraints) maxg = std::max(maxg, g.value(out.u));
  out.feasible = maxg < 0.0;
  out.margin = -maxg;
  return out;
}

}  // namespace sqcqp::barrier
