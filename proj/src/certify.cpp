#include "sqcqp/certify.hpp"

#include "sqcqp/barrier.hpp"
#include "sqcqp/json_io.hpp"
#include "sqcqp/nnls.hpp"
#include "sqcqp/relax.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqcqp::certify {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedGlobal: return "CertifiedGlobal";
    case Verdict::FritzJohnOnly: return "FritzJohnOnly";
    case Verdict::Failed: return "Failed";
  }
  return "?";
}

namespace {

void require_gamma(const Problem& p, const Vector& gamma) {
  if (gamma.size() != p.m()) throw std::invalid_argument("gamma length differs from m");
  if ((gamma.array() < 0.0).any()) throw std::invalid_argument("negative gamma entry");
}

}  // namespace

KktCertificate verify_kkt(const Problem& p, const Vector& x, const Vector& gamma, double tol) {
  require_gamma(p, gamma);
  if (x.size() != p.n) throw std::invalid_argument("point dimension differs from n");

  const double teff = tol * (1.0 + coefficient_scale(p));
  KktCertificate cert;
  cert.gamma = gamma;

  const QuadForm lagr = aggregate(gamma, p);
  cert.w = lagr.a;
  cert.stationarity_residual = grad(lagr, x).norm();
  cert.complementarity.resize(p.m());
  double compl_worst = 0.0;
  for (int k = 0; k < p.m(); ++k) {
    cert.complementarity[k] = gamma[k] * eval(p.constraints[k], x);
    compl_worst = std::max(compl_worst, std::abs(cert.complementarity[k]));
  }
  cert.primal_violation = evaluate(p, x).max_violation;

  cert.slater = p.slater_point.has_value() ? std::optional<bool>(true) : std::nullopt;
  cert.assumption2 = p.assumption2;
  cert.dimension_ok = p.dimension_ok;

  const bool residuals_ok = cert.stationarity_residual <= teff && compl_worst <= teff &&
                            cert.primal_violation <= teff && cert.w >= -teff;
  if (!residuals_ok) {
    cert.verdict = Verdict::Failed;
    return cert;
  }

  bool sufficiency = true;
  if (!p.slater_point.has_value()) {
    sufficiency = false;
    cert.notes.push_back("no strictly feasible point recorded; sufficiency not established");
  }
  if (!p.assumption2) {
    sufficiency = false;
    cert.notes.push_back("curvature assumption fails: no gamma >= 0 makes a_J + gamma'a >= 0");
  }
  if (!p.dimension_ok) {
    const bool m2_alt = p.m() == 2 && p.n >= 3 && check_h_condition_m2(p, gamma[0], gamma[1]);
    if (m2_alt) {
      cert.notes.push_back("m + 1 < n fails; certified through the m = 2 bordered-matrix test");
    } else {
      sufficiency = false;
      cert.notes.push_back("m + 1 < n fails and no alternative hypothesis applies");
    }
  }
  cert.verdict = sufficiency ? Verdict::CertifiedGlobal : Verdict::FritzJohnOnly;
  return cert;
}

MultiplierResult find_multipliers(const Problem& p, const Vector& x, double tol) {
  if (x.size() != p.n) throw std::invalid_argument("point dimension differs from n");
  const double teff = tol * (1.0 + coefficient_scale(p));
  const EvalReport rep = evaluate(p, x);
  if (rep.max_violation > teff)
    throw std::invalid_argument("find_multipliers: point is infeasible");

  MultiplierResult out;
  out.gamma = Vector::Zero(p.m());
  const Vector gJ = grad(p.objective, x);

  // Activity band widens with the caller's tolerance: points produced by an
  // epsilon-accurate solver sit a hair inside their active constraints.
  std::vector<int> active;
  for (int k = 0; k < p.m(); ++k)
    if (std::abs(rep.values[k]) <= std::max(active_tol(rep.values[k]), teff))
      active.push_back(k);
  if (active.empty()) {
    out.residual = gJ.norm();
    if (out.residual <= teff && p.objective.a >= -teff) {
      out.found = true;
    } else {
      out.reason = out.residual > teff
                       ? "no active constraint can cancel the objective gradient"
                       : "stationary interior point with negative curvature";
    }
    return out;
  }

  Matrix G(p.n, static_cast<int>(active.size()));
  Vector a_active(static_cast<int>(active.size()));
  for (size_t j = 0; j < active.size(); ++j) {
    G.col(static_cast<int>(j)) = grad(p.constraints[active[j]], x);
    a_active[static_cast<int>(j)] = p.constraints[active[j]].a;
  }

  auto finish = [&](const Vector& gamma_active) {
    Vector gamma = Vector::Zero(p.m());
    for (size_t j = 0; j < active.size(); ++j)
      gamma[active[j]] = std::max(0.0, gamma_active[static_cast<int>(j)]);
    const double res = (gJ + G * gamma_active.cwiseMax(0.0)).norm();
    const double w = p.objective.a + a_active.dot(gamma_active.cwiseMax(0.0));
    if (res <= teff && w >= -teff) {
      out.found = true;
      out.gamma = gamma;
      out.residual = res;
      return true;
    }
    out.residual = res;
    return false;
  };

  // Plain stationarity fit first; retry with the curvature inequality pinned
  // to equality through a heavily weighted extra row.
  const NnlsResult fit = nnls(G, -gJ);
  if (finish(fit.x)) return out;

  const double weight = 1e8 * (1.0 + G.cwiseAbs().maxCoeff() + gJ.cwiseAbs().maxCoeff());
  Matrix Gw(p.n + 1, G.cols());
  Gw.topRows(p.n) = G;
  Gw.bottomRows(1) = weight * a_active.transpose();
  Vector yw(p.n + 1);
  yw.head(p.n) = -gJ;
  yw[p.n] = -weight * p.objective.a;
  const NnlsResult fit2 = nnls(Gw, yw);
  if (finish(fit2.x)) return out;

  out.reason = "stationarity system has no nonnegative solution within tolerance";
  return out;
}

FritzJohnCertificate verify_fritz_john(const Problem& p, const Vector& x, double gamma0,
                                       const Vector& gamma, double tol) {
  require_gamma(p, gamma);
  if (gamma0 < 0.0) throw std::invalid_argument("negative gamma0");
  const double total = gamma0 + (gamma.size() ? gamma.sum() : 0.0);
  if (total <= 0.0) throw std::invalid_argument("all multipliers zero");
  if (x.size() != p.n) throw std::invalid_argument("point dimension differs from n");

  const double teff = tol * (1.0 + coefficient_scale(p));
  FritzJohnCertificate fj;
  fj.gamma0 = gamma0;
  fj.gamma = gamma;

  QuadForm lagr = weighted_sum(gamma, p.constraints);
  lagr.a += gamma0 * p.objective.a;
  lagr.b += gamma0 * p.objective.b;
  lagr.c += gamma0 * p.objective.c;
  fj.stationarity_residual = grad(lagr, x).norm();
  fj.curvature = lagr.a;
  fj.complementarity.resize(p.m());
  double compl_worst = 0.0;
  for (int k = 0; k < p.m(); ++k) {
    fj.complementarity[k] = gamma[k] * eval(p.constraints[k], x);
    compl_worst = std::max(compl_worst, std::abs(fj.complementarity[k]));
  }
  fj.primal_violation = evaluate(p, x).max_violation;
  fj.passes =
      fj.stationarity_residual <= teff && compl_worst <= teff && fj.curvature >= -teff;
  return fj;
}

Assumption2Result check_assumption2(const Problem& p) {
  Assumption2Result out;
  out.gamma = Vector::Zero(p.m());
  const double a_J = p.objective.a;
  int k_star = 0;
  for (int k = 1; k < p.m(); ++k)
    if (p.constraints[k].a > p.constraints[k_star].a) k_star = k;
  const double a_best = p.constraints[k_star].a;

  if (a_J > 0.0) {
    out.holds = true;
    out.gamma[k_star] = a_best >= 0.0 ? 1.0 : a_J / (-2.0 * a_best);
  } else if (a_J == 0.0 && a_best >= 0.0) {
    out.holds = true;
    out.gamma[k_star] = 1.0;
  } else if (a_J < 0.0 && a_best > 0.0) {
    out.holds = true;
    out.gamma[k_star] = -a_J / a_best;
  }
  return out;
}

SlaterResult check_slater(const Problem& p, const minimax::Budget& budget) {
  SlaterResult out;

  const barrier::Program lifted = relax::to_barrier_program(relax::build_sdp2(p));
  const barrier::Phase1Result ph = barrier::phase1(lifted);
  if (ph.feasible) {
    const Vector x = ph.u.head(p.n);
    const double mf = minimax::max_value(p.constraints, x);
    if (mf < 0.0) {
      out.found = true;
      out.x0 = x;
      out.max_f = mf;
      return out;
    }
  }

  const minimax::Result r = minimax::search_negative_point(p.constraints, p.n, budget);
  out.found = r.found;
  out.x0 = r.x;
  out.max_f = r.value;
  return out;
}

bool check_h_condition_m2(const Problem& p, double gamma1, double gamma2) {
  if (p.m() != 2) throw std::invalid_argument("bordered-matrix test needs exactly 2 constraints");
  const auto& f1 = p.constraints[0];
  const auto& f2 = p.constraints[1];
  const double ag = gamma1 * f1.a + gamma2 * f2.a;
  const double cg = gamma1 * f1.c + gamma2 * f2.c;
  const Vector bg = gamma1 * f1.b + gamma2 * f2.b;
  return ag > 0.0 && cg * ag - bg.squaredNorm() > 0.0;
}

bool refine_kkt(const Problem& p, Vector& x, Vector& gamma, int iters) {
  std::vector<int> support;
  const double theta = 1e-10 * (1.0 + (gamma.size() ? gamma.maxCoeff() : 0.0));
  for (int k = 0; k < p.m(); ++k)
    if (gamma[k] > theta) support.push_back(k);

  const int s = static_cast<int>(support.size());
  Vector xx = x;
  Vector gg = gamma;

  // Iterates may pass through slightly negative gamma, so the Lagrangian
  // coefficients are assembled without the sign validation of aggregate().
  auto lagrangian = [&p](const Vector& g) {
    QuadForm l = p.objective;
    for (int k = 0; k < p.m(); ++k) {
      l.a += g[k] * p.constraints[k].a;
      l.b += g[k] * p.constraints[k].b;
      l.c += g[k] * p.constraints[k].c;
    }
    return l;
  };

  for (int it = 0; it < iters; ++it) {
    const QuadForm lagr = lagrangian(gg);
    Vector F(p.n + s);
    F.head(p.n) = lagr.a * xx + lagr.b;  // half the Lagrangian gradient
    for (int j = 0; j < s; ++j) F[p.n + j] = eval(p.constraints[support[j]], xx);
    if (F.norm() <= 1e-15 * (1.0 + coefficient_scale(p))) break;

    Matrix Jac = Matrix::Zero(p.n + s, p.n + s);
    Jac.topLeftCorner(p.n, p.n) = lagr.a * Matrix::Identity(p.n, p.n);
    for (int j = 0; j < s; ++j) {
      const auto& f = p.constraints[support[j]];
      Jac.block(0, p.n + j, p.n, 1) = f.a * xx + f.b;
      Jac.block(p.n + j, 0, 1, p.n) = grad(f, xx).transpose();
    }
    const Vector step = Jac.fullPivLu().solve(-F);
    if (!step.allFinite()) return false;
    xx += step.head(p.n);
    for (int j = 0; j < s; ++j) gg[support[j]] += step[p.n + j];
    if (step.norm() <= 1e-14 * (1.0 + xx.norm())) break;
  }

  for (int k = 0; k < p.m(); ++k) {
    if (gg[k] < 0.0) {
      if (gg[k] < -1e-9 * (1.0 + gamma.cwiseAbs().maxCoeff())) return false;
      gg[k] = 0.0;
    }
  }
  x = xx;
  gamma = gg;
  return true;
}

nlohmann::json certificate_report(const KktCertificate& c) {
  nlohmann::json assumptions = {{"assumption2", c.assumption2},
                                {"dimension_ok", c.dimension_ok}};
  if (c.slater.has_value())
    assumptions["slater"] = *c.slater;
  else
    assumptions["slater"] = nullptr;
  return nlohmann::json{{"verdict", to_string(c.verdict)},
                        {"gamma", io::vector_to_json(c.gamma)},
                        {"w", c.w},
                        {"stationarity_residual", c.stationarity_residual},
                        {"complementarity", io::vector_to_json(c.complementarity)},
                        {"primal_violation", c.primal_violation},
                        {"assumptions", assumptions},
                        {"notes", c.notes}};
}

}  // namespace sqcqp::certify
