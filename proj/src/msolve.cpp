#include "sqcqp/msolve.hpp"

#include "sqcqp/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqcqp::msolve {

double eval_one_b(const OneB& f, const Vector& x) {
  return f.a * x.squaredNorm() + f.b.dot(x) + f.c;
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Empty: return "Empty";
    case Branch::SingletonPositiveW: return "SingletonPositiveW";
    case Branch::SingletonZeroW: return "SingletonZeroW";
    case Branch::BothActive: return "BothActive";
    case Branch::BothLinear: return "BothLinear";
  }
  return "?";
}

P1Instance P1Instance::make(Vector z, OneB f1, OneB f2) {
  P1Instance inst;
  inst.n = static_cast<int>(z.size());
  if (inst.n < 2) throw std::invalid_argument("projection instance needs n >= 2");
  for (const OneB* f : {&f1, &f2}) {
    if (f->b.size() != inst.n) throw std::invalid_argument("constraint dimension mismatch");
    if (!std::isfinite(f->a) || !std::isfinite(f->c) || !f->b.allFinite())
      throw std::invalid_argument("non-finite constraint coefficient");
  }
  if (!z.allFinite()) throw std::invalid_argument("non-finite target");
  inst.z = std::move(z);
  inst.constraints = {std::move(f1), std::move(f2)};
  for (int k = 0; k < 2; ++k) {
    const OneB& f = inst.constraints[k];
    OneB s;
    s.a = f.a;
    s.b = f.b + 2.0 * f.a * inst.z;
    s.c = f.a * inst.z.squaredNorm() + f.b.dot(inst.z) + f.c;
    inst.shifted[k] = std::move(s);
  }
  inst.dim_hypothesis = inst.n > 3;
  return inst;
}

Problem to_problem(const P1Instance& inst) {
  QuadForm obj{0.5, -0.5 * inst.z, 0.5 * inst.z.squaredNorm()};
  std::vector<QuadForm> cons;
  for (const OneB& f : inst.constraints) cons.push_back({f.a, 0.5 * f.b, f.c});
  return Problem::make(std::move(obj), std::move(cons));
}

namespace {

double shifted_scale(const P1Instance& inst) {
  double s = 0.0;
  for (const OneB& f : inst.shifted) {
    s = std::max(s, std::abs(f.a));
    s = std::max(s, std::abs(f.c));
    if (f.b.size()) s = std::max(s, f.b.cwiseAbs().maxCoeff());
  }
  return 1.0 + s;
}

// Real roots of A t^2 + B t + C = 0 via the q-formula; stable for small A
// (the spurious huge root gets filtered downstream).
std::vector<double> quadratic_roots(double A, double B, double C) {
  std::vector<double> roots;
  if (A == 0.0) {
    if (B != 0.0) roots.push_back(-C / B);
    return roots;
  }
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    if (disc > -1e-12 * (B * B + std::abs(4.0 * A * C))) disc = 0.0;  // grazing double root
    else return roots;
  }
  const double q = -(B + std::copysign(std::sqrt(disc), B == 0.0 ? 1.0 : B)) / 2.0;
  if (q == 0.0) {
    roots.push_back(0.0);
    return roots;
  }
  roots.push_back(q / A);
  const double r2 = C / q;
  if (std::abs(r2 - roots[0]) > 1e-14 * (1.0 + std::abs(r2))) roots.push_back(r2);
  return roots;
}

// Fills residuals and the common accept filters; x is in shifted coordinates.
Candidate finalize(const P1Instance& inst, Branch branch, std::vector<int> active,
                   const Eigen::Vector2d& gamma, double w, const Vector& x_shifted,
                   double tol) {
  const double teff = tol * shifted_scale(inst);
  Candidate cand;
  cand.branch = branch;
  cand.active = std::move(active);
  cand.gamma = gamma;
  cand.w = w;
  cand.x = x_shifted + inst.z;
  cand.objective = 0.5 * x_shifted.squaredNorm();

  double feas = 0.0;
  for (int k = 0; k < 2; ++k)
    feas = std::max(feas, eval_one_b(inst.shifted[k], x_shifted));
  cand.feasibility_residual = std::max(0.0, feas);
  for (int k : cand.active)
    cand.complementarity_residual = std::max(
        cand.complementarity_residual, std::abs(eval_one_b(inst.shifted[k], x_shifted)));

  if (cand.feasibility_residual > teff)
    cand.reason = "primal infeasible";
  else if (w < -teff)
    cand.reason = "dual infeasible (w < 0)";
  else if (cand.complementarity_residual > teff)
    cand.reason = "complementarity residual above tolerance";
  else {
    cand.accepted = true;
    cand.reason = "accepted";
  }
  return cand;
}

Candidate rejected(Branch branch, std::vector<int> active, const Eigen::Vector2d& gamma,
                   double w, std::string reason) {
  Candidate cand;
  cand.branch = branch;
  cand.active = std::move(active);
  cand.gamma = gamma;
  cand.w = w;
  cand.reason = std::move(reason);
  return cand;
}

// Unit vector orthogonal to b (n >= 2, b != 0).
Vector orthogonal_unit(const Vector& b) {
  int j = 0;
  for (int i = 1; i < b.size(); ++i)
    if (std::abs(b[i]) < std::abs(b[j])) j = i;
  Vector v = Vector::Zero(b.size());
  v[j] = 1.0;
  v -= (b[j] / b.squaredNorm()) * b;
  return v / v.norm();
}

}  // namespace

std::vector<Candidate> solve_singleton(const P1Instance& inst, int k, double tol) {
  if (k < 0 || k > 1) throw std::invalid_argument("constraint index must be 0 or 1");
  std::vector<Candidate> out;
  const OneB& f = inst.shifted[k];
  const OneB& other = inst.shifted[1 - k];
  const double scale = shifted_scale(inst);
  const double bnorm2 = f.b.squaredNorm();
  auto gamma_pair = [k](double g) {
    Eigen::Vector2d gv = Eigen::Vector2d::Zero();
    gv[k] = g;
    return gv;
  };

  if (std::abs(f.a) <= 1e-14 * scale && bnorm2 <= 1e-28 * scale * scale) {
    out.push_back(rejected(Branch::SingletonPositiveW, {k}, Eigen::Vector2d::Zero(), 1.0,
                           "constraint is constant (a = 0, b = 0); nothing to activate"));
    return out;
  }

  // w = 0 sphere branch: needs a < 0 and a vanishing linear part.
  if (f.a < 0.0 && bnorm2 <= 1e-24 * scale * scale) {
    const double gamma = -1.0 / (2.0 * f.a);
    const double r2 = -f.c / f.a;
    if (r2 < -tol * scale) {
      out.push_back(rejected(Branch::SingletonZeroW, {k}, gamma_pair(gamma), 0.0,
                             "sphere is empty (c and a have the same sign)"));
    } else {
      const double r = std::sqrt(std::max(0.0, r2));
      Vector x;
      if (other.b.squaredNorm() > 1e-28 * scale * scale) {
        // Least value of the other constraint over the sphere.
        x = -(r / other.b.norm()) * other.b;
      } else {
        x = Vector::Zero(inst.n);
        if (r > 0.0) x[0] = r;
      }
      out.push_back(finalize(inst, Branch::SingletonZeroW, {k}, gamma_pair(gamma), 0.0, x, tol));
    }
  }

  // w > 0 branch: clear w from the complementarity equation
  // a g^2 ||b||^2 - g ||b||^2 w + c w^2 = 0 with w = 1 + 2 g a, giving
  // g^2 (4ca^2 - a||b||^2) + g (4ca - ||b||^2) + c = 0.
  const double A = 4.0 * f.c * f.a * f.a - f.a * bnorm2;
  const double B = 4.0 * f.c * f.a - bnorm2;
  for (double g : quadratic_roots(A, B, f.c)) {
    if (!std::isfinite(g)) continue;
    const Eigen::Vector2d gv = gamma_pair(g);
    const double w = 1.0 + 2.0 * g * f.a;
    if (g <= 0.0) {
      out.push_back(rejected(Branch::SingletonPositiveW, {k}, gv, w, "nonpositive multiplier root"));
      continue;
    }
    if (w <= 1e-10 * (1.0 + std::abs(2.0 * g * f.a))) {
      out.push_back(rejected(Branch::SingletonPositiveW, {k}, gv, w, "w is not positive"));
      continue;
    }
    const Vector x = -(g / w) * f.b;
    out.push_back(finalize(inst, Branch::SingletonPositiveW, {k}, gv, w, x, tol));
  }
  return out;
}

std::vector<Candidate> solve_both_active(const P1Instance& inst, double tol) {
  std::vector<Candidate> out;
  const double scale = shifted_scale(inst);
  const OneB& f1 = inst.shifted[0];
  const OneB& f2 = inst.shifted[1];

  const bool a1_zero = std::abs(f1.a) <= 1e-14 * scale;
  const bool a2_zero = std::abs(f2.a) <= 1e-14 * scale;

  if (a1_zero && a2_zero) {
    Eigen::Matrix2d gram;
    gram << f1.b.squaredNorm(), f1.b.dot(f2.b), f1.b.dot(f2.b), f2.b.squaredNorm();
    const double det = gram.determinant();
    if (std::abs(det) <= 1e-12 * scale * scale * scale * scale) {
      out.push_back(rejected(Branch::BothLinear, {0, 1}, Eigen::Vector2d::Zero(), 1.0,
                             "gradients are linearly dependent (Gram singular)"));
      return out;
    }
    const Eigen::Vector2d gamma = gram.inverse() * Eigen::Vector2d(f1.c, f2.c);
    if (gamma.minCoeff() < -1e-12 * scale) {
      out.push_back(rejected(Branch::BothLinear, {0, 1}, gamma, 1.0,
                             "Gram system multiplier is negative"));
      return out;
    }
    const Vector x = -(gamma[0] * f1.b + gamma[1] * f2.b);
    out.push_back(finalize(inst, Branch::BothLinear, {0, 1}, gamma.cwiseMax(0.0), 1.0, x, tol));
    return out;
  }

  // Work with the larger |a| in front so the cleared equations are stable.
  const int i0 = std::abs(f1.a) >= std::abs(f2.a) ? 0 : 1;
  const int i1 = 1 - i0;
  const OneB& g1 = inst.shifted[i0];
  const OneB& g2 = inst.shifted[i1];

  const double b11 = g1.b.squaredNorm();
  const double b22 = g2.b.squaredNorm();
  const double b12 = g1.b.dot(g2.b);

  const bool independent = b11 > 1e-24 * scale * scale && b22 > 1e-24 * scale * scale &&
                           b11 * b22 - b12 * b12 > 1e-20 * b11 * b22;

  auto unswap = [&](const Eigen::Vector2d& g) {
    Eigen::Vector2d gv;
    gv[i0] = g[0];
    gv[i1] = g[1];
    return gv;
  };

  // Linear equation from equating the two ||x||^2 expressions (a2 != 0) or
  // from the second complementarity directly (a2 = 0):
  //   a2 b1's - a1 b2's + (c2 a1 - c1 a2) w = 0.
  const double K = g2.c * g1.a - g1.c * g2.a;
  const double L1 = g2.a * b11 - g1.a * b12 + 2.0 * g1.a * K;
  const double L2 = g2.a * b12 - g1.a * b22 + 2.0 * g2.a * K;
  const double L0 = K;

  const double lscale = std::abs(L1) + std::abs(L2) + std::abs(L0);
  if (std::abs(L1) <= 1e-13 * lscale && std::abs(L2) <= 1e-13 * lscale) {
    out.push_back(rejected(Branch::BothActive, {0, 1}, Eigen::Vector2d::Zero(), 1.0,
                           std::abs(L0) <= 1e-13 * lscale
                               ? "degenerate linear equation (all coefficients vanish)"
                               : "inconsistent linear equation"));
  } else {
    // Parameterize the line and intersect with the cleared first
    // complementarity a1 ||s||^2 - w b1's + c1 w^2 = 0.
    const bool par_first = std::abs(L1) < std::abs(L2);  // solve for the larger pivot
    auto gamma_at = [&](double t) {
      Eigen::Vector2d g;
      if (par_first) {
        g[0] = t;
        g[1] = (-L0 - L1 * t) / L2;
      } else {
        g[1] = t;
        g[0] = (-L0 - L2 * t) / L1;
      }
      return g;
    };
    auto q_at = [&](double t) {
      const Eigen::Vector2d g = gamma_at(t);
      const Vector s = g[0] * g1.b + g[1] * g2.b;
      const double w = 1.0 + 2.0 * g[0] * g1.a + 2.0 * g[1] * g2.a;
      return g1.a * s.squaredNorm() - w * g1.b.dot(s) + g1.c * w * w;
    };
    const double q0 = q_at(0.0), qp = q_at(1.0), qm = q_at(-1.0);
    const double A = 0.5 * (qp + qm) - q0;
    const double B = 0.5 * (qp - qm);
    for (double t : quadratic_roots(A, B, q0)) {
      if (!std::isfinite(t)) continue;
      Eigen::Vector2d g = gamma_at(t);
      const double w = 1.0 + 2.0 * g[0] * g1.a + 2.0 * g[1] * g2.a;
      if (g.minCoeff() < -1e-12 * (1.0 + g.cwiseAbs().maxCoeff())) {
        out.push_back(rejected(Branch::BothActive, {0, 1}, unswap(g), w, "negative multiplier"));
        continue;
      }
      g = g.cwiseMax(0.0);
      if (w <= 1e-10 * (1.0 + std::abs(g[0] * g1.a) + std::abs(g[1] * g2.a))) {
        out.push_back(rejected(Branch::BothActive, {0, 1}, unswap(g), w, "w is not positive"));
        continue;
      }
      const Vector s = g[0] * g1.b + g[1] * g2.b;
      out.push_back(finalize(inst, Branch::BothActive, {0, 1}, unswap(g), w, -s / w, tol));
    }
  }

  // Dependent gradients admit w = 0 points that the cleared system misses;
  // scan that manifold and let certification judge the result.
  if (!independent && std::min(f1.a, f2.a) < 0.0 && b11 > 1e-24 * scale * scale) {
    const double beta = b12 / b11;  // g2.b ~= beta * g1.b
    const double denom = 2.0 * (g2.a - beta * g1.a);
    if (std::abs(denom) > 1e-14 * scale && beta <= 0.0) {
      const double gm2 = -1.0 / denom;
      const double gm1 = -beta * gm2;
      if (gm1 >= 0.0 && gm2 >= 0.0) {
        Eigen::Matrix2d M;
        M << g1.a, 1.0, g2.a, beta;
        if (std::abs(M.determinant()) > 1e-14 * scale) {
          const Eigen::Vector2d rho_sigma = M.inverse() * Eigen::Vector2d(-g1.c, -g2.c);
          const double rho = rho_sigma[0], sigma = rho_sigma[1];
          if (rho >= 0.0 && rho * b11 >= sigma * sigma) {
            Vector x = (sigma / b11) * g1.b;
            const double rad2 = rho - sigma * sigma / b11;
            if (rad2 > 0.0) x += std::sqrt(rad2) * orthogonal_unit(g1.b);
            Candidate cand = finalize(inst, Branch::BothActive, {0, 1},
                                      unswap({gm1, gm2}), 0.0, x, tol);
            cand.reason += " (w = 0 scan under dependent gradients)";
            out.push_back(std::move(cand));
          }
        }
      }
    }
  }
  return out;
}

P1Solution solve_p1(const P1Instance& inst, double tol, const minimax::Budget& slater_budget) {
  P1Solution sol;
  Problem prob = to_problem(inst);

  const certify::SlaterResult slater = certify::check_slater(prob, slater_budget);
  sol.slater_found = slater.found;
  if (slater.found) {
    sol.slater_point = slater.x0;
    prob.slater_point = slater.x0;
  }

  // I = {}: the shifted origin itself.
  if (std::max(inst.shifted[0].c, inst.shifted[1].c) <= tol * shifted_scale(inst)) {
    sol.audit.push_back(finalize(inst, Branch::Empty, {}, Eigen::Vector2d::Zero(), 1.0,
                                 Vector::Zero(inst.n), tol));
  } else {
    sol.audit.push_back(rejected(Branch::Empty, {}, Eigen::Vector2d::Zero(), 1.0,
                                 "target is infeasible"));
  }
  for (int k = 0; k < 2; ++k) {
    auto cands = solve_singleton(inst, k, tol);
    sol.audit.insert(sol.audit.end(), cands.begin(), cands.end());
  }
  {
    auto cands = solve_both_active(inst, tol);
    sol.audit.insert(sol.audit.end(), cands.begin(), cands.end());
  }

  const Candidate* best = nullptr;
  for (const Candidate& c : sol.audit) {
    if (!c.accepted) continue;
    if (!best || c.objective < best->objective - 1e-15 ||
        (std::abs(c.objective - best->objective) <= 1e-15 &&
         std::lexicographical_compare(c.gamma.data(), c.gamma.data() + 2,
                                      best->gamma.data(), best->gamma.data() + 2))) {
      best = &c;
    }
  }
  if (!best) {
    sol.note = "no active-set configuration produced a feasible KKT point";
    return sol;
  }
  sol.solved = true;
  sol.best = *best;
  sol.certificate = certify::verify_kkt(prob, best->x,
                                        Vector(best->gamma), 1e-7);
  return sol;
}

P1Instance p1_from_json(const nlohmann::json& j) {
  using io::ParseError;
  if (!j.is_object()) throw ParseError("projection file must be a JSON object");
  for (const char* key : {"n", "z", "convention", "constraints"})
    if (!j.contains(key)) throw ParseError(std::string("missing field ") + key);
  const int n = j["n"].get<int>();
  Vector z = io::vector_from_json(j["z"], "z");
  if (z.size() != n) throw ParseError("z length differs from n");
  const std::string convention = j["convention"].get<std::string>();
  if (convention != "one-b" && convention != "two-b")
    throw ParseError("convention must be \"one-b\" or \"two-b\"");
  if (!j["constraints"].is_array() || j["constraints"].size() != 2)
    throw ParseError("projection instance needs exactly two constraints");

  std::array<OneB, 2> cons;
  for (int k = 0; k < 2; ++k) {
    const auto& e = j["constraints"][k];
    if (!e.contains("a") || !e.contains("b") || !e.contains("c"))
      throw ParseError("constraint needs fields a, b, c");
    cons[k].a = e["a"].get<double>();
    cons[k].b = io::vector_from_json(e["b"], "b");
    cons[k].c = e["c"].get<double>();
    if (convention == "two-b") cons[k].b *= 2.0;  // one-b is native here
  }
  try {
    return P1Instance::make(std::move(z), std::move(cons[0]), std::move(cons[1]));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

P1Instance load_p1(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw io::ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return p1_from_json(j);
}

nlohmann::json p1_report(const P1Solution& sol) {
  auto cand_json = [](const Candidate& c) {
    nlohmann::json j{{"branch", to_string(c.branch)},
                     {"active", c.active},
                     {"gamma", {c.gamma[0], c.gamma[1]}},
                     {"w", c.w},
                     {"accepted", c.accepted},
                     {"reason", c.reason},
                     {"feasibility_residual", c.feasibility_residual},
                     {"complementarity_residual", c.complementarity_residual}};
    if (c.x.size()) {
      j["x"] = io::vector_to_json(c.x);
      j["objective"] = c.objective;
    }
    return j;
  };
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& c : sol.audit) branches.push_back(cand_json(c));

  nlohmann::json j{{"solved", sol.solved},
                   {"slater_found", sol.slater_found},
                   {"branches", branches}};
  if (!sol.note.empty()) j["note"] = sol.note;
  if (sol.solved) {
    j["x"] = io::vector_to_json(sol.best.x);
    j["gamma"] = {sol.best.gamma[0], sol.best.gamma[1]};
    j["w"] = sol.best.w;
    j["branch"] = to_string(sol.best.branch);
    j["objective"] = sol.best.objective;
    j["certificate"] = certify::certificate_report(sol.certificate);
  }
  return j;
}

}  // namespace sqcqp::msolve
