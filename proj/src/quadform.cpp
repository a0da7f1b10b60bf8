#include "sqcqp/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqcqp {

namespace {

void require_dim(const QuadForm& f, const Vector& x) {
  if (f.dim() != x.size())
    throw std::invalid_argument("quadform/point dimension mismatch");
}

bool finite(const QuadForm& f) {
  return std::isfinite(f.a) && std::isfinite(f.c) && f.b.allFinite();
}

}  // namespace

double eval(const QuadForm& f, const Vector& x) {
  require_dim(f, x);
  return f.a * x.squaredNorm() + 2.0 * f.b.dot(x) + f.c;
}

Vector grad(const QuadForm& f, const Vector& x) {
  require_dim(f, x);
  return 2.0 * f.a * x + 2.0 * f.b;
}

double coefficient_scale(const QuadForm& f) {
  double s = std::max(std::abs(f.a), std::abs(f.c));
  if (f.dim() > 0) s = std::max(s, f.b.cwiseAbs().maxCoeff());
  return s;
}

ScalarQuadMin global_min_scalar_quadratic(const QuadForm& f) {
  ScalarQuadMin out;
  if (f.a > 0.0) {
    out.bounded = true;
    out.argmin = -f.b / f.a;
    out.value = f.c - f.b.squaredNorm() / f.a;
  } else if (f.a == 0.0 && f.b.isZero(0.0)) {
    out.bounded = true;
    out.argmin = Vector::Zero(f.dim());
    out.value = f.c;
  }
  return out;
}

QuadForm weighted_sum(const Vector& gamma, const std::vector<QuadForm>& fs) {
  if (static_cast<size_t>(gamma.size()) != fs.size())
    throw std::invalid_argument("weighted_sum: gamma length mismatch");
  if ((gamma.array() < 0.0).any())
    throw std::invalid_argument("weighted_sum: negative gamma entry");
  const int n = fs.empty() ? 0 : fs.front().dim();
  QuadForm out{0.0, Vector::Zero(n), 0.0};
  for (size_t k = 0; k < fs.size(); ++k) {
    out.a += gamma[static_cast<int>(k)] * fs[k].a;
    out.b += gamma[static_cast<int>(k)] * fs[k].b;
    out.c += gamma[static_cast<int>(k)] * fs[k].c;
  }
  return out;
}

Problem Problem::make(QuadForm objective, std::vector<QuadForm> constraints) {
  Problem p;
  p.n = objective.dim();
  if (p.n < 1) throw std::invalid_argument("problem dimension must be >= 1");
  if (constraints.empty()) throw std::invalid_argument("need at least one constraint");
  if (!finite(objective)) throw std::invalid_argument("objective has non-finite coefficients");
  for (const auto& f : constraints) {
    if (f.dim() != p.n) throw std::invalid_argument("constraint dimension mismatch");
    if (!finite(f)) throw std::invalid_argument("constraint has non-finite coefficients");
  }
  p.objective = std::move(objective);
  p.constraints = std::move(constraints);
  p.dimension_ok = p.m() + 1 < p.n;

  double a_max = p.constraints.front().a;
  for (const auto& f : p.constraints) a_max = std::max(a_max, f.a);
  const double a_J = p.objective.a;
  p.assumption2 = (a_J > 0.0) || (a_J == 0.0 && a_max >= 0.0) || (a_J < 0.0 && a_max > 0.0);
  return p;
}

double coefficient_scale(const Problem& p) {
  double s = coefficient_scale(p.objective);
  for (const auto& f : p.constraints) s = std::max(s, coefficient_scale(f));
  return s;
}

QuadForm aggregate(const Vector& gamma, const Problem& p) {
  QuadForm sum = weighted_sum(gamma, p.constraints);
  sum.a += p.objective.a;
  sum.b += p.objective.b;
  sum.c += p.objective.c;
  return sum;
}

double active_tol(double f_value) { return 1e-8 * (1.0 + std::abs(f_value)); }

EvalReport evaluate(const Problem& p, const Vector& x) {
  EvalReport r;
  r.values.resize(p.m());
  for (int k = 0; k < p.m(); ++k) r.values[k] = eval(p.constraints[k], x);
  r.objective = eval(p.objective, x);
  r.max_violation = std::max(0.0, r.values.size() ? r.values.maxCoeff() : 0.0);
  for (int k = 0; k < p.m(); ++k)
    if (std::abs(r.values[k]) <= active_tol(r.values[k])) r.active_set.push_back(k);
  return r;
}

}  // namespace sqcqp
