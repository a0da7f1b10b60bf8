#include "sqcqp/slemma.hpp"

#include "sqcqp/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace sqcqp::slemma {

Matrix null_space_basis(const Matrix& B, double rank_rtol) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? rank_rtol * sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixV().rightCols(B.cols() - rank);
}

double witness_tol(const Vector& x_v, const Vector& x_w) {
  return 1e-8 * (1.0 + x_v.squaredNorm() + x_w.squaredNorm());
}

namespace {

// Root of t^2 + 2 s t - r = 0 with the smaller modulus (r >= 0). The two
// roots have opposite signs; the small one is computed from the product to
// avoid cancellation.
double small_root(double s, double r) {
  const double disc = std::sqrt(s * s + r);
  if (s == 0.0) return std::sqrt(r);
  const double big = -(s + std::copysign(disc, s));
  if (big == 0.0) return 0.0;
  return -r / big;  // product of roots is -r
}

void fill_residuals(const std::vector<QuadForm>& fs, OmegaWitness& w) {
  const Vector q = w.lambda * w.x_v + (1.0 - w.lambda) * w.x_w;
  const double target = w.lambda * w.x_v.squaredNorm() + (1.0 - w.lambda) * w.x_w.squaredNorm();
  w.sphere_residual = std::abs(w.x_tilde.squaredNorm() - target);
  w.linsys_residual = 0.0;
  w.inequality_residual = 0.0;
  for (const auto& f : fs) {
    w.linsys_residual = std::max(w.linsys_residual, std::abs(f.b.dot(w.x_tilde - q)));
    const double lhs = eval(f, w.x_tilde);
    const double rhs = w.lambda * eval(f, w.x_v) + (1.0 - w.lambda) * eval(f, w.x_w);
    w.inequality_residual = std::max(w.inequality_residual, lhs - rhs);
  }
}

}  // namespace

OmegaWitness build_omega_witness(const std::vector<QuadForm>& fs, const Vector& x_v,
                                 const Vector& x_w, double lambda) {
  if (fs.empty()) throw std::invalid_argument("witness: empty functional list");
  const int n = fs.front().dim();
  for (const auto& f : fs)
    if (f.dim() != n) throw std::invalid_argument("witness: functional dimension mismatch");
  if (x_v.size() != n || x_w.size() != n)
    throw std::invalid_argument("witness: point dimension mismatch");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("witness: lambda must lie in (0,1)");

  OmegaWitness w;
  w.x_v = x_v;
  w.x_w = x_w;
  w.lambda = lambda;

  if ((x_v - x_w).norm() == 0.0) {
    w.degenerate = true;
    w.x_tilde = x_v;
    w.u_star = Vector::Zero(n);
    w.alpha_star = 0.0;
    fill_residuals(fs, w);
    return w;
  }

  Matrix B(static_cast<int>(fs.size()), n);
  for (size_t k = 0; k < fs.size(); ++k) B.row(static_cast<int>(k)) = fs[k].b.transpose();
  const Matrix basis = null_space_basis(B);
  if (basis.cols() == 0)
    throw RankError("linear-coefficient matrix has trivial null space (rank = n)");

  const Vector q = lambda * x_v + (1.0 - lambda) * x_w;
  const double r = lambda * (1.0 - lambda) * (x_v - x_w).squaredNorm();
  const double alpha_cap = 1e12 * (1.0 + q.norm() + (x_v - x_w).norm());

  for (int j = 0; j < basis.cols(); ++j) {
    const Vector u = basis.col(j);  // unit norm from the SVD
    const double alpha = small_root(u.dot(q), r);
    if (!std::isfinite(alpha) || std::abs(alpha) > alpha_cap) continue;
    w.u_star = u;
    w.alpha_star = alpha;
    w.x_tilde = alpha * u + q;
    fill_residuals(fs, w);
    return w;
  }
  throw RankError("no usable null-space direction found");
}

bool check_multiplier_alternative(const Vector& gamma, const std::vector<QuadForm>& fs,
                                  double tol) {
  if (gamma.size() == 0 || gamma.maxCoeff() <= 0.0)
    throw std::invalid_argument("multiplier check: gamma must be nonzero");
  const QuadForm agg = weighted_sum(gamma, fs);
  if (tol < 0.0) tol = 1e-9 * (1.0 + coefficient_scale(agg));
  const ScalarQuadMin gm = global_min_scalar_quadratic(agg);
  return gm.bounded && gm.value >= -tol;
}

StrictPointResult search_strict_point(const std::vector<QuadForm>& fs,
                                      const minimax::Budget& budget) {
  if (fs.empty()) throw std::invalid_argument("strict-point search: empty functional list");
  const minimax::Result r = minimax::search_negative_point(fs, fs.front().dim(), budget);
  StrictPointResult out;
  out.found = r.found;
  out.x = r.x;
  out.max_f = r.value;
  return out;
}

AlternativeResult classify_alternative(const std::vector<QuadForm>& fs,
                                       const minimax::Budget& budget, int grid_points,
                                       double gamma_max) {
  AlternativeResult out;
  const StrictPointResult sp = search_strict_point(fs, budget);
  if (sp.found) {
    out.which = AlternativeResult::Kind::StrictPoint;
    out.x = sp.x;
    out.detail = sp.max_f;
    return out;
  }

  const int K = static_cast<int>(fs.size());
  const double h = gamma_max / (grid_points - 1);
  std::vector<int> idx(K, 0);
  Vector gamma(K);
  while (true) {
    bool nonzero = false;
    for (int k = 0; k < K; ++k) {
      gamma[k] = h * idx[k];
      nonzero = nonzero || idx[k] > 0;
    }
    if (nonzero && check_multiplier_alternative(gamma, fs)) {
      out.which = AlternativeResult::Kind::SeparatingMultipliers;
      out.gamma = gamma;
      out.detail = global_min_scalar_quadratic(weighted_sum(gamma, fs)).value;
      return out;
    }
    int k = 0;
    while (k < K && ++idx[k] == grid_points) idx[k++] = 0;
    if (k == K) break;
  }
  return out;
}

std::vector<QuadForm> probe_functionals(const Problem& p, const std::optional<Vector>& candidate) {
  std::vector<QuadForm> fs;
  QuadForm f0 = p.objective;
  if (candidate) f0.c -= eval(p.objective, *candidate);
  fs.push_back(std::move(f0));
  fs.insert(fs.end(), p.constraints.begin(), p.constraints.end());
  return fs;
}

ProbeReport omega_convexity_probe(const std::vector<QuadForm>& fs, int n, int samples,
                                  std::uint64_t seed, bool parallel) {
  ProbeReport report;
  report.samples = samples;

  Matrix B(static_cast<int>(fs.size()), n);
  for (size_t k = 0; k < fs.size(); ++k) B.row(static_cast<int>(k)) = fs[k].b.transpose();
  if (null_space_basis(B).cols() == 0) {
    report.structural_failure = true;
    report.failures.push_back(
        {-1, "linear-coefficient matrix has trivial null space (rank = n)", 0.0, 0.0});
    return report;
  }

  struct Sample {
    bool pass = false;
    double sphere = 0.0, ineq = 0.0;
    std::string error;
  };
  std::vector<Sample> out(samples);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const Vector x_v = 3.0 * rng.normal_vector(n);
    const Vector x_w = 3.0 * rng.normal_vector(n);
    const double lambda = rng.uniform(0.01, 0.99);
    try {
      const OmegaWitness w = build_omega_witness(fs, x_v, x_w, lambda);
      const double tol = witness_tol(x_v, x_w);
      out[i].sphere = w.sphere_residual;
      out[i].ineq = w.inequality_residual;
      out[i].pass = w.sphere_residual <= tol && w.linsys_residual <= tol &&
                    w.inequality_residual <= tol;
      if (!out[i].pass) out[i].error = "invariant residual above tolerance";
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }

  for (int i = 0; i < samples; ++i) {
    report.worst_sphere_residual = std::max(report.worst_sphere_residual, out[i].sphere);
    report.worst_inequality_residual = std::max(report.worst_inequality_residual, out[i].ineq);
    if (out[i].pass)
      ++report.passes;
    else
      report.failures.push_back({i, out[i].error, out[i].sphere, out[i].ineq});
  }
  return report;
}

ProbeReport omega_convexity_probe(const Problem& p, int samples, std::uint64_t seed,
                                  const std::optional<Vector>& candidate, bool parallel) {
  return omega_convexity_probe(probe_functionals(p, candidate), p.n, samples, seed, parallel);
}

nlohmann::json probe_report_json(const ProbeReport& r) {
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& f : r.failures)
    fails.push_back({{"sample", f.sample},
                     {"error", f.error},
                     {"sphere_residual", f.sphere_residual},
                     {"inequality_residual", f.inequality_residual}});
  return nlohmann::json{{"samples", r.samples},
                        {"passes", r.passes},
                        {"worst_sphere_residual", r.worst_sphere_residual},
                        {"worst_inequality_residual", r.worst_inequality_residual},
                        {"structural_failure", r.structural_failure},
                        {"failures", fails}};
}

}  // namespace sqcqp::slemma
