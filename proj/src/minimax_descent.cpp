#include "sqcqp/minimax_descent.hpp"

#include "sqcqp/rng.hpp"

#include <atomic>
#include <stdexcept>

namespace sqcqp::minimax {

double max_value(const std::vector<QuadForm>& fs, const Vector& x) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& f : fs) v = std::max(v, eval(f, x));
  return v;
}

namespace {

int argmax_piece(const std::vector<QuadForm>& fs, const Vector& x, double& value) {
  int k_star = 0;
  value = eval(fs[0], x);
  for (size_t k = 1; k < fs.size(); ++k) {
    const double v = eval(fs[k], x);
    if (v > value) {
      value = v;
      k_star = static_cast<int>(k);
    }
  }
  return k_star;
}

Vector start_point(int n, int index, std::uint64_t seed) {
  if (index == 0) return Vector::Zero(n);
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(index));
  static constexpr double kRadii[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  const double r = kRadii[index % 5];
  return r * rng.normal_vector(n);
}

}  // namespace

Result descend(const std::vector<QuadForm>& fs, Vector x, int max_iters) {
  if (fs.empty()) throw std::invalid_argument("descend: empty functional list");
  Result res;
  double value;
  int k_star = argmax_piece(fs, x, value);
  for (int it = 0; it < max_iters; ++it) {
    if (value < 0.0) break;
    const Vector g = grad(fs[k_star], x);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-28) break;
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 45; ++ls) {
      const Vector trial = x - step * g;
      const double tv = max_value(fs, trial);
      if (tv <= value - 0.25 * step * g2) {
        x = trial;
        value = tv;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    k_star = argmax_piece(fs, x, value);
  }
  res.x = std::move(x);
  res.value = value;
  res.found = value < 0.0;
  return res;
}

namespace {

Result run_starts(const std::vector<QuadForm>& fs, int n, const Budget& budget, bool parallel) {
  if (fs.empty()) throw std::invalid_argument("search: empty functional list");
  if (budget.starts < 1) throw std::invalid_argument("search: needs at least one start");
  std::vector<Result> results(budget.starts);
  std::atomic<int> earliest_found{budget.starts};

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < budget.starts; ++i) {
    if (i > earliest_found.load(std::memory_order_relaxed)) continue;
    Result r = descend(fs, start_point(n, i, budget.seed), budget.max_iters);
    r.start_index = i;
    if (r.found) {
      int cur = earliest_found.load(std::memory_order_relaxed);
      while (i < cur && !earliest_found.compare_exchange_weak(cur, i)) {
      }
    }
    results[i] = std::move(r);
  }

  // Winner: lowest successful index; otherwise lowest value (ties by index).
  for (const auto& r : results)
    if (r.found) return r;
  Result best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& r : results)
    if (r.start_index >= 0 && r.value < best.value) best = r;
  return best;
}

}  // namespace

Result search_negative_point(const std::vector<QuadForm>& fs, int n, const Budget& budget) {
  return run_starts(fs, n, budget, budget.parallel);
}

Result search_negative_point_serial(const std::vector<QuadForm>& fs, int n, Budget budget) {
  return run_starts(fs, n, budget, false);
}

}  // namespace sqcqp::minimax
