// Times the OpenMP sampling/search kernels against their serial reference
// and checks that both produce identical results.

#include "sqcqp/minimax_descent.hpp"
#include "sqcqp/rng.hpp"
#include "sqcqp/slemma.hpp"

#include <chrono>
#include <cstdio>
#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sqcqp;

namespace {

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

Problem random_problem(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  QuadForm obj{rng.uniform(0.2, 2.0), rng.normal_vector(n), rng.uniform(-1.0, 1.0)};
  std::vector<QuadForm> cons;
  const Vector anchor = 0.8 * rng.normal_vector(n);
  for (int k = 0; k < m; ++k) {
    QuadForm f{rng.uniform(-1.5, 1.5), 0.7 * rng.normal_vector(n), 0.0};
    f.c = -(f.a * anchor.squaredNorm() + 2.0 * f.b.dot(anchor)) - rng.uniform(0.1, 1.0);
    cons.push_back(std::move(f));
  }
  return Problem::make(std::move(obj), std::move(cons));
}

}  // namespace

int main() {
  const Problem p = random_problem(60, 10, 7);
  const int samples = 20000;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

  slemma::ProbeReport serial, parallel;
  const double t_probe_serial =
      timed([&] { serial = slemma::omega_convexity_probe(p, samples, 42, {}, false); });
  const double t_probe_parallel =
      timed([&] { parallel = slemma::omega_convexity_probe(p, samples, 42, {}, true); });
  const bool probe_match = serial.passes == parallel.passes &&
                           serial.worst_sphere_residual == parallel.worst_sphere_residual &&
                           serial.worst_inequality_residual == parallel.worst_inequality_residual;
  std::printf("witness probe   %5d samples  serial %.3fs  openmp %.3fs  speedup %.2fx  match %s\n",
              samples, t_probe_serial, t_probe_parallel, t_probe_serial / t_probe_parallel,
              probe_match ? "yes" : "NO");

  // An inconsistent pair keeps every start running to its iteration cap, so
  // the search benchmark measures full work instead of a lucky early exit.
  std::vector<QuadForm> inconsistent = p.constraints;
  inconsistent.push_back({1.0, Vector::Zero(p.n), 0.0});
  inconsistent.push_back({-1.0, Vector::Zero(p.n), 0.0});

  minimax::Budget budget;
  budget.starts = 2000;
  budget.max_iters = 300;
  minimax::Result rs, rp;
  const double t_search_serial = timed(
      [&] { rs = minimax::search_negative_point_serial(inconsistent, p.n, budget); });
  budget.parallel = true;
  const double t_search_parallel =
      timed([&] { rp = minimax::search_negative_point(inconsistent, p.n, budget); });
  const bool search_match = rs.found == rp.found && rs.start_index == rp.start_index &&
                            (rs.x - rp.x).norm() == 0.0 && rs.value == rp.value;
  std::printf("strict search   %5d starts   serial %.3fs  openmp %.3fs  speedup %.2fx  match %s\n",
              budget.starts, t_search_serial, t_search_parallel,
              t_search_serial / t_search_parallel, search_match ? "yes" : "NO");

  return probe_match && search_match ? 0 : 1;
}
