#pragma once

#include "sqcqp/quadform.hpp"

#include <cstdint>

namespace sqcqp::minimax {

struct Budget {
  int starts = 50;
  int max_iters = 200;
  std::uint64_t seed = 42;
  bool parallel = true;  // OpenMP over starts; merged result matches serial
};

struct Result {
  bool found = false;  // reached max_k f_k(x) < 0
  int start_index = -1;
  Vector x;
  double value = 0.0;  // max_k f_k at x
};

double max_value(const std::vector<QuadForm>& fs, const Vector& x);

// Single-start descent on F(x) = max_k f_k(x): steepest descent on the
// currently-active piece with Armijo backtracking. Stops as soon as F < 0.
Result descend(const std::vector<QuadForm>& fs, Vector x, int max_iters);

// Multi-start search for a point with every f_k < 0. Start points come from
// per-index substreams of the seed and the winner is the lowest start index
// that succeeds, so the outcome is independent of thread scheduling.
Result search_negative_point(const std::vector<QuadForm>& fs, int n, const Budget& budget);

// Serial reference for the OpenMP path above.
Result search_negative_point_serial(const std::vector<QuadForm>& fs, int n, Budget budget);

}  // namespace sqcqp::minimax
