#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace sqcqp::cli {

// Exit codes: 0 success (including "relaxation not exact" findings),
// 2 parse error, 3 solver failure, 4 no multipliers at the given point,
// 5 write failure, 6 trivial null space in the convexity probe,
// 7 no closed-form candidate.
enum ExitCode {
  kOk = 0,
  kParseError = 2,
  kSolverFailure = 3,
  kNoMultipliers = 4,
  kWriteFailure = 5,
  kStructuralFailure = 6,
  kNoCandidate = 7,
};

struct RunConfig {
  std::string command;  // solve | certify | relax | omega-check | p1
  std::string input_path;
  std::string point_path;     // certify only
  std::string out_path = "-";
  std::string format = "sdpa";  // relax: sdpa | socp-json
  double tol_cert = 1e-8;
  double tol_feas = 1e-8;
  double tol_gap = 1e-7;
  int samples = 1000;
  std::uint64_t seed = 42;
};

// Runs one command; human-readable summary goes to `human`, the JSON report
// is written to cfg.out_path. Returns the exit code.
int run(const RunConfig& cfg, std::ostream& human);

}  // namespace sqcqp::cli
