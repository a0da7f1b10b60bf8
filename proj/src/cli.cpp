#include "sqcqp/cli.hpp"

#include "sqcqp/certify.hpp"
#include "sqcqp/json_io.hpp"
#include "sqcqp/msolve.hpp"
#include "sqcqp/relax.hpp"
#include "sqcqp/slemma.hpp"

#include <iostream>
#include <ostream>

namespace sqcqp::cli {

namespace {

void emit(const RunConfig& cfg, const nlohmann::json& report) {
  io::write_text(cfg.out_path, report.dump(2) + "\n");
}

minimax::Budget budget_from(const RunConfig& cfg) {
  minimax::Budget b;
  b.seed = cfg.seed;
  return b;
}

barrier::Options barrier_opts(const RunConfig& cfg) {
  barrier::Options o;
  o.tol_gap = cfg.tol_gap;
  return o;
}

int cmd_solve(const RunConfig& cfg, std::ostream& human) {
  Problem p = io::load_problem(cfg.input_path);
  const certify::SlaterResult slater = certify::check_slater(p, budget_from(cfg));
  if (slater.found) p.slater_point = slater.x0;
  const certify::Assumption2Result a2 = certify::check_assumption2(p);

  relax::RelaxSolution sol = relax::solve_relaxation(p, barrier_opts(cfg));
  if (sol.status == barrier::Status::Infeasible ||
      sol.status == barrier::Status::IterLimit) {
    human << "solver failure: " << barrier::to_string(sol.status)
          << (sol.note.empty() ? "" : " (" + sol.note + ")") << "\n";
    return kSolverFailure;
  }
  sol = relax::recover_and_check(p, sol, 1e-6);

  nlohmann::json report = relax::relaxation_report(sol);
  report["assumptions"] = {{"slater", slater.found},
                           {"assumption2", a2.holds},
                           {"dimension_ok", p.dimension_ok}};
  emit(cfg, report);

  if (sol.unbounded) {
    human << "relaxation is unbounded below (value -inf)\n";
  } else {
    human << "relaxation value " << sol.value << ", exact = " << (sol.exact ? "true" : "false");
    if (!std::isnan(sol.gap_vs_certified)) human << ", gap " << sol.gap_vs_certified;
    human << "\n";
    if (sol.certificate_set)
      human << "certificate: " << certify::to_string(sol.certificate.verdict) << "\n";
  }
  return kOk;
}

int cmd_certify(const RunConfig& cfg, std::ostream& human) {
  Problem p = io::load_problem(cfg.input_path);
  if (cfg.point_path.empty()) throw io::ParseError("certify needs a point file");
  const io::PointFile pf = io::load_point(cfg.point_path, p.n);

  const certify::SlaterResult slater = certify::check_slater(p, budget_from(cfg));
  if (slater.found) p.slater_point = slater.x0;

  Vector gamma;
  if (pf.gamma) {
    gamma = *pf.gamma;
  } else {
    const EvalReport rep = evaluate(p, pf.x);
    if (rep.max_violation > cfg.tol_feas * (1.0 + coefficient_scale(p))) {
      gamma = Vector::Zero(p.m());  // infeasible point: report the failure
    } else {
      const certify::MultiplierResult mr = certify::find_multipliers(p, pf.x, cfg.tol_cert);
      if (!mr.found) {
        human << "no admissible multipliers: " << mr.reason << "\n";
        nlohmann::json report = {{"verdict", "NoMultipliers"},
                                 {"reason", mr.reason},
                                 {"residual", mr.residual}};
        emit(cfg, report);
        return kNoMultipliers;
      }
      gamma = mr.gamma;
    }
  }

  const certify::KktCertificate cert = certify::verify_kkt(p, pf.x, gamma, cfg.tol_cert);
  emit(cfg, certify::certificate_report(cert));
  human << "verdict: " << certify::to_string(cert.verdict) << "\n";
  return kOk;
}

int cmd_relax(const RunConfig& cfg, std::ostream& human) {
  const Problem p = io::load_problem(cfg.input_path);
  if (cfg.format == "sdpa") {
    const std::string text = relax::shor_sdp_text(p);
    io::write_text(cfg.out_path, text);
    human << "wrote SDPA export (" << text.size() << " bytes)\n";
  } else if (cfg.format == "socp-json") {
    emit(cfg, relax::socp_to_json(relax::build_socp(p)));
    human << "wrote cone-program description\n";
  } else {
    throw io::ParseError("unknown format " + cfg.format);
  }
  return kOk;
}

int cmd_omega_check(const RunConfig& cfg, std::ostream& human) {
  const Problem p = io::load_problem(cfg.input_path);
  const slemma::ProbeReport report =
      slemma::omega_convexity_probe(p, cfg.samples, cfg.seed);
  emit(cfg, slemma::probe_report_json(report));
  human << report.passes << "/" << report.samples << " witness samples passed\n";
  if (report.structural_failure) {
    human << "structural failure: trivial null space\n";
    return kStructuralFailure;
  }
  return kOk;
}

int cmd_p1(const RunConfig& cfg, std::ostream& human) {
  const msolve::P1Instance inst = msolve::load_p1(cfg.input_path);
  const msolve::P1Solution sol = msolve::solve_p1(inst, 1e-9, budget_from(cfg));
  emit(cfg, msolve::p1_report(sol));
  if (!sol.solved) {
    human << "no candidate: " << sol.note << "\n";
    return kNoCandidate;
  }
  human << "branch " << msolve::to_string(sol.best.branch) << ", objective "
        << sol.best.objective << ", verdict "
        << certify::to_string(sol.certificate.verdict) << "\n";
  return kOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& human) {
  try {
    if (cfg.command == "solve") return cmd_solve(cfg, human);
    if (cfg.command == "certify") return cmd_certify(cfg, human);
    if (cfg.command == "relax") return cmd_relax(cfg, human);
    if (cfg.command == "omega-check") return cmd_omega_check(cfg, human);
    if (cfg.command == "p1") return cmd_p1(cfg, human);
    human << "unknown command: " << cfg.command << "\n";
    return kParseError;
  } catch (const io::WriteError& e) {
    human << "write error: " << e.what() << "\n";
    return kWriteFailure;
  } catch (const io::ParseError& e) {
    human << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    human << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace sqcqp::cli
