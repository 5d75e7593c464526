#ifndef CHUBANOV_CLI_HPP
#define CHUBANOV_CLI_HPP

// Command-line driver. Exit codes: 0 primal, 1 dual, 2 epsilon-infeasible,
// 3 budget exceeded, 64 usage or parse error, 65 verification failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chubanov/io.hpp"
#include "chubanov/solver.hpp"

namespace chubanov {

enum ExitCode : int {
  kExitPrimal = 0,
  kExitDual = 1,
  kExitEpsilonInfeasible = 2,
  kExitBudgetExceeded = 3,
  kExitUsage = 64,
  kExitVerifyFailed = 65,
};

inline int exit_code_for(CertificateKind k) {
  switch (k) {
    case CertificateKind::primal: return kExitPrimal;
    case CertificateKind::dual: return kExitDual;
    case CertificateKind::epsilon_infeasible: return kExitEpsilonInfeasible;
    case CertificateKind::budget_exceeded: return kExitBudgetExceeded;
  }
  return kExitUsage;
}

namespace detail {

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projection and rescaling solver for A x = 0, x in the interior of a symmetric cone"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file and emit a certificate");
  std::string solve_file, solve_out;
  SolverConfig cfg;
  long max_bp = 0, max_rescale = 0;
  std::string bp_stop = "z-zero";
  solve_cmd->add_option("file", solve_file, "Problem JSON")->required();
  solve_cmd->add_option("--eps", cfg.eps, "Target epsilon in (0, 1)");
  auto* max_bp_opt = solve_cmd->add_option("--max-bp-iters", max_bp, "Basic Procedure iteration budget");
  auto* max_rescale_opt = solve_cmd->add_option("--max-rescale-iters", max_rescale, "Rescaling iteration budget");
  solve_cmd->add_option("--bp-stop", bp_stop, "Basic Procedure stop rule")
      ->check(CLI::IsMember({"z-zero", "y-minus-z"}));
  solve_cmd->add_option("--tol-interior", cfg.tol_int, "Relative interiority tolerance");
  solve_cmd->add_option("--tol-zero", cfg.tol_zero, "Relative zero tolerance");
  solve_cmd->add_option("--out", solve_out, "Certificate output path (default: stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Check a certificate against a problem file");
  std::string verify_file, verify_cert;
  double verify_tol = 1e-8;
  verify_cmd->add_option("file", verify_file, "Problem JSON")->required();
  verify_cmd->add_option("cert", verify_cert, "Certificate JSON")->required();
  verify_cmd->add_option("--tol", verify_tol, "Relative tolerance");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Write a random instance with a known answer");
  std::string gen_spec, gen_cone, gen_kind = "feasible", gen_out, gen_witness;
  int gen_m = 1;
  std::uint64_t gen_seed = 0;
  double gen_margin = 0.0;
  gen_cmd->add_option("specfile", gen_spec, "JSON file whose \"cone\" field gives the cone");
  gen_cmd->add_option("--cone", gen_cone, "Inline cone, e.g. nonneg:3,soc:4,psd:2");
  gen_cmd->add_option("--kind", gen_kind, "feasible or infeasible")->check(CLI::IsMember({"feasible", "infeasible"}));
  gen_cmd->add_option("--m", gen_m, "Number of constraint rows");
  gen_cmd->add_option("--seed", gen_seed, "Random seed");
  auto* margin_opt = gen_cmd->add_option("--margin", gen_margin, "Smallest witness eigenvalue (feasible only)");
  gen_cmd->add_option("--out", gen_out, "Problem output path (default: stdout)");
  gen_cmd->add_option("--witness-out", gen_witness, "Write the witness as a certificate");

  // phi-curve
  auto* phi_cmd = app.add_subcommand("phi-curve", "CSV samples of exp(-phi(rho))");
  double phi_min = 1.0, phi_max = 10.0;
  int phi_steps = 100;
  std::string phi_out;
  phi_cmd->add_option("--min", phi_min, "Smallest rho (>= 1)");
  phi_cmd->add_option("--max", phi_max, "Largest rho");
  phi_cmd->add_option("--steps", phi_steps, "Number of samples");
  phi_cmd->add_option("--out", phi_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*solve_cmd) {
      const ProblemInstance inst = load(solve_file);
      if (*max_bp_opt) cfg.max_bp_iters = max_bp;
      if (*max_rescale_opt) cfg.max_rescale_iters = max_rescale;
      cfg.bp_stop = bp_stop == "y-minus-z" ? BpStop::y_minus_z : BpStop::z_zero;
      const Certificate cert = solve(inst, cfg);
      detail::emit(solve_out, certificate_to_json(cert).dump(2) + "\n", out);
      err << to_string(cert.kind()) << ": " << cert.stats.rescale_iterations << " rescalings, "
          << cert.stats.bp_iterations << " basic steps\n";
      return exit_code_for(cert.kind());
    }
    if (*verify_cmd) {
      const ProblemInstance inst = load(verify_file);
      const Certificate cert = load_certificate(verify_cert, inst.spec);
      const VerificationReport rep = verify(inst, cert, verify_tol);
      for (const Check& c : rep.checks)
        out << (c.passed ? "ok   " : "FAIL ") << c.name << " measured=" << detail::format_double(c.measured)
            << " threshold=" << detail::format_double(c.threshold) << "\n";
      out << (rep.passed() ? "certificate verified" : "certificate rejected") << "\n";
      return rep.passed() ? 0 : kExitVerifyFailed;
    }
    if (*gen_cmd) {
      SpecPtr spec;
      if (!gen_cone.empty())
        spec = cone_from_string(gen_cone);
      else if (!gen_spec.empty())
        spec = cone_from_json(detail::require(detail::read_json_file(gen_spec), "cone", "$"), "$.cone");
      else
        throw ParseError("generate", "give a spec file or --cone");
      GenerateOptions opts;
      if (*margin_opt) opts.margin = gen_margin;
      const GeneratedInstance g =
          generate(spec, gen_m, gen_kind == "infeasible" ? InstanceKind::infeasible : InstanceKind::feasible,
                   gen_seed, opts);
      detail::emit(gen_out, problem_to_json(g.instance).dump(2) + "\n", out);
      if (!gen_witness.empty()) save_certificate(gen_witness, witness_certificate(g));
      return 0;
    }
    if (*phi_cmd) {
      const auto pts = phi_curve(phi_min, phi_max, phi_steps);
      if (phi_out.empty()) {
        write_phi_csv(out, pts);
      } else {
        std::ofstream f(phi_out);
        if (!f) throw Error("cannot write " + phi_out);
        write_phi_csv(f, pts);
      }
      return 0;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "structural error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace chubanov

#endif  // CHUBANOV_CLI_HPP
