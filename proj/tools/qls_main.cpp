#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "qls/problem_io.hpp"
#include "qls/version.hpp"

namespace {

using namespace qls;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCap = 3;

struct OutputFlags {
  std::string out;
  bool pretty = false;
  double tol_comm = -1;
};

json make_meta(const ProblemOptions& opts, double wall_time_s) {
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"seed", opts.seed},
              {"tolerances", tolerances_to_json(opts.tol)},
              {"wall_time_s", wall_time_s}};
}

void emit_report(const json& report, const OutputFlags& flags,
                 const std::string& summary) {
  if (!flags.out.empty()) write_json_file(flags.out, report);
  if (flags.pretty)
    std::cout << summary;
  else
    std::cout << report.dump(2) << '\n';
}

std::string structure_line(const Problem& p, const AnalysisReport& rep) {
  std::string s = "structure: " + std::to_string(p.structure.subsystem_count()) +
                  " subsystems, " + std::to_string(p.structure.neighborhood_count()) +
                  " neighborhoods; MO " + (rep.mo ? "yes" : "no") + ", acyclic " +
                  (rep.acyclic ? "yes" : "no") + ", tree-like " +
                  (rep.tree_like ? "yes" : "no") + "\n";
  return s;
}

std::string analysis_summary(const Problem& p, const AnalysisReport& rep) {
  char buf[160];
  std::string s = structure_line(p, rep);
  s += "state: " + p.state_source + ", dim " +
       std::to_string(p.state.spec().total_dim()) + "\n";
  s += "local ranks:";
  for (int r : rep.local_ranks) s += " " + std::to_string(r);
  std::snprintf(buf, sizeof buf, "\nmax commutator: %.3e (tol %.3e)\n",
                rep.max_commutator, rep.tol_comm_used);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "intersection dim: %d (target mismatch %.3e)\n",
                rep.intersection_dim, rep.target_mismatch);
  s += buf;
  s += std::string("qls: ") + (rep.qls ? "yes" : "no") + "\n";
  s += std::string("rfts: ") + to_string(rep.rfts) + " [" +
       rep.justification.to_string() + "]\n";
  return s;
}

std::string simulation_summary(const RobustnessReport& rob,
                               const SimulationResult& asym,
                               std::optional<bool> conflict) {
  char buf[200];
  int converged = 0;
  for (const auto& t : rob.trials) converged += t.converged ? 1 : 0;
  std::snprintf(buf, sizeof buf,
                "permutation test: %d/%zu runs converged (max final distance %.3e)\n",
                converged, rob.trials.size(), rob.max_final_distance);
  std::string s = buf;
  std::snprintf(buf, sizeof buf,
                "asymptotic: final distance %.3e after %d cycles (%s)\n",
                asym.distances.back(), asym.cycles_used,
                asym.converged ? "converged" : "not converged");
  s += buf;
  if (conflict.has_value())
    s += std::string("theorem vs dynamics conflict: ") + (*conflict ? "YES" : "no") + "\n";
  return s;
}

Problem load_with_overrides(const std::string& path, const OutputFlags& flags) {
  Problem p = load_problem(path);
  if (flags.tol_comm >= 0) p.options.tol.comm_abs = flags.tol_comm;
  return p;
}

int cmd_analyze(const std::string& path, const OutputFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  Problem p = load_with_overrides(path, flags);
  AnalysisReport rep = rfts_verdict(p.state, p.structure, p.options.tol);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json report{{"analysis", analysis_to_json(rep)},
              {"simulation", json::object()},
              {"meta", make_meta(p.options, secs)}};
  emit_report(report, flags, analysis_summary(p, rep));
  return kExitOk;
}

int cmd_simulate(const std::string& path, const OutputFlags& flags,
                 std::optional<int> trials, std::optional<std::uint64_t> seed,
                 std::optional<int> max_cycles) {
  const auto t0 = std::chrono::steady_clock::now();
  Problem p = load_with_overrides(path, flags);
  if (trials.has_value()) p.options.trials = *trials;
  if (seed.has_value()) p.options.seed = *seed;
  if (max_cycles.has_value()) p.options.max_cycles = *max_cycles;

  AnalysisReport rep = rfts_verdict(p.state, p.structure, p.options.tol);
  json sim = json::object();
  std::string sim_text = "simulation: skipped (trials = 0)\n";
  if (p.options.trials > 0) {
    RobustnessReport rob = permutation_robustness_test(
        p.state, p.structure, p.options.trials, p.options.seed, p.options.tol);
    const Index d = p.state.spec().total_dim();
    DensityOperator mixed(p.state.spec(),
                          Matrix::Identity(d, d) / static_cast<double>(d),
                          p.options.tol);
    SimulationResult asym = asymptotic_simulation(
        p.state, p.structure, mixed, p.options.max_cycles, p.options.tol);
    std::optional<bool> conflict;
    if (rep.rfts != RftsVerdict::Inconclusive) {
      conflict = (rep.rfts == RftsVerdict::Yes && !rob.pass) ||
                 (rep.rfts == RftsVerdict::No && rob.pass);
      if (*conflict)
        std::cerr << "warning: theorem verdict '" << to_string(rep.rfts)
                  << "' disagrees with the simulated permutation test ("
                  << (rob.pass ? "all runs converged" : "some runs failed")
                  << "); reporting both without reconciliation\n";
    }
    sim = simulation_to_json(&rob, &asym, conflict);
    sim_text = simulation_summary(rob, asym, conflict);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json report{{"analysis", analysis_to_json(rep)},
              {"simulation", std::move(sim)},
              {"meta", make_meta(p.options, secs)}};
  emit_report(report, flags, analysis_summary(p, rep) + sim_text);
  return kExitOk;
}

int cmd_gbv_gen(const std::string& spec_path, const std::string& out_path) {
  Problem p = load_problem(spec_path);
  if (!p.gbv.has_value())
    throw ParseError("gbv gen requires a problem whose state section is 'gbv'");
  write_json_file(out_path, problem_to_json(p.structure, p.state, p.options));
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-local stabilizability analyzer"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  OutputFlags flags;
  std::string path;

  CLI::App* analyze = app.add_subcommand("analyze", "Run the theorem-based analysis");
  analyze->add_option("file", path, "problem file (JSON)")->required();
  analyze->add_flag("--pretty", flags.pretty, "print a text summary instead of JSON");
  analyze->add_option("--tol-comm", flags.tol_comm,
                      "absolute commutator threshold override");
  analyze->add_option("--out", flags.out, "write the JSON report to this path");

  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_cycles;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Construct cooling maps and simulate them");
  simulate->add_option("file", path, "problem file (JSON)")->required();
  simulate->add_flag("--pretty", flags.pretty, "print a text summary instead of JSON");
  simulate->add_option("--tol-comm", flags.tol_comm,
                       "absolute commutator threshold override");
  simulate->add_option("--out", flags.out, "write the JSON report to this path");
  simulate->add_option("--trials", trials, "number of random permutations");
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--max-cycles", max_cycles, "asymptotic cycle limit");

  CLI::App* gbv = app.add_subcommand("gbv", "Virtual-particle state construction");
  gbv->require_subcommand(1);
  std::string gen_out;
  CLI::App* gen = gbv->add_subcommand("gen", "Expand a gbv problem into amplitudes");
  gen->add_option("spec", path, "problem file with a gbv state section")->required();
  gen->add_option("--out", gen_out, "output problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(path, flags);
    if (simulate->parsed()) return cmd_simulate(path, flags, trials, seed, max_cycles);
    if (gen->parsed()) return cmd_gbv_gen(path, gen_out);
    return kExitInput;
  } catch (const DimCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCap;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
