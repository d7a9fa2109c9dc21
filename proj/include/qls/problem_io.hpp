#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qls/dynamics.hpp"
#include "qls/gbv.hpp"
#include "qls/hypergraph.hpp"
#include "qls/stabilization.hpp"
#include "qls/tensor.hpp"

namespace qls {

// Malformed input: missing fields, bad shapes, failed validation. Maps to
// exit code 2 in the CLI.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Total dimension above the configured cap. Maps to exit code 3.
struct DimCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemOptions {
  Tolerances tol;
  int trials = 20;
  std::uint64_t seed = 0;
  int max_cycles = 25;
};

// A parsed problem: locality structure, realized target state, options, and
// the generating virtual-particle spec when the state came from one.
struct Problem {
  NeighborhoodStructure structure;
  PureState state;
  std::optional<GbvSpec> gbv;
  std::string state_source; // "amplitudes", "named:<id>", or "gbv"
  ProblemOptions options;
};

// Default 4096; the QLS_MAX_DIM environment variable overrides it.
long dimension_cap();

Problem load_problem(const std::string& path);
Problem parse_problem(const nlohmann::json& doc);

nlohmann::json problem_to_json(const NeighborhoodStructure& ns,
                               const PureState& state,
                               const ProblemOptions& opts);

nlohmann::json tolerances_to_json(const Tolerances& t);
nlohmann::json analysis_to_json(const AnalysisReport& rep);
// Pass the robustness report when trials were run, the asymptotic result when
// cycles were run, and the conflict flag when a theorem verdict was available
// to compare against.
nlohmann::json simulation_to_json(const RobustnessReport* rob,
                                  const SimulationResult* asym,
                                  std::optional<bool> conflict);

void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace qls
