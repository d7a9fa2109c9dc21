#include "qls/problem_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "qls/fixtures.hpp"

namespace qls {
namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* name, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + " must be an object");
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError("missing field '" + std::string(name) + "' in " + ctx);
  return *it;
}

std::vector<int> int_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + " must be an array");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ParseError(ctx + " must hold integers");
    out.push_back(e.get<int>());
  }
  return out;
}

Vector amplitude_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + " must be an array of [re, im] pairs");
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ParseError(ctx + " entries must be [re, im] number pairs");
    v(i++) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

json complex_list(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i)
    out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

Tolerances parse_tolerances(const json& j) {
  Tolerances t;
  static const std::map<std::string, double Tolerances::*> fields = {
      {"norm", &Tolerances::norm},           {"herm", &Tolerances::herm},
      {"trace", &Tolerances::trace},         {"idem", &Tolerances::idem},
      {"psd", &Tolerances::psd},             {"rank_cut", &Tolerances::rank_cut},
      {"comm_scale", &Tolerances::comm_scale}, {"eig_scale", &Tolerances::eig_scale},
      {"tp", &Tolerances::tp},               {"inv", &Tolerances::inv},
      {"conv", &Tolerances::conv},           {"comm_abs", &Tolerances::comm_abs}};
  if (!j.is_object()) throw ParseError("options.tolerances must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto f = fields.find(it.key());
    if (f == fields.end())
      throw ParseError("unknown tolerance '" + it.key() + "' in options.tolerances");
    if (!it.value().is_number())
      throw ParseError("tolerance '" + it.key() + "' must be a number");
    t.*(f->second) = it.value().get<double>();
  }
  return t;
}

ProblemOptions parse_options(const json& doc) {
  ProblemOptions opts;
  auto it = doc.find("options");
  if (it == doc.end()) return opts;
  const json& o = *it;
  if (!o.is_object()) throw ParseError("options must be an object");
  if (auto f = o.find("trials"); f != o.end()) {
    if (!f->is_number_integer() || f->get<long>() < 0)
      throw ParseError("options.trials must be a nonnegative integer");
    opts.trials = f->get<int>();
  }
  if (auto f = o.find("seed"); f != o.end()) {
    if (!f->is_number_unsigned() && !f->is_number_integer())
      throw ParseError("options.seed must be an integer");
    opts.seed = f->get<std::uint64_t>();
  }
  if (auto f = o.find("max_cycles"); f != o.end()) {
    if (!f->is_number_integer() || f->get<long>() < 1)
      throw ParseError("options.max_cycles must be a positive integer");
    opts.max_cycles = f->get<int>();
  }
  if (auto f = o.find("tolerances"); f != o.end()) opts.tol = parse_tolerances(*f);
  return opts;
}

GbvSpec parse_gbv(const json& j, const NeighborhoodStructure& base) {
  GbvSpec g;
  g.base = base;
  for (const auto& row : require_field(j, "virtual_dims", "state.gbv")) {
    g.virtual_dims.push_back(int_list(row, "state.gbv.virtual_dims entry"));
  }
  const json& groups = require_field(j, "groups", "state.gbv");
  if (!groups.is_array()) throw ParseError("state.gbv.groups must be an array");
  for (const auto& grp : groups) {
    if (!grp.is_array())
      throw ParseError("state.gbv.groups entries must be arrays of [particle, slot]");
    std::vector<std::pair<int, int>> members;
    for (const auto& m : grp) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
          !m[1].is_number_integer())
        throw ParseError("state.gbv group members must be [particle, slot] pairs");
      members.emplace_back(m[0].get<int>(), m[1].get<int>());
    }
    g.groups.push_back(std::move(members));
  }
  const json& factors = require_field(j, "factors", "state.gbv");
  if (!factors.is_array()) throw ParseError("state.gbv.factors must be an array");
  for (const auto& f : factors)
    g.factor_amplitudes.push_back(amplitude_list(f, "state.gbv.factors entry"));
  return g;
}

PureState realize_named(const std::string& id, const NeighborhoodStructure& ns,
                        const Tolerances& tol) {
  const int n = ns.subsystem_count();
  const bool qubits = std::all_of(ns.dims().begin(), ns.dims().end(),
                                  [](int d) { return d == 2; });
  if (id == "product") return product_state(ns.dims(), tol);
  if (id == "ghz" || id == "w" || id == "bell_chain") {
    if (!qubits)
      throw ParseError("named state '" + id + "' requires all dims = 2");
    if (id == "ghz") return ghz_state(n, tol);
    if (id == "w") return w_state(n, tol);
    if (n % 2 != 0)
      throw ParseError("named state 'bell_chain' requires an even subsystem count");
    return bell_chain_state(n, tol);
  }
  throw ParseError("unknown named state '" + id +
                   "' (expected product|ghz|w|bell_chain)");
}

} // namespace

long dimension_cap() {
  if (const char* env = std::getenv("QLS_MAX_DIM")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 1) return v;
  }
  return 4096;
}

Problem parse_problem(const json& doc) {
  const json& s = require_field(doc, "structure", "problem");
  std::vector<int> dims = int_list(require_field(s, "dims", "structure"),
                                   "structure.dims");
  const json& nbhds_json = require_field(s, "neighborhoods", "structure");
  if (!nbhds_json.is_array()) throw ParseError("structure.neighborhoods must be an array");
  std::vector<std::vector<int>> nbhds;
  for (const auto& nb : nbhds_json)
    nbhds.push_back(int_list(nb, "structure.neighborhoods entry"));

  NeighborhoodStructure ns(dims, nbhds);
  ValidationResult vr = validate_structure(ns);
  if (!vr.ok) throw ParseError("invalid structure: " + vr.message);

  const long cap = dimension_cap();
  long d = 1;
  for (int dim : dims) {
    d *= dim;
    if (d > cap || d > (1L << 40))
      throw DimCapError("total dimension exceeds the cap of " + std::to_string(cap) +
                        " (set QLS_MAX_DIM to raise it)");
  }

  ProblemOptions opts = parse_options(doc);

  const json& state = require_field(doc, "state", "problem");
  const int sources = static_cast<int>(state.contains("amplitudes")) +
                      static_cast<int>(state.contains("named")) +
                      static_cast<int>(state.contains("gbv"));
  if (sources != 1)
    throw ParseError("state must contain exactly one of amplitudes, named, gbv");

  try {
    if (state.contains("amplitudes")) {
      Vector amp = amplitude_list(state["amplitudes"], "state.amplitudes");
      if (amp.size() != d)
        throw ParseError("state.amplitudes has length " + std::to_string(amp.size()) +
                         ", expected " + std::to_string(d));
      PureState psi(HilbertSpec(dims), std::move(amp), opts.tol);
      return Problem{std::move(ns), std::move(psi), std::nullopt, "amplitudes", opts};
    }
    if (state.contains("named")) {
      const json& nm = state["named"];
      if (!nm.is_string()) throw ParseError("state.named must be a string");
      const std::string id = nm.get<std::string>();
      PureState psi = realize_named(id, ns, opts.tol);
      return Problem{std::move(ns), std::move(psi), std::nullopt, "named:" + id, opts};
    }
    GbvSpec g = parse_gbv(state["gbv"], ns);
    ValidationResult gv = validate_gbv_spec(g, opts.tol);
    if (!gv.ok) throw ParseError("invalid gbv spec: " + gv.message);
    PureState psi = build_gbv_state(g, opts.tol);
    return Problem{std::move(ns), std::move(psi), std::move(g), "gbv", opts};
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_problem(doc);
}

nlohmann::json problem_to_json(const NeighborhoodStructure& ns,
                               const PureState& state,
                               const ProblemOptions& opts) {
  json j;
  j["structure"] = {{"dims", ns.dims()}, {"neighborhoods", ns.neighborhoods()}};
  j["state"] = {{"amplitudes", complex_list(state.amplitudes())}};
  j["options"] = {{"trials", opts.trials},
                  {"seed", opts.seed},
                  {"max_cycles", opts.max_cycles},
                  {"tolerances", tolerances_to_json(opts.tol)}};
  return j;
}

nlohmann::json tolerances_to_json(const Tolerances& t) {
  return json{{"norm", t.norm},           {"herm", t.herm},
              {"trace", t.trace},         {"idem", t.idem},
              {"psd", t.psd},             {"rank_cut", t.rank_cut},
              {"comm_scale", t.comm_scale}, {"eig_scale", t.eig_scale},
              {"tp", t.tp},               {"inv", t.inv},
              {"conv", t.conv},           {"comm_abs", t.comm_abs}};
}

nlohmann::json analysis_to_json(const AnalysisReport& rep) {
  json structure{{"mo", rep.mo}, {"acyclic", rep.acyclic}, {"tree_like", rep.tree_like}};
  if (!rep.mo) {
    structure["mo_witness"] = {
        {"subset", rep.mo_result.witness_subset},
        {"pair", {rep.mo_result.mismatch_pair.first, rep.mo_result.mismatch_pair.second}},
        {"subset_intersection", rep.mo_result.subset_intersection},
        {"pair_intersection", rep.mo_result.pair_intersection}};
  }
  if (rep.cycle.has_value()) {
    structure["cycle"] = {{"subsystems", rep.cycle->subsystems},
                          {"neighborhoods", rep.cycle->neighborhoods}};
  }

  json comm_rows = json::array();
  for (Index r = 0; r < rep.commutation.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < rep.commutation.cols(); ++c)
      row.push_back(rep.commutation(r, c));
    comm_rows.push_back(std::move(row));
  }

  return json{
      {"structure", std::move(structure)},
      {"local_ranks", rep.local_ranks},
      {"commutation",
       {{"matrix", std::move(comm_rows)},
        {"max", rep.max_commutator},
        {"tol", rep.tol_comm_used}}},
      {"intersection", {{"dim", rep.intersection_dim},
                        {"target_mismatch", rep.target_mismatch}}},
      {"qls", rep.qls ? "yes" : "no"},
      {"rfts", to_string(rep.rfts)},
      {"justification", rep.justification.to_string()}};
}

nlohmann::json simulation_to_json(const RobustnessReport* rob,
                                  const SimulationResult* asym,
                                  std::optional<bool> conflict) {
  json j = json::object();
  if (rob) {
    json trials = json::array();
    for (const auto& t : rob->trials)
      trials.push_back({{"permutation", t.permutation},
                        {"final_distance", t.final_distance},
                        {"converged", t.converged}});
    j["permutation_test"] = {{"trials", std::move(trials)},
                             {"pass", rob->pass},
                             {"max_final_distance", rob->max_final_distance},
                             {"seed", rob->seed},
                             {"identity_maps", rob->identity_maps}};
  }
  if (asym) {
    j["asymptotic"] = {{"distances", asym->distances},
                       {"final_distance", asym->distances.back()},
                       {"cycles_used", asym->cycles_used},
                       {"steps_used", asym->steps_used},
                       {"converged", asym->converged}};
  }
  if (conflict.has_value()) j["conflict"] = *conflict;
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

} // namespace qls
