#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qls/hypergraph.hpp"
#include "qls/tensor.hpp"

namespace qls {

// CPTP map in operator-sum form. When a neighborhood is attached, every
// Kraus factor must act as identity outside it; this is verified on
// construction by re-embedding the traced-out local block.
class KrausMap {
 public:
  KrausMap(HilbertSpec spec, std::vector<Matrix> kraus, const Tolerances& tol = {});
  KrausMap(HilbertSpec spec, std::vector<Matrix> kraus, IndexSet nbhd, int tag,
           const Tolerances& tol = {}, bool identity_fallback = false);

  const HilbertSpec& spec() const { return spec_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  std::optional<int> tag() const { return tag_; }
  const IndexSet& neighborhood() const { return nbhd_; } // empty when untagged
  // Set when the local support was full and the map degenerated to identity.
  bool identity_fallback() const { return identity_fallback_; }
  double tp_defect() const { return tp_defect_; }

 private:
  void validate(const Tolerances& tol);

  HilbertSpec spec_;
  std::vector<Matrix> kraus_;
  IndexSet nbhd_;
  std::optional<int> tag_;
  bool identity_fallback_ = false;
  double tp_defect_ = 0;
};

Matrix apply_map_matrix(const KrausMap& e, const Matrix& rho);
DensityOperator apply_map(const KrausMap& e, const DensityOperator& rho,
                          const Tolerances& tol = {});

// Neighborhood cooling map for the target state: projects onto the local
// Schmidt span and re-prepares the neighborhood-reduced state on whatever
// mass leaked outside it. Degenerates to the identity map (with the
// identity_fallback flag set) when the local support is full.
KrausMap cooling_map(const PureState& psi, const NeighborhoodStructure& ns,
                     int j, const Tolerances& tol = {});
std::vector<KrausMap> cooling_maps(const PureState& psi,
                                   const NeighborhoodStructure& ns,
                                   const Tolerances& tol = {});

bool check_invariance(const KrausMap& e, const PureState& psi,
                      const Tolerances& tol = {});

struct SimulationResult {
  std::vector<double> distances; // to target; distances[0] is the initial one
  Matrix final_state;
  bool converged = false;
  int steps_used = 0;
  int cycles_used = 0; // only set by asymptotic runs
};

SimulationResult simulate_sequence(const std::vector<KrausMap>& seq,
                                   const DensityOperator& rho0,
                                   const PureState& psi,
                                   const Tolerances& tol = {});

struct TrialResult {
  std::vector<int> permutation; // neighborhood order applied
  double final_distance = 0;
  bool converged = false;
};

struct RobustnessReport {
  std::vector<TrialResult> trials;
  bool pass = false;
  double max_final_distance = 0;
  std::uint64_t seed = 0;
  int identity_maps = 0; // cooling maps that degenerated to identity
};

// Draws `trials` random permutations of the cooling maps; each is run from
// `states_per_permutation` fresh random full-rank initial states for a single
// pass. Passes when every run ends within tol.conv of the target.
RobustnessReport permutation_robustness_test(const PureState& psi,
                                             const NeighborhoodStructure& ns,
                                             int trials, std::uint64_t seed,
                                             const Tolerances& tol = {},
                                             int states_per_permutation = 1);

// Cycles the cooling maps in index order until convergence or max_cycles.
SimulationResult asymptotic_simulation(const PureState& psi,
                                       const NeighborhoodStructure& ns,
                                       const DensityOperator& rho0,
                                       int max_cycles,
                                       const Tolerances& tol = {});

// Invariance forces the map to act as the identity inside the target's
// neighborhood support: the projected output must equal the projected input
// plus a PSD residual carrying exactly the leaked mass.
bool invariance_output_decomposition_check(const KrausMap& e,
                                           const PureState& psi,
                                           const std::vector<DensityOperator>& samples,
                                           const Tolerances& tol = {});

} // namespace qls
