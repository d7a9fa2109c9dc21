#pragma once

#include <utility>
#include <vector>

#include "qls/hypergraph.hpp"
#include "qls/tensor.hpp"

namespace qls {

// Virtual-particle construction of a stabilizable-by-design state. Each
// coarse-grained particle of the (tree-like) base structure splits into
// virtual particles with the listed dimensions (slot 0 most significant in
// the mixed-radix identification with the particle space). Every virtual
// particle is owned by exactly one neighborhood, whose factor state lives on
// the tensor product of its owned slots in the listed order. An empty group
// carries a length-1 factor (a phase).
struct GbvSpec {
  NeighborhoodStructure base;
  std::vector<std::vector<int>> virtual_dims;           // per coarse particle
  std::vector<std::vector<std::pair<int, int>>> groups; // (particle, slot) per neighborhood
  std::vector<Vector> factor_amplitudes;                // per neighborhood
};

ValidationResult validate_gbv_spec(const GbvSpec& spec, const Tolerances& tol = {});

// Amplitudes of the tensor product of all factor states, expressed in the
// physical basis through the virtual/physical index isomorphism.
PureState build_gbv_state(const GbvSpec& spec, const Tolerances& tol = {},
                          bool normalize_factors = false);

// Embedded factor projectors |psi_k><psi_k| tensor identity over all other
// virtual particles, in the physical basis; pairwise commuting because the
// groups are disjoint.
std::vector<Projector> gbv_canonical_terms(const GbvSpec& spec,
                                           const Tolerances& tol = {});

} // namespace qls
