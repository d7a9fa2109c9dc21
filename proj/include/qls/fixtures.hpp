#pragma once

#include "qls/hypergraph.hpp"
#include "qls/tensor.hpp"

namespace qls {

// |0...0> on arbitrary local dimensions.
PureState product_state(const std::vector<int>& dims, const Tolerances& tol = {});

// (|0...0> + |1...1>)/sqrt(2) on n qubits, n >= 2.
PureState ghz_state(int n, const Tolerances& tol = {});

// Uniform single-excitation superposition on n qubits, n >= 2.
PureState w_state(int n, const Tolerances& tol = {});

// Bell pairs on (0,1), (2,3), ...; n even, n >= 2.
PureState bell_chain_state(int n, const Tolerances& tol = {});

// Nearest-neighbor pairs {a, a+1}. Needs n >= 3 so that no neighborhood is
// the full index set.
NeighborhoodStructure chain_structure(const std::vector<int>& dims);

} // namespace qls
