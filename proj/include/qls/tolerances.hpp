#pragma once

#include <algorithm>

namespace qls {

// Numerical thresholds used across the library. Defaults are pinned here;
// callers may override individual fields (CLI options, problem files).
struct Tolerances {
  double norm = 1e-9;       // state normalization
  double herm = 1e-9;       // Hermiticity, |A - A^dag|_F
  double trace = 1e-9;      // trace checks
  double idem = 1e-8;       // projector idempotency, |P^2 - P|_F
  double psd = 1e-9;        // allowed negative eigenvalue magnitude
  double rank_cut = 1e-10;  // relative eigenvalue cutoff for support ranks
  double comm_scale = 1e-9; // commutator tolerance = comm_scale * D
  double eig_scale = 1e-8;  // intersection eigenvalue tolerance = eig_scale * count
  double tp = 1e-9;         // trace preservation, |sum K^dag K - I|_F
  double inv = 1e-9;        // invariance, |E(psi psi^dag) - psi psi^dag|_F
  double conv = 1e-8;       // convergence in trace distance
  double comm_abs = -1;     // absolute commutator threshold; < 0 means scaled

  double comm(long dim) const {
    return comm_abs >= 0 ? comm_abs : comm_scale * static_cast<double>(dim);
  }
  double eig(int count) const { return eig_scale * std::max(count, 1); }
};

} // namespace qls
