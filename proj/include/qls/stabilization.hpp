#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qls/hypergraph.hpp"
#include "qls/tensor.hpp"

namespace qls {

// Schmidt-span projectors of a target state, one per neighborhood, both on
// the local factor space and embedded into the full space.
struct NeighborhoodProjectors {
  std::vector<Projector> local;
  std::vector<Projector> embedded;
};

NeighborhoodProjectors neighborhood_projectors(const PureState& psi,
                                               const NeighborhoodStructure& ns,
                                               const Tolerances& tol = {});

// Quasi-local stabilizability: the intersection of the extended Schmidt spans
// must be exactly the target's span.
struct QlsVerdict {
  bool qls = false;
  int intersection_rank = 0;
  double target_mismatch = 0; // |K - psi psi^dag|_F when rank 1
  Projector intersection;
};

QlsVerdict qls_check(const PureState& psi, const NeighborhoodStructure& ns,
                     const Tolerances& tol = {});

// H = sum_j (I - Pi_j), with the ground space taken spectrally at the lowest
// eigenvalue.
struct ParentHamiltonian {
  std::vector<Matrix> terms; // embedded I - Pi_j
  Matrix hamiltonian;
  Matrix ground_projector;
  int ground_dim = 0;
  double ground_energy = 0;
};

ParentHamiltonian canonical_hamiltonian(const PureState& psi,
                                        const NeighborhoodStructure& ns,
                                        const Tolerances& tol = {});

// True if every global ground vector minimizes each term individually
// (terms are shifted by their own ground energies first).
bool frustration_free_check(const std::vector<Matrix>& terms,
                            const HilbertSpec& spec, const Tolerances& tol = {});

// Pairwise Frobenius norms of the embedded projector commutators.
RealMatrix commutation_matrix(const NeighborhoodProjectors& projs);

// Commutation of the support projectors on a union of neighborhoods vs the
// union of the complementary neighborhoods.
struct BipartitionCheck {
  double commutator = 0;
  bool pass = false;
  std::vector<int> region;            // subsystem indices of the Lambda side
  std::vector<int> region_complement; // subsystem indices of the other side
};

BipartitionCheck bipartition_commutation_check(const PureState& psi,
                                               const NeighborhoodStructure& ns,
                                               const std::vector<int>& lambda,
                                               const Tolerances& tol = {});

// Commutation transfer onto a containing region: if the supports on A and B
// commute and A∩B ⊆ C, the supports on A∩C and B∩C must commute as well.
// Empty intersections contribute identity projectors.
struct TransferCheck {
  double hypothesis_norm = 0;
  double conclusion_norm = 0;
  bool hypothesis_commutes = false;
  bool conclusion_commutes = false;
  bool logical_violation = false; // hypothesis holds but conclusion fails
};

TransferCheck reduced_commutation_transfer_check(const PureState& psi,
                                                 const IndexSet& a,
                                                 const IndexSet& b,
                                                 const IndexSet& c,
                                                 const Tolerances& tol = {});

enum class RftsVerdict { Yes, No, Inconclusive };

enum class JustificationCode { Ok, NotTreeLike, NoncommutingPair, GroundDegenerate };

struct Justification {
  JustificationCode code = JustificationCode::Ok;
  int j = -1, k = -1; // noncommuting pair
  int dim = 0;        // degenerate ground dimension
  std::string to_string() const;
};

// Full analysis: structure facts, commutation data, intersection, and the
// final verdict. On tree-like structures the verdict is yes/no; otherwise
// inconclusive (facts still reported).
struct AnalysisReport {
  bool mo = false;
  bool acyclic = false;
  bool tree_like = false;
  MoResult mo_result;
  std::optional<HyperPath> cycle;
  std::vector<int> local_ranks;
  RealMatrix commutation;
  double max_commutator = 0;
  double tol_comm_used = 0;
  int intersection_dim = 0;
  double target_mismatch = 0;
  bool qls = false;
  RftsVerdict rfts = RftsVerdict::Inconclusive;
  Justification justification;
  Tolerances tol;
};

AnalysisReport rfts_verdict(const PureState& psi, const NeighborhoodStructure& ns,
                            const Tolerances& tol = {});

const char* to_string(RftsVerdict v);

} // namespace qls
