#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qls {

// Locality constraint: a list of neighborhoods (hyperedges) over n subsystems.
// Neighborhoods are kept as sorted index lists.
class NeighborhoodStructure {
 public:
  NeighborhoodStructure() = default;
  NeighborhoodStructure(std::vector<int> dims,
                        std::vector<std::vector<int>> neighborhoods);

  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  int neighborhood_count() const { return static_cast<int>(nbhds_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::vector<int>>& neighborhoods() const { return nbhds_; }
  const std::vector<int>& neighborhood(int j) const {
    return nbhds_.at(static_cast<std::size_t>(j));
  }

 private:
  std::vector<int> dims_;
  std::vector<std::vector<int>> nbhds_; // each sorted ascending
};

struct ValidationResult {
  bool ok = true;
  std::string message;
  int index = -1; // offending subsystem or neighborhood where applicable
};

// Checks: dims >= 2, neighborhood indices valid/distinct, no neighborhood is
// empty or the full index set, no duplicate neighborhoods, every subsystem
// covered.
ValidationResult validate_structure(const NeighborhoodStructure& ns);

// Coarse graining: maximal groups of subsystems with identical neighborhood
// membership. Particles are ordered by their smallest member.
struct CoarseGraining {
  std::vector<std::vector<int>> particles;   // sorted subsystem indices
  std::vector<std::vector<int>> membership;  // neighborhood indices per particle
  std::vector<long> particle_dims;
  std::vector<int> particle_of;              // subsystem -> particle index
};

CoarseGraining coarse_grain(const NeighborhoodStructure& ns);

// Matching-overlap check. Any set of neighborhoods with a common intersection
// must intersect pairwise exactly on that common intersection; violations are
// always witnessed by a triple.
struct MoResult {
  bool ok = true;
  std::vector<int> witness_subset;       // triple of neighborhood indices
  std::pair<int, int> mismatch_pair{-1, -1};
  std::vector<int> subset_intersection;  // common intersection of the triple
  std::vector<int> pair_intersection;    // intersection of the mismatching pair
  std::string message;
};

MoResult check_matching_overlap(const NeighborhoodStructure& ns);

// Alternating subsystem/neighborhood sequence. subsystems has one more entry
// than neighborhoods; consecutive subsystems both belong to the neighborhood
// between them. A cycle repeats the first subsystem at the end and traverses
// at least two neighborhoods.
struct HyperPath {
  std::vector<int> subsystems;
  std::vector<int> neighborhoods;
  bool is_cycle() const {
    return subsystems.size() >= 3 && subsystems.front() == subsystems.back();
  }
};

// Graph on the multi-neighborhood coarse particles; one (deduplicated) edge
// per particle pair sharing a neighborhood, labeled by a witness neighborhood.
struct SimpleGraph {
  struct Edge {
    int u = -1, v = -1;  // node indices
    int neighborhood = -1;
  };
  std::vector<std::vector<int>> nodes; // particle subsystem sets
  std::vector<Edge> edges;
};

// Requires the MO property (throws std::invalid_argument otherwise).
SimpleGraph derived_graph(const NeighborhoodStructure& ns);

struct TreeVerdict {
  bool tree_like = false;
  bool mo = false;
  bool acyclic = false;
  MoResult mo_result;
  std::optional<HyperPath> cycle; // witness when !acyclic
};

// tree-like = MO + no cycle path. Cycle detection runs on the incidence
// structure between multi-neighborhood particles and neighborhoods, which is
// a forest exactly when no cycle path exists.
TreeVerdict is_tree_like(const NeighborhoodStructure& ns);

// Splits the neighborhoods around the shared particle of N_j and N_k: Lambda
// holds the neighborhoods reachable from N_j through paths that leave the
// shared particle immediately; the complement holds the rest (including N_k).
struct PairBipartition {
  std::vector<int> lambda;            // neighborhood indices, sorted
  std::vector<int> lambda_complement; // neighborhood indices, sorted
  int shared_particle = -1;           // particle index of N_j intersect N_k
};

PairBipartition pair_bipartition(const NeighborhoodStructure& ns, int j, int k);

} // namespace qls
