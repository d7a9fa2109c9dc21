#include "qls/hypergraph.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>

namespace qls {
namespace {

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

void require_valid(const NeighborhoodStructure& ns) {
  ValidationResult r = validate_structure(ns);
  if (!r.ok) throw std::invalid_argument("invalid structure: " + r.message);
}

// Bipartite incidence between multi-neighborhood particles and neighborhoods.
// Cycle paths over coarse particles correspond exactly to cycles here.
struct Incidence {
  std::vector<int> multi;                       // particle indices, |membership| >= 2
  std::vector<std::vector<int>> particle_adj;   // per multi index: neighborhoods
  std::vector<std::vector<int>> nbhd_adj;       // per neighborhood: multi indices
};

Incidence build_incidence(const NeighborhoodStructure& ns, const CoarseGraining& cg) {
  Incidence inc;
  inc.nbhd_adj.assign(static_cast<std::size_t>(ns.neighborhood_count()), {});
  std::vector<int> multi_index(cg.particles.size(), -1);
  for (std::size_t p = 0; p < cg.particles.size(); ++p) {
    if (cg.membership[p].size() >= 2) {
      multi_index[p] = static_cast<int>(inc.multi.size());
      inc.multi.push_back(static_cast<int>(p));
      inc.particle_adj.push_back(cg.membership[p]);
      for (int j : cg.membership[p])
        inc.nbhd_adj[static_cast<std::size_t>(j)].push_back(multi_index[p]);
    }
  }
  return inc;
}

} // namespace

NeighborhoodStructure::NeighborhoodStructure(std::vector<int> dims,
                                             std::vector<std::vector<int>> neighborhoods)
    : dims_(std::move(dims)), nbhds_(std::move(neighborhoods)) {
  for (auto& nb : nbhds_) std::sort(nb.begin(), nb.end());
}

ValidationResult validate_structure(const NeighborhoodStructure& ns) {
  const int n = ns.subsystem_count();
  if (n == 0) return {false, "no subsystems", -1};
  for (int a = 0; a < n; ++a)
    if (ns.dims()[static_cast<std::size_t>(a)] < 2)
      return {false, "subsystem " + std::to_string(a) + " has dimension < 2", a};
  if (ns.neighborhood_count() == 0) return {false, "no neighborhoods", -1};
  for (int j = 0; j < ns.neighborhood_count(); ++j) {
    const auto& nb = ns.neighborhood(j);
    if (nb.empty())
      return {false, "neighborhood " + std::to_string(j) + " is empty", j};
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] < 0 || nb[i] >= n)
        return {false,
                "neighborhood " + std::to_string(j) + " has out-of-range index " +
                    std::to_string(nb[i]),
                j};
      if (i > 0 && nb[i] == nb[i - 1])
        return {false,
                "neighborhood " + std::to_string(j) + " repeats index " +
                    std::to_string(nb[i]),
                j};
    }
    if (static_cast<int>(nb.size()) == n)
      return {false, "neighborhood " + std::to_string(j) + " equals the full index set",
              j};
  }
  for (int j = 0; j < ns.neighborhood_count(); ++j)
    for (int k = j + 1; k < ns.neighborhood_count(); ++k)
      if (ns.neighborhood(j) == ns.neighborhood(k))
        return {false,
                "neighborhoods " + std::to_string(j) + " and " + std::to_string(k) +
                    " are duplicates",
                k};
  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  for (const auto& nb : ns.neighborhoods())
    for (int a : nb) covered[static_cast<std::size_t>(a)] = true;
  for (int a = 0; a < n; ++a)
    if (!covered[static_cast<std::size_t>(a)])
      return {false, "subsystem " + std::to_string(a) + " is uncovered", a};
  return {};
}

CoarseGraining coarse_grain(const NeighborhoodStructure& ns) {
  require_valid(ns);
  const int n = ns.subsystem_count();
  std::vector<std::vector<int>> member(static_cast<std::size_t>(n));
  for (int j = 0; j < ns.neighborhood_count(); ++j)
    for (int a : ns.neighborhood(j)) member[static_cast<std::size_t>(a)].push_back(j);

  CoarseGraining cg;
  cg.particle_of.assign(static_cast<std::size_t>(n), -1);
  std::map<std::vector<int>, int> seen;
  for (int a = 0; a < n; ++a) {
    const auto& m = member[static_cast<std::size_t>(a)];
    auto it = seen.find(m);
    int p;
    if (it == seen.end()) {
      p = static_cast<int>(cg.particles.size());
      seen.emplace(m, p);
      cg.particles.emplace_back();
      cg.membership.push_back(m);
      cg.particle_dims.push_back(1);
    } else {
      p = it->second;
    }
    cg.particles[static_cast<std::size_t>(p)].push_back(a);
    cg.particle_dims[static_cast<std::size_t>(p)] *=
        ns.dims()[static_cast<std::size_t>(a)];
    cg.particle_of[static_cast<std::size_t>(a)] = p;
  }
  return cg;
}

MoResult check_matching_overlap(const NeighborhoodStructure& ns) {
  require_valid(ns);
  const int nn = ns.neighborhood_count();
  // A violating subset always contains a violating triple, so triples suffice.
  for (int i = 0; i < nn; ++i)
    for (int j = i + 1; j < nn; ++j) {
      const auto ij = intersect(ns.neighborhood(i), ns.neighborhood(j));
      if (ij.empty()) continue;
      for (int k = j + 1; k < nn; ++k) {
        const auto ijk = intersect(ij, ns.neighborhood(k));
        if (ijk.empty()) continue;
        const std::array<std::pair<int, int>, 3> pairs{
            std::make_pair(i, j), std::make_pair(i, k), std::make_pair(j, k)};
        for (const auto& [a, b] : pairs) {
          const auto ab = intersect(ns.neighborhood(a), ns.neighborhood(b));
          if (ab != ijk) {
            MoResult r;
            r.ok = false;
            r.witness_subset = {i, j, k};
            r.mismatch_pair = {a, b};
            r.subset_intersection = ijk;
            r.pair_intersection = ab;
            r.message = "neighborhoods (" + std::to_string(i) + "," +
                        std::to_string(j) + "," + std::to_string(k) +
                        ") share a common intersection but pair (" +
                        std::to_string(a) + "," + std::to_string(b) +
                        ") intersects on a larger set";
            return r;
          }
        }
      }
    }
  return {};
}

SimpleGraph derived_graph(const NeighborhoodStructure& ns) {
  MoResult mo = check_matching_overlap(ns);
  if (!mo.ok)
    throw std::invalid_argument("derived_graph: structure fails matching overlap: " +
                                mo.message);
  const CoarseGraining cg = coarse_grain(ns);
  SimpleGraph g;
  std::vector<int> node_of(cg.particles.size(), -1);
  for (std::size_t p = 0; p < cg.particles.size(); ++p) {
    if (cg.membership[p].size() >= 2) {
      node_of[p] = static_cast<int>(g.nodes.size());
      g.nodes.push_back(cg.particles[p]);
    }
  }
  std::set<std::pair<int, int>> present;
  for (int j = 0; j < ns.neighborhood_count(); ++j) {
    std::vector<int> in_nbhd;
    for (std::size_t p = 0; p < cg.particles.size(); ++p) {
      if (node_of[p] < 0) continue;
      const auto& mem = cg.membership[p];
      if (std::binary_search(mem.begin(), mem.end(), j))
        in_nbhd.push_back(node_of[p]);
    }
    for (std::size_t x = 0; x < in_nbhd.size(); ++x)
      for (std::size_t y = x + 1; y < in_nbhd.size(); ++y) {
        auto key = std::minmax(in_nbhd[x], in_nbhd[y]);
        if (present.insert(key).second)
          g.edges.push_back({key.first, key.second, j});
      }
  }
  return g;
}

TreeVerdict is_tree_like(const NeighborhoodStructure& ns) {
  require_valid(ns);
  TreeVerdict v;
  v.mo_result = check_matching_overlap(ns);
  v.mo = v.mo_result.ok;

  const CoarseGraining cg = coarse_grain(ns);
  const Incidence inc = build_incidence(ns, cg);

  // DFS over the bipartite incidence graph; any back edge yields a cycle
  // alternating particles and neighborhoods.
  const int np = static_cast<int>(inc.multi.size());
  const int nn = ns.neighborhood_count();
  // node ids: [0, np) particles, [np, np+nn) neighborhoods
  std::vector<int> state(static_cast<std::size_t>(np + nn), 0);
  std::vector<int> parent(static_cast<std::size_t>(np + nn), -1);
  std::optional<std::pair<int, int>> back_edge;

  auto neighbors = [&](int id) -> std::vector<int> {
    std::vector<int> out;
    if (id < np) {
      for (int j : inc.particle_adj[static_cast<std::size_t>(id)])
        out.push_back(np + j);
    } else {
      for (int m : inc.nbhd_adj[static_cast<std::size_t>(id - np)]) out.push_back(m);
    }
    return out;
  };

  for (int root = 0; root < np + nn && !back_edge; ++root) {
    if (state[static_cast<std::size_t>(root)] != 0) continue;
    std::vector<int> stack{root};
    parent[static_cast<std::size_t>(root)] = -1;
    while (!stack.empty() && !back_edge) {
      int cur = stack.back();
      stack.pop_back();
      if (state[static_cast<std::size_t>(cur)] != 0) continue;
      state[static_cast<std::size_t>(cur)] = 1;
      for (int nx : neighbors(cur)) {
        if (nx == parent[static_cast<std::size_t>(cur)]) continue;
        if (state[static_cast<std::size_t>(nx)] != 0) {
          back_edge = std::make_pair(cur, nx);
          break;
        }
        parent[static_cast<std::size_t>(nx)] = cur;
        stack.push_back(nx);
      }
    }
  }

  v.acyclic = !back_edge.has_value();
  if (back_edge) {
    // Reconstruct the cycle: walk both endpoints' ancestor chains.
    auto chain = [&](int id) {
      std::vector<int> c;
      for (int x = id; x != -1; x = parent[static_cast<std::size_t>(x)]) c.push_back(x);
      return c;
    };
    std::vector<int> ca = chain(back_edge->first);
    std::vector<int> cb = chain(back_edge->second);
    std::set<int> in_a(ca.begin(), ca.end());
    int meet = -1;
    for (int x : cb)
      if (in_a.count(x)) {
        meet = x;
        break;
      }
    std::vector<int> cycle; // node ids around the cycle
    for (int x : ca) {
      cycle.push_back(x);
      if (x == meet) break;
    }
    std::vector<int> tail;
    for (int x : cb) {
      if (x == meet) break;
      tail.push_back(x);
    }
    std::reverse(tail.begin(), tail.end());
    cycle.insert(cycle.end(), tail.begin(), tail.end());
    cycle.push_back(cycle.front());

    // Rotate so the cycle starts at a particle node.
    cycle.pop_back();
    std::size_t start = 0;
    while (start < cycle.size() && cycle[start] >= np) ++start;
    std::rotate(cycle.begin(), cycle.begin() + static_cast<long>(start), cycle.end());
    cycle.push_back(cycle.front());

    HyperPath path;
    for (int id : cycle) {
      if (id < np) {
        const auto& particle =
            cg.particles[static_cast<std::size_t>(inc.multi[static_cast<std::size_t>(id)])];
        path.subsystems.push_back(particle.front());
      } else {
        path.neighborhoods.push_back(id - np);
      }
    }
    v.cycle = std::move(path);
  }

  v.tree_like = v.mo && v.acyclic;
  return v;
}

PairBipartition pair_bipartition(const NeighborhoodStructure& ns, int j, int k) {
  TreeVerdict tv = is_tree_like(ns);
  if (!tv.tree_like)
    throw std::invalid_argument("pair_bipartition: structure is not tree-like");
  if (j < 0 || j >= ns.neighborhood_count() || k < 0 || k >= ns.neighborhood_count() ||
      j == k)
    throw std::invalid_argument("pair_bipartition: bad neighborhood indices");
  const auto shared = intersect(ns.neighborhood(j), ns.neighborhood(k));
  if (shared.empty())
    throw std::invalid_argument("pair_bipartition: neighborhoods are disjoint");

  const CoarseGraining cg = coarse_grain(ns);
  const int a = cg.particle_of[static_cast<std::size_t>(shared.front())];
  // Under MO the shared subsystems form a single coarse particle.
  for (int s : shared)
    if (cg.particle_of[static_cast<std::size_t>(s)] != a)
      throw std::logic_error("pair_bipartition: shared set spans multiple particles");

  const Incidence inc = build_incidence(ns, cg);
  int blocked = -1; // multi index of the shared particle
  for (std::size_t m = 0; m < inc.multi.size(); ++m)
    if (inc.multi[m] == a) blocked = static_cast<int>(m);

  // Reach neighborhoods from N_j without passing through the shared particle.
  std::vector<bool> nbhd_seen(static_cast<std::size_t>(ns.neighborhood_count()), false);
  std::vector<bool> part_seen(inc.multi.size(), false);
  std::vector<int> stack{j};
  nbhd_seen[static_cast<std::size_t>(j)] = true;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    for (int m : inc.nbhd_adj[static_cast<std::size_t>(cur)]) {
      if (m == blocked || part_seen[static_cast<std::size_t>(m)]) continue;
      part_seen[static_cast<std::size_t>(m)] = true;
      for (int nb : inc.particle_adj[static_cast<std::size_t>(m)]) {
        if (!nbhd_seen[static_cast<std::size_t>(nb)]) {
          nbhd_seen[static_cast<std::size_t>(nb)] = true;
          stack.push_back(nb);
        }
      }
    }
  }

  PairBipartition out;
  out.shared_particle = a;
  for (int x = 0; x < ns.neighborhood_count(); ++x) {
    if (nbhd_seen[static_cast<std::size_t>(x)])
      out.lambda.push_back(x);
    else
      out.lambda_complement.push_back(x);
  }
  if (out.lambda_complement.empty())
    throw std::logic_error("pair_bipartition: empty complement on tree-like input");
  for (int x : out.lambda) {
    if (x == j) continue;
    const auto& nb = ns.neighborhood(x);
    for (int s : cg.particles[static_cast<std::size_t>(a)])
      if (std::binary_search(nb.begin(), nb.end(), s))
        throw std::logic_error(
            "pair_bipartition: side of N_j touches the shared particle");
  }
  return out;
}

} // namespace qls
