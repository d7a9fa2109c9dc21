#pragma once

// Independent reference implementations used to cross-check the library.
// These deliberately use different algorithms: permutation-conjugated
// Kronecker products for embeddings, digit-comparison loops for partial
// traces, SVD range restriction for intersections, and exhaustive
// alternating-path search for cycles.

#include <algorithm>
#include <bit>
#include <functional>
#include <set>
#include <vector>

#include "qls/hypergraph.hpp"
#include "qls/rng.hpp"
#include "qls/tensor.hpp"

namespace qlstest {

using qls::Complex;
using qls::HilbertSpec;
using qls::Index;
using qls::IndexSet;
using qls::Matrix;
using qls::NeighborhoodStructure;
using qls::Rng;
using qls::Vector;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline std::vector<int> digits_of(Index idx, const HilbertSpec& spec) {
  std::vector<int> d(static_cast<std::size_t>(spec.subsystem_count()));
  for (int a = spec.subsystem_count() - 1; a >= 0; --a) {
    d[static_cast<std::size_t>(a)] = static_cast<int>(idx % spec.dim(a));
    idx /= spec.dim(a);
  }
  return d;
}

// Mixed-radix index over `order` of the listed digits.
inline Index recompose(const std::vector<int>& digits, const IndexSet& order,
                       const HilbertSpec& spec) {
  Index idx = 0;
  for (int a : order) idx = idx * spec.dim(a) + digits[static_cast<std::size_t>(a)];
  return idx;
}

inline Matrix embed_oracle(const Matrix& local, const IndexSet& nbhd,
                           const HilbertSpec& spec) {
  IndexSet comp = qls::complement_of(nbhd, spec.subsystem_count());
  IndexSet reorder = nbhd;
  reorder.insert(reorder.end(), comp.begin(), comp.end());
  const Index d = spec.total_dim();
  Matrix perm = Matrix::Zero(d, d);
  for (Index g = 0; g < d; ++g)
    perm(g, recompose(digits_of(g, spec), reorder, spec)) = 1.0;
  const Index dc = d / spec.subset_dim(nbhd);
  return perm * kron(local, Matrix::Identity(dc, dc)) * perm.transpose();
}

inline Matrix partial_trace_oracle(const Matrix& full, const IndexSet& keep,
                                   const HilbertSpec& spec) {
  IndexSet comp = qls::complement_of(keep, spec.subsystem_count());
  const Index dk = spec.subset_dim(keep);
  Matrix out = Matrix::Zero(dk, dk);
  for (Index i = 0; i < full.rows(); ++i) {
    const auto di = digits_of(i, spec);
    for (Index j = 0; j < full.cols(); ++j) {
      const auto dj = digits_of(j, spec);
      bool same = true;
      for (int a : comp)
        if (di[static_cast<std::size_t>(a)] != dj[static_cast<std::size_t>(a)]) {
          same = false;
          break;
        }
      if (same) out(recompose(di, keep, spec), recompose(dj, keep, spec)) += full(i, j);
    }
  }
  return out;
}

// Orthonormal range basis of a projector-like PSD matrix.
inline Matrix range_basis(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  Index r = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) ++r;
  return es.eigenvectors().rightCols(r);
}

// Intersection of projector ranges by successive range restriction: keep the
// coefficient-space nullspace of (I - P) applied to the running basis.
inline Matrix intersection_oracle(const std::vector<Matrix>& projs) {
  const Index d = projs.at(0).rows();
  Matrix basis = range_basis(projs[0]);
  for (std::size_t k = 1; k < projs.size() && basis.cols() > 0; ++k) {
    Matrix m = basis - projs[k] * basis;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    Index null_count = 0;
    for (Index i = svd.singularValues().size() - 1; i >= 0; --i)
      if (svd.singularValues()(i) <= 1e-8) ++null_count;
    // Trailing columns of V; also covers columns beyond the number of
    // singular values when m has more columns than rows.
    const Index extra = basis.cols() - svd.singularValues().size();
    basis = basis * svd.matrixV().rightCols(null_count + extra);
  }
  if (basis.cols() == 0) return Matrix::Zero(d, d);
  return basis * basis.adjoint();
}

inline std::vector<int> intersect_sets(std::vector<int> a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) out.push_back(x);
  return out;
}

inline bool mo_all_subsets_oracle(const NeighborhoodStructure& ns) {
  const int n = ns.neighborhood_count();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < 2) continue;
    std::vector<int> members;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) members.push_back(j);
    std::vector<int> common = ns.neighborhood(members[0]);
    for (std::size_t i = 1; i < members.size(); ++i)
      common = intersect_sets(common, ns.neighborhood(members[i]));
    if (common.empty()) continue;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        std::vector<int> pair =
            intersect_sets(ns.neighborhood(members[i]), ns.neighborhood(members[j]));
        if (pair != common) return false;
      }
  }
  return true;
}

// Exhaustive search for an alternating particle/neighborhood cycle path:
// distinct neighborhoods, distinct particles except that the walk closes on
// its start, consecutive particles contained in the connecting neighborhood,
// and at least two neighborhoods traversed.
inline bool has_cycle_path_oracle(const NeighborhoodStructure& ns) {
  qls::CoarseGraining cg = qls::coarse_grain(ns);
  const int np = static_cast<int>(cg.particles.size());
  const int nn = ns.neighborhood_count();
  // particle p lies inside neighborhood k iff k is in p's membership set
  auto inside = [&](int p, int k) {
    const auto& m = cg.membership[static_cast<std::size_t>(p)];
    return std::find(m.begin(), m.end(), k) != m.end();
  };
  std::vector<char> used_particle(static_cast<std::size_t>(np), 0);

  std::function<bool(int, int, unsigned, int)> walk = [&](int start, int current,
                                                          unsigned used_nbhds,
                                                          int depth) -> bool {
    for (int k = 0; k < nn; ++k) {
      if (used_nbhds & (1u << k)) continue;
      if (!inside(current, k)) continue;
      for (int q = 0; q < np; ++q) {
        if (q == current || !inside(q, k)) continue;
        if (q == start && depth + 1 >= 2) return true;
        if (used_particle[static_cast<std::size_t>(q)]) continue;
        used_particle[static_cast<std::size_t>(q)] = 1;
        const bool found = walk(start, q, used_nbhds | (1u << k), depth + 1);
        used_particle[static_cast<std::size_t>(q)] = 0;
        if (found) return true;
      }
    }
    return false;
  };

  for (int s = 0; s < np; ++s) {
    used_particle.assign(static_cast<std::size_t>(np), 0);
    used_particle[static_cast<std::size_t>(s)] = 1;
    if (walk(s, s, 0, 0)) return true;
  }
  return false;
}

// Random valid structure: qubit/qutrit dims, random proper-subset
// neighborhoods, singletons appended until every subsystem is covered.
inline NeighborhoodStructure random_structure(Rng& rng, int max_n, int max_nbhds,
                                              int max_dim = 2) {
  while (true) {
    const int n = rng.uniform_int(2, max_n);
    std::vector<int> dims;
    for (int a = 0; a < n; ++a) dims.push_back(rng.uniform_int(2, max_dim));
    const int want = rng.uniform_int(1, max_nbhds);
    std::set<std::vector<int>> edges;
    for (int t = 0; t < want; ++t) {
      const int size = rng.uniform_int(1, std::max(1, n - 1));
      std::set<int> e;
      while (static_cast<int>(e.size()) < size) e.insert(rng.uniform_int(0, n - 1));
      edges.insert(std::vector<int>(e.begin(), e.end()));
    }
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (const auto& e : edges)
      for (int a : e) covered[static_cast<std::size_t>(a)] = 1;
    for (int a = 0; a < n; ++a)
      if (!covered[static_cast<std::size_t>(a)]) edges.insert({a});
    NeighborhoodStructure ns(dims, std::vector<std::vector<int>>(edges.begin(), edges.end()));
    if (qls::validate_structure(ns).ok) return ns;
  }
}

} // namespace qlstest
