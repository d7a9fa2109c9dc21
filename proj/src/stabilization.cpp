#include "qls/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qls {
namespace {

HilbertSpec spec_of(const NeighborhoodStructure& ns) { return HilbertSpec(ns.dims()); }

void require_state_matches(const PureState& psi, const NeighborhoodStructure& ns) {
  if (psi.spec().dims() != ns.dims())
    throw std::invalid_argument("state dimensions do not match structure");
  ValidationResult r = validate_structure(ns);
  if (!r.ok) throw std::invalid_argument("invalid structure: " + r.message);
}

// Ground projector of a Hermitian matrix: eigenspace at the lowest eigenvalue
// within a spread proportional to the matrix scale.
std::pair<Matrix, int> ground_space(const Matrix& h, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
  const double cut = ev(0) + rel_tol * scale;
  Index count = 0;
  while (count < ev.size() && ev(count) <= cut) ++count;
  Matrix basis = es.eigenvectors().leftCols(count);
  return {hermitize(basis * basis.adjoint()), static_cast<int>(count)};
}

Projector union_support_projector(const PureState& psi, const IndexSet& region,
                                  const Tolerances& tol) {
  // Support of the reduced state on `region`, embedded into the full space.
  // An all-subsystem region degenerates to the state's own support.
  const HilbertSpec& spec = psi.spec();
  Projector local = schmidt_span_projector(psi, region, tol);
  Matrix embedded = embed_neighborhood_operator(local.matrix(), region, spec);
  return Projector(spec, embedded,
                   local.rank() * static_cast<int>(spec.total_dim() /
                                                   spec.subset_dim(region)),
                   local.tol_used(), std::nullopt, tol);
}

IndexSet sorted_union(const NeighborhoodStructure& ns, const std::vector<int>& nbhds) {
  IndexSet out;
  for (int j : nbhds)
    for (int a : ns.neighborhood(j)) out.push_back(a);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IndexSet sorted_intersection(IndexSet a, IndexSet b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

} // namespace

NeighborhoodProjectors neighborhood_projectors(const PureState& psi,
                                               const NeighborhoodStructure& ns,
                                               const Tolerances& tol) {
  require_state_matches(psi, ns);
  NeighborhoodProjectors out;
  const HilbertSpec spec = spec_of(ns);
  for (int j = 0; j < ns.neighborhood_count(); ++j) {
    Projector local = schmidt_span_projector(psi, ns.neighborhood(j), tol, j);
    Matrix embedded =
        embed_neighborhood_operator(local.matrix(), ns.neighborhood(j), spec);
    const int full_rank = local.rank() *
        static_cast<int>(spec.total_dim() / spec.subset_dim(ns.neighborhood(j)));
    Projector emb(spec, embedded, full_rank, local.tol_used(), j, tol);
    // Construction guarantees the target lies inside every range.
    if ((emb.matrix() * psi.amplitudes() - psi.amplitudes()).norm() > 1e-7)
      throw std::logic_error("neighborhood projector does not fix the target state");
    out.local.push_back(std::move(local));
    out.embedded.push_back(std::move(emb));
  }
  return out;
}

QlsVerdict qls_check(const PureState& psi, const NeighborhoodStructure& ns,
                     const Tolerances& tol) {
  NeighborhoodProjectors projs = neighborhood_projectors(psi, ns, tol);
  Projector inter = subspace_intersection(projs.embedded, tol);
  QlsVerdict v{false, inter.rank(), 0.0, inter};
  if (inter.rank() == 1) {
    v.target_mismatch = frobenius_distance(inter.matrix(), psi.density());
    v.qls = v.target_mismatch <= 1e-6;
  }
  return v;
}

ParentHamiltonian canonical_hamiltonian(const PureState& psi,
                                        const NeighborhoodStructure& ns,
                                        const Tolerances& tol) {
  NeighborhoodProjectors projs = neighborhood_projectors(psi, ns, tol);
  const HilbertSpec spec = spec_of(ns);
  const Index d = spec.total_dim();
  ParentHamiltonian ph;
  ph.hamiltonian = Matrix::Zero(d, d);
  for (const auto& p : projs.embedded) {
    ph.terms.push_back(Matrix::Identity(d, d) - p.matrix());
    ph.hamiltonian += ph.terms.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(ph.hamiltonian));
  ph.ground_energy = es.eigenvalues()(0);
  auto [gp, gd] = ground_space(ph.hamiltonian, tol.eig(ns.neighborhood_count()));
  ph.ground_projector = std::move(gp);
  ph.ground_dim = gd;
  return ph;
}

bool frustration_free_check(const std::vector<Matrix>& terms,
                            const HilbertSpec& spec, const Tolerances& tol) {
  if (terms.empty())
    throw std::invalid_argument("frustration_free_check: no terms");
  const Index d = spec.total_dim();
  Matrix total = Matrix::Zero(d, d);
  std::vector<Matrix> shifted;
  for (const auto& t : terms) {
    if (t.rows() != d || t.cols() != d)
      throw std::invalid_argument("frustration_free_check: term shape mismatch");
    if (!is_hermitian(t, tol.herm * std::max(1.0, t.norm())))
      throw std::invalid_argument("frustration_free_check: term is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(t), Eigen::EigenvaluesOnly);
    shifted.push_back(t - es.eigenvalues()(0) * Matrix::Identity(d, d));
    total += shifted.back();
  }
  auto [gp, gd] = ground_space(total, tol.eig(static_cast<int>(terms.size())));
  (void)gd;
  for (const auto& t : shifted) {
    // Global ground vectors must be annihilated by every shifted term.
    if ((t * gp).norm() > 1e-7 * std::max(1.0, t.norm())) return false;
  }
  return true;
}

RealMatrix commutation_matrix(const NeighborhoodProjectors& projs) {
  const int n = static_cast<int>(projs.embedded.size());
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const double c = commutator_norm(projs.embedded[static_cast<std::size_t>(j)],
                                       projs.embedded[static_cast<std::size_t>(k)]);
      m(j, k) = c;
      m(k, j) = c;
    }
  return m;
}

BipartitionCheck bipartition_commutation_check(const PureState& psi,
                                               const NeighborhoodStructure& ns,
                                               const std::vector<int>& lambda,
                                               const Tolerances& tol) {
  require_state_matches(psi, ns);
  if (lambda.empty())
    throw std::invalid_argument("bipartition_commutation_check: empty side");
  std::vector<int> rest;
  for (int j = 0; j < ns.neighborhood_count(); ++j)
    if (std::find(lambda.begin(), lambda.end(), j) == lambda.end())
      rest.push_back(j);
  if (rest.empty())
    throw std::invalid_argument("bipartition_commutation_check: full side");

  BipartitionCheck out;
  out.region = sorted_union(ns, lambda);
  out.region_complement = sorted_union(ns, rest);
  Projector pa = union_support_projector(psi, out.region, tol);
  Projector pb = union_support_projector(psi, out.region_complement, tol);
  out.commutator = commutator_norm(pa, pb);
  out.pass = out.commutator <= tol.comm(psi.spec().total_dim());
  return out;
}

TransferCheck reduced_commutation_transfer_check(const PureState& psi,
                                                 const IndexSet& a,
                                                 const IndexSet& b,
                                                 const IndexSet& c,
                                                 const Tolerances& tol) {
  const int n = psi.spec().subsystem_count();
  require_valid_subset(a, n, "transfer_check A");
  require_valid_subset(b, n, "transfer_check B");
  require_valid_subset(c, n, "transfer_check C");
  const IndexSet ab = sorted_intersection(a, b);
  for (int x : ab)
    if (!std::binary_search(c.begin(), c.end(), x))
      throw std::invalid_argument(
          "reduced_commutation_transfer_check: A intersect B not contained in C");

  const Index d = psi.spec().total_dim();
  auto region_projector = [&](const IndexSet& region) -> Matrix {
    if (region.empty()) return Matrix::Identity(d, d);
    Projector local = schmidt_span_projector(psi, region, tol);
    return embed_neighborhood_operator(local.matrix(), region, psi.spec());
  };

  TransferCheck out;
  const double thr = tol.comm(d);
  Matrix pa = region_projector(a);
  Matrix pb = region_projector(b);
  out.hypothesis_norm = commutator_norm(pa, pb);
  out.hypothesis_commutes = out.hypothesis_norm <= thr;
  Matrix pac = region_projector(sorted_intersection(a, c));
  Matrix pbc = region_projector(sorted_intersection(b, c));
  out.conclusion_norm = commutator_norm(pac, pbc);
  out.conclusion_commutes = out.conclusion_norm <= thr;
  out.logical_violation = out.hypothesis_commutes && !out.conclusion_commutes;
  return out;
}

std::string Justification::to_string() const {
  switch (code) {
    case JustificationCode::Ok:
      return "OK";
    case JustificationCode::NotTreeLike:
      return "NOT_TREE_LIKE";
    case JustificationCode::NoncommutingPair:
      return "NONCOMMUTING_PAIR(" + std::to_string(j) + "," + std::to_string(k) + ")";
    case JustificationCode::GroundDegenerate:
      return "GROUND_DEGENERATE(" + std::to_string(dim) + ")";
  }
  return "OK";
}

const char* to_string(RftsVerdict v) {
  switch (v) {
    case RftsVerdict::Yes:
      return "yes";
    case RftsVerdict::No:
      return "no";
    case RftsVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

AnalysisReport rfts_verdict(const PureState& psi, const NeighborhoodStructure& ns,
                            const Tolerances& tol) {
  require_state_matches(psi, ns);
  AnalysisReport rep;
  rep.tol = tol;
  TreeVerdict tv = is_tree_like(ns);
  rep.mo = tv.mo;
  rep.acyclic = tv.acyclic;
  rep.tree_like = tv.tree_like;
  rep.mo_result = tv.mo_result;
  rep.cycle = tv.cycle;

  NeighborhoodProjectors projs = neighborhood_projectors(psi, ns, tol);
  for (const auto& p : projs.local) rep.local_ranks.push_back(p.rank());
  rep.commutation = commutation_matrix(projs);
  rep.max_commutator = rep.commutation.size() > 0 ? rep.commutation.maxCoeff() : 0.0;
  rep.tol_comm_used = tol.comm(psi.spec().total_dim());

  Projector inter = subspace_intersection(projs.embedded, tol);
  rep.intersection_dim = inter.rank();
  if (inter.rank() == 1)
    rep.target_mismatch = frobenius_distance(inter.matrix(), psi.density());
  rep.qls = inter.rank() == 1 && rep.target_mismatch <= 1e-6;

  if (!rep.tree_like) {
    rep.rfts = RftsVerdict::Inconclusive;
    rep.justification = {JustificationCode::NotTreeLike, -1, -1, 0};
    return rep;
  }

  const int n = ns.neighborhood_count();
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (rep.commutation(j, k) > rep.tol_comm_used) {
        rep.rfts = RftsVerdict::No;
        rep.justification = {JustificationCode::NoncommutingPair, j, k, 0};
        return rep;
      }
  if (!rep.qls) {
    rep.rfts = RftsVerdict::No;
    rep.justification = {JustificationCode::GroundDegenerate, -1, -1,
                         rep.intersection_dim};
    return rep;
  }
  rep.rfts = RftsVerdict::Yes;
  rep.justification = {JustificationCode::Ok, -1, -1, 0};
  return rep;
}

} // namespace qls
