#include "qls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qls/rng.hpp"

namespace qls {

KrausMap::KrausMap(HilbertSpec spec, std::vector<Matrix> kraus, const Tolerances& tol)
    : spec_(std::move(spec)), kraus_(std::move(kraus)) {
  validate(tol);
}

KrausMap::KrausMap(HilbertSpec spec, std::vector<Matrix> kraus, IndexSet nbhd,
                   int tag, const Tolerances& tol, bool identity_fallback)
    : spec_(std::move(spec)),
      kraus_(std::move(kraus)),
      nbhd_(std::move(nbhd)),
      tag_(tag),
      identity_fallback_(identity_fallback) {
  validate(tol);
}

void KrausMap::validate(const Tolerances& tol) {
  if (kraus_.empty()) throw std::invalid_argument("KrausMap: no Kraus operators");
  const Index d = spec_.total_dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus_) {
    if (k.rows() != d || k.cols() != d)
      throw std::invalid_argument("KrausMap: operator shape mismatch");
    sum += k.adjoint() * k;
  }
  tp_defect_ = (sum - Matrix::Identity(d, d)).norm();
  if (tp_defect_ > tol.tp * std::max(1.0, std::sqrt(static_cast<double>(d))))
    throw std::invalid_argument("KrausMap: not trace preserving, defect " +
                                std::to_string(tp_defect_));
  if (!nbhd_.empty()) {
    require_valid_subset(nbhd_, spec_.subsystem_count(), "KrausMap neighborhood");
    for (const auto& k : kraus_)
      if (!is_neighborhood_operator(k, nbhd_, spec_, 1e-9))
        throw std::invalid_argument(
            "KrausMap: Kraus operator is not of neighborhood form");
  }
}

Matrix apply_map_matrix(const KrausMap& e, const Matrix& rho) {
  const Index d = e.spec().total_dim();
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument("apply_map: state shape mismatch");
  Matrix out = Matrix::Zero(d, d);
  for (const auto& k : e.kraus()) out += k * rho * k.adjoint();
  return out;
}

DensityOperator apply_map(const KrausMap& e, const DensityOperator& rho,
                          const Tolerances& tol) {
  if (rho.spec() != e.spec())
    throw std::invalid_argument("apply_map: spec mismatch");
  return DensityOperator(e.spec(), hermitize(apply_map_matrix(e, rho.matrix())), tol);
}

KrausMap cooling_map(const PureState& psi, const NeighborhoodStructure& ns,
                     int j, const Tolerances& tol) {
  if (psi.spec().dims() != ns.dims())
    throw std::invalid_argument("cooling_map: state dimensions do not match structure");
  if (j < 0 || j >= ns.neighborhood_count())
    throw std::invalid_argument("cooling_map: neighborhood index out of range");
  const IndexSet& nbhd = ns.neighborhood(j);
  const HilbertSpec& spec = psi.spec();
  const Index m = spec.subset_dim(nbhd);

  Matrix sigma = hermitize(partial_trace(psi.density(), nbhd, spec));
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const auto& ev = es.eigenvalues();
  const double cut = tol.rank_cut * std::max(ev(m - 1), 0.0);
  Index kernel = 0;
  while (kernel < m && ev(kernel) <= cut) ++kernel;
  const Index r = m - kernel;

  if (kernel == 0) {
    // Full local support: nothing to cool, the canonical map is the identity.
    std::vector<Matrix> ops{Matrix::Identity(spec.total_dim(), spec.total_dim())};
    return KrausMap(spec, std::move(ops), nbhd, j, tol, true);
  }

  // Renormalize the kept spectrum so the re-prepared state has unit trace.
  double kept_mass = 0;
  for (Index l = kernel; l < m; ++l) kept_mass += ev(l);

  Matrix pi_local = es.eigenvectors().rightCols(r) *
                    es.eigenvectors().rightCols(r).adjoint();
  std::vector<Matrix> ops;
  ops.reserve(1 + static_cast<std::size_t>(r * kernel));
  ops.push_back(embed_neighborhood_operator(pi_local, nbhd, spec));
  for (Index l = kernel; l < m; ++l) {
    const double w = std::sqrt(ev(l) / kept_mass);
    for (Index i = 0; i < kernel; ++i) {
      Matrix k_local = w * es.eigenvectors().col(l) *
                       es.eigenvectors().col(i).adjoint();
      ops.push_back(embed_neighborhood_operator(k_local, nbhd, spec));
    }
  }
  return KrausMap(spec, std::move(ops), nbhd, j, tol, false);
}

std::vector<KrausMap> cooling_maps(const PureState& psi,
                                   const NeighborhoodStructure& ns,
                                   const Tolerances& tol) {
  std::vector<KrausMap> maps;
  maps.reserve(static_cast<std::size_t>(ns.neighborhood_count()));
  for (int j = 0; j < ns.neighborhood_count(); ++j)
    maps.push_back(cooling_map(psi, ns, j, tol));
  return maps;
}

bool check_invariance(const KrausMap& e, const PureState& psi,
                      const Tolerances& tol) {
  if (psi.spec() != e.spec())
    throw std::invalid_argument("check_invariance: spec mismatch");
  Matrix target = psi.density();
  return frobenius_distance(apply_map_matrix(e, target), target) <= tol.inv;
}

SimulationResult simulate_sequence(const std::vector<KrausMap>& seq,
                                   const DensityOperator& rho0,
                                   const PureState& psi,
                                   const Tolerances& tol) {
  if (rho0.spec() != psi.spec())
    throw std::invalid_argument("simulate_sequence: spec mismatch");
  for (const auto& e : seq)
    if (e.spec() != psi.spec())
      throw std::invalid_argument("simulate_sequence: map spec mismatch");

  Matrix target = psi.density();
  SimulationResult res;
  Matrix rho = rho0.matrix();
  res.distances.push_back(trace_distance(rho, target));
  for (const auto& e : seq) {
    rho = hermitize(apply_map_matrix(e, rho));
    res.distances.push_back(trace_distance(rho, target));
  }
  res.final_state = std::move(rho);
  res.steps_used = static_cast<int>(seq.size());
  res.converged = res.distances.back() <= tol.conv;
  return res;
}

RobustnessReport permutation_robustness_test(const PureState& psi,
                                             const NeighborhoodStructure& ns,
                                             int trials, std::uint64_t seed,
                                             const Tolerances& tol,
                                             int states_per_permutation) {
  std::vector<KrausMap> maps = cooling_maps(psi, ns, tol);
  const int n = static_cast<int>(maps.size());
  RobustnessReport rep;
  rep.seed = seed;
  for (const auto& e : maps)
    if (e.identity_fallback()) ++rep.identity_maps;

  Rng rng(seed);
  const Index d = psi.spec().total_dim();
  Matrix target = psi.density();
  rep.pass = true;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> perm = rng.permutation(n);
    for (int s = 0; s < std::max(1, states_per_permutation); ++s) {
      Matrix rho = rng.random_density(d);
      for (int idx : perm)
        rho = hermitize(apply_map_matrix(maps[static_cast<std::size_t>(idx)], rho));
      TrialResult tr;
      tr.permutation = perm;
      tr.final_distance = trace_distance(rho, target);
      tr.converged = tr.final_distance <= tol.conv;
      rep.max_final_distance = std::max(rep.max_final_distance, tr.final_distance);
      rep.pass = rep.pass && tr.converged;
      rep.trials.push_back(std::move(tr));
    }
  }
  return rep;
}

SimulationResult asymptotic_simulation(const PureState& psi,
                                       const NeighborhoodStructure& ns,
                                       const DensityOperator& rho0,
                                       int max_cycles,
                                       const Tolerances& tol) {
  std::vector<KrausMap> maps = cooling_maps(psi, ns, tol);
  Matrix target = psi.density();
  SimulationResult res;
  Matrix rho = rho0.matrix();
  res.distances.push_back(trace_distance(rho, target));
  for (int c = 0; c < max_cycles; ++c) {
    for (const auto& e : maps) {
      rho = hermitize(apply_map_matrix(e, rho));
      res.distances.push_back(trace_distance(rho, target));
      ++res.steps_used;
    }
    ++res.cycles_used;
    if (res.distances.back() <= tol.conv) break;
  }
  res.final_state = std::move(rho);
  res.converged = res.distances.back() <= tol.conv;
  return res;
}

bool invariance_output_decomposition_check(const KrausMap& e,
                                           const PureState& psi,
                                           const std::vector<DensityOperator>& samples,
                                           const Tolerances& tol) {
  if (!e.tag().has_value() || e.neighborhood().empty())
    throw std::invalid_argument(
        "invariance_output_decomposition_check: map carries no neighborhood");
  if (!check_invariance(e, psi, tol))
    throw std::invalid_argument(
        "invariance_output_decomposition_check: map does not preserve the target");

  const HilbertSpec& spec = psi.spec();
  Projector local = schmidt_span_projector(psi, e.neighborhood(), tol);
  Matrix pi = embed_neighborhood_operator(local.matrix(), e.neighborhood(), spec);
  Matrix pi_perp = Matrix::Identity(spec.total_dim(), spec.total_dim()) - pi;

  for (const auto& rho : samples) {
    if (rho.spec() != spec)
      throw std::invalid_argument(
          "invariance_output_decomposition_check: sample spec mismatch");
    Matrix out = apply_map_matrix(e, rho.matrix());
    Matrix delta = hermitize(pi * out * pi - pi * rho.matrix() * pi);
    Eigen::SelfAdjointEigenSolver<Matrix> es(delta, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, std::abs(es.eigenvalues()(delta.rows() - 1)));
    if (es.eigenvalues()(0) < -tol.psd * scale) return false;
    const double leaked = (pi_perp * rho.matrix() * pi_perp).trace().real();
    if (std::abs(delta.trace().real() - leaked) > tol.trace) return false;
  }
  return true;
}

} // namespace qls
