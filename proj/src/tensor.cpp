#include "qls/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qls {

HilbertSpec::HilbertSpec(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("HilbertSpec: no subsystems");
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (dims_[a] < 2)
      throw std::invalid_argument("HilbertSpec: subsystem " + std::to_string(a) +
                                  " has dimension < 2");
  }
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (int a = static_cast<int>(dims_.size()) - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = total_;
    total_ *= dims_[static_cast<std::size_t>(a)];
    if (total_ > (Index{1} << 40))
      throw std::invalid_argument("HilbertSpec: total dimension overflow");
  }
}

Index HilbertSpec::subset_dim(const IndexSet& subset) const {
  Index d = 1;
  for (int a : subset) d *= dim(a);
  return d;
}

std::vector<int> HilbertSpec::subset_dims(const IndexSet& subset) const {
  std::vector<int> out;
  out.reserve(subset.size());
  for (int a : subset) out.push_back(dim(a));
  return out;
}

std::vector<Index> HilbertSpec::subset_offsets(const IndexSet& subset) const {
  const Index d = subset_dim(subset);
  std::vector<Index> offsets(static_cast<std::size_t>(d), 0);
  Index block = d;
  for (int a : subset) {
    const int da = dim(a);
    const Index st = stride(a);
    block /= da;
    // digit for subsystem a cycles with period `block` within the subset order
    for (Index i = 0; i < d; ++i) {
      const Index digit = (i / block) % da;
      offsets[static_cast<std::size_t>(i)] += digit * st;
    }
  }
  return offsets;
}

IndexSet complement_of(const IndexSet& subset, int n) {
  IndexSet out;
  std::size_t k = 0;
  for (int a = 0; a < n; ++a) {
    if (k < subset.size() && subset[k] == a) {
      ++k;
      continue;
    }
    out.push_back(a);
  }
  return out;
}

void require_valid_subset(const IndexSet& subset, int n, const std::string& what) {
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= n)
      throw std::invalid_argument(what + ": subsystem index out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw std::invalid_argument(what + ": indices must be strictly ascending");
  }
}

PureState::PureState(HilbertSpec spec, Vector amplitudes, const Tolerances& tol)
    : spec_(std::move(spec)), amp_(std::move(amplitudes)) {
  if (amp_.size() != spec_.total_dim())
    throw std::invalid_argument("PureState: amplitude length does not match spec");
  if (std::abs(amp_.norm() - 1.0) > tol.norm)
    throw std::invalid_argument("PureState: state is not normalized");
}

DensityOperator::DensityOperator(HilbertSpec spec, Matrix rho, const Tolerances& tol)
    : spec_(std::move(spec)), rho_(std::move(rho)) {
  if (rho_.rows() != spec_.total_dim() || rho_.cols() != spec_.total_dim())
    throw std::invalid_argument("DensityOperator: shape does not match spec");
  if (!is_hermitian(rho_, tol.herm * std::max<double>(1.0, rho_.norm())))
    throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(rho_.trace().real() - 1.0) > tol.trace * 10 ||
      std::abs(rho_.trace().imag()) > tol.trace * 10)
    throw std::invalid_argument("DensityOperator: trace is not 1");
}

void DensityOperator::assert_psd(const Tolerances& tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho_), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd)
    throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
}

Projector::Projector(HilbertSpec spec, Matrix p, int rank, double tol_used,
                     std::optional<int> tag, const Tolerances& tol)
    : spec_(std::move(spec)), p_(std::move(p)), rank_(rank), tol_used_(tol_used),
      tag_(tag) {
  if (p_.rows() != spec_.total_dim() || p_.cols() != spec_.total_dim())
    throw std::invalid_argument("Projector: shape does not match spec");
  const double scale = std::max<double>(1.0, p_.norm());
  if (!is_hermitian(p_, tol.herm * scale))
    throw std::invalid_argument("Projector: not Hermitian");
  if ((p_ * p_ - p_).norm() > tol.idem * scale)
    throw std::invalid_argument("Projector: not idempotent");
  if (std::abs(p_.trace().real() - rank_) > tol.idem * std::max(1, rank_))
    throw std::invalid_argument("Projector: trace does not match rank");
}

Matrix embed_neighborhood_operator(const Matrix& local, const IndexSet& nbhd,
                                   const HilbertSpec& spec) {
  require_valid_subset(nbhd, spec.subsystem_count(), "embed_neighborhood_operator");
  if (nbhd.empty())
    throw std::invalid_argument("embed_neighborhood_operator: empty neighborhood");
  const Index m = spec.subset_dim(nbhd);
  if (local.rows() != m || local.cols() != m)
    throw std::invalid_argument(
        "embed_neighborhood_operator: local operator dimension mismatch");
  const auto ko = spec.subset_offsets(nbhd);
  const auto eo = spec.subset_offsets(complement_of(nbhd, spec.subsystem_count()));
  Matrix out = Matrix::Zero(spec.total_dim(), spec.total_dim());
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const Complex v = local(i, j);
      if (v == Complex{0.0, 0.0}) continue;
      for (Index e : eo) out(ko[static_cast<std::size_t>(i)] + e,
                             ko[static_cast<std::size_t>(j)] + e) = v;
    }
  return out;
}

Matrix partial_trace(const Matrix& full, const IndexSet& keep,
                     const HilbertSpec& spec) {
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep set must be nonempty");
  require_valid_subset(keep, spec.subsystem_count(), "partial_trace");
  if (full.rows() != spec.total_dim() || full.cols() != spec.total_dim())
    throw std::invalid_argument("partial_trace: operator shape does not match spec");
  const Index dk = spec.subset_dim(keep);
  const auto ko = spec.subset_offsets(keep);
  const auto eo = spec.subset_offsets(complement_of(keep, spec.subsystem_count()));
  Matrix out = Matrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Index e : eo) acc += full(ko[static_cast<std::size_t>(i)] + e,
                                     ko[static_cast<std::size_t>(j)] + e);
      out(i, j) = acc;
    }
  return out;
}

bool is_neighborhood_operator(const Matrix& m, const IndexSet& nbhd,
                              const HilbertSpec& spec, double tol) {
  const Index de =
      spec.total_dim() / std::max<Index>(Index{1}, spec.subset_dim(nbhd));
  Matrix local = partial_trace(m, nbhd, spec) / static_cast<double>(de);
  const double scale = std::max<double>(1.0, m.norm());
  return (m - embed_neighborhood_operator(local, nbhd, spec)).norm() <= tol * scale;
}

Projector support_projector(const Matrix& a, const HilbertSpec& spec,
                            const Tolerances& tol, std::optional<int> tag) {
  if (a.rows() != spec.total_dim() || a.cols() != spec.total_dim())
    throw std::invalid_argument("support_projector: shape does not match spec");
  const double scale = std::max<double>(1.0, a.norm());
  if (!is_hermitian(a, tol.herm * scale))
    throw std::invalid_argument("support_projector: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
  const auto& ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (ev(0) < -tol.psd * scale)
    throw std::invalid_argument("support_projector: input is not PSD");
  const Index d = a.rows();
  if (lmax <= tol.psd) {
    return Projector(spec, Matrix::Zero(d, d), 0, tol.rank_cut, tag, tol);
  }
  const double cut = tol.rank_cut * lmax;
  Index first = 0;
  while (first < d && ev(first) <= cut) ++first;
  const Index rank = d - first;
  Matrix basis = es.eigenvectors().rightCols(rank);
  Matrix p = basis * basis.adjoint();
  return Projector(spec, hermitize(p), static_cast<int>(rank), cut, tag, tol);
}

Projector schmidt_span_projector(const PureState& psi, const IndexSet& nbhd,
                                 const Tolerances& tol, std::optional<int> tag) {
  if (nbhd.empty())
    throw std::invalid_argument("schmidt_span_projector: empty neighborhood");
  Matrix reduced = partial_trace(psi.density(), nbhd, psi.spec());
  HilbertSpec local(psi.spec().subset_dims(nbhd));
  return support_projector(reduced, local, tol, tag);
}

Projector subspace_intersection(const std::vector<Projector>& projs,
                                const Tolerances& tol) {
  if (projs.empty())
    throw std::invalid_argument("subspace_intersection: empty projector list");
  const HilbertSpec& spec = projs.front().spec();
  const Index d = spec.total_dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projs) {
    if (p.spec() != spec)
      throw std::invalid_argument("subspace_intersection: mismatched specs");
    sum += p.matrix();
  }
  const int count = static_cast<int>(projs.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(sum));
  const double threshold = static_cast<double>(count) - tol.eig(count);
  const auto& ev = es.eigenvalues();
  Index first = d;
  while (first > 0 && ev(first - 1) >= threshold) --first;
  const Index rank = d - first;
  if (rank == 0)
    return Projector(spec, Matrix::Zero(d, d), 0, tol.eig(count), std::nullopt, tol);
  Matrix basis = es.eigenvectors().rightCols(rank);
  Matrix p = basis * basis.adjoint();
  return Projector(spec, hermitize(p), static_cast<int>(rank), tol.eig(count),
                   std::nullopt, tol);
}

double commutator_norm(const Projector& p, const Projector& q) {
  if (p.spec() != q.spec())
    throw std::invalid_argument("commutator_norm: mismatched specs");
  return commutator_norm(p.matrix(), q.matrix());
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace qls
