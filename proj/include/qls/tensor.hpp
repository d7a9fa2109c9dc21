#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qls/tolerances.hpp"

namespace qls {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Sorted list of subsystem indices.
using IndexSet = std::vector<int>;

// Dimensions of a multipartite Hilbert space. Basis indices are mixed-radix
// over the subsystem dimensions with subsystem 0 most significant.
class HilbertSpec {
 public:
  HilbertSpec() = default;
  explicit HilbertSpec(std::vector<int> dims);

  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(int a) const { return dims_.at(static_cast<std::size_t>(a)); }
  Index total_dim() const { return total_; }
  Index stride(int a) const { return strides_.at(static_cast<std::size_t>(a)); }

  Index subset_dim(const IndexSet& subset) const;
  // Dimensions of the subsystems in `subset`, in the order given.
  std::vector<int> subset_dims(const IndexSet& subset) const;
  // All full-space offsets reachable by varying the digits of `subset`
  // (other digits zero), in mixed-radix order over the subset. The empty
  // subset yields {0}.
  std::vector<Index> subset_offsets(const IndexSet& subset) const;

  bool operator==(const HilbertSpec& o) const { return dims_ == o.dims_; }
  bool operator!=(const HilbertSpec& o) const { return !(*this == o); }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  Index total_ = 0;
};

IndexSet complement_of(const IndexSet& subset, int n);
void require_valid_subset(const IndexSet& subset, int n, const std::string& what);

// ---------------------------------------------------------------------------
// Expression-friendly helpers.

template <typename DerivedA, typename DerivedB>
double frobenius_distance(const Eigen::MatrixBase<DerivedA>& a,
                          const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).norm();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
  return (m - m.adjoint()).norm() <= tol;
}

template <typename Derived>
Matrix hermitize(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.adjoint());
}

template <typename DerivedA, typename DerivedB>
double commutator_norm(const Eigen::MatrixBase<DerivedA>& a,
                       const Eigen::MatrixBase<DerivedB>& b) {
  return (a.derived() * b.derived() - b.derived() * a.derived()).norm();
}

// ---------------------------------------------------------------------------
// States and operators.

class PureState {
 public:
  PureState(HilbertSpec spec, Vector amplitudes, const Tolerances& tol = {});
  const HilbertSpec& spec() const { return spec_; }
  const Vector& amplitudes() const { return amp_; }
  Matrix density() const { return amp_ * amp_.adjoint(); }

 private:
  HilbertSpec spec_;
  Vector amp_;
};

class DensityOperator {
 public:
  DensityOperator(HilbertSpec spec, Matrix rho, const Tolerances& tol = {});
  const HilbertSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return rho_; }
  // Eigenvalue check; O(D^3), kept out of constructors on purpose.
  void assert_psd(const Tolerances& tol = {}) const;

 private:
  HilbertSpec spec_;
  Matrix rho_;
};

class Projector {
 public:
  Projector(HilbertSpec spec, Matrix p, int rank, double tol_used,
            std::optional<int> tag = std::nullopt, const Tolerances& tol = {});
  const HilbertSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return p_; }
  int rank() const { return rank_; }
  double tol_used() const { return tol_used_; }
  std::optional<int> tag() const { return tag_; }

 private:
  HilbertSpec spec_;
  Matrix p_;
  int rank_ = 0;
  double tol_used_ = 0;
  std::optional<int> tag_;
};

// ---------------------------------------------------------------------------
// Core tensor operations.

// Embed a local operator acting on `nbhd` (ascending subsystem order) into
// the full space, identity on the complement.
Matrix embed_neighborhood_operator(const Matrix& local, const IndexSet& nbhd,
                                   const HilbertSpec& spec);

// Trace out everything not in `keep`; kept factors stay in ascending index
// order. `keep` must be nonempty.
Matrix partial_trace(const Matrix& full, const IndexSet& keep,
                     const HilbertSpec& spec);

// True if m acts as (local on nbhd) tensor identity, within tol (relative).
bool is_neighborhood_operator(const Matrix& m, const IndexSet& nbhd,
                              const HilbertSpec& spec, double tol);

// Projector onto the support (range) of a Hermitian PSD matrix. Eigenvalues
// above rank_cut * lambda_max count toward the rank.
Projector support_projector(const Matrix& a, const HilbertSpec& spec,
                            const Tolerances& tol = {},
                            std::optional<int> tag = std::nullopt);

// Projector onto the Schmidt span of psi for the given neighborhood: the
// support of the reduced state on `nbhd`. Lives on the local factor space.
Projector schmidt_span_projector(const PureState& psi, const IndexSet& nbhd,
                                 const Tolerances& tol = {},
                                 std::optional<int> tag = std::nullopt);

// Orthogonal projector onto the intersection of the projectors' ranges,
// computed from the eigenspace of the summed projectors at eigenvalue
// = count (within tol.eig(count)).
Projector subspace_intersection(const std::vector<Projector>& projs,
                                const Tolerances& tol = {});

double commutator_norm(const Projector& p, const Projector& q);

// 1/2 * trace norm of (a - b) for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

} // namespace qls
