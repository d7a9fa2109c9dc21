#include "qls/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace qls {

PureState product_state(const std::vector<int>& dims, const Tolerances& tol) {
  HilbertSpec spec(dims);
  Vector amp = Vector::Zero(spec.total_dim());
  amp(0) = 1.0;
  return PureState(std::move(spec), std::move(amp), tol);
}

PureState ghz_state(int n, const Tolerances& tol) {
  if (n < 2) throw std::invalid_argument("ghz_state: need n >= 2");
  HilbertSpec spec(std::vector<int>(static_cast<std::size_t>(n), 2));
  Vector amp = Vector::Zero(spec.total_dim());
  amp(0) = 1.0 / std::sqrt(2.0);
  amp(spec.total_dim() - 1) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(spec), std::move(amp), tol);
}

PureState w_state(int n, const Tolerances& tol) {
  if (n < 2) throw std::invalid_argument("w_state: need n >= 2");
  HilbertSpec spec(std::vector<int>(static_cast<std::size_t>(n), 2));
  Vector amp = Vector::Zero(spec.total_dim());
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  for (int a = 0; a < n; ++a) amp(spec.stride(a)) = w;
  return PureState(std::move(spec), std::move(amp), tol);
}

PureState bell_chain_state(int n, const Tolerances& tol) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("bell_chain_state: need even n >= 2");
  HilbertSpec spec(std::vector<int>(static_cast<std::size_t>(n), 2));
  Vector amp = Vector::Zero(spec.total_dim());
  const double w = std::pow(2.0, -static_cast<double>(n) / 4.0);
  for (Index i = 0; i < spec.total_dim(); ++i) {
    bool paired = true;
    for (int a = 0; a + 1 < n; a += 2) {
      const int da = static_cast<int>((i / spec.stride(a)) % 2);
      const int db = static_cast<int>((i / spec.stride(a + 1)) % 2);
      if (da != db) { paired = false; break; }
    }
    if (paired) amp(i) = w;
  }
  return PureState(std::move(spec), std::move(amp), tol);
}

NeighborhoodStructure chain_structure(const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  if (n < 3) throw std::invalid_argument("chain_structure: need n >= 3");
  std::vector<std::vector<int>> nbhds;
  for (int a = 0; a + 1 < n; ++a) nbhds.push_back({a, a + 1});
  return NeighborhoodStructure(dims, std::move(nbhds));
}

} // namespace qls
