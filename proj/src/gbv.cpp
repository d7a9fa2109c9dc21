#include "qls/gbv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qls {
namespace {

// Flattened view of the virtual-particle layout: digit extraction for every
// (particle, slot) pair from a full-space basis index.
struct VirtualLayout {
  HilbertSpec spec;
  CoarseGraining cg;
  // strides within each particle's local index, slot 0 most significant
  std::vector<std::vector<long>> slot_strides;
  std::vector<std::vector<long>> particle_member_strides;

  explicit VirtualLayout(const GbvSpec& g)
      : spec(g.base.dims()), cg(coarse_grain(g.base)) {
    for (std::size_t p = 0; p < cg.particles.size(); ++p) {
      const auto& vdims = g.virtual_dims[p];
      std::vector<long> vs(vdims.size(), 1);
      for (int j = static_cast<int>(vdims.size()) - 2; j >= 0; --j)
        vs[static_cast<std::size_t>(j)] =
            vs[static_cast<std::size_t>(j + 1)] * vdims[static_cast<std::size_t>(j + 1)];
      slot_strides.push_back(std::move(vs));

      const auto& members = cg.particles[p];
      std::vector<long> ms(members.size(), 1);
      for (int i = static_cast<int>(members.size()) - 2; i >= 0; --i)
        ms[static_cast<std::size_t>(i)] =
            ms[static_cast<std::size_t>(i + 1)] *
            spec.dim(members[static_cast<std::size_t>(i + 1)]);
      particle_member_strides.push_back(std::move(ms));
    }
  }

  long particle_index(Index full, int p) const {
    const auto& members = cg.particles[static_cast<std::size_t>(p)];
    long x = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int a = members[i];
      const long digit = static_cast<long>((full / spec.stride(a)) % spec.dim(a));
      x += digit * particle_member_strides[static_cast<std::size_t>(p)][i];
    }
    return x;
  }

  int slot_digit(long particle_idx, const GbvSpec& g, int p, int slot) const {
    const long stride = slot_strides[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)];
    const int d = g.virtual_dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)];
    return static_cast<int>((particle_idx / stride) % d);
  }

  // Mixed-radix index of full-space basis state `full` over the listed
  // virtual particles, first entry most significant.
  long group_index(Index full, const GbvSpec& g,
                   const std::vector<std::pair<int, int>>& group) const {
    long idx = 0;
    for (const auto& [p, slot] : group) {
      const long x = particle_index(full, p);
      idx = idx * g.virtual_dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)] +
            slot_digit(x, g, p, slot);
    }
    return idx;
  }
};

long group_dim(const GbvSpec& g, const std::vector<std::pair<int, int>>& group) {
  long d = 1;
  for (const auto& [p, slot] : group)
    d *= g.virtual_dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)];
  return d;
}

ValidationResult fail(std::string msg, int index = -1) {
  return {false, std::move(msg), index};
}

} // namespace

ValidationResult validate_gbv_spec(const GbvSpec& spec, const Tolerances& tol) {
  ValidationResult base = validate_structure(spec.base);
  if (!base.ok) return fail("base structure invalid: " + base.message, base.index);
  TreeVerdict tv = is_tree_like(spec.base);
  if (!tv.tree_like) return fail("base structure is not tree-like");

  CoarseGraining cg = coarse_grain(spec.base);
  const std::size_t np = cg.particles.size();
  if (spec.virtual_dims.size() != np)
    return fail("virtual_dims must list one entry per coarse particle (" +
                std::to_string(np) + " particles)");
  for (std::size_t p = 0; p < np; ++p) {
    if (spec.virtual_dims[p].empty())
      return fail("particle has no virtual particles", static_cast<int>(p));
    long prod = 1;
    for (int d : spec.virtual_dims[p]) {
      if (d < 1) return fail("virtual dimension below 1", static_cast<int>(p));
      prod *= d;
    }
    if (prod != cg.particle_dims[p])
      return fail("virtual dimensions of particle " + std::to_string(p) +
                      " multiply to " + std::to_string(prod) + ", expected " +
                      std::to_string(cg.particle_dims[p]),
                  static_cast<int>(p));
  }

  const std::size_t nn = static_cast<std::size_t>(spec.base.neighborhood_count());
  if (spec.groups.size() != nn)
    return fail("groups must list one entry per neighborhood");
  if (spec.factor_amplitudes.size() != nn)
    return fail("factor_amplitudes must list one entry per neighborhood");

  std::map<std::pair<int, int>, int> owner;
  for (std::size_t k = 0; k < nn; ++k) {
    const auto& nbhd = spec.base.neighborhood(static_cast<int>(k));
    for (const auto& [p, slot] : spec.groups[k]) {
      if (p < 0 || static_cast<std::size_t>(p) >= np)
        return fail("group references unknown particle " + std::to_string(p),
                    static_cast<int>(k));
      if (slot < 0 ||
          static_cast<std::size_t>(slot) >= spec.virtual_dims[static_cast<std::size_t>(p)].size())
        return fail("group references unknown slot " + std::to_string(slot) +
                        " of particle " + std::to_string(p),
                    static_cast<int>(k));
      auto [it, inserted] = owner.emplace(std::make_pair(p, slot), static_cast<int>(k));
      if (!inserted)
        return fail("virtual particle (" + std::to_string(p) + "," +
                        std::to_string(slot) + ") appears in groups " +
                        std::to_string(it->second) + " and " + std::to_string(k),
                    static_cast<int>(k));
      for (int a : cg.particles[static_cast<std::size_t>(p)])
        if (!std::binary_search(nbhd.begin(), nbhd.end(), a))
          return fail("particle " + std::to_string(p) +
                          " is not contained in neighborhood " + std::to_string(k),
                      static_cast<int>(k));
    }
  }
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t slot = 0; slot < spec.virtual_dims[p].size(); ++slot)
      if (!owner.count({static_cast<int>(p), static_cast<int>(slot)}))
        return fail("virtual particle (" + std::to_string(p) + "," +
                        std::to_string(slot) + ") belongs to no group",
                    static_cast<int>(p));

  for (std::size_t k = 0; k < nn; ++k) {
    const long want = group_dim(spec, spec.groups[k]);
    if (spec.factor_amplitudes[k].size() != want)
      return fail("factor state of neighborhood " + std::to_string(k) + " has " +
                      std::to_string(spec.factor_amplitudes[k].size()) +
                      " amplitudes, expected " + std::to_string(want),
                  static_cast<int>(k));
    if (std::abs(spec.factor_amplitudes[k].norm() - 1.0) > tol.norm)
      return fail("factor state of neighborhood " + std::to_string(k) +
                      " is not normalized",
                  static_cast<int>(k));
  }
  return {true, "", -1};
}

PureState build_gbv_state(const GbvSpec& spec, const Tolerances& tol,
                          bool normalize_factors) {
  GbvSpec work = spec;
  if (normalize_factors) {
    for (auto& f : work.factor_amplitudes) {
      const double n = f.norm();
      if (n <= 0) throw std::invalid_argument("build_gbv_state: zero factor state");
      f /= n;
    }
  }
  ValidationResult v = validate_gbv_spec(work, tol);
  if (!v.ok) throw std::invalid_argument("build_gbv_state: " + v.message);

  VirtualLayout layout(work);
  const Index d = layout.spec.total_dim();
  Vector amp(d);
  for (Index i = 0; i < d; ++i) {
    Complex a(1.0, 0.0);
    for (std::size_t k = 0; k < work.groups.size(); ++k)
      a *= work.factor_amplitudes[k](layout.group_index(i, work, work.groups[k]));
    amp(i) = a;
  }
  return PureState(layout.spec, std::move(amp), tol);
}

std::vector<Projector> gbv_canonical_terms(const GbvSpec& spec,
                                           const Tolerances& tol) {
  ValidationResult v = validate_gbv_spec(spec, tol);
  if (!v.ok) throw std::invalid_argument("gbv_canonical_terms: " + v.message);

  VirtualLayout layout(spec);
  const Index d = layout.spec.total_dim();
  std::vector<Projector> terms;
  for (std::size_t k = 0; k < spec.groups.size(); ++k) {
    const auto& group = spec.groups[k];
    const Vector& f = spec.factor_amplitudes[k];
    // Bucket basis states by the joint index of all virtual particles outside
    // this group; the factor projector acts within each bucket.
    std::map<std::pair<long, long>, std::vector<Index>> buckets;
    for (Index i = 0; i < d; ++i) {
      long rest = 0;
      for (std::size_t p = 0; p < layout.cg.particles.size(); ++p) {
        const long x = layout.particle_index(i, static_cast<int>(p));
        for (std::size_t slot = 0; slot < spec.virtual_dims[p].size(); ++slot) {
          const auto id = std::make_pair(static_cast<int>(p), static_cast<int>(slot));
          if (std::find(group.begin(), group.end(), id) != group.end()) continue;
          rest = rest * spec.virtual_dims[p][slot] +
                 layout.slot_digit(x, spec, static_cast<int>(p), static_cast<int>(slot));
        }
      }
      buckets[{rest, 0}].push_back(i);
    }
    Matrix term = Matrix::Zero(d, d);
    for (const auto& [key, members] : buckets) {
      (void)key;
      for (Index row : members)
        for (Index col : members)
          term(row, col) = f(layout.group_index(row, spec, group)) *
                           std::conj(f(layout.group_index(col, spec, group)));
    }
    const long gd = group_dim(spec, group);
    terms.emplace_back(layout.spec, std::move(term),
                       static_cast<int>(d / gd), tol.rank_cut,
                       static_cast<int>(k), tol);
  }
  return terms;
}

} // namespace qls
