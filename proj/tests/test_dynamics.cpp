#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "oracles.hpp"
#include "qls/dynamics.hpp"
#include "qls/fixtures.hpp"
#include "qls/stabilization.hpp"

using namespace qls;
using doctest::Approx;

namespace {

PureState random_242_state() {
  Rng rng(12345);
  return PureState(HilbertSpec({2, 4, 2}), rng.random_state_vector(16));
}

NeighborhoodStructure chain_242() {
  return NeighborhoodStructure({2, 4, 2}, {{0, 1}, {1, 2}});
}

DensityOperator maximally_mixed(const HilbertSpec& spec) {
  const Index d = spec.total_dim();
  return DensityOperator(spec, Matrix::Identity(d, d) / static_cast<double>(d));
}

Matrix haar_unitary(Rng& rng, Index d) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

} // namespace

TEST_CASE("kraus map construction") {
  HilbertSpec spec({2, 2});
  SUBCASE("unitary channels and pinching channels are accepted") {
    Rng rng(8);
    const Matrix u = haar_unitary(rng, 4);
    const KrausMap unitary(spec, {u});
    CHECK(unitary.tp_defect() < 1e-12);
    CHECK_FALSE(unitary.tag().has_value());

    Matrix k1 = Matrix::Zero(4, 4), k2 = Matrix::Zero(4, 4);
    k1(0, 0) = k1(1, 1) = 1;
    k2(2, 2) = k2(3, 3) = 1;
    CHECK_NOTHROW(KrausMap(spec, {k1, k2}));
  }
  SUBCASE("trace preservation is enforced") {
    CHECK_THROWS_AS(KrausMap(spec, {0.5 * Matrix::Identity(4, 4)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KrausMap(spec, {}), std::invalid_argument);
  }
  SUBCASE("declared neighborhoods are enforced") {
    HilbertSpec three({2, 2, 2});
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    const Matrix big = embed_neighborhood_operator(cnot, {0, 1}, three);
    CHECK_NOTHROW(KrausMap(three, {big}, IndexSet{0, 1}, 0));
    CHECK_THROWS_AS(KrausMap(three, {big}, IndexSet{1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(KrausMap(three, {big}, IndexSet{1, 2}, 0), std::invalid_argument);
  }
}

TEST_CASE("map application") {
  HilbertSpec one({2});
  SUBCASE("decay channel empties the excited state") {
    Matrix keep = Matrix::Zero(2, 2), drop = Matrix::Zero(2, 2);
    keep(0, 0) = 1;
    drop(0, 1) = 1;
    const KrausMap decay(one, {keep, drop});
    const Matrix out = apply_map_matrix(decay, 0.5 * Matrix::Identity(2, 2));
    Matrix want = Matrix::Zero(2, 2);
    want(0, 0) = 1;
    CHECK((out - want).norm() < 1e-12);
  }
  SUBCASE("unitary conjugation preserves the spectrum") {
    Rng rng(9);
    const Matrix u = haar_unitary(rng, 6);
    const KrausMap chan(HilbertSpec({6}), {u});
    const Matrix rho = rng.random_density(6);
    const Matrix out = apply_map_matrix(chan, rho);
    Eigen::SelfAdjointEigenSolver<Matrix> a(hermitize(rho), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> b(hermitize(out), Eigen::EigenvaluesOnly);
    CHECK((a.eigenvalues() - b.eigenvalues()).norm() < 1e-10);
  }
  SUBCASE("apply_map validates and returns a proper density operator") {
    const KrausMap chan(one, {Matrix::Identity(2, 2)});
    const DensityOperator rho(one, 0.5 * Matrix::Identity(2, 2));
    const DensityOperator out = apply_map(chan, rho);
    CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-12);
    CHECK_THROWS_AS(apply_map_matrix(chan, Matrix::Identity(3, 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("cooling maps") {
  SUBCASE("product target: projector plus one transfer operator per kernel vector") {
    const PureState psi = product_state({2, 2, 2});
    const auto ns = chain_structure({2, 2, 2});
    const KrausMap e = cooling_map(psi, ns, 0);
    CHECK(e.kraus().size() == 4); // rank-1 keep, 3 kernel directions
    CHECK(e.tag() == 0);
    CHECK(e.neighborhood() == IndexSet{0, 1});
    CHECK_FALSE(e.identity_fallback());
    CHECK(e.tp_defect() < 1e-10);
    CHECK(check_invariance(e, psi));
    // output marginal on the cooled pair is pinned to |00>
    const Matrix out = apply_map_matrix(e, Matrix::Identity(8, 8) / 8.0);
    Matrix want = Matrix::Zero(4, 4);
    want(0, 0) = 1;
    CHECK((partial_trace(out, {0, 1}, psi.spec()) - want).norm() < 1e-10);
  }
  SUBCASE("cat target: output support falls inside the local span") {
    const PureState ghz = ghz_state(3);
    const auto ns = chain_structure({2, 2, 2});
    const KrausMap e = cooling_map(ghz, ns, 0);
    CHECK(check_invariance(e, ghz));
    CHECK_FALSE(e.identity_fallback());
    const Projector local = schmidt_span_projector(ghz, {0, 1});
    const Matrix pi = embed_neighborhood_operator(local.matrix(), {0, 1}, ghz.spec());
    Rng rng(21);
    for (int t = 0; t < 5; ++t) {
      const Matrix out = apply_map_matrix(e, rng.random_density(8));
      CHECK((pi * out * pi - out).norm() < 1e-9);
      CHECK(std::abs(out.trace().real() - 1.0) < 1e-10);
    }
  }
  SUBCASE("full-rank marginal degenerates to the identity map") {
    const PureState psi = bell_chain_state(4);
    const KrausMap e = cooling_map(psi, chain_structure({2, 2, 2, 2}), 1);
    CHECK(e.identity_fallback());
    REQUIRE(e.kraus().size() == 1);
    CHECK((e.kraus()[0] - Matrix::Identity(16, 16)).norm() < 1e-12);
  }
  SUBCASE("every corpus cooling map preserves its target") {
    for (const auto& f : qlstest::acceptance_corpus()) {
      CAPTURE(f.name);
      for (const auto& e : cooling_maps(f.psi, f.ns)) {
        CHECK(check_invariance(e, f.psi));
        CHECK(e.tp_defect() <
              1e-9 * std::sqrt(static_cast<double>(f.psi.spec().total_dim())));
      }
    }
  }
  SUBCASE("invariance detects maps that move the target") {
    HilbertSpec two({2, 2});
    const PureState psi = product_state({2, 2});
    std::vector<Matrix> depol;
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    for (const Matrix& p : {Matrix(Matrix::Identity(2, 2)), x, y, z})
      depol.push_back(0.5 * embed_neighborhood_operator(p, {0}, two));
    CHECK_FALSE(check_invariance(KrausMap(two, depol), psi));

    Matrix phase(2, 2);
    phase << 1, 0, 0, Complex(0, 1);
    const KrausMap rot(two, {embed_neighborhood_operator(phase, {0}, two)});
    CHECK(check_invariance(rot, psi));
  }
}

TEST_CASE("single sequence simulation") {
  SUBCASE("product target converges within one pass") {
    const PureState psi = product_state({2, 2, 2, 2});
    const auto ns = chain_structure({2, 2, 2, 2});
    const auto res =
        simulate_sequence(cooling_maps(psi, ns), maximally_mixed(psi.spec()), psi);
    CHECK(res.converged);
    CHECK(res.steps_used == 3);
    REQUIRE(res.distances.size() == 4);
    CHECK(res.distances.front() == Approx(1.0 - 1.0 / 16.0).epsilon(1e-10));
    CHECK(res.distances.back() < 1e-8);
  }
  SUBCASE("cat target gets stuck away from the target") {
    const PureState ghz = ghz_state(3);
    const auto ns = chain_structure({2, 2, 2});
    const auto res =
        simulate_sequence(cooling_maps(ghz, ns), maximally_mixed(ghz.spec()), ghz);
    CHECK_FALSE(res.converged);
    CHECK(res.distances.back() > 0.4);
    // each map outputs into its own span, so after the pass the state sits
    // inside the span of the last neighborhood applied
    const Matrix last = neighborhood_projectors(ghz, ns).embedded.back().matrix();
    CHECK((last * res.final_state * last - res.final_state).norm() < 1e-9);
    // but it never reaches the target word plane exactly: the degenerate
    // intersection keeps a vacuum component alive
    CHECK(std::abs(res.final_state(0, 0)) > 0.1);
  }
  SUBCASE("empty sequences only measure the initial distance") {
    const PureState psi = product_state({2, 2});
    const auto res = simulate_sequence({}, maximally_mixed(psi.spec()), psi);
    CHECK(res.steps_used == 0);
    REQUIRE(res.distances.size() == 1);
    CHECK_FALSE(res.converged);
  }
}

TEST_CASE("permutation robustness") {
  SUBCASE("positive corpus targets absorb in one pass in any order") {
    for (const auto& f : qlstest::acceptance_corpus()) {
      if (f.expected_rfts != RftsVerdict::Yes) continue;
      CAPTURE(f.name);
      const auto rep = permutation_robustness_test(f.psi, f.ns, 8, 99);
      CHECK(rep.pass);
      CHECK(rep.max_final_distance < 1e-8);
      CHECK(rep.trials.size() == 8);
    }
  }
  SUBCASE("negative corpus targets never land on the target") {
    for (const auto& f : qlstest::acceptance_corpus()) {
      if (f.expected_rfts != RftsVerdict::No) continue;
      CAPTURE(f.name);
      const auto rep = permutation_robustness_test(f.psi, f.ns, 8, 99);
      CHECK_FALSE(rep.pass);
      CHECK(rep.max_final_distance > 0.3);
      for (const auto& tr : rep.trials) CHECK_FALSE(tr.converged);
    }
  }
  SUBCASE("identity fallbacks are counted once per map set") {
    const auto rep =
        permutation_robustness_test(bell_chain_state(4), chain_structure({2, 2, 2, 2}),
                                    3, 1);
    CHECK(rep.identity_maps == 1);
    const auto rep2 = permutation_robustness_test(
        product_state({2, 2, 2}), chain_structure({2, 2, 2}), 3, 1);
    CHECK(rep2.identity_maps == 0);
  }
  SUBCASE("seeding is reproducible and trials record their permutation") {
    const PureState ghz = ghz_state(3);
    const auto ns = chain_structure({2, 2, 2});
    const auto a = permutation_robustness_test(ghz, ns, 5, 31);
    const auto b = permutation_robustness_test(ghz, ns, 5, 31);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
      CHECK(a.trials[i].permutation == b.trials[i].permutation);
      CHECK(a.trials[i].final_distance == b.trials[i].final_distance); // bit-exact
    }
    CHECK(a.seed == 31);
    // several states per permutation multiply the run count
    const auto c = permutation_robustness_test(ghz, ns, 4, 31, {}, 3);
    CHECK(c.trials.size() == 12);
    CHECK(c.trials[0].permutation == c.trials[1].permutation);
    CHECK(c.trials[0].final_distance != c.trials[1].final_distance);
  }
  SUBCASE("zero trials pass vacuously") {
    const auto rep =
        permutation_robustness_test(ghz_state(3), chain_structure({2, 2, 2}), 0, 1);
    CHECK(rep.pass);
    CHECK(rep.trials.empty());
    CHECK(rep.max_final_distance == 0);
  }
}

TEST_CASE("cycled asymptotic simulation") {
  SUBCASE("positive corpus targets converge within the first cycle") {
    for (const auto& f : qlstest::acceptance_corpus()) {
      if (f.expected_rfts != RftsVerdict::Yes) continue;
      CAPTURE(f.name);
      const auto res = asymptotic_simulation(f.psi, f.ns, maximally_mixed(f.psi.spec()),
                                             25);
      CHECK(res.converged);
      CHECK(res.cycles_used == 1);
    }
  }
  SUBCASE("stabilizable noncommuting target converges geometrically") {
    const PureState psi = random_242_state();
    const auto res = asymptotic_simulation(psi, chain_242(),
                                           maximally_mixed(psi.spec()), 60);
    CHECK(res.converged);
    CHECK(res.cycles_used > 3);      // genuinely asymptotic, not one-pass
    CHECK(res.cycles_used < 60);
    CHECK(res.distances.back() < 1e-8);
    // single-pass runs from random full-rank states do not land on target
    const auto one_pass = permutation_robustness_test(psi, chain_242(), 6, 5);
    CHECK_FALSE(one_pass.pass);
  }
  SUBCASE("cat target plateaus at the degenerate-plane distance") {
    const PureState ghz = ghz_state(3);
    const auto res = asymptotic_simulation(ghz, chain_structure({2, 2, 2}),
                                           maximally_mixed(ghz.spec()), 10);
    CHECK_FALSE(res.converged);
    CHECK(res.cycles_used == 10);
    CHECK(res.distances.back() == Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("trace distance to the target never increases along any trajectory") {
    Rng rng(606);
    std::vector<std::pair<PureState, NeighborhoodStructure>> cases;
    for (const auto& f : qlstest::acceptance_corpus()) cases.emplace_back(f.psi, f.ns);
    cases.emplace_back(random_242_state(), chain_242());
    for (const auto& [psi, ns] : cases) {
      const Index d = psi.spec().total_dim();
      const DensityOperator rho0(psi.spec(), rng.random_density(d));
      const auto res = asymptotic_simulation(psi, ns, rho0, 4);
      for (std::size_t i = 0; i + 1 < res.distances.size(); ++i)
        CHECK(res.distances[i + 1] <= res.distances[i] + 1e-10);
    }
  }
}

TEST_CASE("invariant maps act as the identity inside the local span") {
  Rng rng(707);
  for (const auto& f : qlstest::acceptance_corpus()) {
    CAPTURE(f.name);
    const Index d = f.psi.spec().total_dim();
    std::vector<DensityOperator> samples;
    for (int s = 0; s < 4; ++s)
      samples.emplace_back(f.psi.spec(), rng.random_density(d));
    samples.push_back(maximally_mixed(f.psi.spec()));
    for (const auto& e : cooling_maps(f.psi, f.ns))
      CHECK(invariance_output_decomposition_check(e, f.psi, samples));
  }
  SUBCASE("untagged or non-invariant maps are rejected") {
    const PureState psi = product_state({2, 2});
    const KrausMap plain(psi.spec(), {Matrix::Identity(4, 4)});
    CHECK_THROWS_AS(invariance_output_decomposition_check(plain, psi, {}),
                    std::invalid_argument);
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    const KrausMap flip(psi.spec(), {embed_neighborhood_operator(x, {0}, psi.spec())},
                        IndexSet{0}, 0);
    CHECK_THROWS_AS(invariance_output_decomposition_check(flip, psi, {}),
                    std::invalid_argument);
  }
}
