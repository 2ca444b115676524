#include <doctest.h>

#include <cmath>

#include "metastab/chain.hpp"
#include "metastab/errors.hpp"
#include "metastab/zoo.hpp"

using namespace metastab;

// ladder2: Φ = (0, 1, 1, 2) on profiles 00, 10, 01, 11 (player 0 first). At β = ln 2 the Gibbs
// weights are (1, 1/2, 1/2, 1/4)/(9/4).
namespace {
const double kLn2 = std::log(2.0);
}

TEST_CASE("ladder2 transition entries") {
    const auto g = make_ladder2();
    const auto sigma = boltzmann_update(g, kLn2, 0, 0);
    CHECK(sigma[0] == doctest::Approx(2.0 / 3));
    CHECK(sigma[1] == doctest::Approx(1.0 / 3));
    const auto P = build_chain(g, kLn2);
    CHECK(P.entry(0, 1) == doctest::Approx(1.0 / 6));
    CHECK(P.entry(0, 2) == doctest::Approx(1.0 / 6));
    CHECK(P.entry(0, 0) == doctest::Approx(2.0 / 3));
    CHECK(P.entry(0, 3) == 0.0);
    CHECK(P.entry(1, 3) == doctest::Approx(1.0 / 6));
    CHECK(P.entry(3, 2) == doctest::Approx(1.0 / 3));
    for (ProfileId x = 0; x < 4; ++x) CHECK(P.row_sum(x) == doctest::Approx(1.0));
}

TEST_CASE("ladder2 Gibbs measure") {
    const auto pi = gibbs(make_ladder2(), kLn2);
    CHECK(pi[0] == doctest::Approx(4.0 / 9));
    CHECK(pi[1] == doctest::Approx(2.0 / 9));
    CHECK(pi[2] == doctest::Approx(2.0 / 9));
    CHECK(pi[3] == doctest::Approx(1.0 / 9));
}

TEST_CASE("two-step row of ladder2") {
    const auto P = build_chain(make_ladder2(), kLn2);
    const auto two = P.step(P.step(point_mass(4, 0)));
    CHECK(two[0] == doctest::Approx(5.0 / 9));
    CHECK(two[1] == doctest::Approx(7.0 / 36));
    CHECK(two[3] == doctest::Approx(1.0 / 18));
}

TEST_CASE("restricted and killed chains on ladder2") {
    const auto P = build_chain(make_ladder2(), kLn2);
    const auto L = SubsetMask::of(4, {0, 2});
    const auto R = restrict_loop(P, L);
    CHECK(R.kind() == ChainKind::kRestrictedLoop);
    CHECK(R.entry(0, 0) == doctest::Approx(5.0 / 6));
    CHECK(R.entry(0, 2) == doctest::Approx(1.0 / 6));
    CHECK(R.entry(0, 1) == 0.0);
    CHECK(R.row_sum(0) == doctest::Approx(1.0));
    CHECK(R.row_sum(1) == 0.0);
    CHECK(R.reference()[0] == doctest::Approx(2.0 / 3));
    CHECK(R.reference()[2] == doctest::Approx(1.0 / 3));
    const auto K = restrict_kill(P, L);
    CHECK(K.entry(0, 0) == doctest::Approx(2.0 / 3));
    CHECK(K.row_sum(0) == doctest::Approx(5.0 / 6));
    CHECK(stationarity_residual(R, R.reference()).pass);
    CHECK(check_reversibility(K, K.reference()).pass);
}

TEST_CASE("bottleneck and edge flow of ladder2") {
    const auto P = build_chain(make_ladder2(), kLn2);
    const auto& pi = P.reference();
    const auto L = SubsetMask::of(4, {0});
    // Q(L, L̄) = π(00)·(1/6 + 1/6)
    CHECK(edge_flow(P, pi, L, L.complement()) == doctest::Approx(4.0 / 27));
    CHECK(bottleneck(P, pi, L) == doctest::Approx(1.0 / 3));
    CHECK(leave_probability(P, 0, L) == doctest::Approx(1.0 / 3));
    CHECK(mass(pi, L.complement()) == doctest::Approx(5.0 / 9));
}

TEST_CASE("β = 0 is uniform") {
    const auto g = make_random_potential({3, 2, 2}, 4);
    const auto P = build_chain(g, 0.0);
    for (double v : P.reference()) CHECK(v == doctest::Approx(1.0 / 12));
    CHECK(P.entry(0, 1) == doctest::Approx(1.0 / 9));
}

TEST_CASE("large β stays finite in the log domain") {
    const auto g = make_curie_weiss(6);
    const auto P = build_chain(g, 500.0);
    for (ProfileId x = 0; x < g.size(); ++x) CHECK(std::isfinite(P.row_sum(x)));
    CHECK(stationarity_residual(P, P.reference()).pass);
}

TEST_CASE("stationary solve agrees with Gibbs and handles games without a potential") {
    const auto g = make_random_potential({3, 3}, 2);
    const auto P = build_chain(g, 1.5);
    const auto s = stationary(P);
    for (ProfileId x = 0; x < g.size(); ++x) CHECK(s[x] == doctest::Approx(P.reference()[x]).epsilon(1e-10));
    // matching pennies: no potential, not reversible
    GameSpec mp({2, 2}, {1, -1, -1, 1, -1, 1, 1, -1});
    const auto Q = build_chain(mp, 1.0);
    CHECK(stationarity_residual(Q, Q.reference(), 1e-10).pass);
    CHECK_FALSE(check_reversibility(Q, Q.reference(), 1e-6).pass);
}

TEST_CASE("property: random potential games are reversible with respect to Gibbs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto g = make_random_potential({2, 3, 2}, seed, 3.0);
        for (double beta : {0.0, 0.7, 4.0}) {
            const auto P = build_chain(g, beta);
            CHECK(check_reversibility(P, P.reference()).pass);
            CHECK(stationarity_residual(P, P.reference()).pass);
        }
    }
}

TEST_CASE("conditional distribution rejects null sets") {
    Dist pi{0.5, 0.5, 0.0};
    CHECK_THROWS_AS(conditional(pi, SubsetMask::of(3, {2})), InputError);
}
