#include <doctest.h>

#include <cmath>

#include "metastab/chain.hpp"
#include "metastab/convergence.hpp"
#include "metastab/errors.hpp"
#include "metastab/metastability.hpp"
#include "metastab/zoo.hpp"

using namespace metastab;

TEST_CASE("the stationary distribution is metastable for any horizon") {
    const auto P = build_chain(make_random_potential({3, 2}, 1), 2.0);
    const auto c = is_metastable(P, P.reference(), 1e-9, 1000);
    CHECK(c.verdict == Verdict::kPass);
    CHECK(c.mode == MetaMode::kStepwise);
    CHECK(c.observed_max <= 1e-12);
}

TEST_CASE("a point mass far from equilibrium fails stepwise") {
    const auto P = build_chain(make_ladder2(), 0.0);
    const auto c = is_metastable(P, point_mass(4, 0), 0.1, 10);
    CHECK(c.verdict == Verdict::kFail);
    CHECK(c.first_violation == 1);
    CHECK(c.one_step_drift == doctest::Approx(0.5));
}

TEST_CASE("one-step bound certifies or is undetermined") {
    const auto g = make_pure_coordination(4);
    const auto P = build_chain(g, 6.0);
    const auto mu = stationary_restricted(P.reference(), SubsetMask::of(g.size(), {0}));
    const double delta = tv_distance(P.step(mu), mu);
    const auto T = static_cast<std::uint64_t>(0.1 / delta);
    const auto ok = is_metastable(P, mu, 0.1, T, 0);
    CHECK(ok.mode == MetaMode::kOneStepBound);
    CHECK(ok.verdict == Verdict::kPass);
    const auto unsure = is_metastable(P, mu, 0.1, 4 * T + 8, 0);
    CHECK(unsure.verdict == Verdict::kUndetermined);
}

TEST_CASE("property: drift is at most the bottleneck and scales linearly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = make_random_potential({2, 2, 3}, seed, 2.0);
        const auto P = build_chain(g, 3.0);
        const auto L = SubsetMask::of(g.size(), {0, 1, 2, 3});
        const auto mu = stationary_restricted(P.reference(), L);
        const double delta = tv_distance(P.step(mu), mu);
        CHECK(delta <= bottleneck(P, P.reference(), L) + 1e-12);
        for (std::uint64_t T : {1u, 7u, 40u}) CHECK(max_drift(P, mu, T) <= delta * static_cast<double>(T) + 1e-12);
    }
}

TEST_CASE("pseudo-mixing over the whole space is the mixing time") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = make_random_potential({3, 3}, seed);
        const auto P = build_chain(g, 1.0);
        for (double eps : {0.25, 0.05}) {
            const auto pm = pseudo_mixing_time(P, P.reference(), SubsetMask::full(g.size()), eps);
            CHECK(pm.reached);
            CHECK(pm.value == mixing_time(P, eps).value);
        }
    }
}

TEST_CASE("pseudo-mixing reports a lower bound when the budget runs out") {
    const auto g = make_pure_coordination(6);
    const auto P = build_chain(g, 8.0);
    const auto pm = pseudo_mixing_time(P, P.reference(), SubsetMask::of(g.size(), {0}), 0.1, 50);
    CHECK_FALSE(pm.reached);
    CHECK(pm.value > 50);
}

TEST_CASE("2ε window after pseudo-mixing") {
    // μ = π restricted to M > 0, started from the all-plus profile
    const auto g = make_curie_weiss(5);
    const auto P = build_chain(g, 0.5);
    SubsetMask R(g.size());
    for (ProfileId x = 0; x < g.size(); ++x) {
        if (magnetization(g.index(), x) > 0) R.insert(x);
    }
    const auto mu = stationary_restricted(P.reference(), R);
    const std::uint64_t T = 30;
    const double eps = std::max(max_drift(P, mu, T), 0.05);
    const auto w = metastable_window_check(P, mu, SubsetMask::of(g.size(), {0}), eps, T);
    REQUIRE(w.start.reached);
    CHECK(w.within_2eps);
}

TEST_CASE("convex combinations") {
    const auto mix = convex_combination({{0.25, {1.0, 0.0}}, {0.75, {0.0, 1.0}}});
    CHECK(mix[0] == doctest::Approx(0.25));
    CHECK_THROWS_AS(convex_combination({{0.5, {1.0, 0.0}}, {0.6, {0.0, 1.0}}}), InputError);
    CHECK_THROWS_AS(convex_combination({{-0.5, {1.0, 0.0}}, {1.5, {0.0, 1.0}}}), InputError);
}

TEST_CASE("absorption weights from a balanced start are symmetric") {
    const auto g = make_pure_coordination(2);
    const auto P = build_chain(g, 8.0);
    const std::vector<SubsetMask> cores{SubsetMask::of(4, {0}), SubsetMask::of(4, {3})};
    const std::vector<Dist> mus{point_mass(4, 0), point_mass(4, 3)};
    const auto residual = SubsetMask::of(4, {1, 2});
    const auto nu = nu_distribution(P, 1, cores, mus, residual, 0.1);
    CHECK(nu.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(nu.nu[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(nu.t_eps >= 1);
    CHECK_THROWS_AS(nu_distribution(P, 1, cores, mus, SubsetMask::of(4, {1}), 0.1), InputError);
}

TEST_CASE("restricted chain coupling inequalities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = make_random_potential({2, 3, 2}, seed, 2.0);
        const auto P = build_chain(g, 2.0);
        const auto L = SubsetMask::of(g.size(), {0, 1, 2, 3, 4, 6});
        const auto r = restriction_coupling_check(P, L, doubling_grid(256, false));
        CHECK(r.pass());
        CHECK(r.checked > 0);
    }
}

TEST_CASE("tv trace at time zero") {
    const auto P = build_chain(make_ladder2(), 0.0);
    const auto tv = tv_trace(P, 0, P.reference(), {0, 1});
    CHECK(tv[0] == doctest::Approx(0.75));
    CHECK(tv[1] == doctest::Approx(0.25));
}
