#include <doctest.h>

#include <cmath>
#include <vector>

#include "metastab/errors.hpp"
#include "metastab/expr.hpp"
#include "metastab/game.hpp"
#include "metastab/zoo.hpp"

using namespace metastab;

TEST_CASE("mixed-radix encoding puts player 0 in the least significant digit") {
    ProfileIndex idx({2, 3, 2});
    CHECK(idx.size() == 12);
    const std::vector<int> s{1, 2, 0};
    CHECK(idx.encode(s) == 5);  // 1 + 2*2 + 0*6
    CHECK(idx.decode(5) == s);
    for (ProfileId x = 0; x < idx.size(); ++x) CHECK(idx.encode(idx.decode(x)) == x);
    CHECK(idx.degree() == 4);
}

TEST_CASE("encode rejects out-of-range strategies") {
    ProfileIndex idx({2, 3});
    const std::vector<int> bad{0, 3};
    CHECK_THROWS_AS(idx.encode(bad), InputError);
}

TEST_CASE("neighbors differ in exactly one coordinate") {
    ProfileIndex idx({3, 2, 4});
    for (ProfileId x = 0; x < idx.size(); ++x) {
        const auto nb = idx.neighbors(x);
        CHECK(nb.size() == idx.degree());
        for (const auto& y : nb) {
            CHECK(idx.hamming(x, y.profile) == 1);
            CHECK(idx.strategy(x, y.player) != idx.strategy(y.profile, y.player));
        }
    }
}

TEST_CASE("subset mask algebra") {
    auto a = SubsetMask::of(70, {0, 5, 69});
    auto b = SubsetMask::of(70, {5, 6});
    CHECK((a | b).count() == 4);
    CHECK((a & b).members() == std::vector<ProfileId>{5});
    CHECK((a - b).members() == std::vector<ProfileId>{0, 69});
    CHECK(a.complement().count() == 67);
    CHECK(SubsetMask::of(70, {5}).is_subset_of(a));
    CHECK(a.intersects(b));
    CHECK(compare_bitmask(SubsetMask::of(70, {1}), SubsetMask::of(70, {0, 1})) == std::strong_ordering::less);
}

TEST_CASE("connected components in the Hamming graph") {
    ProfileIndex idx({2, 2, 2});
    // (0,0,0) and (1,1,1) are not adjacent
    const auto two = SubsetMask::of(8, {0, 7});
    CHECK(connected_components(idx, two).size() == 2);
    CHECK_FALSE(is_connected(idx, two));
    CHECK(is_connected(idx, SubsetMask::of(8, {0, 1, 3, 7})));
}

TEST_CASE("potential verification catches a broken table") {
    auto g = make_ladder2();
    CHECK(verify_potential(g).pass);
    auto util = g.utility_table();
    util[0] += 0.5;
    GameSpec bad({2, 2}, util, g.potential());
    const auto c = verify_potential(bad);
    CHECK_FALSE(c.pass);
    CHECK(c.worst_violation == doctest::Approx(0.5));
}

TEST_CASE("game without a potential refuses potential access") {
    GameSpec g({2}, {0.0, 1.0});
    CHECK_FALSE(g.has_potential());
    CHECK_THROWS_AS(g.potential(), PreconditionError);
}

TEST_CASE("size cap is enforced at construction") {
    GameLimits lim;
    lim.max_profiles = 8;
    CHECK_THROWS_AS(make_random_potential({2, 2, 2, 2}, 1, 1.0, lim), InputError);
}

TEST_CASE("Lipschitz constant of the ladder") {
    CHECK(lipschitz_delta(make_ladder2()) == doctest::Approx(1.0));
}

TEST_CASE("expression grammar") {
    CHECK(NExpr::parse("n^3")(2) == doctest::Approx(8));
    CHECK(NExpr::parse("2^3^2")(1) == doctest::Approx(512));  // right-associative
    CHECK(NExpr::parse("-n^2")(3) == doctest::Approx(-9));
    CHECK(NExpr::parse("exp(0.5*n)")(4) == doctest::Approx(std::exp(2.0)));
    CHECK(NExpr::parse("n^log(n)")(10) == doctest::Approx(std::pow(10.0, std::log(10.0))));
    CHECK(NExpr::parse("3*ln(n)")(5) == doctest::Approx(3 * std::log(5.0)));
    CHECK(NExpr::parse("sqrt(n)/e")(4) == doctest::Approx(2 / std::exp(1.0)));
    CHECK(NExpr::parse("50*n^2")(10) == doctest::Approx(5000));
    CHECK_THROWS_AS(NExpr::parse("n^"), InputError);
    CHECK_THROWS_AS(NExpr::parse("foo(n)"), InputError);
    CHECK_THROWS_AS(NExpr::parse("(n"), InputError);
    CHECK_THROWS_AS(NExpr::parse(""), InputError);
}
