#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "metastab/errors.hpp"
#include "metastab/io.hpp"
#include "metastab/zoo.hpp"

using namespace metastab;

TEST_CASE("game JSON round trip preserves the fingerprint") {
    for (const auto& g : {make_ladder2(), make_curie_weiss(4), make_random_potential({3, 2}, 6)}) {
        const auto j = game_to_json(g);
        const auto back = game_from_json(j);
        CHECK(game_fingerprint(back) == game_fingerprint(g));
        CHECK(back.utility_table() == g.utility_table());
        CHECK(back.potential() == g.potential());
        CHECK(game_fingerprint(g).size() == 16);
    }
    CHECK(game_fingerprint(make_curie_weiss(4)) != game_fingerprint(make_curie_weiss(5)));
}

TEST_CASE("flat utility layout is accepted") {
    Json j{{"n", 1}, {"strategy_counts", {2}}, {"utilities", {0.0, 1.0}}};
    const auto g = game_from_json(j);
    CHECK(g.utility(0, 1) == 1.0);
    CHECK_FALSE(g.has_potential());
}

TEST_CASE("malformed game JSON is an input error") {
    CHECK_THROWS_AS(game_from_json(Json{{"strategy_counts", {2, 2}}}), InputError);
    CHECK_THROWS_AS(game_from_json(Json{{"strategy_counts", {2}}, {"utilities", {0.0}}}), InputError);
    CHECK_THROWS_AS(game_from_json(Json::array()), InputError);
}

TEST_CASE("zoo specs") {
    const auto p = parse_zoo_spec("random_potential:counts=2x3x2,seed=4");
    CHECK(p.family == "random_potential");
    CHECK(p.strategy_counts == std::vector<int>{2, 3, 2});
    CHECK(p.values.at("seed") == 4.0);
    CHECK(parse_zoo_spec("curie_weiss:n=6").n == 6);
    CHECK_THROWS_AS(parse_zoo_spec("curie_weiss:n"), InputError);
    CHECK_THROWS_AS(parse_zoo_spec("curie_weiss:n=x"), InputError);
    CHECK_THROWS_AS(resolve_game("unknown_family:n=3"), InputError);
    CHECK(resolve_game("ladder2").size() == 4);
}

TEST_CASE("profiles and sets") {
    const auto g = make_random_potential({2, 3, 2}, 1);
    CHECK(parse_profile(g, "1,2,0") == 5);
    CHECK_THROWS_AS(parse_profile(g, "1,3,0"), InputError);
    CHECK_THROWS_AS(parse_profile(g, "1,2"), InputError);
    CHECK(parse_set(g, "idx:3,5").members() == std::vector<ProfileId>{3, 5});
    CHECK(parse_set(g, "1,2,0;0,0,0").members() == std::vector<ProfileId>{0, 5});
    CHECK_THROWS_AS(parse_set(g, "idx:99"), InputError);
    const auto pc = make_pure_coordination(3);
    CHECK(parse_set(pc, "consensus_s1").members() == std::vector<ProfileId>{7});
    CHECK(parse_set(pc, "M>0").count() == 4);
}

TEST_CASE("candidate partitions") {
    const auto g = make_pure_coordination(3);
    Json j = Json::parse(R"({"blocks": [{"R": [0], "T": [[0,0,0]]}, {"R": [7], "T": [7]}], "residual": "rest"})");
    const auto c = parse_candidate(g, j);
    CHECK(c.R.size() == 2);
    CHECK(c.T[0].members() == std::vector<ProfileId>{0});
    CHECK(c.residual.count() == 6);
    CHECK_THROWS_AS(parse_candidate(g, Json::parse(R"({"blocks": [{"R": [0]}]})")), InputError);
    CHECK_THROWS_AS(parse_candidate(g, Json::parse(R"({"nope": 1})")), InputError);
}

TEST_CASE("sweep CSV layout") {
    SweepTable t;
    t.pair_names = {"n;n^2"};
    SweepRow r;
    r.n = 4;
    r.beta = 1.0;
    r.subset = "M>0";
    r.size = 5;
    r.pi_mass = 0.25;
    r.bottleneck = 0.1;
    r.inv_p = {0.25};
    r.inv_q = {1.0 / 16};
    r.labels = {"poly"};
    t.rows.push_back(r);
    const auto csv = sweep_csv(t);
    CHECK(csv.rfind("n,beta,subset,size,pi_mass,bottleneck,inv_p_0,inv_q_0,label_0\n", 0) == 0);
    CHECK(csv.find("4,1,M>0,5,0.25,0.10000000000000001,0.25,0.0625,poly") != std::string::npos);
}

TEST_CASE("atomic writes replace the file") {
    const auto dir = std::filesystem::temp_directory_path() / "metastab_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    write_atomic(path, "first");
    write_atomic(path, "second");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    CHECK(s == "second");
    std::filesystem::remove_all(dir);
}
