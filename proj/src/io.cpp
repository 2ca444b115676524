#include "metastab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metastab/errors.hpp"

namespace metastab {

Json game_to_json(const GameSpec& g) {
    Json j;
    j["name"] = g.name();
    j["n"] = g.players();
    j["strategy_counts"] = g.strategy_counts();
    Json u = Json::array();
    for (int i = 0; i < g.players(); ++i) {
        Json row = Json::array();
        for (ProfileId x = 0; x < g.size(); ++x) row.push_back(g.utility(i, x));
        u.push_back(std::move(row));
    }
    j["utilities"] = std::move(u);
    if (g.has_potential()) j["potential"] = g.potential();
    if (!g.params().empty()) j["params"] = g.params();
    return j;
}

GameSpec game_from_json(const Json& j, const GameLimits& limits) {
    try {
        if (!j.is_object()) throw InputError("game spec must be a JSON object");
        for (const char* key : {"n", "strategy_counts", "utilities"}) {
            if (!j.contains(key)) throw InputError(std::string("game spec is missing '") + key + "'");
        }
        const int n = j.at("n").get<int>();
        auto counts = j.at("strategy_counts").get<std::vector<int>>();
        if (static_cast<int>(counts.size()) != n) throw InputError("strategy_counts length does not match n");
        std::vector<double> util;
        const auto& u = j.at("utilities");
        if (!u.is_array()) throw InputError("utilities must be an array");
        if (!u.empty() && u.front().is_array()) {
            if (static_cast<int>(u.size()) != n) throw InputError("utilities must have one row per player");
            for (const auto& row : u) {
                for (const auto& v : row) util.push_back(v.get<double>());
            }
        } else {
            util = u.get<std::vector<double>>();
        }
        std::optional<std::vector<double>> pot;
        if (j.contains("potential") && !j.at("potential").is_null()) pot = j.at("potential").get<std::vector<double>>();
        std::map<std::string, double> params;
        if (j.contains("params")) params = j.at("params").get<std::map<std::string, double>>();
        return GameSpec(std::move(counts), std::move(util), std::move(pot), j.value("name", std::string{}),
                        std::move(params), limits);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed game spec: ") + e.what());
    }
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(what + " is not valid JSON: " + e.what());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError("bad number '" + s + "' for " + what);
    }
    if (used != s.size()) throw InputError("bad number '" + s + "' for " + what);
    return v;
}

long parse_integer(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw InputError("bad integer '" + s + "' for " + what);
    }
    if (used != s.size()) throw InputError("bad integer '" + s + "' for " + what);
    return v;
}

}  // namespace

GameSpec load_game_file(const std::string& path, const GameLimits& limits) {
    return game_from_json(parse_json_text(read_file(path), "game file '" + path + "'"), limits);
}

std::string fingerprint(const Json& canonical) {
    const std::string s = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string game_fingerprint(const GameSpec& g) { return fingerprint(game_to_json(g)); }

ZooParams parse_zoo_spec(const std::string& spec) {
    ZooParams p;
    const auto colon = spec.find(':');
    p.family = trim(spec.substr(0, colon));
    if (p.family.empty()) throw InputError("empty game family");
    if (colon == std::string::npos) return p;
    for (const auto& item : split(spec.substr(colon + 1), ',')) {
        if (trim(item).empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("game parameter '" + item + "' must be key=value");
        const std::string key = trim(item.substr(0, eq)), val = trim(item.substr(eq + 1));
        if (key == "n") {
            p.n = static_cast<int>(parse_integer(val, "n"));
        } else if (key == "counts") {
            for (const auto& c : split(val, 'x')) p.strategy_counts.push_back(static_cast<int>(parse_integer(c, "counts")));
        } else {
            p.values[key] = parse_number(val, key);
        }
    }
    return p;
}

GameSpec resolve_game(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return load_game_file(arg);
    return make_zoo_game(parse_zoo_spec(arg));
}

ProfileId parse_profile(const GameSpec& g, const std::string& text) {
    std::vector<int> s;
    for (const auto& part : split(text, ',')) s.push_back(static_cast<int>(parse_integer(trim(part), "profile")));
    if (static_cast<int>(s.size()) != g.players()) {
        throw InputError("profile '" + text + "' has " + std::to_string(s.size()) + " entries, expected " +
                         std::to_string(g.players()));
    }
    return g.index().encode(s);
}

SubsetMask parse_set(const GameSpec& g, const std::string& text) {
    for (const auto& [name, set] : structural_subsets(g)) {
        if (name == text) return set;
    }
    SubsetMask out(g.size());
    if (text.rfind("idx:", 0) == 0) {
        for (const auto& part : split(text.substr(4), ',')) {
            const long v = parse_integer(trim(part), "profile index");
            if (v < 0 || static_cast<std::size_t>(v) >= g.size()) throw InputError("profile index out of range in '" + text + "'");
            out.insert(static_cast<ProfileId>(v));
        }
    } else {
        for (const auto& part : split(text, ';')) out.insert(parse_profile(g, trim(part)));
    }
    if (out.empty()) throw InputError("set '" + text + "' is empty");
    return out;
}

namespace {

SubsetMask members_of(const GameSpec& g, const Json& arr, const std::string& what) {
    if (!arr.is_array()) throw InputError(what + " must be an array of profiles");
    SubsetMask s(g.size());
    for (const auto& m : arr) {
        if (m.is_number_integer()) {
            const auto v = m.get<long long>();
            if (v < 0 || static_cast<std::size_t>(v) >= g.size()) throw InputError(what + ": profile index out of range");
            s.insert(static_cast<ProfileId>(v));
        } else if (m.is_array()) {
            s.insert(g.index().encode(m.get<std::vector<int>>()));
        } else {
            throw InputError(what + ": members must be indices or strategy arrays");
        }
    }
    return s;
}

}  // namespace

CandidatePartition parse_candidate(const GameSpec& g, const Json& j) {
    try {
        if (!j.is_object() || !j.contains("blocks")) throw InputError("candidate partition needs a 'blocks' array");
        CandidatePartition c;
        SubsetMask cores(g.size());
        std::size_t i = 0;
        for (const auto& b : j.at("blocks")) {
            ++i;
            const std::string tag = "block " + std::to_string(i);
            if (!b.contains("R") || !b.contains("T")) throw InputError(tag + " needs R and T");
            c.R.push_back(members_of(g, b.at("R"), tag + " R"));
            c.T.push_back(members_of(g, b.at("T"), tag + " T"));
            cores = cores | c.T.back();
        }
        if (!j.contains("residual") || (j.at("residual").is_string() && j.at("residual") == "rest")) {
            c.residual = cores.complement();
        } else {
            c.residual = members_of(g, j.at("residual"), "residual");
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed candidate partition: ") + e.what());
    }
}

Json subset_json(const SubsetMask& s) { return s.members(); }

Json to_json(const MixingResult& m) {
    Json j;
    j["reached"] = m.reached;
    j["value"] = m.value;
    j["eps"] = m.eps;
    Json ev = Json::array();
    for (auto [t, d] : m.evaluated) ev.push_back({t, d});
    j["evaluated"] = std::move(ev);
    return j;
}

Json to_json(const Spectrum& s) {
    return Json{{"eigenvalues", s.eigenvalues},
                {"lambda_star", s.lambda_star},
                {"t_rel", std::isfinite(s.t_rel) ? Json(s.t_rel) : Json("inf")},
                {"symmetrized", s.symmetrized},
                {"kind", to_string(s.kind)}};
}

Json to_json(const BottleneckStar& b) {
    Json j{{"found", b.found}, {"family", to_string(b.family)}, {"candidates", b.candidates}};
    if (b.found) {
        j["value"] = b.value;
        j["argmin"] = subset_json(b.argmin);
        j["pi_mass"] = b.pi_mass;
    }
    j["fell_back_to_singletons"] = b.fell_back_to_singletons;
    return j;
}

Json to_json(const HittingProfile& h) {
    Json j{{"target", subset_json(h.target)}, {"eps", h.eps}, {"grid", h.grid}, {"tails", h.tails}};
    if (!h.expected.empty()) j["expected"] = h.expected;
    if (!h.eps_time.empty()) {
        Json e = Json::array();
        for (const auto& t : h.eps_time) e.push_back(t ? Json(*t) : Json(nullptr));
        j["eps_time"] = std::move(e);
    }
    return j;
}

Json to_json(const BoundSuiteReport& r) {
    Json stats = Json::array();
    for (const auto& s : r.stats) {
        Json e{{"name", s.name}, {"checked", s.checked}, {"violations", s.violations}};
        e["worst_slack"] = std::isfinite(s.worst_slack) ? Json(s.worst_slack) : Json(nullptr);
        e["worst_where"] = s.worst_where;
        if (!s.first_violation.empty()) e["first_violation"] = s.first_violation;
        stats.push_back(std::move(e));
    }
    Json j{{"stats", std::move(stats)}, {"skipped", r.skipped}, {"subsets", r.subsets},
           {"violations", r.violations()}, {"t_rel", r.t_rel}};
    j["t_mix"] = r.t_mix ? Json(*r.t_mix) : Json(nullptr);
    return j;
}

Json to_json(const BlockCertificate& b) {
    return Json{{"R", subset_json(b.R)},
                {"T", subset_json(b.T)},
                {"pi_mass", b.pi_mass},
                {"bottleneck", b.bottleneck},
                {"tmix", to_json(b.tmix)},
                {"escape", b.escape},
                {"max_escape_core", b.max_escape_core},
                {"connected", b.connected},
                {"family", to_string(b.family)},
                {"candidates", b.candidates}};
}

Json to_json(const PartitionResult& r) {
    Json blocks = Json::array();
    for (const auto& b : r.blocks) blocks.push_back(to_json(b));
    Json te = Json::array();
    for (const auto& t : r.residual_t_eps) te.push_back(t ? Json(*t) : Json(nullptr));
    Json j{{"n", r.n},
           {"beta", r.beta},
           {"eps", r.eps},
           {"p", r.p_value},
           {"q", r.q_value},
           {"k", r.blocks.size()},
           {"blocks", std::move(blocks)},
           {"residual", subset_json(r.residual)},
           {"residual_t_eps", std::move(te)},
           {"stationary_regime", r.stationary_regime},
           {"warnings", r.warnings}};
    j["verdict"] = r.stationary_regime ? "stationary regime" : "partition";
    j["terminated_on"] = r.terminated_on ? to_json(*r.terminated_on) : Json(nullptr);
    return j;
}

Json to_json(const PartitionVerification& v) {
    Json blocks = Json::array();
    for (const auto& b : v.blocks) blocks.push_back(to_json(b));
    Json conds = Json::array();
    const char* names[4] = {"bottleneck", "restricted_mixing", "core_escape", "residual_absorption"};
    for (int i = 0; i < 4; ++i) {
        conds.push_back({{"condition", i + 1},
                         {"name", names[i]},
                         {"pass", v.cond[i].pass},
                         {"value", v.cond[i].value},
                         {"threshold", v.cond[i].threshold},
                         {"failing", v.cond[i].detail}});
    }
    return Json{{"n", v.n},          {"beta", v.beta},   {"eps", v.eps},
                {"p", v.p_value},    {"q", v.q_value},   {"blocks", std::move(blocks)},
                {"residual_hit", v.residual_hit},        {"conditions", std::move(conds)},
                {"pass", v.pass()}};
}

Json to_json(const PipelineCheck& c) {
    const auto& m = c.metastable;
    return Json{{"metastable",
                 {{"eps", m.eps},
                  {"horizon", m.horizon},
                  {"mode", to_string(m.mode)},
                  {"verdict", to_string(m.verdict)},
                  {"one_step_drift", m.one_step_drift}}},
                {"pseudo_mixing", {{"reached", c.pseudo_mix.reached}, {"value", c.pseudo_mix.value}, {"eps", c.pseudo_mix.eps}}},
                {"pseudo_within_tmix", c.pseudo_within_tmix},
                {"pass", c.pass()}};
}

Json to_json(const SweepTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"n", r.n},
                        {"beta", r.beta},
                        {"subset", r.subset},
                        {"size", r.size},
                        {"pi_mass", r.pi_mass},
                        {"bottleneck", r.bottleneck},
                        {"inv_p", r.inv_p},
                        {"inv_q", r.inv_q},
                        {"labels", r.labels}});
    }
    Json trends = Json::object();
    for (const auto& [k, v] : t.trends) trends[k] = v;
    return Json{{"pairs", t.pair_names}, {"rows", std::move(rows)}, {"trends", std::move(trends)}};
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string sweep_csv(const SweepTable& t) {
    std::ostringstream os;
    os << "n,beta,subset,size,pi_mass,bottleneck";
    for (std::size_t k = 0; k < t.pair_names.size(); ++k) os << ",inv_p_" << k << ",inv_q_" << k << ",label_" << k;
    os << '\n';
    for (const auto& r : t.rows) {
        os << r.n << ',' << g17(r.beta) << ',' << r.subset << ',' << r.size << ',' << g17(r.pi_mass) << ','
           << g17(r.bottleneck);
        for (std::size_t k = 0; k < r.labels.size(); ++k) {
            os << ',' << g17(r.inv_p[k]) << ',' << g17(r.inv_q[k]) << ',' << r.labels[k];
        }
        os << '\n';
    }
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + path + "'");
        out << content;
        if (!out) throw InputError("write to '" + path + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move output into place at '" + path + "': " + ec.message());
}

}  // namespace metastab
