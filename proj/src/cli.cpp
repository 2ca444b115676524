#include "metastab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "metastab/errors.hpp"
#include "metastab/io.hpp"
#include "metastab/sim.hpp"

namespace metastab {

namespace {

using Clock = std::chrono::steady_clock;

struct Report {
    Json meta;
    Json game;
    Json sections = Json::array();
    Json timings = Json::object();

    void add(const std::string& name, Json payload, Clock::time_point since) {
        sections.push_back({{"name", name}, {"payload", std::move(payload)}});
        timings[name] = std::chrono::duration<double>(Clock::now() - since).count();
    }
    std::string dump() const {
        Json m = meta;
        m["timings_seconds"] = timings;
        return Json{{"meta", m}, {"game", game}, {"sections", sections}}.dump(2) + "\n";
    }
};

Json game_header(const GameSpec& g) {
    Json j{{"fingerprint", game_fingerprint(g)},
           {"name", g.name()},
           {"n", g.players()},
           {"size", g.size()},
           {"strategy_counts", g.strategy_counts()},
           {"has_potential", g.has_potential()}};
    if (!g.params().empty()) j["params"] = g.params();
    return j;
}

Json meta_header(const std::string& command, Json flags) {
    return Json{{"tool", "metastab"}, {"version", kToolVersion}, {"command", command}, {"flags", std::move(flags)}};
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_atomic(path, content);
    }
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
    if (flag && flag->count() > 0) return value;
    if (const char* env = std::getenv("METASTAB_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw InputError(std::string("METASTAB_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    return 0;
}

double eval_beta(const std::string& text, const GameSpec& g) {
    const double b = NExpr::parse(text)(g.players());
    if (!std::isfinite(b) || b < 0.0) throw InputError("beta '" + text + "' must evaluate to a finite nonnegative number");
    return b;
}

std::string join_spec(const std::vector<std::string>& parts) {
    if (parts.empty()) throw InputError("missing game family");
    std::string s = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) s += (i == 1 && s.find(':') == std::string::npos ? ":" : ",") + parts[i];
    return s;
}

// ---- game -----------------------------------------------------------------

int cmd_game_list(std::ostream& out) {
    for (const auto& f : zoo_families()) out << f << '\n';
    return 0;
}

int cmd_game_describe(const std::vector<std::string>& spec, std::ostream& out) {
    const auto g = resolve_game(join_spec(spec));
    out << "name: " << g.name() << '\n';
    out << "players: " << g.players() << '\n';
    out << "strategy_counts:";
    for (int m : g.strategy_counts()) out << ' ' << m;
    out << '\n';
    out << "|S|=" << g.size() << '\n';
    out << "fingerprint: " << game_fingerprint(g) << '\n';
    for (const auto& [k, v] : g.params()) out << "param " << k << " = " << v << '\n';
    if (!g.has_potential()) {
        out << "potential: none\n";
        return 0;
    }
    const auto& phi = g.potential();
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    out << "Delta(n)=" << lipschitz_delta(g) << '\n';
    out << "potential_min=" << *lo << " at profile " << (lo - phi.begin()) << '\n';
    out << "potential_max=" << *hi << " at profile " << (hi - phi.begin()) << '\n';
    const auto check = verify_potential(g);
    out << "potential_check: " << (check.pass ? "pass" : "FAIL") << " (worst " << check.worst_violation << ")\n";
    return check.pass ? 0 : static_cast<int>(ExitCode::kPropertyViolation);
}

int cmd_game_export(const std::vector<std::string>& spec, const std::string& path, std::ostream& out, std::ostream& err) {
    const auto g = resolve_game(join_spec(spec));
    int code = 0;
    if (g.has_potential()) {
        const auto check = verify_potential(g);
        if (!check.pass) {
            err << "warning: potential check failed (worst " << check.worst_violation << ")\n";
            code = static_cast<int>(ExitCode::kPropertyViolation);
        }
    }
    emit(path, game_to_json(g).dump(2) + "\n", out);
    return code;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::string game, beta = "1", bottleneck, hitting, out;
    bool spectrum = false, mixing = false, no_bounds = false;
    double eps = 0.25;
};

std::vector<SubsetMask> bound_family(const GameSpec& g) {
    std::vector<SubsetMask> fam;
    if (g.size() <= 12) {
        connected_subsets(g.index(), SubsetMask::full(g.size()), g.size(), [&](const SubsetMask& L) {
            fam.push_back(L);
            return true;
        });
    } else {
        fam = heuristic_candidates(g, SubsetMask::full(g.size()));
    }
    return fam;
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto g = resolve_game(a.game);
    const double beta = eval_beta(a.beta, g);
    Report rep;
    rep.meta = meta_header("analyze", {{"game", a.game}, {"beta", beta}, {"eps", a.eps}, {"spectrum", a.spectrum},
                                       {"mixing", a.mixing}, {"bottleneck", a.bottleneck}, {"hitting", a.hitting},
                                       {"bounds", !a.no_bounds}});
    rep.game = game_header(g);

    auto t0 = Clock::now();
    const auto P = build_chain(g, beta);
    const Dist& pi = P.reference();
    {
        const auto st = stationarity_residual(P, pi);
        const auto rv = check_reversibility(P, pi);
        rep.add("chain",
                {{"size", P.size()},
                 {"nonzeros", P.nonzeros()},
                 {"beta", beta},
                 {"stationarity_residual", st.worst},
                 {"reversibility_residual", rv.worst},
                 {"pi_min", *std::min_element(pi.begin(), pi.end())},
                 {"pi_max", *std::max_element(pi.begin(), pi.end())}},
                t0);
    }
    if (a.spectrum) {
        t0 = Clock::now();
        Json s = to_json(spectrum(P));
        const auto td = trace_and_det_report(g, beta);
        s["trace"] = {{"value", td.trace}, {"formula", td.trace_formula}, {"at_beta_0_1_5", td.trace_at_betas}, {"ok", td.trace_ok}};
        s["determinant"] = {{"abs", td.det}, {"via_singular_value", td.det_via_singular_value}, {"ok", td.det_ok}};
        s["null_covector"] = {{"applicable", td.covector_applicable}, {"residual", td.covector_residual},
                              {"loop_residual", td.loop_residual}, {"ok", td.covector_ok && td.loop_ok}};
        rep.add("spectrum", std::move(s), t0);
    }
    if (a.mixing) {
        t0 = Clock::now();
        rep.add("mixing", to_json(mixing_time(P, a.eps)), t0);
    }
    if (!a.bottleneck.empty()) {
        t0 = Clock::now();
        const auto fam = parse_subset_family(a.bottleneck);
        rep.add("bottleneck", to_json(bottleneck_star(g, P, pi, SubsetMask::full(g.size()), fam)), t0);
    }
    if (!a.hitting.empty()) {
        t0 = Clock::now();
        const auto target = parse_set(g, a.hitting);
        rep.add("hitting", to_json(hitting_profile(P, target, a.eps)), t0);
    }
    int code = 0;
    if (!a.no_bounds) {
        t0 = Clock::now();
        if (g.size() > 256 || !g.has_potential()) {
            rep.add("bounds", {{"skipped", g.has_potential() ? "|S| above 256" : "no potential (bounds assume reversibility)"}}, t0);
        } else {
            BoundSuiteOptions opt;
            const auto r = verify_bound_suite(g, P, bound_family(g), opt);
            Json j = to_json(r);
            j["family"] = g.size() <= 12 ? "connected" : "heuristic";
            rep.add("bounds", std::move(j), t0);
            if (!r.pass()) code = static_cast<int>(ExitCode::kPropertyViolation);
        }
    }
    emit(a.out, rep.dump(), out);
    return code;
}

// ---- partition ------------------------------------------------------------

struct PartitionArgs {
    std::string game, beta = "1", p = "n^3", q = "exp(0.5*n)", family = "auto", verify, out;
    double eps = 0.1;
    std::size_t max_size = 0;
};

int cmd_partition(const PartitionArgs& a, std::ostream& out) {
    const auto g = resolve_game(a.game);
    const double beta = eval_beta(a.beta, g);
    PQConfig cfg;
    cfg.p = NExpr::parse(a.p);
    cfg.q = NExpr::parse(a.q);
    cfg.eps = a.eps;
    if (a.family == "auto") {
        cfg.family = g.size() <= 16 ? SubsetFamily::kExhaustive : SubsetFamily::kHeuristic;
    } else {
        cfg.family = parse_subset_family(a.family);
    }
    if (a.max_size > 0) cfg.caps.max_size = a.max_size;
    const int n = g.players();

    Report rep;
    rep.meta = meta_header("partition", {{"game", a.game}, {"beta", beta}, {"p", a.p}, {"q", a.q}, {"eps", a.eps},
                                         {"family", to_string(cfg.family)}, {"verify", a.verify},
                                         {"max_size", a.max_size}});
    rep.game = game_header(g);
    const auto P = build_chain(g, beta);
    auto pipeline = [&](const std::vector<BlockCertificate>& blocks) {
        Json arr = Json::array();
        for (const auto& b : blocks) arr.push_back(to_json(check_pipeline(P, b, cfg.eps, cfg.q(n))));
        return arr;
    };

    auto t0 = Clock::now();
    if (!a.verify.empty()) {
        std::ifstream in(a.verify);
        if (!in) throw InputError("cannot open candidate file '" + a.verify + "'");
        Json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(std::string("candidate file is not valid JSON: ") + e.what());
        }
        const auto cand = parse_candidate(g, j);
        const auto v = verify_partition(g, beta, cand, cfg.p(n), cfg.q(n), cfg.eps, cfg.limits);
        rep.add("verification", to_json(v), t0);
        t0 = Clock::now();
        rep.add("pipeline", pipeline(v.blocks), t0);
    } else {
        const auto r = run_A_pq(g, beta, cfg);
        rep.add("partition", to_json(r), t0);
        t0 = Clock::now();
        check_structure(g, candidate_of(r));
        rep.add("pipeline", pipeline(r.blocks), t0);
    }
    emit(a.out, rep.dump(), out);
    return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::string family, n_range, beta_rule = "1", subsets = "structural", csv, out;
    std::vector<std::string> params, pairs;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    SweepSpec spec;
    spec.base = parse_zoo_spec(a.family + (a.params.empty() ? "" : ":"));
    for (const auto& kv : a.params) {
        const auto more = parse_zoo_spec("x:" + kv);
        for (const auto& [k, v] : more.values) spec.base.values[k] = v;
        if (!more.strategy_counts.empty()) spec.base.strategy_counts = more.strategy_counts;
    }
    if (a.subsets != "structural") throw InputError("sweep supports --subsets structural only");
    const auto dots = a.n_range.find("..");
    if (dots == std::string::npos) throw InputError("--n-range must look like a..b");
    try {
        spec.n_lo = std::stoi(a.n_range.substr(0, dots));
        spec.n_hi = std::stoi(a.n_range.substr(dots + 2));
    } catch (const std::exception&) {
        throw InputError("--n-range must look like a..b");
    }
    if (spec.n_lo > spec.n_hi) throw InputError("empty n range '" + a.n_range + "'");
    spec.beta_rule = NExpr::parse(a.beta_rule);
    std::vector<std::string> pairs = a.pairs;
    if (pairs.empty()) pairs = {"n;n^log(n)", "n^2;n^log(log(n))"};
    for (const auto& pr : pairs) {
        const auto semi = pr.find(';');
        if (semi == std::string::npos) throw InputError("--pair must be 'p;q'");
        spec.pairs.push_back({NExpr::parse(pr.substr(0, semi)), NExpr::parse(pr.substr(semi + 1))});
    }
    auto t0 = Clock::now();
    const auto table = classification_sweep(spec);
    const std::string csv = sweep_csv(table);
    if (!a.out.empty()) {
        Report rep;
        rep.meta = meta_header("sweep", {{"family", a.family}, {"n_range", a.n_range}, {"beta_rule", a.beta_rule},
                                         {"subsets", a.subsets}, {"params", a.params}, {"pairs", pairs}});
        rep.game = {{"family", spec.base.family}};
        rep.add("sweep", to_json(table), t0);
        write_atomic(a.out, rep.dump());
    }
    emit(a.csv, csv, out);
    return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string game, beta = "1", start, out;
    std::uint64_t steps = 1000, seed = 0, trajectories = 1;
    unsigned threads = 1;
    std::vector<std::string> track;
};

int cmd_simulate(const SimulateArgs& a, const CLI::Option* seed_flag, std::ostream& out) {
    const auto g = resolve_game(a.game);
    const double beta = eval_beta(a.beta, g);
    const ProfileId start = a.start.empty() ? 0 : parse_profile(g, a.start);
    std::vector<TrackedSet> tracked;
    for (const auto& t : a.track) {
        const auto eq = t.find('=');
        if (eq != std::string::npos && eq > 0 && t.find(';') > eq && t.find(',') > eq) {
            tracked.push_back({t.substr(0, eq), parse_set(g, t.substr(eq + 1))});
        } else {
            tracked.push_back({t, parse_set(g, t)});
        }
    }
    SimOptions opt;
    opt.steps = a.steps;
    opt.seed = resolve_seed(seed_flag, a.seed);
    if (a.trajectories == 0) throw InputError("--trajectories must be positive");
    const auto trs = simulate_batch(g, beta, {start}, a.trajectories, opt, tracked, a.threads);
    std::ostringstream os;
    os << "trajectory,seed,stream,start,steps,final,set,first_hit,occupation\n";
    for (std::size_t k = 0; k < trs.size(); ++k) {
        const auto& tr = trs[k];
        auto prefix = [&] {
            os << k << ',' << tr.seed << ',' << tr.stream << ',' << tr.start << ',' << tr.steps << ',' << tr.final_state << ',';
        };
        if (tr.tracked.empty()) {
            prefix();
            os << ",,\n";
        }
        for (const auto& s : tr.tracked) {
            prefix();
            os << '"' << s.name << "\",";
            if (s.first_hit) os << *s.first_hit;
            os << ',' << s.occupation << '\n';
        }
    }
    emit(a.out, os.str(), out);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact analysis of logit dynamics on finite potential games", "metastab"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    auto* game = app.add_subcommand("game", "List, describe or export zoo games");
    game->require_subcommand(1);
    auto* glist = game->add_subcommand("list", "List zoo families");
    std::vector<std::string> dspec, espec;
    std::string epath;
    auto* gdesc = game->add_subcommand("describe", "Describe a zoo game, e.g. 'curie_weiss n=4'");
    gdesc->add_option("spec", dspec, "family and key=value parameters")->required();
    auto* gexp = game->add_subcommand("export", "Write a game-spec JSON file");
    gexp->add_option("spec", espec, "family and key=value parameters")->required();
    gexp->add_option("-o,--out", epath, "output path (default stdout)");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Chain, spectrum, mixing, bottleneck and hitting analysis");
    analyze->add_option("game", an.game, "game file or zoo spec (family:key=value,...)")->required();
    analyze->add_option("--beta", an.beta, "inverse noise; may use n, e.g. '3*log(n)'");
    analyze->add_flag("--spectrum", an.spectrum);
    analyze->add_flag("--mixing", an.mixing);
    analyze->add_option("--eps", an.eps, "epsilon for mixing and hitting times");
    analyze->add_option("--bottleneck", an.bottleneck, "subset family: exhaustive, connected, heuristic");
    analyze->add_option("--hitting", an.hitting, "target set");
    analyze->add_flag("--no-bounds", an.no_bounds, "skip the bound suite");
    analyze->add_option("-o,--out", an.out, "report path (default stdout)");

    PartitionArgs pa;
    auto* part = app.add_subcommand("partition", "Run the partition algorithm or verify a candidate partition");
    part->add_option("game", pa.game)->required();
    part->add_option("--beta", pa.beta);
    part->add_option("--p", pa.p, "polynomial p(n)");
    part->add_option("--q", pa.q, "super-polynomial q(n)");
    part->add_option("--eps", pa.eps);
    part->add_option("--family", pa.family, "auto, exhaustive, connected, heuristic");
    part->add_option("--max-size", pa.max_size, "largest candidate subset (connected/exhaustive)");
    part->add_option("--verify", pa.verify, "candidate partition JSON file");
    part->add_option("-o,--out", pa.out);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Bottleneck classification table across n");
    sweep->add_option("family", sw.family)->required();
    sweep->add_option("--n-range", sw.n_range, "a..b")->required();
    sweep->add_option("--beta-rule", sw.beta_rule, "beta as a function of n");
    sweep->add_option("--subsets", sw.subsets);
    sweep->add_option("--param", sw.params, "extra family parameter key=value");
    sweep->add_option("--pair", sw.pairs, "'p;q' classification pair (repeatable)");
    sweep->add_option("--csv", sw.csv, "CSV path (default stdout)");
    sweep->add_option("-o,--out", sw.out, "report path");

    SimulateArgs si;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo trajectories");
    sim->add_option("game", si.game)->required();
    sim->add_option("--beta", si.beta);
    sim->add_option("--start", si.start, "comma-separated strategies, player 0 first");
    sim->add_option("--steps", si.steps);
    auto* seed_flag = sim->add_option("--seed", si.seed, "overrides METASTAB_SEED");
    sim->add_option("--track", si.track, "set to track (name=SET or SET), repeatable");
    sim->add_option("--trajectories", si.trajectories);
    sim->add_option("--threads", si.threads);
    sim->add_option("-o,--out", si.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::kInput);
    }

    try {
        if (game->parsed()) {
            if (glist->parsed()) return cmd_game_list(out);
            if (gdesc->parsed()) return cmd_game_describe(dspec, out);
            return cmd_game_export(espec, epath, out, err);
        }
        if (analyze->parsed()) return cmd_analyze(an, out);
        if (part->parsed()) return cmd_partition(pa, out);
        if (sweep->parsed()) return cmd_sweep(sw, out);
        if (sim->parsed()) return cmd_simulate(si, seed_flag, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::kInternal);
    }
    return static_cast<int>(ExitCode::kInternal);
}

}  // namespace metastab
