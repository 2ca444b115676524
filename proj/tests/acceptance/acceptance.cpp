// Runs the twelve acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/convergence.hpp"
#include "metastab/errors.hpp"
#include "metastab/metastability.hpp"
#include "metastab/partition.hpp"
#include "metastab/rng.hpp"
#include "metastab/sim.hpp"
#include "metastab/spectral.hpp"
#include "metastab/subsets.hpp"
#include "metastab/zoo.hpp"

using namespace metastab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

const double kBetas[] = {0.0, 0.5, 2.0, 10.0};

// 100 random potential games, n ≤ 4, m_i ∈ {2, 3}
std::vector<GameSpec> corpus(std::size_t count, int max_n, std::size_t max_size, std::uint64_t salt) {
    std::vector<GameSpec> out;
    for (std::uint64_t k = 0; out.size() < count; ++k) {
        CounterRng rng(salt, k);
        const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
        std::vector<int> counts;
        std::size_t size = 1;
        for (int i = 0; i < n; ++i) {
            counts.push_back(2 + static_cast<int>(rng.below(2)));
            size *= static_cast<std::size_t>(counts.back());
        }
        if (size > max_size) continue;
        out.push_back(make_random_potential(counts, salt * 1000003ULL + k));
    }
    return out;
}

std::vector<SubsetMask> all_connected(const GameSpec& g) {
    std::vector<SubsetMask> fam;
    connected_subsets(g.index(), SubsetMask::full(g.size()), g.size(), [&](const SubsetMask& L) {
        fam.push_back(L);
        return true;
    });
    return fam;
}

// Grows a connected set from a random seed profile by random neighbour additions.
SubsetMask random_connected(const GameSpec& g, CounterRng& rng) {
    const auto& idx = g.index();
    SubsetMask L(g.size());
    L.insert(static_cast<ProfileId>(rng.below(g.size())));
    const std::size_t target = 1 + static_cast<std::size_t>(rng.below(g.size()));
    while (L.count() < target) {
        std::vector<ProfileId> frontier;
        L.for_each([&](ProfileId x) {
            idx.for_each_neighbor(x, [&](int, ProfileId y) {
                if (!L.contains(y)) frontier.push_back(y);
            });
        });
        if (frontier.empty()) break;
        L.insert(frontier[rng.below(frontier.size())]);
    }
    return L;
}

std::vector<SubsetMask> sampled_connected(const GameSpec& g, std::size_t k, std::uint64_t seed) {
    CounterRng rng(seed, 0x5e7);
    std::vector<SubsetMask> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(random_connected(g, rng));
    return out;
}

double min_eigenvalue(const ChainMatrix& P) { return spectrum(P).eigenvalues.back(); }

// ---------------------------------------------------------------------------

void c1_potentials(Outcome& o) {
    std::vector<GameSpec> games;
    for (int n = 2; n <= 12; ++n) {
        games.push_back(make_pure_coordination(n));
        games.push_back(make_curie_weiss(n));
        games.push_back(make_pigou(n));
        if (n >= 3) games.push_back(make_ring_coordination(n, 1.0, 1.0, 0.0, 0.0));
        if (n >= 4) games.push_back(make_counterexample(n, 5.0, 0.1));
    }
    games.push_back(make_ladder2());
    games.push_back(make_random_potential({3, 3, 3, 3, 3, 3, 3}, 7));
    games.push_back(make_random_potential({4, 4, 4, 4, 4, 4}, 8));
    double worst = 0.0;
    for (const auto& g : games) {
        const auto c = verify_potential(g, 1e-9);
        worst = std::max(worst, c.worst_violation);
        o.require(c.pass, g.name() + " fails verify_potential");
    }
    o.detail << games.size() << " games, worst violation " << worst;
}

void c2_gibbs(Outcome& o) {
    const auto games = corpus(100, 4, 81, 2);
    double st = 0.0, db = 0.0;
    for (const auto& g : games) {
        for (double beta : kBetas) {
            const auto P = build_chain(g, beta);
            const auto s = stationarity_residual(P, P.reference(), 1e-12);
            const auto r = check_reversibility(P, P.reference(), 1e-12);
            st = std::max(st, s.worst);
            db = std::max(db, r.worst);
            o.require(s.pass && r.pass, "residual above 1e-12 on " + g.name());
        }
    }
    o.detail << "400 chains, max stationarity residual " << st << ", max detailed-balance residual " << db;
}

void c3_spectral(Outcome& o) {
    const auto games = corpus(100, 4, 81, 2);
    double worst = INFINITY;
    std::size_t restrictions = 0;
    for (std::size_t k = 0; k < games.size(); ++k) {
        const auto& g = games[k];
        for (double beta : kBetas) {
            const auto P = build_chain(g, beta);
            worst = std::min(worst, min_eigenvalue(P));
            for (const auto& L : sampled_connected(g, 20, k * 17 + static_cast<std::uint64_t>(beta * 10))) {
                worst = std::min(worst, min_eigenvalue(restrict_loop(P, L)));
                worst = std::min(worst, min_eigenvalue(restrict_kill(P, L)));
                restrictions += 2;
            }
        }
    }
    o.require(worst >= -1e-9, "negative eigenvalue");
    o.detail << restrictions << " restrictions, smallest eigenvalue " << worst;
}

void c4_trace_det(Outcome& o) {
    const auto games = corpus(100, 4, 81, 2);
    double tr = 0.0, det = 0.0, cov = 0.0, loop = 0.0;
    for (std::size_t k = 0; k < games.size(); ++k) {
        const auto& g = games[k];
        for (double beta : kBetas) {
            for (ProfileId anchor : {ProfileId{0}, static_cast<ProfileId>(k % g.size())}) {
                const auto r = trace_and_det_report(g, beta, anchor);
                tr = std::max(tr, std::abs(r.trace - r.trace_formula));
                det = std::max(det, r.det);
                cov = std::max(cov, r.covector_residual);
                loop = std::max(loop, r.loop_residual);
                o.require(r.pass(), "trace/determinant identities fail on " + g.name());
            }
        }
    }
    o.detail << "trace err " << tr << ", |det| " << det << ", covector " << cov << ", loop " << loop;
}

void c5_sandwiches(Outcome& o) {
    const auto games = corpus(100, 4, 81, 2);
    std::size_t checks = 0, exhaustive = 0;
    for (const auto& g : games) {
        for (double beta : kBetas) {
            const auto P = build_chain(g, beta);
            std::vector<SubsetMask> fam;
            if (g.size() <= 12) {
                ++exhaustive;
                for_each_candidate(g, SubsetMask::full(g.size()), SubsetFamily::kExhaustive, {}, [&](const SubsetMask& L) {
                    fam.push_back(L);
                    return true;
                });
            }
            BoundSuiteOptions opt;
            opt.killed = false;
            opt.cheeger_max = 12;
            const auto r = verify_bound_suite(g, P, fam, opt);
            for (const auto& s : r.stats) {
                checks += s.checked;
                o.require(s.violations == 0, s.name + " violated: " + s.first_violation);
            }
            o.require(r.t_mix.has_value(), "t_mix not computed on " + g.name());
        }
    }
    o.detail << checks << " inequality checks, " << exhaustive << " chains with every subset";
}

void c6_hitting(Outcome& o) {
    const auto games = corpus(100, 3, 12, 6);
    std::map<std::string, std::pair<std::size_t, double>> agg;
    std::size_t subsets = 0;
    for (const auto& g : games) {
        const auto fam = all_connected(g);
        for (double beta : kBetas) {
            const auto P = build_chain(g, beta);
            BoundSuiteOptions opt;
            opt.mixing = false;
            opt.cheeger = false;
            const auto r = verify_bound_suite(g, P, fam, opt);
            subsets += r.subsets;
            for (const auto& s : r.stats) {
                auto& a = agg.try_emplace(s.name, 0, INFINITY).first->second;
                a.first += s.violations;
                a.second = std::min(a.second, s.worst_slack);
                o.require(s.violations == 0, s.name + " violated: " + s.first_violation);
            }
        }
    }
    // The *_dirichlet variants drop the π(A) ≤ 1/2 cap from B^L_*; they agree with the literal
    // statistics whenever π(L) ≤ 1/2, so literal violations with clean variants come from π(L) > 1/2.
    o.detail << subsets << " (game, beta, L) cases;";
    for (const auto& [name, a] : agg) o.detail << ' ' << name << " viol=" << a.first << " slack=" << a.second;
}

void c7_metastability(Outcome& o) {
    const auto games = corpus(100, 4, 81, 2);
    double worst32 = -INFINITY, worst33 = -INFINITY, worst35 = 0.0;
    std::size_t windows = 0, unreached = 0, mixes = 0;
    for (std::size_t k = 0; k < games.size(); ++k) {
        const auto& g = games[k];
        const auto fam = g.size() <= 12 ? all_connected(g) : sampled_connected(g, 20, 7000 + k);
        for (double beta : kBetas) {
            const auto P = build_chain(g, beta);
            const Dist& pi = P.reference();
            for (const auto& L : fam) {
                const auto mu = stationary_restricted(pi, L);
                const double drift = tv_distance(P.step(mu), mu);
                const double B = bottleneck(P, pi, L);
                worst32 = std::max(worst32, drift - B);
                o.require(drift <= B + 1e-12, "one-step drift above B(L)");
            }
            CounterRng rng(k, static_cast<std::uint64_t>(beta * 100));
            for (int s = 0; s < 3; ++s) {
                const auto L = random_connected(g, rng);
                const auto mu = stationary_restricted(pi, L);
                const double delta = tv_distance(P.step(mu), mu);
                for (std::uint64_t T : {10u, 100u, 1000u}) {
                    const double d = max_drift(P, mu, T);
                    worst33 = std::max(worst33, d - delta * static_cast<double>(T));
                    o.require(d <= delta * static_cast<double>(T) + 1e-10, "T-step drift above T times one-step drift");
                }
                // 2ε window: μ is (ε, T)-metastable with ε its observed drift over T
                const std::uint64_t T = 50;
                const double eps = std::max(max_drift(P, mu, T), 0.05);
                // from all of L, and from the heaviest state of L alone
                ProfileId deep = L.members().front();
                L.for_each([&](ProfileId x) {
                    if (pi[x] > pi[deep]) deep = x;
                });
                for (const auto& starts : {L, SubsetMask::of(g.size(), {deep})}) {
                    const auto w = metastable_window_check(P, mu, starts, eps, T, 20000);
                    if (w.start.reached) {
                        ++windows;
                        worst35 = std::max(worst35, w.max_tv / eps);
                        o.require(w.within_2eps, "2eps window violated");
                    } else {
                        ++unreached;
                    }
                }
                // mixtures
                const SubsetMask Lc = L.complement();
                if (!Lc.empty()) {
                    const auto nu = stationary_restricted(pi, Lc);
                    const auto mix = convex_combination({{0.5, mu}, {0.5, nu}});
                    const double dm = max_drift(P, mix, T);
                    const double parts = std::max(max_drift(P, mu, T), max_drift(P, nu, T));
                    o.require(dm <= parts + 1e-12, "convex combination lemma fails");
                }
            }
            for (double eps : {0.25, 0.1}) {
                const auto m = mixing_time(P, eps);
                const auto pm = pseudo_mixing_time(P, pi, SubsetMask::full(g.size()), eps, m.value + 1);
                ++mixes;
                o.require(m.reached && pm.reached && pm.value == m.value, "pseudo-mixing differs from t_mix on " + g.name());
            }
        }
    }
    o.detail << "max(drift - B) " << worst32 << ", max(drift_T - delta*T) " << worst33 << ", windows " << windows
             << " (max tv/eps " << worst35 << ", " << unreached << " unreached), " << mixes << " t_mix matches";
}

void c8_counterexample(Outcome& o) {
    const double eps = 0.1, beta = 5.0;
    const auto sched = counterexample_schedule(eps);
    double worst = 0.0;
    for (int n = 4; n <= 12; ++n) {
        const auto g = make_counterexample(n, beta, eps);
        const auto P = build_chain(g, beta);
        const ProfileId ones = g.size() - 1;
        const double B = bottleneck(P, P.reference(), SubsetMask::of(g.size(), {ones}));
        const double expect = eps / sched.horizon(n);
        const double rel = std::abs(B - expect) / expect;
        worst = std::max(worst, rel);
        o.require(rel <= 1e-10, "B(1..1) != eps/T(n) at n=" + std::to_string(n));
    }
    SweepSpec spec;
    spec.base.family = "counterexample";
    spec.base.values = {{"eps", eps}};
    spec.beta_rule = NExpr::parse("5");
    spec.n_lo = 4;
    spec.n_hi = 12;
    spec.pairs = {{NExpr::parse("n"), NExpr::parse("n^log(n)")}, {NExpr::parse("n^2"), NExpr::parse("n^log(log(n))")}};
    const auto table = classification_sweep(spec);
    std::vector<int> unclassified;
    std::string labels;
    for (const auto& r : table.rows) {
        if (r.subset != "consensus_s1") continue;
        labels += std::to_string(r.n) + ":" + r.labels[0] + " ";
        if (r.labels[0] == "unclassified") unclassified.push_back(r.n);
        const double rel = std::abs(r.bottleneck - eps / sched.horizon(r.n)) / (eps / sched.horizon(r.n));
        o.require(rel <= 1e-10, "sweep B column mismatch");
    }
    o.require(!unclassified.empty(), "no unclassified row for the (n, n^log n) pair");
    o.detail << "max rel err " << worst << "; schedule n_1=" << sched.breakpoints.at(0)
             << (sched.breakpoints.size() > 1 ? ", n_2=" + std::to_string(sched.breakpoints[1]) : "")
             << "; (n, n^log n) labels " << labels;
}

void c9_curie_weiss(Outcome& o) {
    const int n = 10;
    const double beta = 0.4, eps = 0.1;
    const auto g = make_curie_weiss(n);
    const double zeta = solve_cw_zeta(beta, n);
    const auto& idx = g.index();
    CandidatePartition c;
    SubsetMask plus(g.size()), minus(g.size()), t1(g.size()), t2(g.size());
    for (ProfileId x = 0; x < g.size(); ++x) {
        const int M = magnetization(idx, x);
        if (M > 0) plus.insert(x);
        if (M < 0) minus.insert(x);
        if (M >= zeta * n) t1.insert(x);
        if (M <= -zeta * n) t2.insert(x);
    }
    c.R = {plus, minus};
    c.T = {t1, t2};
    c.residual = (t1 | t2).complement();
    const double p = 50.0 * n * n, q = std::exp(0.3 * n);
    const auto v = verify_partition(g, beta, c, p, q, eps);
    for (int i = 0; i < 4; ++i) o.require(v.cond[i].pass, "condition " + std::to_string(i + 1));
    const auto P = build_chain(g, beta);
    std::string pm;
    for (const auto& b : v.blocks) {
        const auto chk = check_pipeline(P, b, eps, q);
        o.require(chk.metastable.verdict == Verdict::kPass && chk.metastable.mode == MetaMode::kOneStepBound,
                  "pi_R not bound-certified metastable");
        o.require(chk.pseudo_within_tmix, "pseudo-mixing from core exceeds t_mix^R");
        const auto at_eps = pseudo_mixing_time(P, conditional(P.reference(), b.R), b.T, eps, 1000000);
        pm += " core " + std::to_string(b.T.count()) + ": pm(2eps)=" + std::to_string(chk.pseudo_mix.value) +
              " pm(eps)=" + (at_eps.reached ? std::to_string(at_eps.value) : std::string(">1e6")) +
              " tmix=" + std::to_string(b.tmix.value);
    }
    o.detail << "zeta=" << zeta << " B=" << v.cond[0].value << " (1/q=" << 1.0 / q << ") tmix^R=" << v.cond[1].value
             << " escape=" << v.cond[2].value << " absorb=" << v.cond[3].value << ";" << pm;
}

void c10_coordination(Outcome& o) {
    const double eps = 0.1;
    for (int n = 6; n <= 8; ++n) {
        const auto p = std::pow(n, 3.0), q = std::exp(0.5 * n);
        // pure coordination: R1 = {p}, R2 = {m}, R3 = rest with the filtered core
        for (double c : {3.0, 4.0}) {
            const auto g = make_pure_coordination(n);
            const double beta = c * std::log(n);
            const auto P = build_chain(g, beta);
            const ProfileId pp = 0, mm = g.size() - 1;
            const auto Rp = SubsetMask::of(g.size(), {pp}), Rm = SubsetMask::of(g.size(), {mm});
            const SubsetMask rest = (Rp | Rm).complement();
            const auto tm = mixing_time(restrict_loop(P, rest), eps);
            const auto hit = hit_within(P, rest.complement(), tm.value);
            SubsetMask T3(g.size());
            rest.for_each([&](ProfileId y) {
                if (hit[y] <= eps) T3.insert(y);
            });
            CandidatePartition cand{{Rp, Rm, rest}, {Rp, Rm, T3}, rest - T3};
            const auto v = verify_partition(g, beta, cand, p, q, eps);
            for (int i = 0; i < 4; ++i) {
                o.require(v.cond[i].pass, "pure coordination n=" + std::to_string(n) + " condition " + std::to_string(i + 1));
            }
            o.detail << "pc n=" << n << " c=" << c << " |T3|=" << T3.count() << " absorb=" << v.cond[3].value << "; ";
            if (c == 3.0) {
                PQConfig cfg;
                cfg.p = NExpr::parse("n^3");
                cfg.q = NExpr::parse("exp(0.5*n)");
                cfg.eps = eps;
                cfg.family = SubsetFamily::kHeuristic;
                const auto r = run_A_pq(g, beta, cfg);
                check_structure(g, candidate_of(r));
                o.detail << "A_pq(heuristic) k=" << r.blocks.size() << " |N|=" << r.residual.count() << "; ";
            }
        }
        // ring: cores {p}, {m}, residual rest
        const auto g = make_ring_coordination(n, 1.0, 1.0, 0.0, 0.0);
        const double beta = 4.0 * std::log(n);
        const auto Rp = SubsetMask::of(g.size(), {ProfileId{0}}), Rm = SubsetMask::of(g.size(), {g.size() - 1});
        CandidatePartition cand{{Rp, Rm}, {Rp, Rm}, (Rp | Rm).complement()};
        const auto v = verify_partition(g, beta, cand, p, q, eps);
        for (int i = 0; i < 4; ++i) {
            o.require(v.cond[i].pass, "ring n=" + std::to_string(n) + " condition " + std::to_string(i + 1));
        }
        o.detail << "ring n=" << n << " absorb=" << v.cond[3].value << "; ";
    }
}

void c11_simulator(Outcome& o) {
    std::size_t checks = 0;
    double worst_z = 0.0;
    auto z = [&](double freq, double prob, double N) {
        const double se = std::sqrt(std::max(prob * (1.0 - prob), 1e-300) / N);
        const double zz = std::abs(freq - prob) / se;
        ++checks;
        worst_z = std::max(worst_z, prob > 0.0 ? zz : 0.0);
        return prob == 0.0 ? freq == 0.0 : zz <= 3.0;
    };
    // one-step rows
    std::vector<std::pair<GameSpec, double>> cases;
    cases.emplace_back(make_ladder2(), std::log(2.0));
    cases.emplace_back(make_curie_weiss(4), 0.5);
    cases.emplace_back(make_random_potential({3, 2, 3}, 11), 2.0);
    cases.emplace_back(make_pure_coordination(6), 1.0);
    for (const auto& [g, beta] : cases) {
        const auto P = build_chain(g, beta);
        for (ProfileId x : {ProfileId{0}, g.size() / 2, g.size() - 1}) {
            const std::uint64_t N = 1000000;
            const auto counts = sample_transitions(g, beta, x, N, 1000 + x, 4);
            for (ProfileId y = 0; y < g.size(); ++y) {
                o.require(z(static_cast<double>(counts[y]) / N, P.entry(x, y), N), "one-step frequency off");
            }
        }
    }
    // ladder2 occupation, batch means over 100 windows
    {
        const auto g = make_ladder2();
        const double beta = std::log(2.0);
        std::vector<TrackedSet> tracked;
        for (ProfileId x = 0; x < 4; ++x) tracked.push_back({std::to_string(x), SubsetMask::of(4, {x})});
        SimOptions opt;
        opt.steps = 1000000;
        opt.seed = 42;
        opt.window = 10000;
        const auto tr = simulate(g, beta, 0, opt, tracked);
        const double expect[4] = {4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9};
        for (int x = 0; x < 4; ++x) {
            std::vector<double> w;
            for (auto c : tr.tracked[static_cast<std::size_t>(x)].windows) w.push_back(static_cast<double>(c) / opt.window);
            const auto bm = batch_means(w);
            ++checks;
            const double zz = std::abs(bm.mean - expect[x]) / bm.se;
            worst_z = std::max(worst_z, zz);
            o.require(zz <= 3.0, "occupation off");
        }
    }
    // hitting CDF vs exact tails
    {
        const auto g = make_pure_coordination(4);
        const double beta = 1.0;
        const auto P = build_chain(g, beta);
        const SubsetMask target = SubsetMask::of(g.size(), {ProfileId{0}, g.size() - 1});
        const ProfileId start = g.index().encode(std::vector<int>{0, 1, 0, 1});
        HittingOptions ho;
        ho.grid = doubling_grid(64, false);
        ho.expected = false;
        ho.eps_times = false;
        const auto h = hitting_profile(P, target, 0.25, ho);
        SimOptions opt;
        opt.steps = 64;
        opt.seed = 7;
        opt.stop_when_all_hit = true;
        const std::size_t N = 100000;
        const auto trs = simulate_batch(g, beta, {start}, N, opt, {{"consensus", target}}, 8);
        for (std::size_t gi = 0; gi < h.grid.size(); ++gi) {
            std::size_t survive = 0;
            for (const auto& tr : trs) {
                const auto& fh = tr.tracked[0].first_hit;
                if (!fh || *fh > h.grid[gi]) ++survive;
            }
            o.require(z(static_cast<double>(survive) / N, h.tails[gi][start], N), "hitting tail off");
        }
        // thread-count invariance
        SimOptions o2;
        o2.steps = 500;
        o2.seed = 99;
        o2.record_path = true;
        const auto a = simulate_batch(g, beta, {start}, 64, o2, {}, 1);
        for (unsigned th : {4u, 8u}) {
            const auto b = simulate_batch(g, beta, {start}, 64, o2, {}, th);
            bool same = true;
            for (std::size_t k = 0; k < a.size(); ++k) same = same && a[k].path == b[k].path;
            o.require(same, "trajectories depend on thread count");
        }
    }
    o.detail << checks << " comparisons, worst |z| " << worst_z << ", reproducible across 1/4/8 workers";
}

void c12_nu(Outcome& o) {
    const double beta = 8.0, eps = 0.1;
    double worst_w = 0.0, worst_tv = 0.0;
    std::size_t starts = 0;
    for (int n = 2; n <= 4; ++n) {
        const auto g = make_pure_coordination(n);
        const auto P = build_chain(g, beta);
        const ProfileId pp = 0, mm = g.size() - 1;
        const std::vector<SubsetMask> cores = {SubsetMask::of(g.size(), {pp}), SubsetMask::of(g.size(), {mm})};
        const SubsetMask residual = (cores[0] | cores[1]).complement();
        std::vector<Dist> mus;
        std::uint64_t tmu = 0;
        for (const auto& T : cores) {
            mus.push_back(conditional(P.reference(), T));
            const auto pm = pseudo_mixing_time(P, mus.back(), T, eps);
            o.require(pm.reached, "pseudo-mixing from a core not reached");
            tmu = std::max(tmu, pm.value);
        }
        residual.for_each([&](ProfileId x) {
            const auto nu = nu_distribution(P, x, cores, mus, residual, eps);
            double s = 0.0;
            for (double v : nu.nu) {
                s += v;
                o.require(v >= 0.0, "negative nu entry");
            }
            o.require(std::abs(s - 1.0) <= 1e-12, "nu does not sum to 1");
            int plus = 0;
            for (int i = 0; i < n; ++i) plus += g.index().strategy(x, i) == 0;
            if (n % 2 == 0 && 2 * plus == n) {
                const double dev = std::max(std::abs(nu.weights[0] - 0.5), std::abs(nu.weights[1] - 0.5));
                worst_w = std::max(worst_w, dev);
                o.require(dev <= 1e-12, "symmetric start weights differ from 1/2");
            }
            const std::uint64_t tstar = nu.t_eps + tmu;
            const double tv = tv_trace(P, x, nu.nu, {tstar}).front();
            worst_tv = std::max(worst_tv, tv);
            o.require(tv <= 3.0 * eps, "TV at t* above 3 eps");
            ++starts;
        });
    }
    o.detail << starts << " residual starts, max |w - 1/2| " << worst_w << ", max TV at t* " << worst_tv;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> all = {
        {1, "exact-potential certification", 10, c1_potentials},
        {2, "Gibbs stationarity and reversibility", 30, c2_gibbs},
        {3, "spectral nonnegativity of P and restrictions", 120, c3_spectral},
        {4, "trace, determinant, null covector, loop identity", 60, c4_trace_det},
        {5, "mixing and bottleneck sandwiches", 300, c5_sandwiches},
        {6, "hitting-bound suite", 300, c6_hitting},
        {7, "metastability identities", 180, c7_metastability},
        {8, "counterexample bottleneck and sweep", 60, c8_counterexample},
        {9, "Curie-Weiss partition pipeline", 600, c9_curie_weiss},
        {10, "pure coordination and ring partitions", 600, c10_coordination},
        {11, "simulator consistency", 300, c11_simulator},
        {12, "nu_x construction", 120, c12_nu},
    };
    int failures = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs <= c.limit_seconds, "runtime above limit");
        if (!o.pass) ++failures;
        std::printf("%s criterion %2d: %s [%.2fs] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
    return failures == 0 ? 0 : 1;
}
