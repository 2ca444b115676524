#include "metastab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "metastab/errors.hpp"

namespace metastab {

std::vector<std::string> validate_pq(const PQConfig& cfg, int n_lo, int n_hi) {
    std::vector<std::string> w;
    if (n_lo > n_hi) throw InputError("validate_pq: empty n range");
    double prev_p = -INFINITY;
    double first_ratio = NAN, last_ratio = NAN;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double p = cfg.p(n), q = cfg.q(n);
        std::ostringstream os;
        if (!std::isfinite(p) || !std::isfinite(q)) {
            os << "p or q not finite at n=" << n;
            w.push_back(os.str());
            continue;
        }
        if (p < 1.0) {
            os << "p(" << n << ") = " << p << " < 1";
            w.push_back(os.str());
        }
        if (p < prev_p) {
            std::ostringstream o2;
            o2 << "p decreases at n=" << n;
            w.push_back(o2.str());
        }
        if (q <= p) {
            std::ostringstream o3;
            o3 << "q(" << n << ") = " << q << " <= p(" << n << ") = " << p;
            w.push_back(o3.str());
        }
        prev_p = p;
        if (std::isnan(first_ratio)) first_ratio = q / p;
        last_ratio = q / p;
    }
    if (n_hi > n_lo && !(last_ratio > first_ratio)) {
        w.push_back("q/p does not grow across the range");
    }
    return w;
}

namespace {

BlockCertificate certify(const ChainMatrix& P, const SubsetMask& R, const SubsetMask& T, double eps,
                         const ConvergenceLimits& limits) {
    BlockCertificate b;
    b.R = R;
    b.T = T;
    const Dist& pi = P.reference();
    b.pi_mass = mass(pi, R);
    b.bottleneck = bottleneck(P, pi, R);
    b.tmix = mixing_time(restrict_loop(P, R), eps, limits);
    const auto hit = hit_within(P, R.complement(), b.tmix.value);
    R.for_each([&](ProfileId y) { b.escape.push_back(hit[y]); });
    T.for_each([&](ProfileId y) { b.max_escape_core = std::max(b.max_escape_core, hit[y]); });
    return b;
}

SubsetMask union_of(std::size_t universe, const std::vector<SubsetMask>& sets) {
    SubsetMask u(universe);
    for (const auto& s : sets) u = u | s;
    return u;
}

}  // namespace

PartitionResult run_A_pq(const GameSpec& g, double beta, const PQConfig& cfg) {
    PartitionResult r;
    r.n = g.players();
    r.beta = beta;
    r.eps = cfg.eps;
    r.p_value = cfg.p(r.n);
    r.q_value = cfg.q(r.n);
    if (!(r.q_value > 0.0) || !std::isfinite(r.p_value)) throw InputError("p(n) and q(n) must be finite with q(n) > 0");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InputError("eps must lie in (0, 1)");
    r.warnings = validate_pq(cfg, std::max(1, r.n - 2), r.n + 2);

    const auto P = build_chain(g, beta);
    const Dist& pi = P.reference();
    const double threshold = 1.0 / r.q_value;
    SubsetMask N = SubsetMask::full(g.size());

    while (!N.empty()) {
        bool found = false;
        SubsetMask best;
        double best_pi = 0.0;
        std::size_t scored = 0;
        for_each_candidate(g, N, cfg.family, cfg.caps, [&](const SubsetMask& L) {
            ++scored;
            const double m = mass(pi, L);
            if (m > 0.5) return true;
            if (found && m > best_pi) return true;
            if (bottleneck(P, pi, L) > threshold) return true;
            if (!found || prefer(m, L, best_pi, best)) {
                found = true;
                best = L;
                best_pi = m;
            }
            return true;
        });
        if (!found) {
            r.stationary_regime = r.blocks.empty();
            break;
        }
        if (!is_connected(g.index(), best)) {
            throw Error("internal: the minimal qualifying set is disconnected");
        }
        auto cert = certify(P, best, SubsetMask(g.size()), cfg.eps, cfg.limits);
        cert.family = cfg.family;
        cert.candidates = scored;
        cert.connected = true;
        const auto members = best.members();
        for (std::size_t a = 0; a < members.size(); ++a) {
            if (cert.escape[a] <= cfg.eps) cert.T.insert(members[a]);
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            if (cert.T.contains(members[a])) cert.max_escape_core = std::max(cert.max_escape_core, cert.escape[a]);
        }
        if (cert.T.empty()) {
            r.terminated_on = std::move(cert);
            break;
        }
        N = N - cert.T;
        r.blocks.push_back(std::move(cert));
    }
    r.residual = N;

    if (!r.blocks.empty() && !N.empty()) {
        std::vector<SubsetMask> cores;
        for (const auto& b : r.blocks) cores.push_back(b.T);
        HittingOptions ho;
        ho.grid = {};
        ho.expected = false;
        ho.step_cap = cfg.limits.step_cap;
        ho.dense_max = cfg.limits.dense_max;
        const auto h = hitting_profile(P, union_of(g.size(), cores), cfg.eps, ho);
        N.for_each([&](ProfileId x) { r.residual_t_eps.push_back(h.eps_time[x]); });
    }
    return r;
}

void check_structure(const GameSpec& g, const CandidatePartition& c) {
    const std::size_t U = g.size();
    auto fail = [](const std::string& what) { throw InputError("malformed candidate partition: " + what); };
    if (c.R.size() != c.T.size()) fail("R and T lists differ in length");
    if (c.residual.universe() != U) fail("residual universe does not match the game");
    SubsetMask covered = c.residual;
    for (std::size_t i = 0; i < c.R.size(); ++i) {
        const std::string tag = "block " + std::to_string(i + 1);
        if (c.R[i].universe() != U || c.T[i].universe() != U) fail(tag + " universe does not match the game");
        if (c.R[i].empty()) fail(tag + ": R is empty");
        if (!c.T[i].is_subset_of(c.R[i])) fail(tag + ": T is not a subset of R");
        if (!is_connected(g.index(), c.R[i])) fail(tag + ": R is not connected");
        if (c.T[i].intersects(covered)) fail(tag + ": T overlaps another core or the residual set");
        covered = covered | c.T[i];
    }
    if (covered.count() != U) fail("cores and residual do not cover the profile space");
}

PartitionVerification verify_partition(const GameSpec& g, double beta, const CandidatePartition& c, double p, double q,
                                       double eps, const ConvergenceLimits& limits) {
    check_structure(g, c);
    if (!(q > 0.0) || !std::isfinite(p) || p < 0.0) throw InputError("p(n) must be finite and nonnegative, q(n) > 0");
    PartitionVerification v;
    v.n = g.players();
    v.beta = beta;
    v.eps = eps;
    v.p_value = p;
    v.q_value = q;
    const auto P = build_chain(g, beta);

    auto& c1 = v.cond[0];
    auto& c2 = v.cond[1];
    auto& c3 = v.cond[2];
    auto& c4 = v.cond[3];
    c1.threshold = 1.0 / q;
    c2.threshold = p;
    c3.threshold = eps;
    c4.threshold = 1.0 - eps;
    c1.pass = c2.pass = c3.pass = c4.pass = true;

    for (std::size_t i = 0; i < c.R.size(); ++i) {
        auto b = certify(P, c.R[i], c.T[i], eps, limits);
        b.connected = true;
        const std::string tag = "block " + std::to_string(i + 1);
        if (b.bottleneck > c1.threshold) {
            c1.pass = false;
            c1.detail += tag + " ";
        }
        if (!b.tmix.reached || static_cast<double>(b.tmix.value) > p) {
            c2.pass = false;
            c2.detail += tag + " ";
        }
        if (b.max_escape_core > eps) {
            c3.pass = false;
            c3.detail += tag + " ";
        }
        c1.value = std::max(c1.value, b.bottleneck);
        c2.value = std::max(c2.value, static_cast<double>(b.tmix.value));
        c3.value = std::max(c3.value, b.max_escape_core);
        v.blocks.push_back(std::move(b));
    }

    c4.value = 1.0;
    if (!c.residual.empty()) {
        const double steps = std::floor(p);
        if (steps > static_cast<double>(limits.step_cap)) throw CapError("condition 4: floor(p) exceeds the step cap");
        const auto hit = hit_within(P, union_of(g.size(), c.T), static_cast<std::uint64_t>(steps));
        c.residual.for_each([&](ProfileId x) {
            v.residual_hit.push_back(hit[x]);
            c4.value = std::min(c4.value, hit[x]);
        });
        c4.pass = c4.value >= 1.0 - eps;
    }
    for (auto* cond : {&c1, &c2, &c3, &c4}) {
        if (!cond->detail.empty() && cond->detail.back() == ' ') cond->detail.pop_back();
    }
    return v;
}

CandidatePartition candidate_of(const PartitionResult& r) {
    CandidatePartition c;
    for (const auto& b : r.blocks) {
        c.R.push_back(b.R);
        c.T.push_back(b.T);
    }
    c.residual = r.residual;
    return c;
}

PipelineCheck check_pipeline(const ChainMatrix& P, const BlockCertificate& b, double eps, double q) {
    PipelineCheck out;
    const Dist mu = conditional(P.reference(), b.R);
    const double horizon = std::floor(eps * q);
    if (!(horizon >= 0.0) || horizon > 1.8e19) throw InputError("check_pipeline: eps*q out of range");
    out.metastable = is_metastable(P, mu, eps, static_cast<std::uint64_t>(horizon), 0);
    if (b.T.empty()) {
        out.pseudo_mix.reached = true;
        out.pseudo_mix.eps = 2.0 * eps;
    } else {
        out.pseudo_mix = pseudo_mixing_time(P, mu, b.T, 2.0 * eps, b.tmix.value);
    }
    out.pseudo_within_tmix = out.pseudo_mix.reached && out.pseudo_mix.value <= b.tmix.value;
    return out;
}

std::vector<std::pair<std::string, SubsetMask>> structural_subsets(const GameSpec& g) {
    std::vector<std::pair<std::string, SubsetMask>> out;
    const auto& idx = g.index();
    int common = g.max_strategies();
    for (int m : g.strategy_counts()) common = std::min(common, m);
    for (int s = 0; s < common; ++s) {
        std::vector<int> prof(static_cast<std::size_t>(g.players()), s);
        out.emplace_back("consensus_s" + std::to_string(s), SubsetMask::of(g.size(), {idx.encode(prof)}));
    }
    const bool binary = std::all_of(g.strategy_counts().begin(), g.strategy_counts().end(),
                                    [](int m) { return m == 2; });
    if (binary) {
        SubsetMask plus(g.size()), minus(g.size());
        for (ProfileId x = 0; x < g.size(); ++x) {
            const int M = magnetization(idx, x);
            if (M > 0) plus.insert(x);
            if (M < 0) minus.insert(x);
        }
        if (!plus.empty()) out.emplace_back("M>0", plus);
        if (!minus.empty()) out.emplace_back("M<0", minus);
    }
    if (g.has_potential()) {
        const auto& phi = g.potential();
        const double lo = *std::min_element(phi.begin(), phi.end());
        const double tol = 1e-12 * std::max(1.0, std::abs(lo));
        SubsetMask arg(g.size());
        for (ProfileId x = 0; x < g.size(); ++x) {
            if (phi[x] <= lo + tol) arg.insert(x);
        }
        out.emplace_back("argmin_phi", arg);
    }
    return out;
}

std::string classify(double B, double p, double q) {
    if (q <= p) return "degenerate_pair";
    if (B <= 1.0 / q) return "super";
    if (B >= 1.0 / p) return "poly";
    return "unclassified";
}

SweepTable classification_sweep(const SweepSpec& spec) {
    if (spec.n_lo > spec.n_hi) throw InputError("empty n range");
    if (spec.pairs.empty()) throw InputError("classification_sweep needs at least one (p, q) pair");
    SweepTable t;
    for (const auto& pr : spec.pairs) t.pair_names.push_back("(" + pr.p.text() + ", " + pr.q.text() + ")");
    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> order;
    for (int n = spec.n_lo; n <= spec.n_hi; ++n) {
        ZooParams zp = spec.base;
        zp.n = n;
        const double beta = spec.beta_rule(n);
        if (!std::isfinite(beta) || beta < 0.0) throw InputError("beta rule gives an invalid value at n=" + std::to_string(n));
        zp.values["beta"] = beta;  // only the counterexample reads it
        const auto g = make_zoo_game(zp);
        const auto P = build_chain(g, beta);
        const Dist& pi = P.reference();
        for (const auto& [label, L] : structural_subsets(g)) {
            SweepRow row;
            row.n = n;
            row.beta = beta;
            row.subset = label;
            row.size = L.count();
            row.pi_mass = mass(pi, L);
            row.bottleneck = bottleneck(P, pi, L);
            for (const auto& pr : spec.pairs) {
                const double p = pr.p(n), q = pr.q(n);
                row.inv_p.push_back(1.0 / p);
                row.inv_q.push_back(1.0 / q);
                row.labels.push_back(classify(row.bottleneck, p, q));
            }
            if (!series.count(label)) order.push_back(label);
            series[label].push_back(row.bottleneck);
            t.rows.push_back(std::move(row));
        }
    }
    for (const auto& label : order) {
        const auto& s = series[label];
        std::string trend;
        if (s.size() < 2) {
            trend = "single";
        } else {
            bool inc = true, dec = true, flat = true;
            for (std::size_t i = 1; i < s.size(); ++i) {
                inc = inc && s[i] >= s[i - 1];
                dec = dec && s[i] <= s[i - 1];
                flat = flat && s[i] == s[i - 1];
            }
            trend = flat ? "constant" : dec ? "decreasing" : inc ? "increasing" : "non-monotone";
        }
        t.trends.emplace_back(label, trend);
    }
    return t;
}

}  // namespace metastab
