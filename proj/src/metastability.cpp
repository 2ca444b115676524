#include "metastab/metastability.hpp"

#include <algorithm>
#include <cmath>

#include "metastab/errors.hpp"

namespace metastab {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "pass";
        case Verdict::kFail: return "fail";
        case Verdict::kUndetermined: return "undetermined";
    }
    return "?";
}

const char* to_string(MetaMode m) {
    return m == MetaMode::kStepwise ? "stepwise" : "one_step_bound";
}

MetaCertificate is_metastable(const ChainMatrix& P, const Dist& mu, double eps, std::uint64_t T,
                              std::uint64_t step_budget) {
    if (mu.size() != P.size()) throw InputError("distribution size does not match chain");
    MetaCertificate c;
    c.eps = eps;
    c.horizon = T;
    Dist cur = mu, next;
    P.step_into(cur, next);
    c.one_step_drift = tv_distance(next, mu);

    const std::uint64_t limit = std::min(T, step_budget);
    for (std::uint64_t t = 1; t <= limit; ++t) {
        if (t > 1) P.step_into(cur, next);
        cur.swap(next);
        const double d = tv_distance(cur, mu);
        if (d > c.observed_max) {
            c.observed_max = d;
            c.argmax_t = t;
        }
        c.checked_through = t;
        if (d > eps) {
            c.verdict = Verdict::kFail;
            c.first_violation = t;
            return c;
        }
    }
    if (T <= step_budget) {
        c.verdict = Verdict::kPass;
        return c;
    }
    c.mode = MetaMode::kOneStepBound;
    c.verdict = c.one_step_drift * static_cast<double>(T) <= eps ? Verdict::kPass : Verdict::kUndetermined;
    return c;
}

double max_drift(const ChainMatrix& P, const Dist& mu, std::uint64_t T) {
    Dist cur = mu, next;
    double worst = 0.0;
    for (std::uint64_t t = 1; t <= T; ++t) {
        P.step_into(cur, next);
        cur.swap(next);
        worst = std::max(worst, tv_distance(cur, mu));
    }
    return worst;
}

Dist stationary_restricted(const Dist& pi, const SubsetMask& L) { return conditional(pi, L); }

namespace {

// rows[a] = P^t(members[a], ·), evolved in place
struct RowBundle {
    const ChainMatrix& P;
    std::vector<Dist> rows;
    Dist scratch;

    RowBundle(const ChainMatrix& P, const std::vector<ProfileId>& starts) : P(P) {
        for (ProfileId x : starts) rows.push_back(point_mass(P.size(), x));
    }
    void step() {
        for (auto& r : rows) {
            P.step_into(r, scratch);
            r.swap(scratch);
        }
    }
    double worst(const Dist& mu) const {
        double w = 0.0;
        for (const auto& r : rows) w = std::max(w, tv_distance(r, mu));
        return w;
    }
};

}  // namespace

PseudoMixResult pseudo_mixing_time(const ChainMatrix& P, const Dist& mu, const SubsetMask& L, double eps,
                                   std::uint64_t budget) {
    if (L.empty()) throw InputError("pseudo_mixing_time needs a nonempty start set");
    if (mu.size() != P.size()) throw InputError("distribution size does not match chain");
    PseudoMixResult r;
    r.eps = eps;
    RowBundle b(P, L.members());
    for (std::uint64_t t = 0;; ++t) {
        if (b.worst(mu) <= eps) {
            r.reached = true;
            r.value = t;
            return r;
        }
        if (t == budget) break;
        b.step();
    }
    r.value = budget + 1;
    return r;
}

WindowCheck metastable_window_check(const ChainMatrix& P, const Dist& mu, const SubsetMask& L, double eps,
                                    std::uint64_t T, std::uint64_t budget) {
    WindowCheck w;
    w.window = T;
    w.start = pseudo_mixing_time(P, mu, L, eps, budget);
    if (!w.start.reached) return w;
    RowBundle b(P, L.members());
    for (std::uint64_t t = 0; t < w.start.value; ++t) b.step();
    for (std::uint64_t t = 0;; ++t) {
        w.max_tv = std::max(w.max_tv, b.worst(mu));
        if (t == T) break;
        b.step();
    }
    w.within_2eps = w.max_tv <= 2.0 * eps + 1e-12;
    return w;
}

Dist convex_combination(const std::vector<std::pair<double, Dist>>& parts) {
    if (parts.empty()) throw InputError("convex_combination needs at least one part");
    double total = 0.0;
    for (const auto& [w, d] : parts) {
        if (!(w >= 0.0)) throw InputError("convex_combination: negative weight");
        if (d.size() != parts.front().second.size()) throw InputError("convex_combination: size mismatch");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("convex_combination: weights do not sum to 1");
    Dist out(parts.front().second.size(), 0.0);
    for (const auto& [w, d] : parts) {
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * d[i];
    }
    return out;
}

NuResult nu_distribution(const ChainMatrix& P, ProfileId x, const std::vector<SubsetMask>& cores,
                         const std::vector<Dist>& mus, const SubsetMask& residual, double eps, std::uint64_t step_cap) {
    if (cores.size() != mus.size() || cores.empty()) throw InputError("nu_distribution: cores and mus must match");
    if (!residual.contains(x)) throw InputError("nu_distribution: start must lie in the residual set");
    SubsetMask covered = residual;
    for (const auto& c : cores) {
        if (c.intersects(covered)) throw InputError("nu_distribution: cores and residual must be disjoint");
        covered = covered | c;
    }
    if (covered.count() != P.size()) throw InputError("nu_distribution: cores and residual must cover S");

    HittingOptions ho;
    ho.grid = {};
    ho.expected = false;
    ho.step_cap = step_cap;
    const auto h = hitting_profile(P, residual.complement(), eps, ho);
    if (!h.eps_time[x]) throw CapError("nu_distribution: T^eps exceeds the step cap");

    NuResult r;
    r.t_eps = *h.eps_time[x];
    r.absorbed.assign(cores.size(), 0.0);
    std::vector<int> owner(P.size(), -1);
    for (std::size_t i = 0; i < cores.size(); ++i) cores[i].for_each([&](ProfileId y) { owner[y] = static_cast<int>(i); });

    Dist v = point_mass(P.size(), x), next(P.size());
    for (std::uint64_t t = 0; t < r.t_eps; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        residual.for_each([&](ProfileId y) {
            if (v[y] == 0.0) return;
            P.for_each_in_row(y, [&](ProfileId z, double p) {
                if (owner[z] >= 0) {
                    r.absorbed[static_cast<std::size_t>(owner[z])] += v[y] * p;
                } else {
                    next[z] += v[y] * p;
                }
            });
        });
        v.swap(next);
    }
    double total = 0.0;
    for (double a : r.absorbed) total += a;
    if (!(total > 0.0)) throw Error("nu_distribution: zero absorbed mass by T^eps");
    r.nu.assign(P.size(), 0.0);
    for (std::size_t i = 0; i < cores.size(); ++i) {
        r.weights.push_back(r.absorbed[i] / total);
        for (std::size_t y = 0; y < P.size(); ++y) r.nu[y] += r.weights[i] * mus[i][y];
    }
    return r;
}

std::vector<double> tv_trace(const ChainMatrix& P, ProfileId x, const Dist& mu, const std::vector<std::uint64_t>& ts) {
    std::vector<std::uint64_t> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    Dist cur = point_mass(P.size(), x), next;
    std::uint64_t t = 0;
    for (std::uint64_t target : sorted) {
        while (t < target) {
            P.step_into(cur, next);
            cur.swap(next);
            ++t;
        }
        out.push_back(tv_distance(cur, mu));
    }
    return out;
}

CouplingReport restriction_coupling_check(const ChainMatrix& P, const SubsetMask& L,
                                          const std::vector<std::uint64_t>& grid, double tol) {
    if (P.kind() != ChainKind::kFull) throw InputError("restriction_coupling_check needs the full chain");
    CouplingReport rep;
    const auto R = restrict_loop(P, L);
    const Dist piL = conditional(P.reference(), L);
    std::vector<std::uint64_t> ts = grid;
    std::sort(ts.begin(), ts.end());
    const std::uint64_t tmax = ts.empty() ? 0 : ts.back();

    const auto K = restrict_kill(P, L);
    std::vector<double> tail(P.size(), 0.0);
    L.for_each([&](ProfileId x) { tail[x] = 1.0; });

    std::vector<ProfileId> starts = L.members();
    std::vector<Dist> full, loop;
    for (ProfileId x : starts) {
        full.push_back(point_mass(P.size(), x));
        loop.push_back(point_mass(P.size(), x));
    }
    Dist scratch;
    std::size_t gi = 0;
    for (std::uint64_t t = 0; t <= tmax; ++t) {
        while (gi < ts.size() && ts[gi] == t) {
            for (std::size_t a = 0; a < starts.size(); ++a) {
                const double esc = 1.0 - tail[starts[a]];
                const double direct = tv_distance(full[a], loop[a]);
                const double lhs = tv_distance(full[a], piL);
                const double rhs = tv_distance(loop[a], piL) + esc;
                rep.worst_slack_direct = std::min(rep.worst_slack_direct, esc - direct);
                rep.worst_slack_corollary = std::min(rep.worst_slack_corollary, rhs - lhs);
                rep.checked += 2;
                rep.violations += (direct > esc + tol) + (lhs > rhs + tol);
            }
            ++gi;
        }
        if (t == tmax) break;
        for (std::size_t a = 0; a < starts.size(); ++a) {
            P.step_into(full[a], scratch);
            full[a].swap(scratch);
            R.step_into(loop[a], scratch);
            loop[a].swap(scratch);
        }
        tail = K.apply(tail);
    }
    return rep;
}

}  // namespace metastab
