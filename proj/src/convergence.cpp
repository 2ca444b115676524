#include "metastab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "metastab/errors.hpp"
#include "metastab/spectral.hpp"

namespace metastab {

double tv_distance(const Dist& mu, const Dist& nu) {
    if (mu.size() != nu.size()) throw InputError("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
    return 0.5 * s;
}

namespace {

constexpr std::size_t kExpectedSolveMax = 4096;

struct DenseChain {
    Eigen::MatrixXd P;
    Eigen::RowVectorXd target;
    std::vector<ProfileId> members;
};

DenseChain densify(const ChainMatrix& P, std::size_t dense_max, const char* what) {
    if (P.kind() == ChainKind::kSubstochastic) {
        throw InputError(std::string(what) + " needs a stochastic chain (full or restricted_loop)");
    }
    DenseChain d;
    d.members = P.support().members();
    if (d.members.size() > dense_max) {
        std::ostringstream os;
        os << what << ": " << d.members.size() << " states exceeds the dense cap " << dense_max;
        throw CapError(os.str());
    }
    d.P = P.dense_on_support();
    d.target.resize(static_cast<Eigen::Index>(d.members.size()));
    double total = 0.0;
    for (std::size_t a = 0; a < d.members.size(); ++a) total += P.reference()[d.members[a]];
    for (std::size_t a = 0; a < d.members.size(); ++a) {
        d.target(static_cast<Eigen::Index>(a)) = P.reference()[d.members[a]] / total;
    }
    return d;
}

double worst_row_tv(const Eigen::MatrixXd& M, const Eigen::RowVectorXd& target) {
    double worst = 0.0;
    for (Eigen::Index a = 0; a < M.rows(); ++a) {
        worst = std::max(worst, 0.5 * (M.row(a) - target).cwiseAbs().sum());
    }
    return worst;
}

int floor_log2(std::uint64_t v) { return 63 - __builtin_clzll(v); }

}  // namespace

double distance_profile(const ChainMatrix& P, std::uint64_t t, const ConvergenceLimits& limits) {
    const auto d = densify(P, limits.dense_max, "distance_profile");
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d.P.rows(), d.P.cols());
    Eigen::MatrixXd base = d.P;
    while (t > 0) {
        if (t & 1u) result = result * base;
        t >>= 1;
        if (t) base = base * base;
    }
    return worst_row_tv(result, d.target);
}

MixingResult mixing_time(const ChainMatrix& P, double eps, const ConvergenceLimits& limits) {
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("mixing_time needs 0 < eps < 1");
    const auto d = densify(P, limits.dense_max, "mixing_time");
    MixingResult out;
    out.eps = eps;
    const double d0 = 1.0 - d.target.minCoeff();
    out.evaluated.emplace_back(0, d0);
    auto finish = [&](bool reached, std::uint64_t v) {
        out.reached = reached;
        out.value = v;
        std::sort(out.evaluated.begin(), out.evaluated.end());
        for (std::size_t i = 1; i < out.evaluated.size(); ++i) {
            if (out.evaluated[i].second > out.evaluated[i - 1].second + 1e-10) {
                std::ostringstream os;
                os << "d(t) not monotone: d(" << out.evaluated[i - 1].first << ")=" << out.evaluated[i - 1].second
                   << " < d(" << out.evaluated[i].first << ")=" << out.evaluated[i].second;
                throw NumericalError(os.str());
            }
        }
        return out;
    };
    if (d0 <= eps) return finish(true, 0);

    const std::uint64_t cap = limits.step_cap;
    std::vector<Eigen::MatrixXd> pw;  // pw[k] = P^{2^k}
    pw.push_back(d.P);
    std::uint64_t lo = 0, hi = 0;
    Eigen::MatrixXd m_lo;  // P^lo for lo > 0
    for (int k = 0;; ++k) {
        const std::uint64_t t = std::uint64_t{1} << k;
        if (t > cap) {
            // evaluate exactly at the cap
            Eigen::MatrixXd m = m_lo;
            std::uint64_t rem = cap - lo;
            for (int b = 0; rem; ++b, rem >>= 1) {
                if (rem & 1u) m = m * pw[static_cast<std::size_t>(b)];
            }
            const double dc = worst_row_tv(m, d.target);
            out.evaluated.emplace_back(cap, dc);
            if (dc > eps) return finish(false, cap + 1);
            hi = cap;
            break;
        }
        if (k > 0) pw.push_back(pw.back() * pw.back());
        const double dt = worst_row_tv(pw[static_cast<std::size_t>(k)], d.target);
        out.evaluated.emplace_back(t, dt);
        if (dt <= eps) {
            hi = t;
            break;
        }
        lo = t;
        m_lo = pw[static_cast<std::size_t>(k)];
    }
    while (hi - lo > 1) {
        const int b = floor_log2(hi - lo - 1);
        const std::uint64_t mid = lo + (std::uint64_t{1} << b);
        Eigen::MatrixXd m = lo == 0 ? pw[static_cast<std::size_t>(b)] : Eigen::MatrixXd(m_lo * pw[static_cast<std::size_t>(b)]);
        const double dm = worst_row_tv(m, d.target);
        out.evaluated.emplace_back(mid, dm);
        if (dm <= eps) {
            hi = mid;
        } else {
            lo = mid;
            m_lo = std::move(m);
        }
    }
    return finish(true, hi);
}

std::vector<std::uint64_t> doubling_grid(std::uint64_t max_t, bool with_zero) {
    std::vector<std::uint64_t> g;
    if (with_zero) g.push_back(0);
    for (std::uint64_t t = 1; t <= max_t; t *= 2) g.push_back(t);
    return g;
}

std::vector<double> hit_within(const ChainMatrix& P, const SubsetMask& target, std::uint64_t t) {
    if (target.universe() != P.size()) throw InputError("target universe does not match chain");
    std::vector<double> out(P.size(), 1.0);
    const SubsetMask domain = target.complement();
    if (domain.empty()) return out;
    const auto K = restrict_kill(P, domain);
    std::vector<double> v(P.size(), 0.0);
    domain.for_each([&](ProfileId x) { v[x] = 1.0; });
    for (std::uint64_t s = 0; s < t; ++s) v = K.apply(v);
    domain.for_each([&](ProfileId x) { out[x] = 1.0 - v[x]; });
    return out;
}

HittingProfile hitting_profile(const ChainMatrix& P, const SubsetMask& target, double eps, const HittingOptions& opt) {
    if (target.universe() != P.size()) throw InputError("target universe does not match chain");
    if (target.empty()) throw InputError("hitting_profile needs a nonempty target");
    HittingProfile h;
    h.target = target;
    h.domain = target.complement();
    h.eps = eps;
    h.grid = opt.grid;
    std::sort(h.grid.begin(), h.grid.end());
    h.grid.erase(std::unique(h.grid.begin(), h.grid.end()), h.grid.end());

    if (h.domain.empty()) {
        h.tails.assign(h.grid.size(), std::vector<double>(P.size(), 0.0));
        if (opt.expected) h.expected.assign(P.size(), 0.0);
        if (opt.eps_times) h.eps_time.assign(P.size(), std::uint64_t{0});
        return h;
    }
    const auto K = restrict_kill(P, h.domain);
    const auto members = h.domain.members();

    std::vector<double> v(P.size(), 0.0);
    for (ProfileId x : members) v[x] = 1.0;

    if (opt.eps_times) {
        h.eps_time.assign(P.size(), std::nullopt);
        target.for_each([&](ProfileId x) { h.eps_time[x] = 0; });
        if (eps >= 1.0) {
            for (ProfileId x : members) h.eps_time[x] = 0;
        }
    }
    std::size_t unresolved = 0;
    if (opt.eps_times) {
        for (ProfileId x : members) unresolved += !h.eps_time[x].has_value();
    }

    const std::uint64_t grid_max = h.grid.empty() ? 0 : h.grid.back();
    const std::uint64_t phase1 = std::min<std::uint64_t>(opt.step_cap, 4096);
    const std::uint64_t walk = std::max(grid_max, opt.eps_times ? phase1 : 0);
    std::size_t gi = 0;
    for (std::uint64_t t = 0;; ++t) {
        while (gi < h.grid.size() && h.grid[gi] == t) {
            h.tails.push_back(v);
            ++gi;
        }
        if (opt.eps_times && t > 0 && unresolved > 0) {
            for (ProfileId x : members) {
                if (!h.eps_time[x] && v[x] <= eps) {
                    h.eps_time[x] = t;
                    --unresolved;
                }
            }
        }
        if (t >= walk || (gi == h.grid.size() && unresolved == 0)) break;
        v = K.apply(v);
    }

    if (opt.eps_times && unresolved > 0 && phase1 < opt.step_cap) {
        if (members.size() > opt.dense_max) {
            std::ostringstream os;
            os << "hitting_profile: " << unresolved << " starts need more than " << phase1
               << " steps and the domain (" << members.size() << " states) exceeds the dense cap " << opt.dense_max;
            throw CapError(os.str());
        }
        const Eigen::MatrixXd Kd = K.dense_on_support();
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(Kd.rows());
        std::vector<Eigen::MatrixXd> pw{Kd};
        int k = 0;
        while ((std::uint64_t{1} << k) <= phase1) {
            pw.push_back(pw.back() * pw.back());
            ++k;
        }
        // smallest k with 2^k > phase1; tails at 2^{k-1} ≤ phase1 are > ε for unresolved starts
        std::vector<int> level(members.size(), -1);
        for (;;) {
            const Eigen::VectorXd tail = pw[static_cast<std::size_t>(k)] * ones;
            bool any = false;
            for (std::size_t a = 0; a < members.size(); ++a) {
                if (h.eps_time[members[a]] || level[a] >= 0) continue;
                if (tail(static_cast<Eigen::Index>(a)) <= eps) {
                    level[a] = k;
                } else {
                    any = true;
                }
            }
            if (!any || (std::uint64_t{1} << (k + 1)) > opt.step_cap) break;
            pw.push_back(pw.back() * pw.back());
            ++k;
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            if (level[a] < 0) continue;
            std::uint64_t lo = std::uint64_t{1} << (level[a] - 1);
            std::uint64_t hi = std::uint64_t{1} << level[a];
            Eigen::RowVectorXd row = pw[static_cast<std::size_t>(level[a] - 1)].row(static_cast<Eigen::Index>(a));
            while (hi - lo > 1) {
                const int b = floor_log2(hi - lo - 1);
                Eigen::RowVectorXd next = row * pw[static_cast<std::size_t>(b)];
                const std::uint64_t mid = lo + (std::uint64_t{1} << b);
                if (next.sum() <= eps) {
                    hi = mid;
                } else {
                    lo = mid;
                    row = std::move(next);
                }
            }
            h.eps_time[members[a]] = hi;
        }
    }

    if (opt.expected) {
        if (members.size() > kExpectedSolveMax) {
            std::ostringstream os;
            os << "expected hitting times: domain of " << members.size() << " states exceeds the dense solve cap "
               << kExpectedSolveMax;
            throw CapError(os.str());
        }
        const Eigen::MatrixXd Kd = K.dense_on_support();
        const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(Kd.rows(), Kd.cols()) - Kd;
        const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(Kd.rows());
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) throw Error("expected hitting times: singular system (target unreachable)");
        const Eigen::VectorXd e = lu.solve(rhs);
        h.expected.assign(P.size(), 0.0);
        for (std::size_t a = 0; a < members.size(); ++a) h.expected[members[a]] = e(static_cast<Eigen::Index>(a));
    }
    return h;
}

// ---------------------------------------------------------------------------

void InequalityStats::record(double lhs, double rhs, double tol, const std::string& where) {
    ++checked;
    const double slack = rhs - lhs;
    if (slack < worst_slack) {
        worst_slack = slack;
        worst_where = where;
    }
    if (slack < -tol) {
        if (violations == 0) {
            std::ostringstream os;
            os.precision(17);
            os << where << ": lhs=" << lhs << " rhs=" << rhs;
            first_violation = os.str();
        }
        ++violations;
    }
}

std::size_t BoundSuiteReport::violations() const {
    std::size_t v = 0;
    for (const auto& s : stats) v += s.violations;
    return v;
}

InequalityStats* BoundSuiteReport::find(const std::string& name) {
    for (auto& s : stats) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

namespace {

// (π(A), B(A)) for every A ⊆ S indexed by bitmask; |S| ≤ 20.
struct SubsetTable {
    std::vector<double> pi, b;

    SubsetTable(const ChainMatrix& P) {
        const std::size_t n = P.size();
        const std::size_t total = std::size_t{1} << n;
        pi.assign(total, 0.0);
        b.assign(total, 0.0);
        const Dist& p = P.reference();
        std::vector<std::vector<std::pair<ProfileId, double>>> rows(n);
        for (ProfileId x = 0; x < n; ++x) {
            P.for_each_in_row(x, [&](ProfileId y, double v) {
                if (y != x) rows[x].emplace_back(y, v);
            });
        }
        for (std::size_t m = 1; m < total; ++m) {
            double mass = 0.0, flow = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                if (!((m >> x) & 1u)) continue;
                mass += p[x];
                for (auto [y, v] : rows[x]) {
                    if (!((m >> y) & 1u)) flow += p[x] * v;
                }
            }
            pi[m] = mass;
            b[m] = mass > 0.0 ? flow / mass : 0.0;
        }
    }

    std::optional<double> local_star(std::size_t L, bool mass_cap) const {
        std::optional<double> best;
        for (std::size_t a = L; a; a = (a - 1) & L) {
            if ((!mass_cap || pi[a] <= 0.5) && (!best || b[a] < *best)) best = b[a];
        }
        return best;
    }
};

std::size_t to_bits(const SubsetMask& L) {
    std::size_t bits = 0;
    L.for_each([&](ProfileId x) { bits |= std::size_t{1} << x; });
    return bits;
}

std::string describe(const SubsetMask& L) {
    std::ostringstream os;
    os << "L={";
    bool first = true;
    L.for_each([&](ProfileId x) {
        os << (first ? "" : ",") << x;
        first = false;
    });
    os << "}";
    return os.str();
}

}  // namespace

std::optional<double> local_bottleneck_star(const GameSpec& g, const ChainMatrix& P, const SubsetMask& L,
                                            std::size_t exhaustive_max, bool mass_cap) {
    std::optional<double> best;
    const Dist& pi = P.reference();
    EnumerationCaps caps;
    caps.exhaustive_max_scope = exhaustive_max;
    for_each_candidate(g, L, SubsetFamily::kExhaustive, caps, [&](const SubsetMask& A) {
        if (!mass_cap || mass(pi, A) <= 0.5) {
            const double b = bottleneck(P, pi, A);
            if (!best || b < *best) best = b;
        }
        return true;
    });
    return best;
}

BoundSuiteReport verify_bound_suite(const GameSpec& g, const ChainMatrix& P, const std::vector<SubsetMask>& family,
                                    const BoundSuiteOptions& opt) {
    if (P.kind() != ChainKind::kFull) throw InputError("verify_bound_suite needs the full chain");
    BoundSuiteReport rep;
    const Dist& pi = P.reference();
    const double tol = opt.tol;
    auto stat = [&](const std::string& name) -> InequalityStats& {
        if (auto* s = rep.find(name)) return *s;
        InequalityStats s;
        s.name = name;
        rep.stats.push_back(std::move(s));
        return rep.stats.back();
    };
    std::string tag;
    {
        std::ostringstream os;
        os << "game=" << g.name() << " seed=" << opt.seed << " beta=" << P.beta();
        tag = os.str();
    }

    const auto spec = spectrum(P);
    rep.t_rel = spec.t_rel;
    std::optional<MixingResult> mix;
    if (opt.mixing) {
        try {
            mix = mixing_time(P, 0.25);
        } catch (const CapError& e) {
            rep.skipped.push_back(std::string("mixing: ") + e.what());
        }
    }
    if (mix && mix->reached) {
        rep.t_mix = mix->value;
        const double tm = static_cast<double>(mix->value);
        const double pi_min = *std::min_element(pi.begin(), pi.end());
        if (std::isfinite(spec.t_rel)) {
            stat("relaxation_lower").record((spec.t_rel - 1.0) * std::log(2.0), tm, tol, tag);
            stat("relaxation_upper").record(tm, std::log(4.0 / pi_min) * spec.t_rel, tol, tag);
        }
    } else if (mix) {
        rep.skipped.push_back("mixing: t_mix above the step cap; only lower-bound checks apply");
    }

    std::optional<SubsetTable> table;
    if (P.size() <= opt.b_star_local_max && P.size() <= 20) table.emplace(P);

    if (opt.cheeger && P.size() >= 2 && P.size() <= opt.cheeger_max && table) {
        double bstar = INFINITY;
        for (std::size_t m = 1; m < table->pi.size(); ++m) {
            if (table->pi[m] <= 0.5) bstar = std::min(bstar, table->b[m]);
        }
        const double gap = 1.0 - (spec.eigenvalues.size() > 1 ? spec.eigenvalues[1] : 0.0);
        stat("cheeger_lower").record(bstar * bstar / 2.0, gap, tol, tag);
        stat("cheeger_upper").record(gap, 2.0 * bstar, tol, tag);
    } else if (opt.cheeger) {
        rep.skipped.push_back("cheeger: |S| above the exhaustive cap");
    }

    const SubsetMask all = SubsetMask::full(P.size());
    for (const auto& L : family) {
        if (L.empty() || L == all) continue;
        ++rep.subsets;
        const std::string where = tag + " " + describe(L);
        const double piL = mass(pi, L);
        const double bL = bottleneck(P, pi, L);

        if (mix && mix->reached && piL <= 0.5) {
            stat("bottleneck_mixing").record(1.0 / (4.0 * bL), static_cast<double>(mix->value), tol, where);
        }

        if (!opt.killed) continue;
        const auto K = restrict_kill(P, L);
        const auto top = lambda_max_killed(K);
        const double lam = top.lambda_max;
        stat("killed_gap_upper").record(1.0 - lam, bL, tol, where);

        // bloc follows the literal mass cap π(A) ≤ 1/2; bdir drops it (Dirichlet Cheeger constant).
        // They coincide when π(L) ≤ 1/2.
        std::optional<double> bloc, bdir;
        if (table) {
            bloc = table->local_star(to_bits(L), true);
            bdir = table->local_star(to_bits(L), false);
        } else if (L.count() <= opt.b_star_local_max) {
            bloc = local_bottleneck_star(g, P, L, opt.b_star_local_max, true);
            bdir = local_bottleneck_star(g, P, L, opt.b_star_local_max, false);
        }
        if (bloc) stat("killed_gap_lower").record(*bloc * *bloc / 2.0, 1.0 - lam, tol, where);
        if (bdir) stat("killed_gap_lower_dirichlet").record(*bdir * *bdir / 2.0, 1.0 - lam, tol, where);

        HittingOptions ho;
        ho.grid = opt.grid;
        ho.expected = false;
        ho.eps_times = bool(bdir);
        const auto h = hitting_profile(P, L.complement(), opt.eps, ho);
        for (std::size_t gi = 0; gi < h.grid.size(); ++gi) {
            const std::uint64_t t = h.grid[gi];
            const auto& tail = h.tails[gi];
            const std::string wt = where + " t=" + std::to_string(t);
            double max_tail = 0.0, min_hit = 1.0;
            L.for_each([&](ProfileId x) {
                max_tail = std::max(max_tail, tail[x]);
                min_hit = std::min(min_hit, 1.0 - tail[x]);
                const double piLx = pi[x] / piL;
                const double rhs = std::exp(static_cast<double>(t) * std::log(lam) + 0.5 * std::log(1.0 / piLx));
                stat("tail_upper").record(tail[x], rhs, tol, wt + " x=" + std::to_string(x));
            });
            stat("tail_lower").record(std::pow(lam, static_cast<double>(t)), max_tail, tol, wt);
            stat("hit_probability_upper").record(min_hit, static_cast<double>(t) * bL / (1.0 - bL), tol, wt);
        }
        auto eps_hitting = [&](const char* name, double b) {
            if (b <= 0.0) return;
            L.for_each([&](ProfileId x) {
                const double piLx = pi[x] / piL;
                const double bound = (2.0 * (1.0 - opt.eps) / opt.eps + std::log(1.0 / piLx)) / (b * b);
                const auto& te = h.eps_time[x];
                const std::string wx = where + " x=" + std::to_string(x);
                if (te) {
                    stat(name).record(static_cast<double>(*te), bound, tol, wx);
                } else if (bound < 1e7) {
                    // T^ε exceeds the step cap, which exceeds the bound
                    stat(name).record(1e7, bound, tol, wx);
                }
            });
        };
        if (bloc) eps_hitting("eps_hitting_upper", *bloc);
        if (bdir) eps_hitting("eps_hitting_upper_dirichlet", *bdir);
    }
    return rep;
}

}  // namespace metastab
