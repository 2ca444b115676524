#include "metastab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <mutex>
#include <thread>

#include <Eigen/LU>

#include "metastab/errors.hpp"

namespace metastab {

namespace {

constexpr std::size_t kTableMax = std::size_t{1} << 23;

int pick(const double* cum, int m, double u) {
    for (int s = 0; s < m - 1; ++s) {
        if (u < cum[s]) return s;
    }
    return m - 1;
}

void cumulate(std::vector<double>& w) {
    double acc = 0.0;
    for (double& v : w) {
        acc += v;
        v = acc;
    }
    w.back() = 1.0;
}

}  // namespace

LogitSampler::LogitSampler(const GameSpec& g, double beta) : g_(g), beta_(beta), mmax_(g.max_strategies()) {
    if (!std::isfinite(beta) || beta < 0.0) throw InputError("beta must be finite and nonnegative");
    const std::size_t n = static_cast<std::size_t>(g.players());
    const std::size_t cells = g.size() * n * static_cast<std::size_t>(mmax_);
    if (cells > kTableMax) return;
    cum_.assign(cells, 1.0);
    for (ProfileId x = 0; x < g.size(); ++x) {
        for (int i = 0; i < g.players(); ++i) {
            auto w = boltzmann_update(g, beta, i, x);
            cumulate(w);
            std::copy(w.begin(), w.end(), cum_.begin() + static_cast<std::ptrdiff_t>((x * n + static_cast<std::size_t>(i)) * static_cast<std::size_t>(mmax_)));
        }
    }
}

ProfileId LogitSampler::step(ProfileId x, CounterRng& rng) const {
    const auto& idx = g_.index();
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(g_.players())));
    const double u = rng.uniform();
    const int m = idx.radix(i);
    int s;
    if (!cum_.empty()) {
        const std::size_t n = static_cast<std::size_t>(g_.players());
        s = pick(&cum_[(x * n + static_cast<std::size_t>(i)) * static_cast<std::size_t>(mmax_)], m, u);
    } else {
        auto w = boltzmann_update(g_, beta_, i, x);
        cumulate(w);
        s = pick(w.data(), m, u);
    }
    return idx.with_strategy(x, i, s);
}

Trajectory simulate(const LogitSampler& sampler, ProfileId start, const SimOptions& opt,
                    const std::vector<TrackedSet>& tracked) {
    const auto& g = sampler.game();
    if (start >= g.size()) throw InputError("start profile out of range");
    for (const auto& t : tracked) {
        if (t.set.universe() != g.size()) throw InputError("tracked set '" + t.name + "' has the wrong universe");
    }
    Trajectory tr;
    tr.seed = opt.seed;
    tr.stream = opt.stream;
    tr.start = start;
    if (opt.record_visits) tr.visits.assign(g.size(), 0);
    if (opt.record_path) tr.path.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(opt.steps, 1u << 26)) + 1);
    const std::uint64_t window = opt.window == 0 ? std::max<std::uint64_t>(opt.steps, 1) : opt.window;
    const std::size_t nwin = static_cast<std::size_t>((opt.steps + window - 1) / window);
    for (const auto& t : tracked) {
        TrackedStats s;
        s.name = t.name;
        s.windows.assign(nwin, 0);
        if (t.set.contains(start)) s.first_hit = 0;
        tr.tracked.push_back(std::move(s));
    }
    auto all_hit = [&] {
        return std::all_of(tr.tracked.begin(), tr.tracked.end(), [](const TrackedStats& s) { return s.first_hit.has_value(); });
    };

    CounterRng rng(opt.seed, opt.stream);
    ProfileId x = start;
    if (opt.record_path) tr.path.push_back(x);
    std::uint64_t t = 0;
    if (!(opt.stop_when_all_hit && all_hit())) {
        while (t < opt.steps) {
            x = sampler.step(x, rng);
            ++t;
            if (opt.record_path) tr.path.push_back(x);
            if (opt.record_visits) ++tr.visits[x];
            for (std::size_t k = 0; k < tracked.size(); ++k) {
                if (!tracked[k].set.contains(x)) continue;
                auto& s = tr.tracked[k];
                if (!s.first_hit) s.first_hit = t;
                ++s.occupation;
                ++s.windows[static_cast<std::size_t>((t - 1) / window)];
            }
            if (opt.stop_when_all_hit && all_hit()) break;
        }
    }
    tr.steps = t;
    tr.final_state = x;
    return tr;
}

Trajectory simulate(const GameSpec& g, double beta, ProfileId start, const SimOptions& opt,
                    const std::vector<TrackedSet>& tracked) {
    const LogitSampler sampler(g, beta);
    return simulate(sampler, start, opt, tracked);
}

namespace {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < count; k += threads) body(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

std::vector<Trajectory> simulate_batch(const GameSpec& g, double beta, const std::vector<ProfileId>& starts,
                                       std::size_t count, const SimOptions& base,
                                       const std::vector<TrackedSet>& tracked, unsigned threads) {
    if (starts.empty()) throw InputError("simulate_batch needs at least one start");
    const LogitSampler sampler(g, beta);
    std::vector<Trajectory> out(count);
    parallel_for(count, threads, [&](std::size_t k) {
        SimOptions opt = base;
        opt.stream = base.stream + k;
        out[k] = simulate(sampler, starts[k % starts.size()], opt, tracked);
    });
    return out;
}

std::vector<std::uint64_t> sample_transitions(const GameSpec& g, double beta, ProfileId x, std::uint64_t samples,
                                              std::uint64_t seed, unsigned threads) {
    if (x >= g.size()) throw InputError("profile out of range");
    const LogitSampler sampler(g, beta);
    constexpr std::size_t kChunks = 64;
    std::vector<std::vector<std::uint64_t>> part(kChunks, std::vector<std::uint64_t>(g.size(), 0));
    parallel_for(kChunks, threads, [&](std::size_t c) {
        CounterRng rng(seed, c);
        const std::uint64_t lo = samples * c / kChunks, hi = samples * (c + 1) / kChunks;
        for (std::uint64_t s = lo; s < hi; ++s) ++part[c][sampler.step(x, rng)];
    });
    std::vector<std::uint64_t> counts(g.size(), 0);
    for (const auto& p : part) {
        for (std::size_t y = 0; y < counts.size(); ++y) counts[y] += p[y];
    }
    return counts;
}

BatchMeans batch_means(const std::vector<double>& w) {
    BatchMeans b;
    if (w.empty()) return b;
    b.mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    if (w.size() < 2) return b;
    double ss = 0.0;
    for (double v : w) ss += (v - b.mean) * (v - b.mean);
    b.se = std::sqrt(ss / static_cast<double>(w.size() - 1) / static_cast<double>(w.size()));
    return b;
}

void BirthDeathChain::validate() const {
    const std::size_t m = states();
    if (m == 0 || q.size() != m || r.size() != m) throw InputError("birth-death chain: rate vectors must share a nonzero length");
    for (std::size_t i = 0; i < m; ++i) {
        for (double v : {p[i], q[i], r[i]}) {
            if (!(v >= 0.0 && v <= 1.0)) throw InputError("birth-death chain: rate outside [0, 1] at state " + std::to_string(i));
        }
        if (std::abs(p[i] + q[i] + r[i] - 1.0) > 1e-12) {
            throw InputError("birth-death chain: rates do not sum to 1 at state " + std::to_string(i));
        }
    }
    if (q[0] != 0.0 || p[m - 1] != 0.0) throw InputError("birth-death chain: boundary rates q_0 and p_m must be 0");
}

std::vector<double> BirthDeathChain::stationary() const {
    validate();
    const std::size_t m = states();
    // log weights to survive long chains with strong drift
    std::vector<double> lw(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        if (p[i - 1] == 0.0 || q[i] == 0.0) throw InputError("birth-death chain is not irreducible");
        lw[i] = lw[i - 1] + std::log(p[i - 1]) - std::log(q[i]);
    }
    const double top = *std::max_element(lw.begin(), lw.end());
    std::vector<double> pi(m);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) z += pi[i] = std::exp(lw[i] - top);
    for (double& v : pi) v /= z;
    return pi;
}

double BirthDeathChain::detailed_balance_residual() const {
    const auto pi = stationary();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < states(); ++i) worst = std::max(worst, std::abs(pi[i] * p[i] - pi[i + 1] * q[i + 1]));
    return worst;
}

namespace {

std::vector<double> hitting_solve(const BirthDeathChain& c, const std::vector<bool>& target) {
    const std::size_t m = c.states();
    std::vector<std::ptrdiff_t> pos(m, -1);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < m; ++i) {
        if (!target[i]) {
            pos[i] = static_cast<std::ptrdiff_t>(free.size());
            free.push_back(i);
        }
    }
    std::vector<double> out(m, 0.0);
    if (free.empty()) return out;
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const std::size_t i = free[static_cast<std::size_t>(a)];
        A(a, a) = 1.0 - c.r[i];
        if (i + 1 < m && pos[i + 1] >= 0) A(a, pos[i + 1]) -= c.p[i];
        if (i > 0 && pos[i - 1] >= 0) A(a, pos[i - 1]) -= c.q[i];
    }
    const Eigen::VectorXd e = A.fullPivLu().solve(b);
    if (!e.allFinite() || (A * e - b).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, e.cwiseAbs().maxCoeff())) {
        throw NumericalError("birth-death hitting solve failed");
    }
    for (Eigen::Index a = 0; a < k; ++a) out[free[static_cast<std::size_t>(a)]] = e(a);
    return out;
}

}  // namespace

std::vector<double> BirthDeathChain::expected_hitting(std::size_t target) const {
    validate();
    if (target >= states()) throw InputError("target state out of range");
    std::vector<bool> t(states(), false);
    t[target] = true;
    return hitting_solve(*this, t);
}

std::vector<double> BirthDeathChain::expected_hitting_set(std::size_t boundary, bool above) const {
    validate();
    if (boundary >= states()) throw InputError("boundary state out of range");
    std::vector<bool> t(states(), false);
    for (std::size_t i = 0; i < states(); ++i) t[i] = above ? i >= boundary : i <= boundary;
    return hitting_solve(*this, t);
}

std::size_t BirthDeathChain::step(std::size_t i, CounterRng& rng) const {
    const double u = rng.uniform();
    if (u < p[i]) return i + 1;
    if (u < p[i] + q[i]) return i - 1;
    return i;
}

BirthDeathChain coordination_proof_chain(int m) {
    if (m < 1) throw InputError("coordination_proof_chain needs m >= 1");
    BirthDeathChain c;
    const auto M = static_cast<std::size_t>(m);
    c.p.resize(M + 1);
    c.q.resize(M + 1);
    c.r.resize(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const double di = static_cast<double>(i), dm = m;
        c.p[i] = (dm - di) / (4.0 * dm);
        c.q[i] = (dm + di) / (4.0 * dm);
        c.r[i] = 0.5;
    }
    c.p[0] = 0.5;
    c.q[0] = 0.0;
    c.q[M] = 0.5;
    c.p[M] = 0.0;
    c.validate();
    return c;
}

MagnetizationProjection magnetization_projection(const GameSpec& g, double beta, double tol) {
    const int n = g.players();
    for (int m : g.strategy_counts()) {
        if (m != 2) throw InputError("magnetization projection needs a binary-strategy game");
    }
    const auto& idx = g.index();
    MagnetizationProjection out;
    auto& c = out.chain;
    const auto N = static_cast<std::size_t>(n);
    c.p.assign(N + 1, 0.0);
    c.q.assign(N + 1, 0.0);
    c.r.assign(N + 1, 0.0);
    std::vector<bool> seen(N + 1, false);
    for (ProfileId x = 0; x < g.size(); ++x) {
        std::size_t k = 0;
        for (int i = 0; i < n; ++i) k += static_cast<std::size_t>(idx.strategy(x, i));
        double up = 0.0, down = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto w = boltzmann_update(g, beta, i, x);
            if (idx.strategy(x, i) == 0) {
                up += w[1] / n;
            } else {
                down += w[0] / n;
            }
        }
        if (!seen[k]) {
            seen[k] = true;
            c.p[k] = up;
            c.q[k] = down;
        } else {
            out.lumpability_defect = std::max({out.lumpability_defect, std::abs(up - c.p[k]), std::abs(down - c.q[k])});
        }
    }
    if (out.lumpability_defect > tol) {
        std::ostringstream os;
        os << "game is not exchangeable: projected rates depend on more than the count (defect "
           << out.lumpability_defect << ")";
        throw InputError(os.str());
    }
    for (std::size_t k = 0; k <= N; ++k) {
        c.r[k] = 1.0 - c.p[k] - c.q[k];
        if (c.r[k] < 0.0 && c.r[k] > -1e-15) c.r[k] = 0.0;
        out.magnetization.push_back(n - 2 * static_cast<int>(k));
    }
    c.validate();
    return out;
}

std::vector<int> project_path(const ProfileIndex& index, const std::vector<ProfileId>& path) {
    std::vector<int> out;
    out.reserve(path.size());
    for (ProfileId x : path) {
        int m = 0;
        for (int i = 0; i < index.players(); ++i) m += index.strategy(x, i) == 0 ? 1 : -1;
        out.push_back(m);
    }
    return out;
}

double cw_drift(double b, double x) { return std::tanh(b * x - std::atanh(x)); }

double solve_cw_zeta_normalized(double b) {
    if (!std::isfinite(b)) throw InputError("solve_cw_zeta: non-finite beta");
    // h(x) = b x − atanh x has h'(0) = b − 1; a positive root exists iff b > 1
    auto h = [b](double x) { return b * x - std::atanh(x); };
    double lo = 1e-9, hi = 1.0;
    if (!(b > 1.0) || !(h(lo) > 0.0)) {
        std::ostringstream os;
        os << "solve_cw_zeta: subcritical regime (beta*n = " << b << " <= 1), no positive root";
        throw InputError(os.str());
    }
    // bisect until the bracket stops shrinking
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

double solve_cw_zeta(double beta, int n) {
    if (n < 1) throw InputError("solve_cw_zeta: n must be positive");
    return solve_cw_zeta_normalized(beta * n);
}

GrowthTrend growth_trend(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw InputError("growth_trend needs two or more matching points");
    GrowthTrend t;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw InputError("growth_trend needs positive data");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    for (std::size_t i = 1; i < lx.size(); ++i) t.local_slopes.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
    t.slopes_increasing = true;
    for (std::size_t i = 1; i < t.local_slopes.size(); ++i) {
        t.slopes_increasing = t.slopes_increasing && t.local_slopes[i] > t.local_slopes[i - 1];
    }
    const double k = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    t.fitted_degree = sxy / sxx;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        t.fit_residual = std::max(t.fit_residual, std::abs(ly[i] - (my + t.fitted_degree * (lx[i] - mx))));
    }
    return t;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InputError("ks_statistic needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace metastab
