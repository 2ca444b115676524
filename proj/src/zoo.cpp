#include "metastab/zoo.hpp"

#include <cmath>
#include <mutex>
#include <tuple>
#include <sstream>

#include "metastab/errors.hpp"
#include "metastab/rng.hpp"

namespace metastab {

namespace {

std::vector<int> binary(int n) { return std::vector<int>(static_cast<std::size_t>(n), 2); }

int count_minus(const ProfileIndex& idx, ProfileId x) {
    int t = 0;
    for (int i = 0; i < idx.players(); ++i) t += idx.strategy(x, i);
    return t;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InputError(msg);
}

double get(const std::map<std::string, double>& v, const std::string& key, double fallback) {
    auto it = v.find(key);
    return it == v.end() ? fallback : it->second;
}

}  // namespace

GameSpec make_pure_coordination(int n) {
    require(n >= 1, "pure_coordination needs n >= 1");
    ProfileIndex idx(binary(n));
    std::vector<double> phi(idx.size(), 0.0);
    phi.front() = -1.0;
    phi.back() = -1.0;
    return game_from_potential(binary(n), std::move(phi), "pure_coordination", {{"n", n}});
}

int magnetization(const ProfileIndex& index, ProfileId x) {
    return index.players() - 2 * count_minus(index, x);
}

GameSpec make_curie_weiss(int n) {
    require(n >= 2, "curie_weiss needs n >= 2");
    ProfileIndex idx(binary(n));
    const std::size_t size = idx.size();
    std::vector<double> phi(size), util(size * static_cast<std::size_t>(n));
    for (ProfileId x = 0; x < size; ++x) {
        const int m = magnetization(idx, x);
        // Σ_{j<k} x_j x_k = (M² − n)/2
        phi[x] = -0.5 * (static_cast<double>(m) * m - n);
        for (int i = 0; i < n; ++i) {
            const int xi = idx.strategy(x, i) == 0 ? 1 : -1;
            util[static_cast<std::size_t>(i) * size + x] = static_cast<double>(xi * (m - xi));
        }
    }
    return GameSpec(binary(n), std::move(util), std::move(phi), "curie_weiss", {{"n", n}});
}

GameSpec make_ring_coordination(int n, double a, double b, double c, double d) {
    require(n >= 3, "ring_coordination needs n >= 3");
    if (!(a > d) || !(b > c)) {
        std::ostringstream os;
        os << "ring_coordination needs a > d and b > c (got a=" << a << " b=" << b << " c=" << c
           << " d=" << d << ")";
        throw InputError(os.str());
    }
    ProfileIndex idx(binary(n));
    const std::size_t size = idx.size();
    // payoff[mine][theirs], strategy 0 = +1
    const double payoff[2][2] = {{a, c}, {d, b}};
    const double psi[2][2] = {{0.0, a - d}, {a - d, (a - d) - (b - c)}};
    std::vector<double> phi(size, 0.0), util(size * static_cast<std::size_t>(n), 0.0);
    for (ProfileId x = 0; x < size; ++x) {
        for (int i = 0; i < n; ++i) {
            const int si = idx.strategy(x, i);
            const int right = idx.strategy(x, (i + 1) % n);
            const int left = idx.strategy(x, (i + n - 1) % n);
            phi[x] += psi[si][right];
            util[static_cast<std::size_t>(i) * size + x] = payoff[si][left] + payoff[si][right];
        }
    }
    return GameSpec(binary(n), std::move(util), std::move(phi), "ring_coordination",
                    {{"n", n}, {"a", a}, {"b", b}, {"c", c}, {"d", d}});
}

double pigou_potential(int n, int c) {
    return (n - c) + 0.5 * c * (c + 1.0) / n;
}

GameSpec make_pigou(int n) {
    require(n >= 1, "pigou needs n >= 1");
    ProfileIndex idx(binary(n));
    const std::size_t size = idx.size();
    std::vector<double> phi(size), util(size * static_cast<std::size_t>(n));
    for (ProfileId x = 0; x < size; ++x) {
        const int c = count_minus(idx, x);
        phi[x] = pigou_potential(n, c);
        for (int i = 0; i < n; ++i) {
            const double cost = idx.strategy(x, i) == 0 ? 1.0 : static_cast<double>(c) / n;
            util[static_cast<std::size_t>(i) * size + x] = -cost;
        }
    }
    return GameSpec(binary(n), std::move(util), std::move(phi), "pigou", {{"n", n}});
}

double iterated_log(double x, int j) {
    for (int k = 0; k < j; ++k) {
        if (!(x > 0.0)) return std::nan("");
        x = std::log(x);
    }
    return x;
}

double schedule_p(int j, double n) { return std::pow(n, j); }

double schedule_q(int j, double n) {
    const double l = iterated_log(n, j);
    if (std::isnan(l)) return std::nan("");
    return std::exp(std::log(n) * l);
}

int CounterexampleSchedule::segment(long n) const {
    if (n < 2 || n > max_valid_n()) {
        std::ostringstream os;
        os << "counterexample schedule covers n in [2, " << max_valid_n() << "] for eps=" << eps
           << "; got n=" << n;
        throw InputError(os.str());
    }
    long prev = 1;
    for (std::size_t j = 0; j < breakpoints.size(); ++j) {
        if (n > prev && n <= breakpoints[j]) return static_cast<int>(j) + 1;
        prev = breakpoints[j];
    }
    throw InputError("counterexample schedule: no segment for n");
}

double CounterexampleSchedule::horizon(long n) const {
    return schedule_q(segment(n), static_cast<double>(n)) - eps;
}

CounterexampleSchedule counterexample_schedule(double eps, int max_j, long max_n) {
    static std::mutex mu;
    static std::map<std::tuple<double, int, long>, CounterexampleSchedule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(eps, max_j, max_n);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    CounterexampleSchedule s;
    s.eps = eps;
    long start = 1;
    for (int j = 1; j <= max_j; ++j) {
        long found = -1;
        for (long n = start; n <= max_n; ++n) {
            const double q = schedule_q(j, static_cast<double>(n));
            if (!std::isnan(q) && schedule_p(j, static_cast<double>(n)) < q - eps) {
                found = n;
                break;
            }
        }
        if (found < 0) break;
        // segments must be increasing; n_j is searched above n_{j-1}
        s.breakpoints.push_back(found);
        start = found + 1;
    }
    cache.emplace(key, s);
    return s;
}

GameSpec make_counterexample(int n, double beta, double eps, bool literal_sign) {
    require(n >= 2, "counterexample needs n >= 2");
    require(beta > 0.0, "counterexample needs beta > 0");
    require(eps > 0.0 && eps < 0.25, "counterexample needs 0 < eps < 1/4");
    const auto sched = counterexample_schedule(eps);
    const double T = sched.horizon(n);
    if (!(T > eps)) throw InputError("counterexample: T(n) <= eps, k_n undefined");
    const double k = std::log(T / eps - 1.0) / beta;

    ProfileIndex idx(binary(n));
    std::vector<double> phi(idx.size());
    for (ProfileId x = 0; x < idx.size(); ++x) phi[x] = n - count_minus(idx, x);
    phi.back() = literal_sign ? 1.0 + k : 1.0 - k;
    return game_from_potential(binary(n), std::move(phi), "counterexample",
                               {{"n", n},
                                {"beta", beta},
                                {"eps", eps},
                                {"T", T},
                                {"k", k},
                                {"segment", sched.segment(n)},
                                {"literal_sign", literal_sign ? 1.0 : 0.0}});
}

GameSpec make_random_potential(std::vector<int> strategy_counts, std::uint64_t seed, double range,
                               GameLimits limits) {
    require(range >= 0.0 && std::isfinite(range), "random_potential needs a finite range >= 0");
    ProfileIndex idx(strategy_counts);
    if (idx.size() > limits.max_profiles) {
        std::ostringstream os;
        os << "random_potential: |S| = " << idx.size() << " exceeds cap " << limits.max_profiles;
        throw InputError(os.str());
    }
    CounterRng rng(seed);
    std::vector<double> phi(idx.size());
    for (auto& v : phi) v = range * rng.uniform();
    return game_from_potential(std::move(strategy_counts), std::move(phi), "random_potential",
                               {{"seed", static_cast<double>(seed)}, {"range", range}}, limits);
}

GameSpec make_ladder2() {
    return game_from_potential({2, 2}, {0.0, 1.0, 1.0, 2.0}, "ladder2");
}

const std::vector<std::string>& zoo_families() {
    static const std::vector<std::string> names = {"pure_coordination", "curie_weiss", "ring_coordination",
                                                   "pigou", "counterexample", "random_potential",
                                                   "ladder2"};
    return names;
}

GameSpec make_zoo_game(const ZooParams& p) {
    const auto& v = p.values;
    if (p.family == "pure_coordination") return make_pure_coordination(p.n);
    if (p.family == "curie_weiss") return make_curie_weiss(p.n);
    if (p.family == "ring_coordination") {
        return make_ring_coordination(p.n, get(v, "a", 1.0), get(v, "b", 1.0), get(v, "c", 0.0),
                                      get(v, "d", 0.0));
    }
    if (p.family == "pigou") return make_pigou(p.n);
    if (p.family == "counterexample") {
        return make_counterexample(p.n, get(v, "beta", 5.0), get(v, "eps", 0.1),
                                   get(v, "literal_sign", 0.0) != 0.0);
    }
    if (p.family == "random_potential") {
        auto counts = p.strategy_counts;
        if (counts.empty()) {
            require(p.n >= 1, "random_potential needs n >= 1 or explicit strategy counts");
            counts = binary(p.n);
        }
        return make_random_potential(std::move(counts), static_cast<std::uint64_t>(get(v, "seed", 0.0)),
                                     get(v, "range", 1.0));
    }
    if (p.family == "ladder2") return make_ladder2();

    std::ostringstream os;
    os << "unknown game family '" << p.family << "'; valid families:";
    for (const auto& f : zoo_families()) os << ' ' << f;
    throw InputError(os.str());
}

}  // namespace metastab
