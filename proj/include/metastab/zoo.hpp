#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "metastab/game.hpp"

namespace metastab {

// Binary families encode +1 as strategy 0 and -1 as strategy 1.

GameSpec make_pure_coordination(int n);

GameSpec make_curie_weiss(int n);
/// M(x) = Σ_i x_i for binary ±1 profiles.
int magnetization(const ProfileIndex& index, ProfileId x);

GameSpec make_ring_coordination(int n, double a, double b, double c, double d);

/// Strategy 0 is the fixed-cost link, strategy 1 the link with cost c/n.
GameSpec make_pigou(int n);
/// The closed form (n − c) + (1/n) Σ_{i≤c} i.
double pigou_potential(int n, int c);

/// j-fold iterated natural log; returns NaN once an intermediate value is ≤ 0.
double iterated_log(double x, int j);
double schedule_p(int j, double n);
double schedule_q(int j, double n);

struct CounterexampleSchedule {
    double eps = 0.0;
    /// breakpoints[j-1] = n_j; the list stops at the first j whose n_j is not found.
    std::vector<long> breakpoints;
    long max_valid_n() const { return breakpoints.empty() ? 1 : breakpoints.back(); }
    /// The j with n_{j−1} < n ≤ n_j (n_0 = 1). Throws InputError outside 2..max_valid_n().
    int segment(long n) const;
    /// T(n) = q_j(n) − ε.
    double horizon(long n) const;
};

/// Scans n_j = min{n : p_j(n) < q_j(n) − ε} for j = 1..max_j, n ≤ max_n.
CounterexampleSchedule counterexample_schedule(double eps, int max_j = 4, long max_n = 1000000);

/// Φ(x) = n − t where t counts players at strategy 1, except Φ(1,…,1) = 1 − k_n
/// (or 1 + k_n with literal_sign), k_n = (1/β) log(T(n)/ε − 1).
GameSpec make_counterexample(int n, double beta, double eps, bool literal_sign = false);

/// i.i.d. uniform potential on [0, range] with u_i = −Φ.
GameSpec make_random_potential(std::vector<int> strategy_counts, std::uint64_t seed, double range = 1.0,
                               GameLimits limits = {});

/// n = 2 binary game with Φ = (0, 1, 1, 2).
GameSpec make_ladder2();

struct ZooParams {
    std::string family;
    int n = 0;
    std::map<std::string, double> values;
    std::vector<int> strategy_counts;  // random_potential only; defaults to n binary players
};

const std::vector<std::string>& zoo_families();
GameSpec make_zoo_game(const ZooParams& params);

}  // namespace metastab
