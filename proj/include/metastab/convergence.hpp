#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/subsets.hpp"

namespace metastab {

double tv_distance(const Dist& mu, const Dist& nu);

struct ConvergenceLimits {
    std::size_t dense_max = 1024;
    std::uint64_t step_cap = 10000000;
};

/// d(t) = max over starts in the support of TV(P^t(x,·), reference). Full or restricted_loop chains.
double distance_profile(const ChainMatrix& P, std::uint64_t t, const ConvergenceLimits& limits = {});

struct MixingResult {
    bool reached = false;
    /// t_mix(ε) when reached, otherwise a certified lower bound (t_mix > step_cap).
    std::uint64_t value = 0;
    double eps = 0.25;
    std::vector<std::pair<std::uint64_t, double>> evaluated;  // (t, d(t)) sorted by t
};

/// Exact t_mix(ε) by doubling and bisection over dense powers, asserting monotonicity of d.
MixingResult mixing_time(const ChainMatrix& P, double eps = 0.25, const ConvergenceLimits& limits = {});

/// Default grid {0, 1, 2, 4, ..., 1024}.
std::vector<std::uint64_t> doubling_grid(std::uint64_t max_t = 1024, bool with_zero = true);

struct HittingOptions {
    std::vector<std::uint64_t> grid = doubling_grid();
    bool expected = true;
    bool eps_times = true;
    std::uint64_t step_cap = 10000000;
    std::size_t dense_max = 1024;
};

struct HittingProfile {
    SubsetMask target;
    SubsetMask domain;  // complement of target
    double eps = 0.25;
    std::vector<std::uint64_t> grid;
    /// tails[g][x] = Pr_x[τ_target > grid[g]]; 0 on target states.
    std::vector<std::vector<double>> tails;
    /// E_x[τ_target]; empty unless requested.
    std::vector<double> expected;
    /// T^ε(x) = min{t : Pr_x[τ > t] ≤ ε}; nullopt when above step_cap. Empty unless requested.
    std::vector<std::optional<std::uint64_t>> eps_time;
};

HittingProfile hitting_profile(const ChainMatrix& P, const SubsetMask& target, double eps,
                               const HittingOptions& opt = {});

/// Pr_x[τ_target ≤ t] for every x (1 on target), by t steps of the killed chain.
std::vector<double> hit_within(const ChainMatrix& P, const SubsetMask& target, std::uint64_t t);

/// Per-lemma aggregate of an inequality lhs ≤ rhs checked many times.
struct InequalityStats {
    std::string name;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_slack = INFINITY;  // min(rhs − lhs)
    std::string worst_where;
    std::string first_violation;

    void record(double lhs, double rhs, double tol, const std::string& where);
};

struct BoundSuiteOptions {
    std::vector<std::uint64_t> grid = doubling_grid(1024, false);
    double eps = 0.25;          // ε for T^ε
    double tol = 1e-8;
    bool mixing = true;         // t_mix sandwiches (needs dense powers)
    bool cheeger = true;        // exhaustive B* when |S| ≤ cheeger_max
    bool killed = true;         // killed-chain gap and hitting lemmas per L
    std::size_t cheeger_max = 16;
    std::size_t b_star_local_max = 20;  // exhaustive B^L_* cap
    std::uint64_t seed = 0;     // carried into reproducer strings
};

struct BoundSuiteReport {
    std::vector<InequalityStats> stats;
    std::vector<std::string> skipped;
    double t_rel = 0.0;
    std::optional<std::uint64_t> t_mix;
    std::size_t subsets = 0;
    std::size_t violations() const;
    bool pass() const { return violations() == 0; }
    InequalityStats* find(const std::string& name);
};

/// Mixing/relaxation sandwiches, t_mix ≥ 1/(4B(L)), Cheeger, and the killed-chain hitting lemmas
/// for every L in the family.
BoundSuiteReport verify_bound_suite(const GameSpec& g, const ChainMatrix& P, const std::vector<SubsetMask>& family,
                                    const BoundSuiteOptions& opt = {});

/// B^L_* = min over A ⊆ L with π(A) ≤ 1/2 of B(A) in the full chain; nullopt if no admissible A.
/// With mass_cap false the minimum runs over every nonempty A ⊆ L.
std::optional<double> local_bottleneck_star(const GameSpec& g, const ChainMatrix& P, const SubsetMask& L,
                                            std::size_t exhaustive_max = 20, bool mass_cap = true);

}  // namespace metastab
