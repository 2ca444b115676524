#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/convergence.hpp"

namespace metastab {

enum class Verdict { kPass, kFail, kUndetermined };
const char* to_string(Verdict v);

enum class MetaMode { kStepwise, kOneStepBound };
const char* to_string(MetaMode m);

struct MetaCertificate {
    double eps = 0.0;
    std::uint64_t horizon = 0;
    MetaMode mode = MetaMode::kStepwise;
    Verdict verdict = Verdict::kUndetermined;
    double one_step_drift = 0.0;          // ‖μP − μ‖
    double observed_max = 0.0;            // max over checked t of ‖μP^t − μ‖
    std::uint64_t argmax_t = 0;
    std::uint64_t checked_through = 0;    // stepwise evaluation covered t = 0..checked_through
    std::uint64_t first_violation = 0;    // valid when verdict is fail
};

/// (ε,T)-metastability. Stepwise up to the budget; beyond it the one-step bound ‖μP − μ‖·T ≤ ε
/// certifies, and a stepwise violation within the budget refutes.
MetaCertificate is_metastable(const ChainMatrix& P, const Dist& mu, double eps, std::uint64_t T,
                              std::uint64_t step_budget = 100000);

/// max_{0 ≤ t ≤ T} ‖μP^t − μ‖ by direct evolution.
double max_drift(const ChainMatrix& P, const Dist& mu, std::uint64_t T);

Dist stationary_restricted(const Dist& pi, const SubsetMask& L);

struct PseudoMixResult {
    bool reached = false;
    std::uint64_t value = 0;  // t_μ^L(ε), or a lower bound when not reached
    double eps = 0.0;
};

/// First t with max_{x∈L} ‖P^t(x,·) − μ‖ ≤ ε, by simultaneous row evolution.
PseudoMixResult pseudo_mixing_time(const ChainMatrix& P, const Dist& mu, const SubsetMask& L, double eps,
                                   std::uint64_t budget = 1000000);

struct WindowCheck {
    PseudoMixResult start;
    std::uint64_t window = 0;
    double max_tv = 0.0;  // over t ∈ [t_μ^L(ε), t_μ^L(ε) + T], x ∈ L
    bool within_2eps = false;
};

/// ‖P^t(x,·) − μ‖ ≤ 2ε on the window after the pseudo-mixing time.
WindowCheck metastable_window_check(const ChainMatrix& P, const Dist& mu, const SubsetMask& L, double eps,
                                    std::uint64_t T, std::uint64_t budget = 1000000);

/// Σ_i α_i μ_i; weights must be nonnegative and sum to 1 within 1e−12.
Dist convex_combination(const std::vector<std::pair<double, Dist>>& parts);

struct NuResult {
    Dist nu;
    std::vector<double> weights;   // conditional absorption weights per core
    std::vector<double> absorbed;  // unconditioned absorbed mass per core by T^ε
    std::uint64_t t_eps = 0;       // T^ε_{S∖N}(x)
};

/// ν_x(y) = Σ_i μ_i(y) Pr_x[X_τ ∈ T_i | τ ≤ T^ε], τ the hitting time of S∖N.
NuResult nu_distribution(const ChainMatrix& P, ProfileId x, const std::vector<SubsetMask>& cores,
                         const std::vector<Dist>& mus, const SubsetMask& residual, double eps,
                         std::uint64_t step_cap = 10000000);

/// TV(P^t(x,·), μ) for a single start.
std::vector<double> tv_trace(const ChainMatrix& P, ProfileId x, const Dist& mu, const std::vector<std::uint64_t>& ts);

struct CouplingReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_slack_direct = INFINITY;     // Pr[τ ≤ t] − ‖P^t − P̊^t‖
    double worst_slack_corollary = INFINITY;  // ‖P̊^t − π_L‖ + Pr[τ ≤ t] − ‖P^t − π_L‖
    bool pass() const { return violations == 0; }
};

/// ‖P^t(x,·) − P̊_L^t(x,·)‖ ≤ Pr_x[τ_{S∖L} ≤ t] and its corollary against π_L, for all x ∈ L.
CouplingReport restriction_coupling_check(const ChainMatrix& P, const SubsetMask& L,
                                          const std::vector<std::uint64_t>& grid, double tol = 1e-10);

}  // namespace metastab
