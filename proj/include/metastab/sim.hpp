#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/rng.hpp"

namespace metastab {

struct TrackedSet {
    std::string name;
    SubsetMask set;
};

struct TrackedStats {
    std::string name;
    std::optional<std::uint64_t> first_hit;  // min t ≥ 0 with X_t in the set
    std::uint64_t occupation = 0;            // #{1 ≤ t ≤ steps : X_t in the set}
    std::vector<std::uint64_t> windows;      // occupation per window of SimOptions::window steps
};

struct SimOptions {
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    bool record_path = false;
    bool record_visits = false;  // per-profile occupation counts
    std::uint64_t window = 0;    // 0: a single window covering the run
    /// Stop once every tracked set has been hit (first-hit studies).
    bool stop_when_all_hit = false;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    ProfileId start = 0;
    std::uint64_t steps = 0;  // steps actually taken
    ProfileId final_state = 0;
    std::vector<ProfileId> path;           // X_0..X_steps when recorded
    std::vector<std::uint64_t> visits;     // when recorded
    std::vector<TrackedStats> tracked;
};

/// Draws single logit-dynamics steps. Cumulative update tables are precomputed when small.
class LogitSampler {
public:
    LogitSampler(const GameSpec& g, double beta);
    ProfileId step(ProfileId x, CounterRng& rng) const;
    const GameSpec& game() const { return g_; }
    double beta() const { return beta_; }

private:
    const GameSpec& g_;
    double beta_;
    int mmax_;
    std::vector<double> cum_;  // [(x * n + i) * mmax + s], empty when too large
};

Trajectory simulate(const LogitSampler& sampler, ProfileId start, const SimOptions& opt,
                    const std::vector<TrackedSet>& tracked = {});
Trajectory simulate(const GameSpec& g, double beta, ProfileId start, const SimOptions& opt,
                    const std::vector<TrackedSet>& tracked = {});

/// count trajectories; trajectory k runs on stream base.stream + k. Results are indexed by k, so they do
/// not depend on the thread count.
std::vector<Trajectory> simulate_batch(const GameSpec& g, double beta, const std::vector<ProfileId>& starts,
                                       std::size_t count, const SimOptions& base,
                                       const std::vector<TrackedSet>& tracked = {}, unsigned threads = 1);

/// Counts of the successor profile over `samples` independent single steps from x.
std::vector<std::uint64_t> sample_transitions(const GameSpec& g, double beta, ProfileId x, std::uint64_t samples,
                                              std::uint64_t seed, unsigned threads = 1);

/// Batch-means estimate of the mean and its standard error from equal-length window means.
struct BatchMeans {
    double mean = 0.0;
    double se = 0.0;
};
BatchMeans batch_means(const std::vector<double>& window_means);

/// States 0..m with down/up/stay probabilities; p is the rate to i+1, q to i−1.
struct BirthDeathChain {
    std::vector<double> p, q, r;

    std::size_t states() const { return p.size(); }
    /// Throws InputError if rates are out of range, rows do not sum to 1, or q_0, p_m ≠ 0.
    void validate() const;
    std::vector<double> stationary() const;
    double detailed_balance_residual() const;
    /// E_i[τ_target] for every i, by a direct linear solve.
    std::vector<double> expected_hitting(std::size_t target) const;
    /// E_i[τ_A] with A = {j : j ≤ boundary} (or ≥ when above is true).
    std::vector<double> expected_hitting_set(std::size_t boundary, bool above) const;
    std::size_t step(std::size_t i, CounterRng& rng) const;
};

/// The auxiliary chain with p_i = (m−i)/(4m), q_i = (m+i)/(4m), r_i = 1/2 and the boundary
/// p_0 = q_m = r_0 = r_m = 1/2, q_0 = p_m = 0.
BirthDeathChain coordination_proof_chain(int m);

struct MagnetizationProjection {
    BirthDeathChain chain;
    /// State k counts players at strategy 1, so M = n − 2k.
    std::vector<int> magnetization;
    double lumpability_defect = 0.0;
};

/// Projects a binary exchangeable game onto the count of players at strategy 1.
/// Throws InputError when the rates depend on more than the count.
MagnetizationProjection magnetization_projection(const GameSpec& g, double beta, double tol = 1e-12);

/// Maps a recorded path to its magnetization sequence.
std::vector<int> project_path(const ProfileIndex& index, const std::vector<ProfileId>& path);

/// ζ: the positive root of tanh(b x − atanh x) with b = β·n. Throws InputError when b ≤ 1.
double solve_cw_zeta(double beta, int n);
/// Same with the normalized product b given directly.
double solve_cw_zeta_normalized(double b);
double cw_drift(double b, double x);

struct GrowthTrend {
    std::vector<double> local_slopes;  // consecutive log-log slopes
    double fitted_degree = 0.0;        // least-squares slope of log y on log x
    double fit_residual = 0.0;         // max |residual| of that fit in log space
    bool slopes_increasing = false;
};

GrowthTrend growth_trend(const std::vector<double>& xs, const std::vector<double>& ys);

/// Two-sample Kolmogorov–Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace metastab
