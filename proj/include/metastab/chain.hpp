#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "metastab/game.hpp"

namespace metastab {

/// Probability vector over the full profile space (entries outside a support are 0).
using Dist = std::vector<double>;

enum class ChainKind { kFull, kRestrictedLoop, kSubstochastic };
const char* to_string(ChainKind k);

struct ChainLimits {
    std::size_t max_profiles = 16384;
};

/// Row-compressed transition matrix over the full index range 0..|S|−1.
/// Restricted and killed chains keep the same indexing; rows outside the support are empty.
class ChainMatrix {
public:
    std::size_t size() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    ChainKind kind() const { return kind_; }
    double beta() const { return beta_; }
    const Dist& reference() const { return pi_; }
    const SubsetMask& support() const { return support_; }
    int players() const { return players_; }

    template <class F>
    void for_each_in_row(ProfileId x, F&& f) const {
        for (std::size_t k = row_ptr_[x]; k < row_ptr_[x + 1]; ++k) f(col_[k], val_[k]);
    }
    double entry(ProfileId x, ProfileId y) const;
    double row_sum(ProfileId x) const;
    std::size_t nonzeros() const { return val_.size(); }

    /// μ ↦ μP.
    Dist step(const Dist& mu) const;
    void step_into(const Dist& mu, Dist& out) const;
    /// f ↦ Pf.
    std::vector<double> apply(const std::vector<double>& f) const;

    /// Dense matrix on the support, rows/columns ordered by support.members().
    Eigen::MatrixXd dense_on_support() const;

private:
    friend ChainMatrix build_chain(const GameSpec&, double, const ChainLimits&);
    friend ChainMatrix restrict_loop(const ChainMatrix&, const SubsetMask&);
    friend ChainMatrix restrict_kill(const ChainMatrix&, const SubsetMask&);
    friend ChainMatrix chain_from_rows(std::size_t, const std::vector<std::vector<std::pair<ProfileId, double>>>&,
                                       double, Dist);

    std::vector<std::size_t> row_ptr_;
    std::vector<ProfileId> col_;
    std::vector<double> val_;
    ChainKind kind_ = ChainKind::kFull;
    double beta_ = 0.0;
    Dist pi_;
    SubsetMask support_;
    int players_ = 0;
};

/// σ_i(· | x_{−i}) ∝ exp(β u_i(x_{−i}, ·)), log domain with max-subtraction.
std::vector<double> boltzmann_update(const GameSpec& g, double beta, int player, ProfileId x);

/// Full logit chain. The reference distribution is Gibbs for potential games,
/// otherwise the numerically computed left fixed point.
ChainMatrix build_chain(const GameSpec& g, double beta, const ChainLimits& limits = {});

/// Generic full chain from explicit rows (used for hand-built non-game chains in tests).
ChainMatrix chain_from_rows(std::size_t size, const std::vector<std::vector<std::pair<ProfileId, double>>>& rows,
                            double beta, Dist reference);

Dist gibbs(const GameSpec& g, double beta);

/// Left fixed point of a full chain: dense solve when |S| ≤ dense_cap, then power-iteration polish.
Dist stationary(const ChainMatrix& P, std::size_t dense_cap = 4096);

struct ResidualCheck {
    bool pass = false;
    double worst = 0.0;
    ProfileId x = 0;
    ProfileId y = 0;
};

/// max |π(x)P(x,y) − π(y)P(y,x)| over all pairs.
ResidualCheck check_reversibility(const ChainMatrix& P, const Dist& pi, double tol = 1e-12);
/// max_y |(πP)(y) − π(y)|.
ResidualCheck stationarity_residual(const ChainMatrix& P, const Dist& pi, double tol = 1e-12);

/// P̊_L: escaping mass folded into the diagonal. Reference becomes π_L.
ChainMatrix restrict_loop(const ChainMatrix& P, const SubsetMask& L);
/// P_{L̄}: entries outside L×L dropped. Reference becomes π restricted to L (unnormalized).
ChainMatrix restrict_kill(const ChainMatrix& P, const SubsetMask& L);

double mass(const Dist& mu, const SubsetMask& L);
/// π_L = π(·|L).
Dist conditional(const Dist& pi, const SubsetMask& L);
Dist point_mass(std::size_t size, ProfileId x);

/// Q(A, B) = Σ_{x∈A, y∈B} π(x)P(x,y).
double edge_flow(const ChainMatrix& P, const Dist& pi, const SubsetMask& A, const SubsetMask& B);
/// B(L) = Q(L, L̄)/π(L).
double bottleneck(const ChainMatrix& P, const Dist& pi, const SubsetMask& L);
/// Σ_{y∉L} P(x,y).
double leave_probability(const ChainMatrix& P, ProfileId x, const SubsetMask& L);

}  // namespace metastab
