#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/convergence.hpp"
#include "metastab/expr.hpp"
#include "metastab/metastability.hpp"
#include "metastab/subsets.hpp"
#include "metastab/zoo.hpp"

namespace metastab {

struct PQConfig {
    NExpr p = NExpr::parse("n^3");
    NExpr q = NExpr::parse("exp(0.5*n)");
    double eps = 0.1;
    SubsetFamily family = SubsetFamily::kConnected;
    EnumerationCaps caps;
    ConvergenceLimits limits;
};

/// Numerical sanity of (p, q) on n ∈ [n_lo, n_hi]: p ≥ 1, p non-decreasing, q/p growing.
/// Returns human-readable warnings; an empty list means every check passed.
std::vector<std::string> validate_pq(const PQConfig& cfg, int n_lo, int n_hi);

struct BlockCertificate {
    SubsetMask R;
    SubsetMask T;
    double pi_mass = 0.0;
    double bottleneck = 0.0;  // B(R) in the full chain
    MixingResult tmix;        // t_mix of the restricted chain P̊_R at ε
    /// Pr_y[τ_{S∖R} ≤ t_mix^R(ε)] for every y ∈ R, in R.members() order.
    std::vector<double> escape;
    double max_escape_core = 0.0;  // over T; 0 when T is empty
    bool connected = false;
    SubsetFamily family = SubsetFamily::kConnected;
    std::size_t candidates = 0;  // subsets scored while choosing R
};

struct PartitionResult {
    int n = 0;
    double beta = 0.0;
    double eps = 0.0;
    double p_value = 0.0;
    double q_value = 0.0;
    std::vector<BlockCertificate> blocks;
    SubsetMask residual;
    /// T^ε of ∪T_i from each residual state (members order); nullopt beyond the step cap.
    std::vector<std::optional<std::uint64_t>> residual_t_eps;
    /// The last qualifying set, whose core came out empty and ended the loop.
    std::optional<BlockCertificate> terminated_on;
    bool stationary_regime = false;  // no qualifying set at all
    std::vector<std::string> warnings;
};

/// Algorithm A_{p,q} with the search restricted to cfg.family.
PartitionResult run_A_pq(const GameSpec& g, double beta, const PQConfig& cfg);

struct CandidatePartition {
    std::vector<SubsetMask> R;
    std::vector<SubsetMask> T;
    SubsetMask residual;
};

/// Throws InputError naming the first violated structural rule.
void check_structure(const GameSpec& g, const CandidatePartition& c);

struct ConditionReport {
    bool pass = false;
    double value = 0.0;      // worst case over blocks / states
    double threshold = 0.0;
    std::string detail;
};

struct PartitionVerification {
    int n = 0;
    double beta = 0.0;
    double eps = 0.0;
    double p_value = 0.0;
    double q_value = 0.0;
    std::vector<BlockCertificate> blocks;
    /// Pr_x[τ_{∪T_i} ≤ ⌊p⌋] per residual state (members order).
    std::vector<double> residual_hit;
    ConditionReport cond[4];
    bool pass() const { return cond[0].pass && cond[1].pass && cond[2].pass && cond[3].pass; }
};

/// Conditions 1–4 of a partitioned game, computed exactly.
PartitionVerification verify_partition(const GameSpec& g, double beta, const CandidatePartition& c, double p, double q,
                                       double eps, const ConvergenceLimits& limits = {});

CandidatePartition candidate_of(const PartitionResult& r);

struct PipelineCheck {
    MetaCertificate metastable;      // π_R at (ε, ⌊εq⌋), bound-certified
    PseudoMixResult pseudo_mix;      // t_{π_R}^{T}(2ε)
    bool pseudo_within_tmix = false;
    bool pass() const { return metastable.verdict == Verdict::kPass && pseudo_within_tmix; }
};

PipelineCheck check_pipeline(const ChainMatrix& P, const BlockCertificate& b, double eps, double q);

struct SweepSpec {
    ZooParams base;          // n is overwritten per row
    NExpr beta_rule;
    int n_lo = 0;
    int n_hi = 0;
    struct Pair {
        NExpr p;
        NExpr q;
    };
    std::vector<Pair> pairs;
};

struct SweepRow {
    int n = 0;
    double beta = 0.0;
    std::string subset;
    std::size_t size = 0;
    double pi_mass = 0.0;
    double bottleneck = 0.0;
    std::vector<double> inv_p;
    std::vector<double> inv_q;
    /// poly (B ≥ 1/p), super (B ≤ 1/q), unclassified, or degenerate_pair (q ≤ p at this n).
    std::vector<std::string> labels;
};

struct SweepTable {
    std::vector<std::string> pair_names;
    std::vector<SweepRow> rows;
    /// Per subset label: decreasing, increasing, constant, non-monotone, or single.
    std::vector<std::pair<std::string, std::string>> trends;
};

/// Named structural subsets of a game: consensus singletons, magnetization half-spaces,
/// the potential minimizers.
std::vector<std::pair<std::string, SubsetMask>> structural_subsets(const GameSpec& g);

std::string classify(double B, double p, double q);

SweepTable classification_sweep(const SweepSpec& spec);

}  // namespace metastab
