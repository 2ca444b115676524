#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "metastab/chain.hpp"
#include "metastab/game.hpp"

namespace metastab {

enum class SubsetFamily { kExhaustive, kConnected, kHeuristic };
const char* to_string(SubsetFamily f);
SubsetFamily parse_subset_family(const std::string& s);

struct EnumerationCaps {
    /// Exhaustive mode enumerates 2^|scope| − 1 subsets.
    std::size_t exhaustive_max_scope = 22;
    /// Connected mode stops with CapError after this many subsets.
    std::size_t connected_max_count = 2000000;
    std::size_t max_size = std::numeric_limits<std::size_t>::max();
};

/// Emits each connected subset of `scope` with at most max_size members exactly once.
/// Each connected set is grown from its smallest member through its exclusive neighbourhood.
/// The callback returns false to stop early. Returns the number emitted.
std::size_t connected_subsets(const ProfileIndex& index, const SubsetMask& scope, std::size_t max_size,
                              const std::function<bool(const SubsetMask&)>& emit);

/// Structural candidates inside `scope`: potential sublevel sets, magnetization half-spaces for
/// binary games (each with its components when disconnected), and singletons. Duplicates removed.
std::vector<SubsetMask> heuristic_candidates(const GameSpec& g, const SubsetMask& scope);

/// Streams the family's candidates inside scope. Throws CapError when the family's cap is exceeded.
void for_each_candidate(const GameSpec& g, const SubsetMask& scope, SubsetFamily family,
                        const EnumerationCaps& caps, const std::function<bool(const SubsetMask&)>& emit);

/// Strict weak order used for argmin reductions: smaller π(L), then smaller bitmask.
bool prefer(double pi_a, const SubsetMask& a, double pi_b, const SubsetMask& b);

struct BottleneckStar {
    bool found = false;
    double value = 0.0;
    SubsetMask argmin;
    double pi_mass = 0.0;
    std::size_t candidates = 0;
    SubsetFamily family = SubsetFamily::kExhaustive;
    bool fell_back_to_singletons = false;
};

/// min B(L) over the family's candidates L ⊆ scope with π(L) ≤ 1/2.
/// Ties: smallest π(L), then smallest bitmask.
BottleneckStar bottleneck_star(const GameSpec& g, const ChainMatrix& P, const Dist& pi, const SubsetMask& scope,
                               SubsetFamily family, const EnumerationCaps& caps = {});

}  // namespace metastab
