#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "metastab/convergence.hpp"
#include "metastab/game.hpp"
#include "metastab/metastability.hpp"
#include "metastab/partition.hpp"
#include "metastab/spectral.hpp"
#include "metastab/zoo.hpp"

namespace metastab {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.3.0";

/// {name, n, strategy_counts, utilities[player][profile], potential?, params?}
Json game_to_json(const GameSpec& g);
/// Accepts utilities either nested per player or flat row-major.
GameSpec game_from_json(const Json& j, const GameLimits& limits = {});

GameSpec load_game_file(const std::string& path, const GameLimits& limits = {});

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON, as 16 hex digits.
std::string fingerprint(const Json& canonical);
std::string game_fingerprint(const GameSpec& g);

/// "family" or "family:n=6,a=1,counts=2x3" → zoo parameters.
ZooParams parse_zoo_spec(const std::string& spec);

/// A game argument: an existing file path, or a zoo spec.
GameSpec resolve_game(const std::string& arg);

/// "0,1,0" (strategies, player 0 first) → profile index.
ProfileId parse_profile(const GameSpec& g, const std::string& text);

/// A structural name (see structural_subsets), "idx:3,5,9", or profiles separated by ';'.
SubsetMask parse_set(const GameSpec& g, const std::string& text);

/// {"blocks": [{"R": [...], "T": [...]}, ...], "residual": [...] | "rest"}; members are profile
/// indices or strategy arrays.
CandidatePartition parse_candidate(const GameSpec& g, const Json& j);

Json subset_json(const SubsetMask& s);
Json to_json(const MixingResult& m);
Json to_json(const Spectrum& s);
Json to_json(const BottleneckStar& b);
Json to_json(const HittingProfile& h);
Json to_json(const BoundSuiteReport& r);
Json to_json(const BlockCertificate& b);
Json to_json(const PartitionResult& r);
Json to_json(const PartitionVerification& v);
Json to_json(const PipelineCheck& c);
Json to_json(const SweepTable& t);

std::string sweep_csv(const SweepTable& t);

/// Writes via a temporary file and rename so readers never see partial output.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace metastab
