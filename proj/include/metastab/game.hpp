#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace metastab {

/// Dense index of a strategy profile, 0..|S|-1.
using ProfileId = std::size_t;

/// A unilateral deviation: `profile` differs from the source only at `player`.
struct Neighbor {
    int player;
    ProfileId profile;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Mixed-radix bijection between strategy profiles and dense indices.
/// Player 0 is the least significant digit.
class ProfileIndex {
public:
    ProfileIndex() = default;
    explicit ProfileIndex(std::vector<int> radices);

    int players() const { return static_cast<int>(radices_.size()); }
    std::size_t size() const { return size_; }
    const std::vector<int>& radices() const { return radices_; }
    int radix(int player) const { return radices_[static_cast<std::size_t>(player)]; }
    std::size_t stride(int player) const { return strides_[static_cast<std::size_t>(player)]; }

    ProfileId encode(std::span<const int> strategies) const;
    std::vector<int> decode(ProfileId x) const;

    int strategy(ProfileId x, int player) const {
        return static_cast<int>((x / stride(player)) % static_cast<std::size_t>(radix(player)));
    }
    /// The profile obtained from x by setting `player` to strategy s.
    ProfileId with_strategy(ProfileId x, int player, int s) const {
        const auto cur = static_cast<std::size_t>(strategy(x, player));
        return x - cur * stride(player) + static_cast<std::size_t>(s) * stride(player);
    }

    /// Σ_i (m_i − 1).
    std::size_t degree() const { return degree_; }
    std::vector<Neighbor> neighbors(ProfileId x) const;

    template <class F>
    void for_each_neighbor(ProfileId x, F&& f) const {
        for (int i = 0; i < players(); ++i) {
            const int cur = strategy(x, i);
            for (int s = 0; s < radix(i); ++s) {
                if (s != cur) f(i, with_strategy(x, i, s));
            }
        }
    }

    int hamming(ProfileId x, ProfileId y) const;

private:
    std::vector<int> radices_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    std::size_t degree_ = 0;
};

/// Set of profiles backed by a bitmask, with cached cardinality.
class SubsetMask {
public:
    SubsetMask() = default;
    explicit SubsetMask(std::size_t universe);

    static SubsetMask full(std::size_t universe);
    static SubsetMask of(std::size_t universe, std::span<const ProfileId> members);
    static SubsetMask of(std::size_t universe, std::initializer_list<ProfileId> members) {
        return of(universe, std::span<const ProfileId>(members.begin(), members.size()));
    }

    std::size_t universe() const { return universe_; }
    std::size_t count() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(ProfileId x) const { return (words_[x >> 6] >> (x & 63)) & 1u; }
    void insert(ProfileId x);
    void erase(ProfileId x);

    SubsetMask complement() const;
    std::vector<ProfileId> members() const;
    bool is_subset_of(const SubsetMask& other) const;
    bool intersects(const SubsetMask& other) const;

    SubsetMask operator&(const SubsetMask& o) const;
    SubsetMask operator|(const SubsetMask& o) const;
    /// Set difference.
    SubsetMask operator-(const SubsetMask& o) const;
    friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

    /// Order by the integer value Σ_{x ∈ L} 2^x.
    friend std::strong_ordering compare_bitmask(const SubsetMask& a, const SubsetMask& b);

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                f(static_cast<ProfileId>(w * 64 + static_cast<std::size_t>(b)));
                bits &= bits - 1;
            }
        }
    }

private:
    void check_universe(const SubsetMask& o) const;
    void recount();

    std::vector<std::uint64_t> words_;
    std::size_t universe_ = 0;
    std::size_t count_ = 0;
};

struct GameLimits {
    std::size_t max_profiles = 16384;
};

/// A finite strategic game with dense utility tables and an optional exact potential.
/// Immutable after construction.
class GameSpec {
public:
    /// `utilities` is row-major by player then profile: utilities[i * |S| + x] = u_i(x).
    GameSpec(std::vector<int> strategy_counts,
             std::vector<double> utilities,
             std::optional<std::vector<double>> potential = std::nullopt,
             std::string name = {},
             std::map<std::string, double> params = {},
             GameLimits limits = {});

    int players() const { return index_.players(); }
    std::size_t size() const { return index_.size(); }
    const ProfileIndex& index() const { return index_; }
    const std::vector<int>& strategy_counts() const { return index_.radices(); }
    int max_strategies() const;

    double utility(int player, ProfileId x) const {
        return utilities_[static_cast<std::size_t>(player) * size() + x];
    }
    const std::vector<double>& utility_table() const { return utilities_; }

    bool has_potential() const { return potential_.has_value(); }
    /// Throws PreconditionError when the game carries no potential.
    const std::vector<double>& potential() const;
    double potential(ProfileId x) const { return potential()[x]; }

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    std::optional<double> param(const std::string& key) const;

private:
    ProfileIndex index_;
    std::vector<double> utilities_;
    std::optional<std::vector<double>> potential_;
    std::string name_;
    std::map<std::string, double> params_;
};

struct PotentialCheck {
    bool pass = false;
    double worst_violation = 0.0;
    ProfileId from = 0;
    ProfileId to = 0;
    int player = -1;
};

/// Checks Φ(x) − Φ(y) = u_i(y) − u_i(x) over every unilateral deviation.
PotentialCheck verify_potential(const GameSpec& g, double tol = 1e-9);

/// Δ = max{Φ(x) − Φ(y) : H(x,y) = 1}.
double lipschitz_delta(const GameSpec& g);

/// Returns the game with u_i := −Φ for every player.
GameSpec game_from_potential(std::vector<int> strategy_counts,
                             std::vector<double> potential,
                             std::string name = {},
                             std::map<std::string, double> params = {},
                             GameLimits limits = {});

/// Connected components (in the Hamming graph) of the profiles in `set`.
std::vector<SubsetMask> connected_components(const ProfileIndex& index, const SubsetMask& set);
bool is_connected(const ProfileIndex& index, const SubsetMask& set);

}  // namespace metastab
