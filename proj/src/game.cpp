#include "metastab/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "metastab/errors.hpp"

namespace metastab {

// ---------------------------------------------------------------------------
// ProfileIndex

ProfileIndex::ProfileIndex(std::vector<int> radices) : radices_(std::move(radices)) {
    if (radices_.empty()) throw InputError("a game needs at least one player");
    strides_.reserve(radices_.size());
    std::size_t stride = 1;
    for (std::size_t i = 0; i < radices_.size(); ++i) {
        if (radices_[i] < 1) {
            std::ostringstream os;
            os << "player " << i << " has " << radices_[i] << " strategies; need at least 1";
            throw InputError(os.str());
        }
        strides_.push_back(stride);
        const auto m = static_cast<std::size_t>(radices_[i]);
        if (stride > std::numeric_limits<std::size_t>::max() / m) {
            throw CapError("profile space size overflows the index type");
        }
        stride *= m;
        degree_ += m - 1;
    }
    size_ = stride;
}

ProfileId ProfileIndex::encode(std::span<const int> strategies) const {
    if (strategies.size() != radices_.size()) {
        std::ostringstream os;
        os << "profile has " << strategies.size() << " entries, game has " << radices_.size()
           << " players";
        throw InputError(os.str());
    }
    ProfileId x = 0;
    for (std::size_t i = 0; i < radices_.size(); ++i) {
        if (strategies[i] < 0 || strategies[i] >= radices_[i]) {
            std::ostringstream os;
            os << "strategy " << strategies[i] << " out of range for player " << i << " (has "
               << radices_[i] << ")";
            throw InputError(os.str());
        }
        x += static_cast<std::size_t>(strategies[i]) * strides_[i];
    }
    return x;
}

std::vector<int> ProfileIndex::decode(ProfileId x) const {
    if (x >= size_) throw InputError("profile index out of range");
    std::vector<int> out(radices_.size());
    for (std::size_t i = 0; i < radices_.size(); ++i) {
        out[i] = static_cast<int>(x % static_cast<std::size_t>(radices_[i]));
        x /= static_cast<std::size_t>(radices_[i]);
    }
    return out;
}

std::vector<Neighbor> ProfileIndex::neighbors(ProfileId x) const {
    if (x >= size_) throw InputError("profile index out of range");
    std::vector<Neighbor> out;
    out.reserve(degree_);
    for_each_neighbor(x, [&](int i, ProfileId y) { out.push_back({i, y}); });
    return out;
}

int ProfileIndex::hamming(ProfileId x, ProfileId y) const {
    int h = 0;
    for (int i = 0; i < players(); ++i) h += strategy(x, i) != strategy(y, i);
    return h;
}

// ---------------------------------------------------------------------------
// SubsetMask

SubsetMask::SubsetMask(std::size_t universe) : words_((universe + 63) / 64, 0), universe_(universe) {}

SubsetMask SubsetMask::full(std::size_t universe) {
    SubsetMask m(universe);
    for (auto& w : m.words_) w = ~std::uint64_t{0};
    if (universe % 64 != 0 && !m.words_.empty()) {
        m.words_.back() = (std::uint64_t{1} << (universe % 64)) - 1;
    }
    m.count_ = universe;
    return m;
}

SubsetMask SubsetMask::of(std::size_t universe, std::span<const ProfileId> members) {
    SubsetMask m(universe);
    for (ProfileId x : members) {
        if (x >= universe) throw InputError("subset member out of range: " + std::to_string(x));
        m.insert(x);
    }
    return m;
}

void SubsetMask::insert(ProfileId x) {
    auto& w = words_[x >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (x & 63);
    if (!(w & bit)) {
        w |= bit;
        ++count_;
    }
}

void SubsetMask::erase(ProfileId x) {
    auto& w = words_[x >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (x & 63);
    if (w & bit) {
        w &= ~bit;
        --count_;
    }
}

void SubsetMask::recount() {
    count_ = 0;
    for (auto w : words_) count_ += static_cast<std::size_t>(__builtin_popcountll(w));
}

void SubsetMask::check_universe(const SubsetMask& o) const {
    if (o.universe_ != universe_) throw InputError("subset universes differ");
}

SubsetMask SubsetMask::complement() const {
    SubsetMask m = full(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) m.words_[i] &= ~words_[i];
    m.recount();
    return m;
}

std::vector<ProfileId> SubsetMask::members() const {
    std::vector<ProfileId> out;
    out.reserve(count_);
    for_each([&](ProfileId x) { out.push_back(x); });
    return out;
}

bool SubsetMask::is_subset_of(const SubsetMask& o) const {
    check_universe(o);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
}

bool SubsetMask::intersects(const SubsetMask& o) const {
    check_universe(o);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] & o.words_[i]) return true;
    }
    return false;
}

SubsetMask SubsetMask::operator&(const SubsetMask& o) const {
    check_universe(o);
    SubsetMask m(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) m.words_[i] &= o.words_[i];
    m.recount();
    return m;
}

SubsetMask SubsetMask::operator|(const SubsetMask& o) const {
    check_universe(o);
    SubsetMask m(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) m.words_[i] |= o.words_[i];
    m.recount();
    return m;
}

SubsetMask SubsetMask::operator-(const SubsetMask& o) const {
    check_universe(o);
    SubsetMask m(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) m.words_[i] &= ~o.words_[i];
    m.recount();
    return m;
}

std::strong_ordering compare_bitmask(const SubsetMask& a, const SubsetMask& b) {
    a.check_universe(b);
    for (std::size_t i = a.words_.size(); i-- > 0;) {
        if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// GameSpec

GameSpec::GameSpec(std::vector<int> strategy_counts,
                   std::vector<double> utilities,
                   std::optional<std::vector<double>> potential,
                   std::string name,
                   std::map<std::string, double> params,
                   GameLimits limits)
    : index_(std::move(strategy_counts)),
      utilities_(std::move(utilities)),
      potential_(std::move(potential)),
      name_(std::move(name)),
      params_(std::move(params)) {
    if (index_.size() > limits.max_profiles) {
        std::ostringstream os;
        os << "profile space has " << index_.size() << " profiles; cap is " << limits.max_profiles;
        throw CapError(os.str());
    }
    const std::size_t expected = index_.size() * static_cast<std::size_t>(index_.players());
    if (utilities_.size() != expected) {
        std::ostringstream os;
        os << "utility table has " << utilities_.size() << " entries; expected n*|S| = " << expected;
        throw InputError(os.str());
    }
    for (double u : utilities_) {
        if (!std::isfinite(u)) throw InputError("utility table contains a non-finite value");
    }
    if (potential_) {
        if (potential_->size() != index_.size()) {
            throw InputError("potential table size does not match |S|");
        }
        for (double v : *potential_) {
            if (!std::isfinite(v)) throw InputError("potential table contains a non-finite value");
        }
    }
}

int GameSpec::max_strategies() const {
    return *std::max_element(strategy_counts().begin(), strategy_counts().end());
}

const std::vector<double>& GameSpec::potential() const {
    if (!potential_) {
        throw PreconditionError("game '" + name_ + "' has no potential table");
    }
    return *potential_;
}

std::optional<double> GameSpec::param(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    return it->second;
}

PotentialCheck verify_potential(const GameSpec& g, double tol) {
    const auto& phi = g.potential();
    const auto& idx = g.index();
    PotentialCheck out;
    for (ProfileId x = 0; x < g.size(); ++x) {
        idx.for_each_neighbor(x, [&](int i, ProfileId y) {
            const double v = std::abs((phi[x] - phi[y]) - (g.utility(i, y) - g.utility(i, x)));
            if (v > out.worst_violation || out.player < 0) {
                if (v > out.worst_violation || out.player < 0) {
                    out.worst_violation = std::max(out.worst_violation, v);
                    out.from = x;
                    out.to = y;
                    out.player = i;
                }
            }
        });
    }
    out.pass = out.worst_violation <= tol;
    return out;
}

double lipschitz_delta(const GameSpec& g) {
    const auto& phi = g.potential();
    double delta = 0.0;
    for (ProfileId x = 0; x < g.size(); ++x) {
        g.index().for_each_neighbor(x, [&](int, ProfileId y) { delta = std::max(delta, phi[x] - phi[y]); });
    }
    return delta;
}

GameSpec game_from_potential(std::vector<int> strategy_counts,
                             std::vector<double> potential,
                             std::string name,
                             std::map<std::string, double> params,
                             GameLimits limits) {
    const std::size_t n = strategy_counts.size();
    std::vector<double> util;
    util.reserve(n * potential.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (double v : potential) util.push_back(-v);
    }
    return GameSpec(std::move(strategy_counts), std::move(util), std::move(potential), std::move(name),
                    std::move(params), limits);
}

std::vector<SubsetMask> connected_components(const ProfileIndex& index, const SubsetMask& set) {
    std::vector<SubsetMask> comps;
    SubsetMask seen(set.universe());
    std::vector<ProfileId> stack;
    set.for_each([&](ProfileId root) {
        if (seen.contains(root)) return;
        SubsetMask comp(set.universe());
        stack.push_back(root);
        seen.insert(root);
        while (!stack.empty()) {
            const ProfileId x = stack.back();
            stack.pop_back();
            comp.insert(x);
            index.for_each_neighbor(x, [&](int, ProfileId y) {
                if (set.contains(y) && !seen.contains(y)) {
                    seen.insert(y);
                    stack.push_back(y);
                }
            });
        }
        comps.push_back(std::move(comp));
    });
    return comps;
}

bool is_connected(const ProfileIndex& index, const SubsetMask& set) {
    if (set.empty()) return false;
    return connected_components(index, set).size() == 1;
}

}  // namespace metastab
