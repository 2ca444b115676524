#include "metastab/subsets.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "metastab/errors.hpp"
#include "metastab/zoo.hpp"

namespace metastab {

const char* to_string(SubsetFamily f) {
    switch (f) {
        case SubsetFamily::kExhaustive: return "exhaustive";
        case SubsetFamily::kConnected: return "connected";
        case SubsetFamily::kHeuristic: return "heuristic";
    }
    return "?";
}

SubsetFamily parse_subset_family(const std::string& s) {
    if (s == "exhaustive") return SubsetFamily::kExhaustive;
    if (s == "connected") return SubsetFamily::kConnected;
    if (s == "heuristic" || s == "structural") return SubsetFamily::kHeuristic;
    throw InputError("unknown subset family '" + s + "' (valid: exhaustive, connected, heuristic)");
}

namespace {

struct Grower {
    const ProfileIndex& index;
    const SubsetMask& scope;
    std::size_t max_size;
    const std::function<bool(const SubsetMask&)>& emit;
    std::size_t emitted = 0;
    bool stopped = false;

    // sub: current set; closed: sub ∪ N(sub); ext: candidates to add, all > root
    void extend(SubsetMask& sub, SubsetMask& closed, std::vector<ProfileId> ext, ProfileId root) {
        ++emitted;
        if (!emit(sub)) {
            stopped = true;
            return;
        }
        if (sub.count() >= max_size) return;
        while (!ext.empty() && !stopped) {
            const ProfileId w = ext.back();
            ext.pop_back();
            std::vector<ProfileId> next = ext;
            std::vector<ProfileId> added;
            index.for_each_neighbor(w, [&](int, ProfileId u) {
                if (u > root && scope.contains(u) && !closed.contains(u)) next.push_back(u);
                if (!closed.contains(u)) added.push_back(u);
            });
            for (ProfileId u : added) closed.insert(u);
            sub.insert(w);
            extend(sub, closed, std::move(next), root);
            sub.erase(w);
            for (ProfileId u : added) closed.erase(u);
        }
    }
};

}  // namespace

std::size_t connected_subsets(const ProfileIndex& index, const SubsetMask& scope, std::size_t max_size,
                              const std::function<bool(const SubsetMask&)>& emit) {
    if (scope.empty()) throw InputError("connected_subsets needs a nonempty scope");
    if (scope.universe() != index.size()) throw InputError("scope universe does not match profile space");
    Grower g{index, scope, max_size, emit};
    for (ProfileId root : scope.members()) {
        if (g.stopped || max_size == 0) break;
        SubsetMask sub(scope.universe());
        SubsetMask closed(scope.universe());
        sub.insert(root);
        closed.insert(root);
        std::vector<ProfileId> ext;
        index.for_each_neighbor(root, [&](int, ProfileId u) {
            closed.insert(u);
            if (u > root && scope.contains(u)) ext.push_back(u);
        });
        g.extend(sub, closed, std::move(ext), root);
    }
    return g.emitted;
}

std::vector<SubsetMask> heuristic_candidates(const GameSpec& g, const SubsetMask& scope) {
    const auto& idx = g.index();
    std::vector<SubsetMask> out;
    auto push = [&](const SubsetMask& m) {
        if (!m.empty()) out.push_back(m);
    };

    if (g.has_potential()) {
        std::set<double> levels;
        scope.for_each([&](ProfileId x) { levels.insert(g.potential(x)); });
        for (double c : levels) {
            SubsetMask level(g.size());
            scope.for_each([&](ProfileId x) {
                if (g.potential(x) <= c) level.insert(x);
            });
            push(level);
            auto comps = connected_components(idx, level);
            if (comps.size() > 1) {
                for (auto& comp : comps) push(comp);
            }
        }
    }

    const bool binary = std::all_of(g.strategy_counts().begin(), g.strategy_counts().end(),
                                    [](int m) { return m == 2; });
    if (binary) {
        const int n = g.players();
        for (int k = -n; k <= n; ++k) {
            SubsetMask above(g.size()), below(g.size());
            scope.for_each([&](ProfileId x) {
                const int m = magnetization(idx, x);
                if (m >= k) above.insert(x);
                if (m <= k) below.insert(x);
            });
            for (const auto* half : {&above, &below}) {
                push(*half);
                auto comps = connected_components(idx, *half);
                if (comps.size() > 1) {
                    for (auto& comp : comps) push(comp);
                }
            }
        }
    }

    scope.for_each([&](ProfileId x) { push(SubsetMask::of(g.size(), {x})); });

    std::sort(out.begin(), out.end(), [](const SubsetMask& a, const SubsetMask& b) {
        return compare_bitmask(a, b) < 0;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void for_each_candidate(const GameSpec& g, const SubsetMask& scope, SubsetFamily family,
                        const EnumerationCaps& caps, const std::function<bool(const SubsetMask&)>& emit) {
    if (scope.empty()) throw InputError("candidate scope is empty");
    switch (family) {
        case SubsetFamily::kExhaustive: {
            if (scope.count() > caps.exhaustive_max_scope) {
                std::ostringstream os;
                os << "exhaustive subset family over " << scope.count() << " profiles exceeds cap "
                   << caps.exhaustive_max_scope << "; use the connected or heuristic family";
                throw CapError(os.str());
            }
            const auto members = scope.members();
            const std::uint64_t total = std::uint64_t{1} << members.size();
            for (std::uint64_t bits = 1; bits < total; ++bits) {
                if (static_cast<std::size_t>(__builtin_popcountll(bits)) > caps.max_size) continue;
                SubsetMask L(g.size());
                for (std::size_t b = 0; b < members.size(); ++b) {
                    if ((bits >> b) & 1u) L.insert(members[b]);
                }
                if (!emit(L)) return;
            }
            return;
        }
        case SubsetFamily::kConnected: {
            std::size_t seen = 0;
            bool capped = false;
            connected_subsets(g.index(), scope, caps.max_size, [&](const SubsetMask& L) {
                if (++seen > caps.connected_max_count) {
                    capped = true;
                    return false;
                }
                return emit(L);
            });
            if (capped) {
                std::ostringstream os;
                os << "connected subset family over " << scope.count() << " profiles exceeds "
                   << caps.connected_max_count << " subsets; use the heuristic family or a smaller scope";
                throw CapError(os.str());
            }
            return;
        }
        case SubsetFamily::kHeuristic: {
            for (const auto& L : heuristic_candidates(g, scope)) {
                if (L.count() > caps.max_size) continue;
                if (!emit(L)) return;
            }
            return;
        }
    }
}

bool prefer(double pi_a, const SubsetMask& a, double pi_b, const SubsetMask& b) {
    if (pi_a != pi_b) return pi_a < pi_b;
    return compare_bitmask(a, b) < 0;
}

BottleneckStar bottleneck_star(const GameSpec& g, const ChainMatrix& P, const Dist& pi, const SubsetMask& scope,
                               SubsetFamily family, const EnumerationCaps& caps) {
    BottleneckStar best;
    best.family = family;
    bool sublevel_hit = false;
    auto consider = [&](const SubsetMask& L) {
        ++best.candidates;
        const double m = mass(pi, L);
        if (m > 0.5) return true;
        const double b = bottleneck(P, pi, L);
        if (family == SubsetFamily::kHeuristic && L.count() > 1) sublevel_hit = true;
        if (!best.found || b < best.value || (b == best.value && prefer(m, L, best.pi_mass, best.argmin))) {
            best.found = true;
            best.value = b;
            best.argmin = L;
            best.pi_mass = m;
        }
        return true;
    };
    for_each_candidate(g, scope, family, caps, consider);
    best.fell_back_to_singletons = family == SubsetFamily::kHeuristic && !sublevel_hit && best.found;
    return best;
}

}  // namespace metastab
