#include "tareach/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace tareach {

namespace {

/// Dense positive group labels in increasing fractional order.
void normalize_groups(ClassicRegion& region) {
    std::vector<std::int32_t> labels;
    for (std::int32_t g : region.group) {
        if (g > 0) {
            labels.push_back(g);
        }
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (std::int32_t& g : region.group) {
        if (g > 0) {
            g = static_cast<std::int32_t>(
                    std::lower_bound(labels.begin(), labels.end(), g) - labels.begin()) +
                1;
        }
    }
}

struct ScaledGuardAtom {
    ClockId clock = 0;
    GuardOp op = GuardOp::Eq;
    std::int64_t bound = 0;
};

bool region_satisfies(const ClassicRegion& region, const std::vector<ScaledGuardAtom>& guard) {
    for (const ScaledGuardAtom& atom : guard) {
        const std::int64_t v = region.ints[atom.clock];
        const std::int32_t g = region.group[atom.clock];
        bool ok;
        if (g < 0) {
            ok = atom.op == GuardOp::Gt;  // the clock exceeds every constant
        } else {
            switch (atom.op) {
                case GuardOp::Lt: ok = v <= atom.bound - 1; break;
                case GuardOp::Eq: ok = v == atom.bound && g == 0; break;
                default: ok = v > atom.bound || (v == atom.bound && g > 0); break;
            }
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

ClassicRegion region_reset(ClassicRegion region, ClockSet resets) {
    for (ClockId x = 0; x < region.ints.size(); ++x) {
        if (resets.contains(x)) {
            region.ints[x] = 0;
            region.group[x] = 0;
        }
    }
    normalize_groups(region);
    return region;
}

}  // namespace

bool ClassicRegion::well_formed() const {
    if (ints.size() != group.size()) {
        return false;
    }
    std::set<std::int32_t> positive;
    for (std::size_t x = 0; x < group.size(); ++x) {
        if (group[x] > 0) {
            positive.insert(group[x]);
        } else if (group[x] < -1 || ints[x] < 0) {
            return false;
        }
    }
    // Positive labels must be exactly 1..m.
    std::int32_t expected = 1;
    for (std::int32_t label : positive) {
        if (label != expected++) {
            return false;
        }
    }
    return true;
}

ClassicRegion region_of_integers(const std::vector<std::int64_t>& values, std::int64_t bound) {
    ClassicRegion region;
    region.ints = values;
    region.group.assign(values.size(), 0);
    for (std::size_t x = 0; x < values.size(); ++x) {
        if (values[x] > bound) {
            region.ints[x] = bound + 1;
            region.group[x] = -1;
        }
    }
    return region;
}

std::optional<ClassicRegion> region_delay_successor(const ClassicRegion& region,
                                                    std::int64_t bound) {
    ClassicRegion next = region;
    bool any_bounded = false;
    bool any_zero = false;
    for (std::int32_t g : region.group) {
        any_bounded |= g >= 0;
        any_zero |= g == 0;
    }
    if (!any_bounded) {
        return std::nullopt;
    }
    if (any_zero) {
        // The zero class starts moving: it becomes the new smallest positive
        // class, except that clocks sitting at the bound leave it upward.
        for (std::int32_t& g : next.group) {
            if (g > 0) {
                ++g;
            }
        }
        for (ClockId x = 0; x < next.group.size(); ++x) {
            if (region.group[x] == 0) {
                if (next.ints[x] == bound) {
                    next.ints[x] = bound + 1;
                    next.group[x] = -1;
                } else {
                    next.group[x] = 1;
                }
            }
        }
        normalize_groups(next);
        return next;
    }
    // No zero class: the largest fractional class reaches the next integer.
    std::int32_t largest = 0;
    for (std::int32_t g : region.group) {
        largest = std::max(largest, g);
    }
    for (ClockId x = 0; x < next.group.size(); ++x) {
        if (region.group[x] == largest) {
            next.ints[x] += 1;
            next.group[x] = 0;
        }
    }
    normalize_groups(next);
    return next;
}

bool oracle_reachable(const TimedAutomaton& automaton, const Configuration& source,
                      const Configuration& target) {
    const std::uint32_t n = automaton.num_clocks();
    if (source.valuation.size() != n || target.valuation.size() != n ||
        source.location >= automaton.num_locations() ||
        target.location >= automaton.num_locations()) {
        throw SemanticError("oracle query does not match the automaton");
    }
    for (const ClockValuation* v : {&source.valuation, &target.valuation}) {
        for (const Rational& value : v->values) {
            if (!value.is_nonnegative()) {
                throw SemanticError("negative clock value in oracle query");
            }
        }
    }

    // Common denominator of both endpoints; runs scale with time.
    std::int64_t scale = 1;
    for (const ClockValuation* v : {&source.valuation, &target.valuation}) {
        for (const Rational& value : v->values) {
            scale = std::lcm(scale, value.den());
        }
    }

    std::vector<std::int64_t> source_scaled(n);
    std::vector<std::int64_t> target_scaled(n);
    std::int64_t max_value = 0;
    for (ClockId x = 0; x < n; ++x) {
        source_scaled[x] = source.valuation[x].num() * (scale / source.valuation[x].den());
        target_scaled[x] = target.valuation[x].num() * (scale / target.valuation[x].den());
        max_value = std::max({max_value, source_scaled[x], target_scaled[x]});
    }

    std::vector<std::vector<ScaledGuardAtom>> guards(automaton.edges.size());
    std::int64_t max_constant = 0;
    for (std::size_t e = 0; e < automaton.edges.size(); ++e) {
        for (const GuardAtom& atom : automaton.edges[e].guard.atoms) {
            const std::int64_t scaled = static_cast<std::int64_t>(atom.bound) * scale;
            guards[e].push_back(ScaledGuardAtom{atom.clock, atom.op, scaled});
            max_constant = std::max(max_constant, scaled);
        }
    }

    // Bound chosen so the (integer) target valuation is a singleton region.
    const std::int64_t bound = std::max(max_constant, max_value) + 1;
    const ClassicRegion target_region = region_of_integers(target_scaled, bound);

    using Key = std::pair<LocId, ClassicRegion>;
    const Key init{source.location, region_of_integers(source_scaled, bound)};
    const Key goal{target.location, target_region};

    std::set<Key> visited{init};
    std::deque<Key> queue{init};
    while (!queue.empty()) {
        const Key current = queue.front();
        queue.pop_front();
        if (current == goal) {
            return true;
        }
        auto push = [&](Key key) {
            if (visited.insert(key).second) {
                queue.push_back(std::move(key));
            }
        };
        if (auto delayed = region_delay_successor(current.second, bound)) {
            push(Key{current.first, std::move(*delayed)});
        }
        for (std::size_t e = 0; e < automaton.edges.size(); ++e) {
            const Edge& edge = automaton.edges[e];
            if (edge.source != current.first || !region_satisfies(current.second, guards[e])) {
                continue;
            }
            push(Key{edge.target, region_reset(current.second, edge.resets)});
        }
    }
    return false;
}

}  // namespace tareach
