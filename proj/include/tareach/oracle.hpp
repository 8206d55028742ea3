#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tareach/automaton.hpp"

namespace tareach {

/// Classic region: per-clock integer part capped at a query-specific bound M
/// plus the ordering pattern of the fractional parts. group[x] is -1 for
/// clocks above M, 0 for fractional part zero, and k >= 1 for the k-th
/// smallest positive fractional value. Kept deliberately separate from the
/// zone machinery so the two reachability procedures share nothing.
struct ClassicRegion {
    std::vector<std::int64_t> ints;
    std::vector<std::int32_t> group;

    [[nodiscard]] bool well_formed() const;

    friend auto operator<=>(const ClassicRegion&, const ClassicRegion&) = default;
};

/// The region of an integer valuation (every fractional part zero).
ClassicRegion region_of_integers(const std::vector<std::int64_t>& values, std::int64_t bound);

/// Immediate time successor, or nullopt when the region is a fixpoint
/// (every clock above the bound).
std::optional<ClassicRegion> region_delay_successor(const ClassicRegion& region,
                                                    std::int64_t bound);

/// Exact decision of <source> ->* <target> for rational configurations:
/// clocks and guard constants are scaled by the common denominator (runs are
/// invariant under time scaling), the region bound is chosen large enough
/// that the target is a singleton region, and the scaled region graph is
/// searched.
bool oracle_reachable(const TimedAutomaton& automaton, const Configuration& source,
                      const Configuration& target);

}  // namespace tareach
