#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tareach/error.hpp"
#include "tareach/rational.hpp"

namespace tareach {

using LocId = std::uint32_t;
using ClockId = std::uint32_t;

/// Set of clocks as a bitmask. Automata are capped at 31 clocks, which leaves
/// room for the derived automaton with two copies of each clock plus one
/// reference clock.
class ClockSet {
public:
    constexpr ClockSet() = default;
    constexpr explicit ClockSet(std::uint32_t bits) : bits_(bits) {}

    static constexpr ClockSet none() { return ClockSet(0); }
    static constexpr ClockSet all(std::uint32_t n) {
        return ClockSet(n >= 32 ? ~0u : (1u << n) - 1u);
    }
    static constexpr ClockSet single(ClockId x) { return ClockSet(1u << x); }

    [[nodiscard]] constexpr bool contains(ClockId x) const { return (bits_ >> x) & 1u; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] constexpr bool subset_of(ClockSet other) const {
        return (bits_ & ~other.bits_) == 0;
    }
    [[nodiscard]] constexpr std::uint32_t bits() const { return bits_; }
    [[nodiscard]] int count() const { return __builtin_popcount(bits_); }

    constexpr void add(ClockId x) { bits_ |= 1u << x; }
    constexpr void remove(ClockId x) { bits_ &= ~(1u << x); }

    friend constexpr ClockSet operator|(ClockSet a, ClockSet b) { return ClockSet(a.bits_ | b.bits_); }
    friend constexpr ClockSet operator&(ClockSet a, ClockSet b) { return ClockSet(a.bits_ & b.bits_); }
    /// Set difference a \ b.
    friend constexpr ClockSet operator-(ClockSet a, ClockSet b) { return ClockSet(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(ClockSet a, ClockSet b) { return a.bits_ == b.bits_; }
    friend constexpr bool operator!=(ClockSet a, ClockSet b) { return a.bits_ != b.bits_; }

private:
    std::uint32_t bits_ = 0;
};

enum class GuardOp : std::uint8_t { Lt, Eq, Gt };

/// One conjunct of a guard: clock < k, clock = k or clock > k.
struct GuardAtom {
    ClockId clock = 0;
    GuardOp op = GuardOp::Eq;
    std::uint32_t bound = 0;

    friend bool operator==(const GuardAtom&, const GuardAtom&) = default;
    friend auto operator<=>(const GuardAtom&, const GuardAtom&) = default;
};

/// Conjunction of guard atoms; the empty conjunction is true. Equality is
/// insensitive to atom order.
struct Guard {
    std::vector<GuardAtom> atoms;

    [[nodiscard]] bool is_true() const { return atoms.empty(); }

    friend bool operator==(const Guard& a, const Guard& b) {
        auto sa = a.atoms;
        auto sb = b.atoms;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        return sa == sb;
    }
};

struct Edge {
    LocId source = 0;
    Guard guard;
    ClockSet resets;
    LocId target = 0;
};

/// A timed automaton: named locations and clocks plus guarded reset edges.
/// Location and clock names are interned to dense indices; c_max is the
/// largest guard constant and is derived on finalization.
struct TimedAutomaton {
    std::vector<std::string> locations;
    std::vector<std::string> clocks;
    std::vector<Edge> edges;
    std::uint32_t c_max = 0;

    [[nodiscard]] std::uint32_t num_locations() const {
        return static_cast<std::uint32_t>(locations.size());
    }
    [[nodiscard]] std::uint32_t num_clocks() const {
        return static_cast<std::uint32_t>(clocks.size());
    }
    [[nodiscard]] ClockSet all_clocks() const { return ClockSet::all(num_clocks()); }

    [[nodiscard]] std::optional<LocId> find_location(std::string_view name) const;
    [[nodiscard]] std::optional<ClockId> find_clock(std::string_view name) const;

    /// Recomputes c_max and checks that every edge reference is in range.
    void finalize();

    friend bool operator==(const TimedAutomaton& a, const TimedAutomaton& b);
};

/// Exact nonnegative rational clock values, indexed by clock id.
struct ClockValuation {
    std::vector<Rational> values;

    static ClockValuation zero(std::uint32_t n) {
        ClockValuation v;
        v.values.assign(n, Rational(0));
        return v;
    }

    [[nodiscard]] std::uint32_t size() const { return static_cast<std::uint32_t>(values.size()); }
    const Rational& operator[](ClockId x) const { return values[x]; }
    Rational& operator[](ClockId x) { return values[x]; }

    friend bool operator==(const ClockValuation&, const ClockValuation&) = default;
};

struct Configuration {
    LocId location = 0;
    ClockValuation valuation;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// nu |= guard, under exact rational comparison.
bool eval_guard(const Guard& guard, const ClockValuation& valuation);

/// nu + t. Rejects negative t.
ClockValuation delay(const ClockValuation& valuation, const Rational& t);

/// nu[resets <- 0]. Rejects clocks outside the valuation.
ClockValuation apply_reset(const ClockValuation& valuation, ClockSet resets);

struct StepLabel {
    enum class Kind : std::uint8_t { Delay, Edge };
    Kind kind = Kind::Delay;
    Rational delay;       // valid when kind == Delay
    std::uint32_t edge = 0;  // valid when kind == Edge

    static StepLabel make_delay(Rational t) { return {Kind::Delay, std::move(t), 0}; }
    static StepLabel make_edge(std::uint32_t e) { return {Kind::Edge, Rational(0), e}; }
};

/// All discrete successors plus the delay successors on the rational grid
/// {k/granularity : 0 <= k <= delay_bound*granularity}. Only used to generate
/// witness runs; the grid under-approximates dense time, which is sound for
/// positive witnesses.
std::vector<std::pair<StepLabel, Configuration>> concrete_successors(
    const TimedAutomaton& automaton, const Configuration& config,
    const Rational& delay_bound, std::uint32_t granularity);

}  // namespace tareach
