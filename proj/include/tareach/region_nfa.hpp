#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tareach/automaton.hpp"
#include "tareach/zone.hpp"

namespace tareach {

/// Per-clock integer parts with values saturating at `cap`. The quotient
/// construction uses cap = c_max + 1: all integer parts strictly above every
/// guard constant behave identically, so they are merged. Replays of
/// individual runs use an effectively unbounded cap.
struct CappedIntVector {
    std::vector<std::uint32_t> v;
    std::uint32_t cap = 0;

    static CappedIntVector zero(std::uint32_t n, std::uint32_t cap) {
        return {std::vector<std::uint32_t>(n, 0), cap};
    }

    void bump(ClockId x) { v[x] = std::min(v[x] + 1, cap); }
    void reset(ClockSet resets) {
        for (ClockId x = 0; x < v.size(); ++x) {
            if (resets.contains(x)) {
                v[x] = 0;
            }
        }
    }

    friend bool operator==(const CappedIntVector&, const CappedIntVector&) = default;
};

/// State of the discrete-time automaton: location, integer parts, fractional
/// zone, and the prophecy set of clocks still to be reset.
struct RegionState {
    LocId loc = 0;
    CappedIntVector ints;
    BoundedZone zone = BoundedZone::zero_point(0);
    ClockSet prophecy;

    friend bool operator==(const RegionState&, const RegionState&) = default;
};

struct RegionStateHash {
    std::size_t operator()(const RegionState& s) const {
        std::size_t h = s.zone.hash();
        h ^= (static_cast<std::size_t>(s.loc) << 1) ^ (static_cast<std::size_t>(s.prophecy.bits()) << 17);
        for (std::uint32_t value : s.ints.v) {
            h = h * 0x9e3779b97f4a7c15ull + value + 1;
        }
        return h;
    }
};

/// Transition label: kEpsilon or a clock id (a visible wrap of that clock).
constexpr std::int32_t kEpsilon = -1;

struct NfaTransition {
    std::uint32_t from = 0;
    std::int32_t label = kEpsilon;
    std::uint32_t to = 0;

    friend auto operator<=>(const NfaTransition&, const NfaTransition&) = default;
};

/// Finite quotient of the discrete-time automaton, with one initial state per
/// prophecy set and all states over the target location with empty prophecy
/// accepting. State ids are breadth-first discovery ranks, so rebuilding the
/// automaton reproduces them exactly.
struct RegionNfa {
    std::uint32_t num_clocks = 0;
    std::vector<RegionState> states;
    std::vector<NfaTransition> transitions;                      // sorted, unique
    std::map<std::uint32_t, std::uint32_t> initial;              // prophecy bits -> state id
    std::vector<std::uint32_t> accepting;                        // sorted state ids

    std::vector<std::vector<std::pair<std::int32_t, std::uint32_t>>> adjacency;

    void rebuild_adjacency();
    [[nodiscard]] bool is_accepting(std::uint32_t state) const;
};

/// Result of the clock-memorisation transform: the derived automaton keeps
/// every original clock, adds one primed copy per clock plus one reference
/// clock, and gains a fresh pre-start location whose self-loops reset the
/// (clock, primed copy) pairs before a final edge resets the reference clock
/// and enters the original start location.
struct MemorisedAutomaton {
    TimedAutomaton automaton;
    LocId pre_start = 0;
    std::uint32_t original_clocks = 0;

    [[nodiscard]] ClockId primed(ClockId x) const { return original_clocks + x; }
    [[nodiscard]] ClockId reference() const { return 2 * original_clocks; }
};

MemorisedAutomaton memorise(const TimedAutomaton& automaton, LocId start);

/// The successor set of one state: the delay successor, one wrapping
/// successor per clock whose x=1 face is inhabited, and one discrete
/// successor per enabled edge and per guess of clocks that will never be
/// reset again. Successors whose zones are empty are omitted.
std::vector<std::pair<std::int32_t, RegionState>> region_successors(
    const TimedAutomaton& automaton, const RegionState& state);

/// Breadth-first exploration of the quotient from the initial states
/// {<start, 0, {0}, gamma> : gamma subset of clocks}, with integer parts
/// capped at c_max + 1. Delay self-loops are dropped.
RegionNfa build_nfa(const TimedAutomaton& automaton, LocId start, LocId target);

/// Per-state epsilon closure (sorted, includes the state itself).
std::vector<std::vector<std::uint32_t>> epsilon_closures(const RegionNfa& nfa);

/// Language-equivalent epsilon-free automaton over the same state set;
/// acceptance is lifted along closures.
RegionNfa eliminate_epsilon(const RegionNfa& nfa);

struct ConcreteStep {
    enum class Kind : std::uint8_t { Delay, Edge };
    Kind kind = Kind::Delay;
    Rational delay;
    std::uint32_t edge = 0;
};

/// A run of the timed automaton, replayable from its start configuration.
struct ConcreteRun {
    LocId start = 0;
    ClockValuation init;
    std::vector<ConcreteStep> steps;
};

/// Validates the run under the concrete semantics and returns the visited
/// configurations (including the start).
std::vector<Configuration> replay_concrete(const TimedAutomaton& automaton,
                                           const ConcreteRun& run);

struct RegionStep {
    enum class Kind : std::uint8_t { Delay, Wrap, Discrete };
    Kind kind = Kind::Delay;
    ClockId clock = 0;        // Wrap
    std::uint32_t edge = 0;   // Discrete
    ClockSet dropped;         // Discrete: clocks guessed never to be reset again
};

/// A run of the discrete-time automaton from <start, 0, {0}, gamma0>, kept
/// with uncapped integer parts.
struct RegionRun {
    LocId start = 0;
    ClockSet gamma0;
    std::vector<RegionStep> steps;
};

/// Applies one region step to a state; throws SemanticError when the step is
/// illegal there.
RegionState apply_region_step(const TimedAutomaton& automaton, const RegionState& state,
                              const RegionStep& step);

/// Validates the region run and returns the visited states (uncapped ints).
std::vector<RegionState> replay_region(const TimedAutomaton& automaton, const RegionRun& run);

/// Prophecy must equal the set of clocks reset along the run, which must
/// start at the all-zeros valuation. Splits every delay at every integer
/// boundary crossing and emits wrap transitions there.
RegionRun abstract_run(const TimedAutomaton& automaton, const ConcreteRun& run,
                       ClockSet prophecy);

/// Backward construction of a concrete run matching the region run and
/// ending at final integer parts + final_fraction; final_fraction must lie in
/// the final zone.
ConcreteRun concretize_run(const TimedAutomaton& automaton, const RegionRun& run,
                           const std::vector<Rational>& final_fraction);

/// Graphviz rendering of the quotient; epsilon is drawn as "eps".
std::string to_dot(const RegionNfa& nfa, const TimedAutomaton& automaton);

}  // namespace tareach
