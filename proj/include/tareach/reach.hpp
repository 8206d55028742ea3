#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tareach/automaton.hpp"
#include "tareach/formula.hpp"
#include "tareach/parikh.hpp"
#include "tareach/region_nfa.hpp"

namespace tareach {

/// psi_{start,target}(x1..xn): satisfied by exactly the valuations nu with
/// <start, 0> ->* <target, nu>. One disjunct per (initial prophecy set,
/// accepting zone) pair that can reach acceptance: the Parikh flow formula
/// over integer-part variables conjoined with "x - upsilon in Z" expanded to
/// difference atoms plus x >= 0.
MixedFormula build_psi(const TimedAutomaton& automaton, LocId start, LocId target);

/// phi_{start,target}(x1..xn, y1..yn): satisfied by exactly the pairs
/// (nu0, nu) with <start, nu0> ->* <target, nu>. Built as
/// exists x' z . (x = x' - z*1 /\ psi^B(y, x', z)) over the memorised
/// automaton B.
MixedFormula build_phi(const TimedAutomaton& automaton, LocId start, LocId target);

/// Decides <start, 0> ->* <target, nu> through the quotient automaton: the
/// finitely many integer-part candidates consistent with nu are tested with
/// zone membership plus Parikh membership.
bool decide_fixed_start(const TimedAutomaton& automaton, LocId start, LocId target,
                        const ClockValuation& target_val);

/// Decides <start, source> ->* <target, target_val> exactly, via the
/// memorised automaton. The reference-clock value is eliminated by tracking,
/// per clock, the difference between primed-copy wraps and reference wraps
/// inside a bounded product search, and deciding the final fractional point
/// by exact interval intersection over the accepting zone.
bool check_pair(const TimedAutomaton& automaton, LocId start, LocId target,
                const ClockValuation& source_val, const ClockValuation& target_val);

/// Caches the memorised automaton and its quotient per start location so a
/// batch of queries against one automaton shares the construction.
class ReachChecker {
public:
    explicit ReachChecker(const TimedAutomaton& automaton) : automaton_(&automaton) {}

    bool query(LocId start, LocId target, const ClockValuation& source_val,
               const ClockValuation& target_val);

    struct Compiled {
        MemorisedAutomaton mem;
        RegionNfa nfa;
        std::vector<std::vector<std::uint32_t>> reverse;  // predecessor lists
    };
    const Compiled& compiled(LocId start);

private:
    const TimedAutomaton* automaton_;
    std::map<LocId, Compiled> cache_;
};

struct GammaStats {
    std::uint32_t gamma_bits = 0;
    std::uint32_t states = 0;
    std::uint32_t transitions = 0;
};

struct PipelineStats {
    std::uint32_t quotient_states = 0;
    std::uint32_t quotient_transitions = 0;
    std::vector<GammaStats> per_gamma;
    std::uint32_t distinct_zones = 0;
    std::size_t phi_atoms = 0;
};

PipelineStats pipeline_stats(const TimedAutomaton& automaton, LocId start, LocId target);

}  // namespace tareach
