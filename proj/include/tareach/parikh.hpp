#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tareach/formula.hpp"
#include "tareach/region_nfa.hpp"

namespace tareach {

/// Visible-wrap counts per clock.
using CountVector = std::vector<std::uint32_t>;

/// Exact decision of "counts is the Parikh vector of some accepted word",
/// via breadth-first search over (state, remaining counts); letters decrement
/// their component and transitions overshooting any count are pruned.
/// Epsilon transitions do not change counts, so the product stays finite and
/// the result exact either way.
bool parikh_member(const RegionNfa& nfa, std::uint32_t initial, const CountVector& counts);

/// Same decision against an explicit accepting set (sorted ids).
bool parikh_member(const RegionNfa& nfa, std::uint32_t initial, const CountVector& counts,
                   std::span<const std::uint32_t> accepting);

/// Existential Presburger description of the Parikh image of the language
/// from `initial`: nonnegative flow variables per transition with
/// conservation per state, a chosen sink among the accepting states,
/// spanning-tree depth variables for connectivity, and letter-count
/// equalities binding the free count variables c1..ck.
struct SemilinearEncoding {
    MixedFormula formula;  // free vars: one integer count variable per letter
    std::uint32_t alphabet = 0;
    std::uint32_t num_states = 0;
    std::uint32_t num_epsilon = 0;
    std::uint32_t total_letters_bound = 0;  // per-letter domain cap for the solver

    const RegionNfa* nfa = nullptr;  // handle for exact membership checks
    std::uint32_t initial = 0;

    /// Substitutes the counts and decides the formula with the bounded
    /// integer solver; agrees with parikh_member by construction.
    [[nodiscard]] bool satisfiable_at(const CountVector& counts) const;

    /// Exact membership through the automaton handle.
    [[nodiscard]] bool member(const CountVector& counts) const;
};

SemilinearEncoding parikh_encoding(const RegionNfa& nfa, std::uint32_t initial);

}  // namespace tareach
