#pragma once

#include <cstdint>
#include <vector>

#include "tareach/formula.hpp"

namespace tareach {

/// Inclusive variable domain for the bounded solver.
struct VarBounds {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

/// Complete satisfiability check of a positive and/or/atom matrix over
/// integer variables with the given finite domains (indexed by variable id).
/// Interval propagation over the linear atoms plus branching on disjunctions
/// and on the remaining unfixed variables. Strict atoms are integer-shifted,
/// so every variable mentioned in the matrix must be integer-sorted.
bool solve_bounded(const FormulaNode& matrix, const std::vector<VarBounds>& bounds);

}  // namespace tareach
