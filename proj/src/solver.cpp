#include "tareach/solver.hpp"

#include <algorithm>

namespace tareach {

namespace {

struct Domains {
    std::vector<VarBounds> d;

    [[nodiscard]] bool fixed(std::uint32_t v) const { return d[v].lo == d[v].hi; }
};

enum class PropResult { Conflict, Tight, Entailed };

/// Bounds-consistency pass over one atom; shrinks domains in place.
/// Entailed means the atom holds for every remaining assignment.
PropResult propagate_atom(const LinearAtom& atom, Domains& doms, bool& changed) {
    // sum + c REL 0; strict: sum <= -c-1, eq: both directions.
    const std::int64_t upper_rhs =
        atom.rel == Rel::Lt ? -atom.constant - 1 : -atom.constant;

    auto contribution = [&](std::uint32_t v, std::int64_t coeff, bool maximize) {
        const VarBounds& b = doms.d[v];
        const std::int64_t pick = (coeff > 0) == maximize ? b.hi : b.lo;
        return coeff * pick;
    };

    std::int64_t min_sum = 0;
    std::int64_t max_sum = 0;
    for (const auto& [v, coeff] : atom.coeffs) {
        min_sum += contribution(v, coeff, false);
        max_sum += contribution(v, coeff, true);
    }

    // Upper side: sum <= upper_rhs.
    if (min_sum > upper_rhs) {
        return PropResult::Conflict;
    }
    for (const auto& [v, coeff] : atom.coeffs) {
        const std::int64_t others_min = min_sum - contribution(v, coeff, false);
        const std::int64_t budget = upper_rhs - others_min;
        VarBounds& b = doms.d[v];
        if (coeff > 0) {
            // v <= floor(budget / coeff)
            const std::int64_t limit =
                budget >= 0 ? budget / coeff : -((-budget + coeff - 1) / coeff);
            if (limit < b.hi) {
                b.hi = limit;
                changed = true;
            }
        } else {
            // v >= ceil(budget / coeff) with coeff < 0
            const std::int64_t pos = -coeff;
            const std::int64_t limit =
                budget >= 0 ? -(budget / pos) : (-budget + pos - 1) / pos;
            if (limit > b.lo) {
                b.lo = limit;
                changed = true;
            }
        }
        if (b.lo > b.hi) {
            return PropResult::Conflict;
        }
    }

    if (atom.rel == Rel::Eq) {
        // Lower side: sum >= -c.
        const std::int64_t lower_rhs = -atom.constant;
        if (max_sum < lower_rhs) {
            return PropResult::Conflict;
        }
        for (const auto& [v, coeff] : atom.coeffs) {
            const std::int64_t others_max = max_sum - contribution(v, coeff, true);
            const std::int64_t need = lower_rhs - others_max;
            VarBounds& b = doms.d[v];
            if (coeff > 0) {
                // v >= ceil(need / coeff)
                const std::int64_t limit =
                    need >= 0 ? (need + coeff - 1) / coeff : -((-need) / coeff);
                if (limit > b.lo) {
                    b.lo = limit;
                    changed = true;
                }
            } else {
                const std::int64_t pos = -coeff;
                // v <= floor(need / coeff) with coeff < 0
                const std::int64_t limit =
                    need >= 0 ? -((need + pos - 1) / pos) : (-need) / pos;
                if (limit < b.hi) {
                    b.hi = limit;
                    changed = true;
                }
            }
            if (b.lo > b.hi) {
                return PropResult::Conflict;
            }
        }
        // Entailed iff forced to exactly -c from both sides.
        std::int64_t lo = 0;
        std::int64_t hi = 0;
        for (const auto& [v, coeff] : atom.coeffs) {
            lo += contribution(v, coeff, false);
            hi += contribution(v, coeff, true);
        }
        return (lo == hi && lo == -atom.constant) ? PropResult::Entailed : PropResult::Tight;
    }

    std::int64_t hi = 0;
    for (const auto& [v, coeff] : atom.coeffs) {
        hi += contribution(v, coeff, true);
    }
    return hi <= upper_rhs ? PropResult::Entailed : PropResult::Tight;
}

bool search(std::vector<const FormulaNode*> conjuncts, Domains doms);

/// Expands And nodes, propagates atoms to a fixpoint, then branches on the
/// smallest disjunction or the smallest unfixed variable domain.
bool search_expanded(std::vector<const LinearAtom*> atoms,
                     std::vector<const FormulaNode*> ors, Domains doms) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < atoms.size();) {
            switch (propagate_atom(*atoms[i], doms, changed)) {
                case PropResult::Conflict:
                    return false;
                case PropResult::Entailed:
                    atoms[i] = atoms.back();
                    atoms.pop_back();
                    break;
                case PropResult::Tight:
                    ++i;
                    break;
            }
        }
    }

    if (!ors.empty()) {
        auto smallest = std::min_element(ors.begin(), ors.end(),
                                         [](const FormulaNode* a, const FormulaNode* b) {
                                             return a->children.size() < b->children.size();
                                         });
        const FormulaNode* pick = *smallest;
        ors.erase(smallest);
        for (const FormulaNode& child : pick->children) {
            std::vector<const LinearAtom*> branch_atoms = atoms;
            std::vector<const FormulaNode*> branch_ors = ors;
            std::vector<const FormulaNode*> queue{&child};
            while (!queue.empty()) {
                const FormulaNode* node = queue.back();
                queue.pop_back();
                switch (node->kind) {
                    case FormulaNode::Kind::Atom:
                        branch_atoms.push_back(&node->atom);
                        break;
                    case FormulaNode::Kind::And:
                        for (const FormulaNode& sub : node->children) {
                            queue.push_back(&sub);
                        }
                        break;
                    case FormulaNode::Kind::Or:
                        branch_ors.push_back(node);
                        break;
                }
            }
            if (search_expanded(std::move(branch_atoms), std::move(branch_ors), doms)) {
                return true;
            }
        }
        return false;
    }

    // Pure conjunction of tight atoms: branch on the narrowest unfixed
    // variable among those still mentioned.
    std::uint32_t best_var = UINT32_MAX;
    std::int64_t best_width = INT64_MAX;
    for (const LinearAtom* atom : atoms) {
        for (const auto& [v, coeff] : atom->coeffs) {
            (void)coeff;
            if (!doms.fixed(v)) {
                const std::int64_t width = doms.d[v].hi - doms.d[v].lo;
                if (width < best_width) {
                    best_width = width;
                    best_var = v;
                }
            }
        }
    }
    if (best_var == UINT32_MAX) {
        return atoms.empty();  // every atom fixed yet not entailed would have conflicted
    }
    const VarBounds range = doms.d[best_var];
    for (std::int64_t value = range.lo; value <= range.hi; ++value) {
        Domains next = doms;
        next.d[best_var] = {value, value};
        if (search_expanded(atoms, ors, std::move(next))) {
            return true;
        }
    }
    return false;
}

bool search(std::vector<const FormulaNode*> conjuncts, Domains doms) {
    std::vector<const LinearAtom*> atoms;
    std::vector<const FormulaNode*> ors;
    while (!conjuncts.empty()) {
        const FormulaNode* node = conjuncts.back();
        conjuncts.pop_back();
        switch (node->kind) {
            case FormulaNode::Kind::Atom:
                atoms.push_back(&node->atom);
                break;
            case FormulaNode::Kind::And:
                for (const FormulaNode& child : node->children) {
                    conjuncts.push_back(&child);
                }
                break;
            case FormulaNode::Kind::Or:
                ors.push_back(node);
                break;
        }
    }
    return search_expanded(std::move(atoms), std::move(ors), std::move(doms));
}

}  // namespace

bool solve_bounded(const FormulaNode& matrix, const std::vector<VarBounds>& bounds) {
    for (const VarBounds& b : bounds) {
        if (b.lo > b.hi) {
            return false;
        }
    }
    return search({&matrix}, Domains{bounds});
}

}  // namespace tareach
