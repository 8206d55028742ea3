#include "tareach/parikh.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "tareach/solver.hpp"

namespace tareach {

bool parikh_member(const RegionNfa& nfa, std::uint32_t initial, const CountVector& counts,
                   std::span<const std::uint32_t> accepting) {
    if (initial >= nfa.states.size()) {
        throw SemanticError("parikh_member: initial state out of range");
    }
    auto is_accepting = [&](std::uint32_t q) {
        return std::binary_search(accepting.begin(), accepting.end(), q);
    };
    auto done = [&](const CountVector& remaining) {
        return std::all_of(remaining.begin(), remaining.end(),
                           [](std::uint32_t c) { return c == 0; });
    };

    std::set<std::pair<std::uint32_t, CountVector>> visited;
    std::deque<std::pair<std::uint32_t, CountVector>> queue;
    queue.emplace_back(initial, counts);
    visited.insert(queue.back());
    while (!queue.empty()) {
        auto [state, remaining] = queue.front();
        queue.pop_front();
        if (is_accepting(state) && done(remaining)) {
            return true;
        }
        for (const auto& [label, to] : nfa.adjacency[state]) {
            CountVector next = remaining;
            if (label != kEpsilon) {
                if (next[label] == 0) {
                    continue;
                }
                next[label] -= 1;
            }
            auto key = std::make_pair(to, std::move(next));
            if (visited.insert(key).second) {
                queue.push_back(std::move(key));
            }
        }
    }
    return false;
}

bool parikh_member(const RegionNfa& nfa, std::uint32_t initial, const CountVector& counts) {
    return parikh_member(nfa, initial, counts, nfa.accepting);
}

SemilinearEncoding parikh_encoding(const RegionNfa& nfa, std::uint32_t initial) {
    if (initial >= nfa.states.size()) {
        throw SemanticError("parikh_encoding: initial state out of range");
    }
    const std::uint32_t k = nfa.num_clocks;
    const auto num_states = static_cast<std::uint32_t>(nfa.states.size());
    const auto num_transitions = static_cast<std::uint32_t>(nfa.transitions.size());

    SemilinearEncoding enc;
    enc.alphabet = k;
    enc.num_states = num_states;
    enc.nfa = &nfa;
    enc.initial = initial;

    MixedFormula& f = enc.formula;
    for (std::uint32_t a = 0; a < k; ++a) {
        f.free_vars.push_back(VarDecl{"c" + std::to_string(a + 1), Sort::Integer});
    }
    // Bound variables: one flow per transition, one depth per state, one sink
    // indicator per accepting state.
    const std::uint32_t flow0 = k;
    for (std::uint32_t t = 0; t < num_transitions; ++t) {
        f.bound_vars.push_back(VarDecl{"u" + std::to_string(t + 1), Sort::Integer});
        if (nfa.transitions[t].label == kEpsilon) {
            ++enc.num_epsilon;
        }
    }
    const std::uint32_t depth0 = flow0 + num_transitions;
    for (std::uint32_t q = 0; q < num_states; ++q) {
        f.bound_vars.push_back(
            VarDecl{"u" + std::to_string(num_transitions + q + 1), Sort::Integer});
    }
    const std::uint32_t sink0 = depth0 + num_states;
    for (std::uint32_t i = 0; i < nfa.accepting.size(); ++i) {
        f.bound_vars.push_back(VarDecl{
            "u" + std::to_string(num_transitions + num_states + i + 1), Sort::Integer});
    }

    if (nfa.accepting.empty()) {
        f.matrix = FormulaNode::falsity();
        return enc;
    }

    auto nonneg = [](std::uint32_t var) {
        LinearAtom atom;
        atom.coeffs[var] = -1;
        atom.rel = Rel::Le;
        return FormulaNode::make_atom(std::move(atom));
    };

    std::vector<FormulaNode> conjuncts;
    for (std::uint32_t t = 0; t < num_transitions; ++t) {
        conjuncts.push_back(nonneg(flow0 + t));
    }
    for (std::uint32_t q = 0; q < num_states; ++q) {
        conjuncts.push_back(nonneg(depth0 + q));
    }
    {
        LinearAtom one_sink;
        for (std::uint32_t i = 0; i < nfa.accepting.size(); ++i) {
            conjuncts.push_back(nonneg(sink0 + i));
            one_sink.coeffs[sink0 + i] = 1;
        }
        one_sink.constant = -1;
        one_sink.rel = Rel::Eq;
        conjuncts.push_back(FormulaNode::make_atom(std::move(one_sink)));
    }

    // Flow conservation: incoming + [q = initial] = outgoing + sink_q.
    for (std::uint32_t q = 0; q < num_states; ++q) {
        LinearAtom flow;
        flow.rel = Rel::Eq;
        for (std::uint32_t t = 0; t < num_transitions; ++t) {
            if (nfa.transitions[t].to == q) {
                flow.coeffs[flow0 + t] += 1;
            }
            if (nfa.transitions[t].from == q) {
                flow.coeffs[flow0 + t] -= 1;
            }
        }
        const auto acc =
            std::lower_bound(nfa.accepting.begin(), nfa.accepting.end(), q);
        if (acc != nfa.accepting.end() && *acc == q) {
            const auto i = static_cast<std::uint32_t>(acc - nfa.accepting.begin());
            flow.coeffs[sink0 + i] -= 1;
        }
        if (q == initial) {
            flow.constant = 1;
        }
        std::erase_if(flow.coeffs, [](const auto& kv) { return kv.second == 0; });
        conjuncts.push_back(FormulaNode::make_atom(std::move(flow)));
    }

    // Letter counts.
    for (std::uint32_t a = 0; a < k; ++a) {
        LinearAtom letter;
        letter.rel = Rel::Eq;
        letter.coeffs[a] = -1;
        for (std::uint32_t t = 0; t < num_transitions; ++t) {
            if (nfa.transitions[t].label == static_cast<std::int32_t>(a)) {
                letter.coeffs[flow0 + t] += 1;
            }
        }
        std::erase_if(letter.coeffs, [](const auto& kv) { return kv.second == 0; });
        conjuncts.push_back(FormulaNode::make_atom(std::move(letter)));
    }

    // Connectivity: the initial state has depth 1; every other state is
    // either untouched by the flow (depth 0) or entered by some positive-flow
    // transition from a state one depth lower.
    {
        LinearAtom root;
        root.coeffs[depth0 + initial] = 1;
        root.constant = -1;
        root.rel = Rel::Eq;
        conjuncts.push_back(FormulaNode::make_atom(std::move(root)));
    }
    for (std::uint32_t q = 0; q < num_states; ++q) {
        if (q == initial) {
            continue;
        }
        std::vector<FormulaNode> options;
        {
            LinearAtom untouched;
            untouched.rel = Rel::Eq;
            for (std::uint32_t t = 0; t < num_transitions; ++t) {
                if (nfa.transitions[t].from == q || nfa.transitions[t].to == q) {
                    untouched.coeffs[flow0 + t] += 1;
                }
            }
            LinearAtom depth_zero;
            depth_zero.coeffs[depth0 + q] = 1;
            depth_zero.rel = Rel::Eq;
            if (untouched.coeffs.empty()) {
                options.push_back(FormulaNode::make_atom(std::move(depth_zero)));
            } else {
                options.push_back(FormulaNode::conj(
                    {FormulaNode::make_atom(std::move(untouched)),
                     FormulaNode::make_atom(std::move(depth_zero))}));
            }
        }
        for (std::uint32_t t = 0; t < num_transitions; ++t) {
            if (nfa.transitions[t].to != q || nfa.transitions[t].from == q) {
                continue;
            }
            const std::uint32_t p = nfa.transitions[t].from;
            LinearAtom used;  // y_t >= 1
            used.coeffs[flow0 + t] = -1;
            used.constant = 1;
            used.rel = Rel::Le;
            LinearAtom parent_live;  // u_p >= 1
            parent_live.coeffs[depth0 + p] = -1;
            parent_live.constant = 1;
            parent_live.rel = Rel::Le;
            LinearAtom step;  // u_q = u_p + 1
            step.coeffs[depth0 + q] = 1;
            step.coeffs[depth0 + p] = -1;
            step.constant = -1;
            step.rel = Rel::Eq;
            options.push_back(FormulaNode::conj({FormulaNode::make_atom(std::move(used)),
                                                 FormulaNode::make_atom(std::move(parent_live)),
                                                 FormulaNode::make_atom(std::move(step))}));
        }
        conjuncts.push_back(FormulaNode::disj(std::move(options)));
    }

    f.matrix = FormulaNode::conj(std::move(conjuncts));
    return enc;
}

bool SemilinearEncoding::satisfiable_at(const CountVector& counts) const {
    if (counts.size() != alphabet) {
        throw SemanticError("count vector does not match the alphabet");
    }
    if (formula.matrix == FormulaNode::falsity()) {
        return false;
    }
    std::uint32_t total = 0;
    for (std::uint32_t c : counts) {
        total += c;
    }
    std::vector<VarBounds> bounds(formula.num_vars());
    for (std::uint32_t a = 0; a < alphabet; ++a) {
        bounds[a] = {counts[a], counts[a]};
    }
    const std::uint32_t flow0 = alphabet;
    const auto num_transitions =
        static_cast<std::uint32_t>(nfa->transitions.size());
    for (std::uint32_t t = 0; t < num_transitions; ++t) {
        const std::int32_t label = nfa->transitions[t].label;
        // Visible flows are capped by their letter count; epsilon flows by
        // the longest cycle-free padding a witness path could need.
        const std::int64_t cap =
            label == kEpsilon ? static_cast<std::int64_t>(total + 1) * num_states
                              : counts[label];
        bounds[flow0 + t] = {0, cap};
    }
    const std::uint32_t depth0 = flow0 + num_transitions;
    for (std::uint32_t q = 0; q < num_states; ++q) {
        bounds[depth0 + q] = {0, static_cast<std::int64_t>(num_states) + 1};
    }
    const std::uint32_t sink0 = depth0 + num_states;
    for (std::uint32_t i = sink0; i < formula.num_vars(); ++i) {
        bounds[i] = {0, 1};
    }
    return solve_bounded(formula.matrix, bounds);
}

bool SemilinearEncoding::member(const CountVector& counts) const {
    return parikh_member(*nfa, initial, counts);
}

}  // namespace tareach
