#include "tareach/reach.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

namespace tareach {

namespace {

/// Accepting states of the quotient for a given target location (sorted).
std::vector<std::uint32_t> accepting_for(const RegionNfa& nfa, LocId target) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t id = 0; id < nfa.states.size(); ++id) {
        if (nfa.states[id].loc == target && nfa.states[id].prophecy.empty()) {
            out.push_back(id);
        }
    }
    return out;
}

/// Accepting states grouped by zone, in first-seen order.
std::vector<std::pair<BoundedZone, std::vector<std::uint32_t>>> group_by_zone(
    const RegionNfa& nfa, const std::vector<std::uint32_t>& accepting) {
    std::vector<std::pair<BoundedZone, std::vector<std::uint32_t>>> groups;
    for (std::uint32_t id : accepting) {
        const BoundedZone& zone = nfa.states[id].zone;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == zone; });
        if (it == groups.end()) {
            groups.emplace_back(zone, std::vector<std::uint32_t>{id});
        } else {
            it->second.push_back(id);
        }
    }
    return groups;
}

std::vector<bool> forward_reachable(const RegionNfa& nfa, std::uint32_t from) {
    std::vector<bool> seen(nfa.states.size(), false);
    std::deque<std::uint32_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        const std::uint32_t q = queue.front();
        queue.pop_front();
        for (const auto& [label, to] : nfa.adjacency[q]) {
            (void)label;
            if (!seen[to]) {
                seen[to] = true;
                queue.push_back(to);
            }
        }
    }
    return seen;
}

void remap_node(FormulaNode& node, const std::function<std::uint32_t(std::uint32_t)>& f) {
    if (node.kind == FormulaNode::Kind::Atom) {
        LinearAtom remapped;
        remapped.rel = node.atom.rel;
        remapped.constant = node.atom.constant;
        for (const auto& [var, coeff] : node.atom.coeffs) {
            remapped.coeffs[f(var)] = coeff;
        }
        node.atom = std::move(remapped);
        return;
    }
    for (FormulaNode& child : node.children) {
        remap_node(child, f);
    }
}

FormulaNode nonneg_atom(std::uint32_t var) {
    LinearAtom atom;
    atom.coeffs[var] = -1;
    atom.rel = Rel::Le;
    return FormulaNode::make_atom(std::move(atom));
}

/// "x - upsilon in Z" as difference atoms over the pairs (x_i, u_i).
std::vector<FormulaNode> zone_membership_atoms(const BoundedZone& zone,
                                               const std::vector<std::uint32_t>& x_vars,
                                               const std::vector<std::uint32_t>& u_vars) {
    std::vector<FormulaNode> atoms;
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (i == j) {
                continue;
            }
            const Bound b = zone.at(i, j);
            LinearAtom atom;
            atom.rel = b.is_strict() ? Rel::Lt : Rel::Le;
            atom.constant = -b.value();
            if (i >= 1) {
                atom.coeffs[x_vars[i - 1]] += 1;
                atom.coeffs[u_vars[i - 1]] -= 1;
            }
            if (j >= 1) {
                atom.coeffs[x_vars[j - 1]] -= 1;
                atom.coeffs[u_vars[j - 1]] += 1;
            }
            std::erase_if(atom.coeffs, [](const auto& kv) { return kv.second == 0; });
            atoms.push_back(FormulaNode::make_atom(std::move(atom)));
        }
    }
    return atoms;
}

/// Integer-part candidates per clock: floor(v) always, and v - 1 when v is a
/// positive integer (the fractional part may sit on either end of [0,1]).
std::vector<std::vector<std::uint32_t>> int_part_candidates(const ClockValuation& v) {
    std::vector<std::vector<std::uint32_t>> candidates(v.size());
    for (ClockId x = 0; x < v.size(); ++x) {
        const std::int64_t fl = v[x].floor();
        candidates[x].push_back(static_cast<std::uint32_t>(fl));
        if (v[x].is_integer() && fl >= 1) {
            candidates[x].push_back(static_cast<std::uint32_t>(fl - 1));
        }
    }
    return candidates;
}

}  // namespace

MixedFormula build_psi(const TimedAutomaton& automaton, LocId start, LocId target) {
    const std::uint32_t n = automaton.num_clocks();
    MixedFormula psi;
    for (std::uint32_t i = 0; i < n; ++i) {
        psi.free_vars.push_back(VarDecl{"x" + std::to_string(i + 1), Sort::Real});
    }

    const RegionNfa nfa = build_nfa(automaton, start, target);
    const auto groups = group_by_zone(nfa, nfa.accepting);
    if (groups.empty()) {
        psi.matrix = FormulaNode::falsity();
        return psi;
    }

    std::map<std::uint32_t, std::vector<bool>> reach;
    for (const auto& [gamma, init] : nfa.initial) {
        reach.emplace(gamma, forward_reachable(nfa, init));
    }

    std::vector<FormulaNode> disjuncts;
    RegionNfa scratch = nfa;
    for (const auto& [zone, acc] : groups) {
        scratch.accepting = acc;
        for (const auto& [gamma, init] : nfa.initial) {
            const std::vector<bool>& reachable = reach.at(gamma);
            if (std::none_of(acc.begin(), acc.end(),
                             [&](std::uint32_t q) { return reachable[q]; })) {
                continue;
            }
            const SemilinearEncoding enc = parikh_encoding(scratch, init);

            // Fresh integer-part variables, then the encoding's own bound block.
            std::vector<std::uint32_t> u_vars;
            for (std::uint32_t i = 0; i < n; ++i) {
                u_vars.push_back(psi.num_vars());
                psi.bound_vars.push_back(VarDecl{"u", Sort::Integer});
            }
            const std::uint32_t enc_base = psi.num_vars();
            for (const VarDecl& decl : enc.formula.bound_vars) {
                psi.bound_vars.push_back(decl);
            }
            FormulaNode flow = enc.formula.matrix;
            remap_node(flow, [&](std::uint32_t v) {
                return v < n ? u_vars[v] : enc_base + (v - n);
            });

            std::vector<FormulaNode> parts{std::move(flow)};
            std::vector<std::uint32_t> x_vars;
            for (std::uint32_t i = 0; i < n; ++i) {
                x_vars.push_back(i);
                parts.push_back(nonneg_atom(i));
            }
            for (FormulaNode& atom : zone_membership_atoms(zone, x_vars, u_vars)) {
                parts.push_back(std::move(atom));
            }
            disjuncts.push_back(FormulaNode::conj(std::move(parts)));
        }
    }

    if (disjuncts.empty()) {
        psi.bound_vars.clear();
        psi.matrix = FormulaNode::falsity();
        return psi;
    }
    psi.matrix = FormulaNode::disj(std::move(disjuncts));
    canonicalize_bound_names(psi);
    return psi;
}

MixedFormula build_phi(const TimedAutomaton& automaton, LocId start, LocId target) {
    const std::uint32_t n = automaton.num_clocks();
    if (target >= automaton.num_locations()) {
        throw SemanticError("build_phi: target location out of range");
    }
    MixedFormula phi;
    for (std::uint32_t i = 0; i < n; ++i) {
        phi.free_vars.push_back(VarDecl{"x" + std::to_string(i + 1), Sort::Real});
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        phi.free_vars.push_back(VarDecl{"y" + std::to_string(i + 1), Sort::Real});
    }

    const MemorisedAutomaton mem = memorise(automaton, start);
    MixedFormula psi = build_psi(mem.automaton, mem.pre_start, target);
    if (psi.matrix == FormulaNode::falsity()) {
        phi.matrix = FormulaNode::falsity();
        return phi;
    }

    // Bound block: primed-source copies, the reference offset, then psi's own
    // existentials.
    std::vector<std::uint32_t> primed_vars;
    for (std::uint32_t i = 0; i < n; ++i) {
        primed_vars.push_back(phi.num_vars());
        phi.bound_vars.push_back(VarDecl{"f", Sort::Real});
    }
    const std::uint32_t z_var = phi.num_vars();
    phi.bound_vars.push_back(VarDecl{"f", Sort::Real});
    const std::uint32_t psi_base = phi.num_vars();
    for (const VarDecl& decl : psi.bound_vars) {
        phi.bound_vars.push_back(decl);
    }

    // psi^B's free variables are B's clocks at the target configuration:
    // unprimed -> y, primed -> bound x', reference -> bound z.
    remap_node(psi.matrix, [&](std::uint32_t v) {
        if (v < n) {
            return n + v;  // y block
        }
        if (v < 2 * n) {
            return primed_vars[v - n];
        }
        if (v == 2 * n) {
            return z_var;
        }
        return psi_base + (v - (2 * n + 1));
    });

    std::vector<FormulaNode> parts;
    for (std::uint32_t i = 0; i < n; ++i) {
        LinearAtom eq;  // x_i = x'_i - z
        eq.coeffs[i] = 1;
        eq.coeffs[primed_vars[i]] = -1;
        eq.coeffs[z_var] = 1;
        eq.rel = Rel::Eq;
        parts.push_back(FormulaNode::make_atom(std::move(eq)));
    }
    parts.push_back(std::move(psi.matrix));
    phi.matrix = FormulaNode::conj(std::move(parts));
    canonicalize_bound_names(phi);
    return phi;
}

bool decide_fixed_start(const TimedAutomaton& automaton, LocId start, LocId target,
                        const ClockValuation& target_val) {
    const std::uint32_t n = automaton.num_clocks();
    if (target_val.size() != n) {
        throw SemanticError("valuation dimension mismatch");
    }
    for (const Rational& v : target_val.values) {
        if (!v.is_nonnegative()) {
            throw SemanticError("negative clock value in query");
        }
    }
    const RegionNfa nfa = build_nfa(automaton, start, target);
    if (nfa.accepting.empty()) {
        return false;
    }
    const auto groups = group_by_zone(nfa, nfa.accepting);
    const auto candidates = int_part_candidates(target_val);

    std::vector<std::uint32_t> pick(n, 0);
    std::function<bool(std::uint32_t)> enumerate = [&](std::uint32_t x) -> bool {
        if (x == n) {
            CountVector counts(n);
            std::vector<Rational> frac(n);
            for (std::uint32_t i = 0; i < n; ++i) {
                counts[i] = candidates[i][pick[i]];
                frac[i] = target_val[i] - Rational(static_cast<std::int64_t>(counts[i]));
            }
            for (const auto& [zone, acc] : groups) {
                if (!zone_member(zone, frac)) {
                    continue;
                }
                for (const auto& [gamma, init] : nfa.initial) {
                    (void)gamma;
                    if (parikh_member(nfa, init, counts, acc)) {
                        return true;
                    }
                }
            }
            return false;
        }
        for (std::uint32_t c = 0; c < candidates[x].size(); ++c) {
            pick[x] = c;
            if (enumerate(x + 1)) {
                return true;
            }
        }
        return false;
    };
    return enumerate(0);
}

namespace {

/// Is there a fractional reference value t in [0,1] such that the point
/// (fx, sigma - d + t, t) lies in the accepting zone? All coordinates are
/// affine in t with coefficient 0 or 1, so every zone bound is an interval
/// constraint on t.
bool reference_fraction_feasible(const BoundedZone& zone, std::uint32_t n,
                                 const std::vector<Rational>& frac_x,
                                 const ClockValuation& source_val,
                                 const std::vector<std::int64_t>& diff) {
    struct Expr {
        Rational constant;
        int coef = 0;  // of t
    };
    std::vector<Expr> coord(zone.dim());
    coord[0] = {Rational(0), 0};
    for (std::uint32_t i = 0; i < n; ++i) {
        coord[1 + i] = {frac_x[i], 0};
        coord[1 + n + i] = {source_val[i] - Rational(diff[i]), 1};
    }
    coord[2 * n + 1] = {Rational(0), 1};

    std::optional<Rational> lo;
    bool lo_strict = false;
    std::optional<Rational> hi;
    bool hi_strict = false;
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (i == j) {
                continue;
            }
            const Bound b = zone.at(i, j);
            const Rational value(b.value());
            const Rational base = coord[i].constant - coord[j].constant;
            const int coef = coord[i].coef - coord[j].coef;
            if (coef == 0) {
                if (!(b.is_strict() ? base < value : base <= value)) {
                    return false;
                }
            } else if (coef == 1) {
                const Rational bound = value - base;  // t <= / < bound
                if (!hi || bound < *hi || (bound == *hi && b.is_strict() && !hi_strict)) {
                    hi = bound;
                    hi_strict = b.is_strict();
                }
            } else {
                const Rational bound = base - value;  // t >= / > bound
                if (!lo || bound > *lo || (bound == *lo && b.is_strict() && !lo_strict)) {
                    lo = bound;
                    lo_strict = b.is_strict();
                }
            }
        }
    }
    if (!lo || !hi) {
        return true;
    }
    if (*lo < *hi) {
        return true;
    }
    return *lo == *hi && !lo_strict && !hi_strict;
}

}  // namespace

const ReachChecker::Compiled& ReachChecker::compiled(LocId start) {
    auto it = cache_.find(start);
    if (it == cache_.end()) {
        Compiled c;
        c.mem = memorise(*automaton_, start);
        c.nfa = build_nfa(c.mem.automaton, c.mem.pre_start, 0);
        c.reverse.assign(c.nfa.states.size(), {});
        for (const NfaTransition& t : c.nfa.transitions) {
            c.reverse[t.to].push_back(t.from);
        }
        it = cache_.emplace(start, std::move(c)).first;
    }
    return it->second;
}

bool ReachChecker::query(LocId start, LocId target, const ClockValuation& source_val,
                         const ClockValuation& target_val) {
    const std::uint32_t n = automaton_->num_clocks();
    if (start >= automaton_->num_locations() || target >= automaton_->num_locations()) {
        throw SemanticError("query location out of range");
    }
    if (source_val.size() != n || target_val.size() != n) {
        throw SemanticError("valuation dimension mismatch");
    }
    for (const ClockValuation* v : {&source_val, &target_val}) {
        for (const Rational& value : v->values) {
            if (!value.is_nonnegative()) {
                throw SemanticError("negative clock value in query");
            }
        }
    }

    const Compiled& c = compiled(start);
    const RegionNfa& nfa = c.nfa;
    const auto accepting = accepting_for(nfa, target);
    if (accepting.empty()) {
        return false;
    }

    // Co-reachability prune.
    std::vector<bool> useful(nfa.states.size(), false);
    {
        std::deque<std::uint32_t> queue;
        for (std::uint32_t q : accepting) {
            useful[q] = true;
            queue.push_back(q);
        }
        while (!queue.empty()) {
            const std::uint32_t q = queue.front();
            queue.pop_front();
            for (std::uint32_t p : c.reverse[q]) {
                if (!useful[p]) {
                    useful[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }

    // Remaining-count budget per original clock, from the target valuation.
    std::vector<std::uint32_t> budget(n);
    std::vector<bool> allow_one(n);  // may leave one wrap unused (fraction 1)
    for (std::uint32_t x = 0; x < n; ++x) {
        const std::int64_t fl = target_val[x].floor();
        budget[x] = static_cast<std::uint32_t>(fl);
        allow_one[x] = target_val[x].is_integer() && fl >= 1;
    }

    // Window for the per-clock difference between primed-copy wraps and
    // reference wraps; any witness can be normalised to stay within it.
    std::int64_t sigma_ceil = 0;
    for (std::uint32_t x = 0; x < n; ++x) {
        const std::int64_t fl = source_val[x].floor();
        sigma_ceil = std::max(sigma_ceil, source_val[x].is_integer() ? fl : fl + 1);
    }
    const std::int64_t d_lo = -3;
    const std::int64_t d_hi = sigma_ceil + 3;
    const auto d_range = static_cast<std::uint32_t>(d_hi - d_lo + 1);

    // Node encoding: state, remaining budget per clock, diff offsets.
    std::vector<std::uint32_t> widths{static_cast<std::uint32_t>(nfa.states.size())};
    for (std::uint32_t x = 0; x < n; ++x) {
        widths.push_back(budget[x] + 1);
    }
    for (std::uint32_t x = 0; x < n; ++x) {
        widths.push_back(d_range);
    }
    std::uint64_t capacity = 1;
    bool packable = true;
    for (std::uint32_t w : widths) {
        if (capacity > UINT64_MAX / std::max(w, 1u)) {
            packable = false;
            break;
        }
        capacity *= std::max(w, 1u);
    }
    if (!packable) {
        throw SemanticError("query values too large for the product search");
    }

    auto encode = [&](std::uint32_t q, const std::vector<std::uint32_t>& rem,
                      const std::vector<std::int64_t>& d) {
        std::uint64_t key = q;
        for (std::uint32_t x = 0; x < n; ++x) {
            key = key * widths[1 + x] + rem[x];
        }
        for (std::uint32_t x = 0; x < n; ++x) {
            key = key * d_range + static_cast<std::uint64_t>(d[x] - d_lo);
        }
        return key;
    };

    struct Node {
        std::uint32_t q;
        std::vector<std::uint32_t> rem;
        std::vector<std::int64_t> d;
    };
    std::unordered_set<std::uint64_t> visited;
    std::deque<Node> queue;
    auto push = [&](std::uint32_t q, std::vector<std::uint32_t> rem,
                    std::vector<std::int64_t> d) {
        if (!useful[q]) {
            return;
        }
        const std::uint64_t key = encode(q, rem, d);
        if (visited.insert(key).second) {
            queue.push_back(Node{q, std::move(rem), std::move(d)});
        }
    };

    for (const auto& [gamma, init] : nfa.initial) {
        (void)gamma;
        push(init, budget, std::vector<std::int64_t>(n, 0));
    }

    const auto is_accepting = [&](std::uint32_t q) {
        return std::binary_search(accepting.begin(), accepting.end(), q);
    };

    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();

        if (is_accepting(node.q)) {
            // Enumerate the remaining-budget patterns that correspond to a
            // consistent integer-part choice and test the fractional point.
            bool pattern_ok = true;
            for (std::uint32_t x = 0; x < n && pattern_ok; ++x) {
                pattern_ok = node.rem[x] == 0 || (node.rem[x] == 1 && allow_one[x]);
            }
            if (pattern_ok) {
                std::vector<Rational> frac_x(n);
                for (std::uint32_t x = 0; x < n; ++x) {
                    const std::uint32_t used = budget[x] - node.rem[x];
                    frac_x[x] = target_val[x] - Rational(static_cast<std::int64_t>(used));
                }
                if (reference_fraction_feasible(nfa.states[node.q].zone, n, frac_x,
                                                source_val, node.d)) {
                    return true;
                }
            }
        }

        for (const auto& [label, to] : nfa.adjacency[node.q]) {
            std::vector<std::uint32_t> rem = node.rem;
            std::vector<std::int64_t> d = node.d;
            if (label != kEpsilon) {
                const auto letter = static_cast<std::uint32_t>(label);
                if (letter < n) {
                    if (rem[letter] == 0) {
                        continue;
                    }
                    rem[letter] -= 1;
                } else if (letter < 2 * n) {
                    if (++d[letter - n] > d_hi) {
                        continue;
                    }
                } else {
                    bool out = false;
                    for (std::uint32_t x = 0; x < n; ++x) {
                        if (--d[x] < d_lo) {
                            out = true;
                            break;
                        }
                    }
                    if (out) {
                        continue;
                    }
                }
            }
            push(to, std::move(rem), std::move(d));
        }
    }
    return false;
}

bool check_pair(const TimedAutomaton& automaton, LocId start, LocId target,
                const ClockValuation& source_val, const ClockValuation& target_val) {
    ReachChecker checker(automaton);
    return checker.query(start, target, source_val, target_val);
}

PipelineStats pipeline_stats(const TimedAutomaton& automaton, LocId start, LocId target) {
    PipelineStats stats;
    const MemorisedAutomaton mem = memorise(automaton, start);
    const RegionNfa nfa = build_nfa(mem.automaton, mem.pre_start, target);
    stats.quotient_states = static_cast<std::uint32_t>(nfa.states.size());
    stats.quotient_transitions = static_cast<std::uint32_t>(nfa.transitions.size());

    std::set<std::vector<std::int8_t>> zones;
    for (const RegionState& state : nfa.states) {
        zones.insert(state.zone.raw_bytes());
    }
    stats.distinct_zones = static_cast<std::uint32_t>(zones.size());

    for (const auto& [gamma, init] : nfa.initial) {
        const auto reachable = forward_reachable(nfa, init);
        GammaStats g;
        g.gamma_bits = gamma;
        g.states = static_cast<std::uint32_t>(
            std::count(reachable.begin(), reachable.end(), true));
        for (const NfaTransition& t : nfa.transitions) {
            if (reachable[t.from]) {
                ++g.transitions;
            }
        }
        stats.per_gamma.push_back(g);
    }

    stats.phi_atoms = count_atoms(build_phi(automaton, start, target).matrix);
    return stats;
}

}  // namespace tareach
