#include "tareach/region_nfa.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace tareach {

namespace {

std::string fresh_name(std::string base, const std::vector<std::string>& taken) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) {
        base += "'";
    }
    return base;
}

std::vector<std::uint32_t> capped_for_guard(const CappedIntVector& ints, std::uint32_t cap) {
    std::vector<std::uint32_t> result(ints.v.size());
    for (std::size_t i = 0; i < ints.v.size(); ++i) {
        result[i] = std::min(ints.v[i], cap);
    }
    return result;
}

}  // namespace

void RegionNfa::rebuild_adjacency() {
    adjacency.assign(states.size(), {});
    for (const NfaTransition& t : transitions) {
        adjacency[t.from].emplace_back(t.label, t.to);
    }
}

bool RegionNfa::is_accepting(std::uint32_t state) const {
    return std::binary_search(accepting.begin(), accepting.end(), state);
}

MemorisedAutomaton memorise(const TimedAutomaton& automaton, LocId start) {
    if (start >= automaton.num_locations()) {
        throw SemanticError("memorise: start location out of range");
    }
    MemorisedAutomaton result;
    result.original_clocks = automaton.num_clocks();

    TimedAutomaton& derived = result.automaton;
    derived.clocks = automaton.clocks;
    for (const std::string& name : automaton.clocks) {
        derived.clocks.push_back(fresh_name(name + "'", derived.clocks));
    }
    derived.clocks.push_back(fresh_name("z", derived.clocks));

    derived.locations = automaton.locations;
    const std::string pre_name =
        fresh_name(automaton.locations[start] + "'", derived.locations);
    derived.locations.push_back(pre_name);
    result.pre_start = derived.num_locations() - 1;

    derived.edges = automaton.edges;
    for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
        Edge loop;
        loop.source = result.pre_start;
        loop.target = result.pre_start;
        loop.resets.add(x);
        loop.resets.add(result.primed(x));
        derived.edges.push_back(loop);
    }
    Edge enter;
    enter.source = result.pre_start;
    enter.target = start;
    enter.resets.add(result.reference());
    derived.edges.push_back(enter);

    derived.finalize();
    return result;
}

std::vector<std::pair<std::int32_t, RegionState>> region_successors(
    const TimedAutomaton& automaton, const RegionState& state) {
    const std::uint32_t n = automaton.num_clocks();
    const std::uint32_t guard_cap = automaton.c_max + 1;
    std::vector<std::pair<std::int32_t, RegionState>> result;
    auto push = [&](std::int32_t label, RegionState succ) {
        for (const auto& [l, s] : result) {
            if (l == label && s == succ) {
                return;
            }
        }
        result.emplace_back(label, std::move(succ));
    };

    // (1) delay
    push(kEpsilon, RegionState{state.loc, state.ints, time_successor(state.zone),
                               state.prophecy});

    // (2) wrapping, visible unless the clock is still to be reset
    for (ClockId x = 0; x < n; ++x) {
        auto face = wrap_face(state.zone, x);
        if (!face) {
            continue;
        }
        CappedIntVector ints = state.ints;
        ints.bump(x);
        const std::int32_t label =
            state.prophecy.contains(x) ? kEpsilon : static_cast<std::int32_t>(x);
        push(label, RegionState{state.loc, std::move(ints), std::move(*face), state.prophecy});
    }

    // (3) discrete, for every guess of reset clocks never reset again
    const std::vector<std::uint32_t> guard_ints = capped_for_guard(state.ints, guard_cap);
    for (std::uint32_t e = 0; e < automaton.edges.size(); ++e) {
        const Edge& edge = automaton.edges[e];
        if (edge.source != state.loc || !edge.resets.subset_of(state.prophecy)) {
            continue;
        }
        auto restricted = guard_restrict(state.zone, guard_ints, guard_cap, edge.guard);
        if (!restricted) {
            continue;
        }
        const BoundedZone after = zone_reset(*restricted, edge.resets);
        CappedIntVector ints = state.ints;
        ints.reset(edge.resets);
        const std::uint32_t lambda = edge.resets.bits();
        for (std::uint32_t d = 0; d <= lambda; ++d) {
            if ((d & lambda) != d) {
                continue;
            }
            push(kEpsilon, RegionState{edge.target, ints, after,
                                       state.prophecy - ClockSet(d)});
        }
    }
    return result;
}

RegionNfa build_nfa(const TimedAutomaton& automaton, LocId start, LocId target) {
    if (start >= automaton.num_locations() || target >= automaton.num_locations()) {
        throw SemanticError("build_nfa: location out of range");
    }
    const std::uint32_t n = automaton.num_clocks();
    const std::uint32_t cap = automaton.c_max + 1;

    RegionNfa nfa;
    nfa.num_clocks = n;
    std::unordered_map<RegionState, std::uint32_t, RegionStateHash> intern;
    std::deque<std::uint32_t> queue;
    auto intern_state = [&](const RegionState& state) {
        auto [it, inserted] = intern.emplace(state, static_cast<std::uint32_t>(nfa.states.size()));
        if (inserted) {
            nfa.states.push_back(state);
            queue.push_back(it->second);
        }
        return it->second;
    };

    for (std::uint32_t gamma = 0; gamma < (1u << n); ++gamma) {
        const std::uint32_t id = intern_state(RegionState{
            start, CappedIntVector::zero(n, cap), BoundedZone::zero_point(n), ClockSet(gamma)});
        nfa.initial.emplace(gamma, id);
    }

    std::set<NfaTransition> transitions;
    while (!queue.empty()) {
        const std::uint32_t id = queue.front();
        queue.pop_front();
        const RegionState state = nfa.states[id];  // copy: vector may reallocate
        for (auto& [label, succ] : region_successors(automaton, state)) {
            const std::uint32_t to = intern_state(succ);
            if (to == id && label == kEpsilon) {
                continue;  // delay on a time-closed zone
            }
            transitions.insert(NfaTransition{id, label, to});
        }
    }

    nfa.transitions.assign(transitions.begin(), transitions.end());
    for (std::uint32_t id = 0; id < nfa.states.size(); ++id) {
        if (nfa.states[id].loc == target && nfa.states[id].prophecy.empty()) {
            nfa.accepting.push_back(id);
        }
    }
    nfa.rebuild_adjacency();
    return nfa;
}

std::vector<std::vector<std::uint32_t>> epsilon_closures(const RegionNfa& nfa) {
    std::vector<std::vector<std::uint32_t>> closures(nfa.states.size());
    for (std::uint32_t q = 0; q < nfa.states.size(); ++q) {
        std::vector<bool> seen(nfa.states.size(), false);
        std::deque<std::uint32_t> queue{q};
        seen[q] = true;
        while (!queue.empty()) {
            const std::uint32_t cur = queue.front();
            queue.pop_front();
            closures[q].push_back(cur);
            for (const auto& [label, to] : nfa.adjacency[cur]) {
                if (label == kEpsilon && !seen[to]) {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        std::sort(closures[q].begin(), closures[q].end());
    }
    return closures;
}

RegionNfa eliminate_epsilon(const RegionNfa& nfa) {
    RegionNfa result;
    result.num_clocks = nfa.num_clocks;
    result.states = nfa.states;
    result.initial = nfa.initial;

    const auto closures = epsilon_closures(nfa);
    std::set<NfaTransition> transitions;
    std::set<std::uint32_t> accepting;
    for (std::uint32_t q = 0; q < nfa.states.size(); ++q) {
        for (std::uint32_t mid : closures[q]) {
            if (nfa.is_accepting(mid)) {
                accepting.insert(q);
            }
            for (const auto& [label, to] : nfa.adjacency[mid]) {
                if (label != kEpsilon) {
                    transitions.insert(NfaTransition{q, label, to});
                }
            }
        }
    }
    result.transitions.assign(transitions.begin(), transitions.end());
    result.accepting.assign(accepting.begin(), accepting.end());
    result.rebuild_adjacency();
    return result;
}

std::vector<Configuration> replay_concrete(const TimedAutomaton& automaton,
                                           const ConcreteRun& run) {
    if (run.start >= automaton.num_locations() ||
        run.init.size() != automaton.num_clocks()) {
        throw SemanticError("concrete run does not match the automaton");
    }
    std::vector<Configuration> trajectory{Configuration{run.start, run.init}};
    for (const ConcreteStep& step : run.steps) {
        const Configuration& cur = trajectory.back();
        if (step.kind == ConcreteStep::Kind::Delay) {
            trajectory.push_back(Configuration{cur.location, delay(cur.valuation, step.delay)});
        } else {
            if (step.edge >= automaton.edges.size()) {
                throw SemanticError("concrete run references a missing edge");
            }
            const Edge& edge = automaton.edges[step.edge];
            if (edge.source != cur.location || !eval_guard(edge.guard, cur.valuation)) {
                throw SemanticError("concrete run takes a disabled edge");
            }
            trajectory.push_back(
                Configuration{edge.target, apply_reset(cur.valuation, edge.resets)});
        }
    }
    return trajectory;
}

RegionState apply_region_step(const TimedAutomaton& automaton, const RegionState& state,
                              const RegionStep& step) {
    const std::uint32_t guard_cap = automaton.c_max + 1;
    RegionState next = state;
    switch (step.kind) {
        case RegionStep::Kind::Delay:
            next.zone = time_successor(next.zone);
            break;
        case RegionStep::Kind::Wrap: {
            auto face = wrap_face(next.zone, step.clock);
            if (!face) {
                throw SemanticError("region run wraps a clock away from its face");
            }
            next.zone = std::move(*face);
            next.ints.bump(step.clock);
            break;
        }
        case RegionStep::Kind::Discrete: {
            if (step.edge >= automaton.edges.size()) {
                throw SemanticError("region run references a missing edge");
            }
            const Edge& edge = automaton.edges[step.edge];
            if (edge.source != next.loc || !edge.resets.subset_of(next.prophecy) ||
                !step.dropped.subset_of(edge.resets)) {
                throw SemanticError("region run takes an illegal discrete step");
            }
            auto restricted = guard_restrict(
                next.zone, capped_for_guard(next.ints, guard_cap), guard_cap, edge.guard);
            if (!restricted) {
                throw SemanticError("region run violates a guard");
            }
            next.zone = zone_reset(*restricted, edge.resets);
            next.ints.reset(edge.resets);
            next.prophecy = next.prophecy - step.dropped;
            next.loc = edge.target;
            break;
        }
    }
    return next;
}

std::vector<RegionState> replay_region(const TimedAutomaton& automaton, const RegionRun& run) {
    const std::uint32_t n = automaton.num_clocks();
    if (run.start >= automaton.num_locations()) {
        throw SemanticError("region run start out of range");
    }
    std::vector<RegionState> states;
    states.push_back(RegionState{run.start, CappedIntVector::zero(n, UINT32_MAX),
                                 BoundedZone::zero_point(n), run.gamma0});
    for (const RegionStep& step : run.steps) {
        states.push_back(apply_region_step(automaton, states.back(), step));
    }
    return states;
}

RegionRun abstract_run(const TimedAutomaton& automaton, const ConcreteRun& run,
                       ClockSet prophecy) {
    const auto trajectory = replay_concrete(automaton, run);  // validates legality
    const std::uint32_t n = automaton.num_clocks();
    const std::uint32_t guard_cap = automaton.c_max + 1;
    if (run.init != ClockValuation::zero(n)) {
        throw SemanticError("abstract_run requires the all-zeros start valuation");
    }

    // Suffix reset sets; the prophecy at step i is the union of resets taken
    // at steps >= i.
    std::vector<ClockSet> suffix(run.steps.size() + 1);
    for (std::size_t i = run.steps.size(); i-- > 0;) {
        suffix[i] = suffix[i + 1];
        if (run.steps[i].kind == ConcreteStep::Kind::Edge) {
            suffix[i] = suffix[i] | automaton.edges[run.steps[i].edge].resets;
        }
    }
    if (suffix[0] != prophecy) {
        throw SemanticError("prophecy does not match the clocks reset along the run");
    }

    RegionRun region{run.start, prophecy, {}};
    BoundedZone zone = BoundedZone::zero_point(n);
    std::vector<std::uint32_t> ints(n, 0);
    std::vector<Rational> frac(n, Rational(0));
    ClockSet gamma = prophecy;

    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const ConcreteStep& step = run.steps[i];
        if (step.kind == ConcreteStep::Kind::Delay) {
            Rational remaining = step.delay;
            while (remaining > Rational(0)) {
                region.steps.push_back(RegionStep{RegionStep::Kind::Delay, 0, 0, {}});
                zone = time_successor(zone);
                Rational to_boundary(1);
                for (ClockId x = 0; x < n; ++x) {
                    const Rational gap = Rational(1) - frac[x];
                    if (gap < to_boundary) {
                        to_boundary = gap;
                    }
                }
                const Rational advance = remaining < to_boundary ? remaining : to_boundary;
                for (ClockId x = 0; x < n; ++x) {
                    frac[x] = frac[x] + advance;
                }
                remaining = remaining - advance;
                for (ClockId x = 0; x < n; ++x) {
                    if (frac[x] != Rational(1)) {
                        continue;
                    }
                    region.steps.push_back(RegionStep{RegionStep::Kind::Wrap, x, 0, {}});
                    auto face = wrap_face(zone, x);
                    if (!face) {
                        throw SemanticError("abstraction lost the wrap face invariant");
                    }
                    zone = std::move(*face);
                    ints[x] += 1;
                    frac[x] = Rational(0);
                }
            }
        } else {
            const Edge& edge = automaton.edges[step.edge];
            const ClockSet gamma_next = suffix[i + 1];
            const ClockSet dropped = gamma - gamma_next;
            if (!dropped.subset_of(edge.resets)) {
                throw SemanticError("abstraction dropped clocks outside the edge resets");
            }
            region.steps.push_back(
                RegionStep{RegionStep::Kind::Discrete, 0, step.edge, dropped});
            std::vector<std::uint32_t> capped(n);
            for (ClockId x = 0; x < n; ++x) {
                capped[x] = std::min(ints[x], guard_cap);
            }
            auto restricted = guard_restrict(zone, capped, guard_cap, edge.guard);
            if (!restricted) {
                throw SemanticError("abstraction lost the guard invariant");
            }
            zone = zone_reset(*restricted, edge.resets);
            for (ClockId x = 0; x < n; ++x) {
                if (edge.resets.contains(x)) {
                    ints[x] = 0;
                    frac[x] = Rational(0);
                }
            }
            gamma = gamma_next;
        }
    }

    if (!zone_member(zone, frac)) {
        throw SemanticError("abstraction lost the fractional membership invariant");
    }
    return region;
}

namespace {

/// Deterministic pick from a rational interval given as lower/upper bounds
/// with strictness; the interval is known to be nonempty.
Rational pick_from_interval(const Rational& lo, bool lo_strict, const Rational& hi,
                            bool hi_strict) {
    if (!lo_strict) {
        return lo;
    }
    if (!hi_strict) {
        return hi;
    }
    return (lo + hi) / Rational(2);
}

}  // namespace

ConcreteRun concretize_run(const TimedAutomaton& automaton, const RegionRun& run,
                           const std::vector<Rational>& final_fraction) {
    const auto states = replay_region(automaton, run);  // validates legality
    const std::uint32_t n = automaton.num_clocks();
    if (!zone_member(states.back().zone, final_fraction)) {
        throw SemanticError("final fraction lies outside the final zone");
    }

    // Backward choice of fractional points, one per region state.
    std::vector<std::vector<Rational>> frac(states.size());
    std::vector<Rational> delays(run.steps.size(), Rational(0));
    frac.back() = final_fraction;
    for (std::size_t j = run.steps.size(); j-- > 0;) {
        const RegionStep& step = run.steps[j];
        const std::vector<Rational>& after = frac[j + 1];
        const BoundedZone& before_zone = states[j].zone;
        switch (step.kind) {
            case RegionStep::Kind::Delay: {
                Rational lo(0);
                bool lo_strict = false;
                Rational hi(2);
                bool hi_strict = false;
                for (ClockId x = 0; x < n; ++x) {
                    const Bound upper = before_zone.at(x + 1, 0);
                    const Rational cand_lo = after[x] - Rational(upper.value());
                    if (cand_lo > lo || (cand_lo == lo && upper.is_strict() && !lo_strict)) {
                        lo = cand_lo;
                        lo_strict = upper.is_strict();
                    }
                    const Bound lower = before_zone.at(0, x + 1);
                    const Rational cand_hi = Rational(lower.value()) + after[x];
                    if (cand_hi < hi || (cand_hi == hi && lower.is_strict() && !hi_strict)) {
                        hi = cand_hi;
                        hi_strict = lower.is_strict();
                    }
                }
                const Rational d = pick_from_interval(lo, lo_strict, hi, hi_strict);
                delays[j] = d;
                frac[j].resize(n);
                for (ClockId x = 0; x < n; ++x) {
                    frac[j][x] = after[x] - d;
                }
                break;
            }
            case RegionStep::Kind::Wrap: {
                frac[j] = after;
                frac[j][step.clock] = Rational(1);
                break;
            }
            case RegionStep::Kind::Discrete: {
                const Edge& edge = automaton.edges[step.edge];
                std::vector<std::uint32_t> capped(n);
                for (ClockId x = 0; x < n; ++x) {
                    capped[x] = std::min(states[j].ints.v[x], automaton.c_max + 1);
                }
                auto enabled =
                    guard_restrict(before_zone, capped, automaton.c_max + 1, edge.guard);
                if (!enabled) {
                    throw SemanticError("concretization lost the guard zone");
                }
                std::vector<std::optional<Rational>> pins(n);
                for (ClockId x = 0; x < n; ++x) {
                    if (!edge.resets.contains(x)) {
                        pins[x] = after[x];
                    }
                }
                auto point = zone_find_point(*enabled, pins);
                if (!point) {
                    throw SemanticError("concretization found no guard-satisfying preimage");
                }
                frac[j] = std::move(*point);
                break;
            }
        }
        if (!zone_member(states[j].zone, frac[j])) {
            throw SemanticError("concretization left the zone invariant");
        }
    }

    ConcreteRun concrete{run.start, ClockValuation::zero(n), {}};
    for (std::size_t j = 0; j < run.steps.size(); ++j) {
        switch (run.steps[j].kind) {
            case RegionStep::Kind::Delay:
                concrete.steps.push_back(
                    ConcreteStep{ConcreteStep::Kind::Delay, delays[j], 0});
                break;
            case RegionStep::Kind::Wrap:
                break;  // zero time, same configuration
            case RegionStep::Kind::Discrete:
                concrete.steps.push_back(
                    ConcreteStep{ConcreteStep::Kind::Edge, Rational(0), run.steps[j].edge});
                break;
        }
    }
    return concrete;
}

std::string to_dot(const RegionNfa& nfa, const TimedAutomaton& automaton) {
    std::ostringstream out;
    out << "digraph region_nfa {\n  rankdir=LR;\n";
    for (std::uint32_t id = 0; id < nfa.states.size(); ++id) {
        const RegionState& s = nfa.states[id];
        std::ostringstream label;
        label << automaton.locations[s.loc] << " | (";
        for (std::uint32_t i = 0; i < s.ints.v.size(); ++i) {
            label << (i ? "," : "") << s.ints.v[i];
        }
        label << ") | " << s.zone.to_string(automaton.clocks) << " | {";
        bool first = true;
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            if (s.prophecy.contains(x)) {
                label << (first ? "" : ",") << automaton.clocks[x];
                first = false;
            }
        }
        label << "}";
        out << "  q" << id << " [shape=" << (nfa.is_accepting(id) ? "doublecircle" : "box")
            << " label=\"" << label.str() << "\"];\n";
    }
    for (const auto& [gamma, id] : nfa.initial) {
        out << "  init" << gamma << " [shape=point];\n";
        out << "  init" << gamma << " -> q" << id << ";\n";
    }
    for (const NfaTransition& t : nfa.transitions) {
        out << "  q" << t.from << " -> q" << t.to << " [label=\""
            << (t.label == kEpsilon ? std::string("eps") : automaton.clocks[t.label])
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace tareach
