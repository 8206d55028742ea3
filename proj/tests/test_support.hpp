#pragma once

// Brute-force reference machinery shared by the test binaries. Everything in
// here evaluates defining equations directly and stays independent of the
// DBM/NFA algorithms under test.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "tareach/automaton.hpp"
#include "tareach/rational.hpp"
#include "tareach/region_nfa.hpp"
#include "tareach/zone.hpp"

namespace tareach::testing {

/// All points of [0,1]^n with the given denominator.
inline std::vector<std::vector<Rational>> grid_points(std::uint32_t n, std::int64_t den) {
    std::vector<std::vector<Rational>> points{{}};
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::vector<Rational>> next;
        for (const auto& prefix : points) {
            for (std::int64_t k = 0; k <= den; ++k) {
                auto point = prefix;
                point.emplace_back(k, den);
                next.push_back(std::move(point));
            }
        }
        points = std::move(next);
    }
    return points;
}

/// Direct evaluation of a zone's stored constraints on a rational point.
inline bool member_oracle(const BoundedZone& zone, const std::vector<Rational>& p) {
    auto coord = [&](std::uint32_t i) { return i == 0 ? Rational(0) : p[i - 1]; };
    for (std::uint32_t i = 0; i < zone.dim(); ++i) {
        for (std::uint32_t j = 0; j < zone.dim(); ++j) {
            if (i == j) {
                continue;
            }
            const Bound b = zone.at(i, j);
            const Rational diff = coord(i) - coord(j);
            if (b.is_strict() ? !(diff < Rational(b.value())) : !(diff <= Rational(b.value()))) {
                return false;
            }
        }
    }
    return true;
}

/// Feasibility of "some point of `zone` agrees with the pinned coordinates",
/// decided by a self-contained rational Floyd-Warshall (kept separate from
/// the library's zone_find_point on purpose).
inline bool pinned_feasible(const BoundedZone& zone,
                            const std::vector<std::optional<Rational>>& pins) {
    struct B {
        Rational v;
        bool strict;
    };
    const std::uint32_t dim = zone.dim();
    std::vector<B> m(static_cast<std::size_t>(dim) * dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
        for (std::uint32_t j = 0; j < dim; ++j) {
            m[i * dim + j] = {Rational(zone.at(i, j).value()), zone.at(i, j).is_strict()};
        }
    }
    auto tighten = [&](std::uint32_t i, std::uint32_t j, const B& b) {
        B& e = m[i * dim + j];
        if (b.v < e.v || (b.v == e.v && b.strict && !e.strict)) {
            e = b;
        }
    };
    for (std::uint32_t x = 0; x < zone.num_clocks(); ++x) {
        if (pins[x]) {
            tighten(x + 1, 0, {*pins[x], false});
            tighten(0, x + 1, {-*pins[x], false});
        }
    }
    for (std::uint32_t k = 0; k < dim; ++k) {
        for (std::uint32_t i = 0; i < dim; ++i) {
            for (std::uint32_t j = 0; j < dim; ++j) {
                const B sum{m[i * dim + k].v + m[k * dim + j].v,
                            m[i * dim + k].strict || m[k * dim + j].strict};
                tighten(i, j, sum);
            }
        }
    }
    for (std::uint32_t i = 0; i < dim; ++i) {
        const B& d = m[i * dim + i];
        if (d.v < Rational(0) || (d.v == Rational(0) && d.strict)) {
            return false;
        }
    }
    return true;
}

/// Brute-force "p in time_successor(Z)": is there a rational t >= 0 with
/// p - t*1 in Z? Decided by exact interval intersection over Z's bounds.
inline bool future_member_oracle(const BoundedZone& zone, const std::vector<Rational>& p) {
    // Pairwise differences are shift-invariant.
    for (std::uint32_t i = 1; i < zone.dim(); ++i) {
        for (std::uint32_t j = 1; j < zone.dim(); ++j) {
            if (i == j) {
                continue;
            }
            const Bound b = zone.at(i, j);
            const Rational diff = p[i - 1] - p[j - 1];
            if (b.is_strict() ? !(diff < Rational(b.value())) : !(diff <= Rational(b.value()))) {
                return false;
            }
        }
    }
    // Collect lower/upper bounds on t.
    Rational lo(0);
    bool lo_strict = false;
    std::optional<Rational> hi;
    bool hi_strict = false;
    for (std::uint32_t i = 1; i < zone.dim(); ++i) {
        // p_i - t <= c  <=>  t >= p_i - c
        const Bound upper = zone.at(i, 0);
        const Rational lower_t = p[i - 1] - Rational(upper.value());
        if (lower_t > lo || (lower_t == lo && upper.is_strict() && !lo_strict)) {
            lo = lower_t;
            lo_strict = upper.is_strict();
        }
        // -(p_i - t) <= c  <=>  t <= c + p_i
        const Bound lower = zone.at(0, i);
        const Rational upper_t = Rational(lower.value()) + p[i - 1];
        if (!hi || upper_t < *hi || (upper_t == *hi && lower.is_strict() && !hi_strict)) {
            hi = upper_t;
            hi_strict = lower.is_strict();
        }
    }
    if (!hi) {
        return true;  // no clocks: only the reference, trivially reachable
    }
    if (lo < *hi) {
        return true;
    }
    return lo == *hi && !lo_strict && !hi_strict;
}

/// Guard evaluation against capped integer parts plus a fractional point.
inline bool guard_holds_oracle(const Guard& guard, const std::vector<std::uint32_t>& ints,
                               std::uint32_t cap, const std::vector<Rational>& frac) {
    for (const GuardAtom& atom : guard.atoms) {
        const std::uint32_t u = ints[atom.clock];
        bool ok;
        if (u >= cap) {
            ok = atom.op == GuardOp::Gt;
        } else {
            const Rational total = Rational(static_cast<std::int64_t>(u)) + frac[atom.clock];
            const Rational k(static_cast<std::int64_t>(atom.bound));
            ok = atom.op == GuardOp::Lt ? total < k : atom.op == GuardOp::Eq ? total == k : total > k;
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

/// Small random automaton for structural tests (no reachability pruning).
inline TimedAutomaton random_small_automaton(std::mt19937_64& rng, std::uint32_t max_locations,
                                             std::uint32_t max_clocks, std::uint32_t max_edges,
                                             std::uint32_t max_constant) {
    TimedAutomaton a;
    const std::uint32_t locations = 1 + rng() % max_locations;
    const std::uint32_t clocks = 1 + rng() % max_clocks;
    const std::uint32_t edges = rng() % (max_edges + 1);
    for (std::uint32_t i = 0; i < locations; ++i) {
        a.locations.push_back("l" + std::to_string(i));
    }
    for (std::uint32_t i = 0; i < clocks; ++i) {
        a.clocks.push_back("x" + std::to_string(i));
    }
    for (std::uint32_t i = 0; i < edges; ++i) {
        Edge e;
        e.source = static_cast<LocId>(rng() % locations);
        e.target = static_cast<LocId>(rng() % locations);
        const std::uint32_t atoms = rng() % 3;
        for (std::uint32_t j = 0; j < atoms; ++j) {
            e.guard.atoms.push_back(GuardAtom{static_cast<ClockId>(rng() % clocks),
                                              static_cast<GuardOp>(rng() % 3),
                                              static_cast<std::uint32_t>(rng() % (max_constant + 1))});
        }
        for (ClockId x = 0; x < clocks; ++x) {
            if (rng() % 2) {
                e.resets.add(x);
            }
        }
        a.edges.push_back(std::move(e));
    }
    a.finalize();
    return a;
}

/// Random concrete run from <location 0, all zeros> via sampled successors.
inline ConcreteRun random_concrete_walk(std::mt19937_64& rng, const TimedAutomaton& automaton,
                                        std::uint32_t max_steps) {
    ConcreteRun run{0, ClockValuation::zero(automaton.num_clocks()), {}};
    Configuration current{0, run.init};
    const std::uint32_t steps = rng() % (max_steps + 1);
    for (std::uint32_t i = 0; i < steps; ++i) {
        auto successors = concrete_successors(automaton, current, Rational(2), 2);
        const auto& [label, next] = successors[rng() % successors.size()];
        if (label.kind == StepLabel::Kind::Delay) {
            run.steps.push_back(ConcreteStep{ConcreteStep::Kind::Delay, label.delay, 0});
        } else {
            run.steps.push_back(ConcreteStep{ConcreteStep::Kind::Edge, Rational(0), label.edge});
        }
        current = next;
    }
    return run;
}

/// Clocks reset along a concrete run.
inline ClockSet resets_along(const TimedAutomaton& automaton, const ConcreteRun& run) {
    ClockSet resets;
    for (const ConcreteStep& step : run.steps) {
        if (step.kind == ConcreteStep::Kind::Edge) {
            resets = resets | automaton.edges[step.edge].resets;
        }
    }
    return resets;
}

/// Random legal region run from <location 0, 0, {0}, gamma0>.
inline RegionRun random_region_walk(std::mt19937_64& rng, const TimedAutomaton& automaton,
                                    ClockSet gamma0, std::uint32_t max_steps) {
    RegionRun run{0, gamma0, {}};
    RegionState state{0, CappedIntVector::zero(automaton.num_clocks(), UINT32_MAX),
                      BoundedZone::zero_point(automaton.num_clocks()), gamma0};
    const std::uint32_t steps = rng() % (max_steps + 1);
    for (std::uint32_t i = 0; i < steps; ++i) {
        // Candidate steps, validated cheaply before use.
        std::vector<RegionStep> options;
        options.push_back(RegionStep{RegionStep::Kind::Delay, 0, 0, {}});
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            if (wrap_face(state.zone, x)) {
                options.push_back(RegionStep{RegionStep::Kind::Wrap, x, 0, {}});
            }
        }
        const std::uint32_t cap = automaton.c_max + 1;
        for (std::uint32_t e = 0; e < automaton.edges.size(); ++e) {
            const Edge& edge = automaton.edges[e];
            if (edge.source != state.loc || !edge.resets.subset_of(state.prophecy)) {
                continue;
            }
            std::vector<std::uint32_t> capped(state.ints.v.size());
            for (std::size_t x = 0; x < capped.size(); ++x) {
                capped[x] = std::min(state.ints.v[x], cap);
            }
            if (!guard_restrict(state.zone, capped, cap, edge.guard)) {
                continue;
            }
            const std::uint32_t lambda = edge.resets.bits();
            for (std::uint32_t d = 0; d <= lambda; ++d) {
                if ((d & lambda) == d) {
                    options.push_back(
                        RegionStep{RegionStep::Kind::Discrete, 0, e, ClockSet(d)});
                }
            }
        }
        const RegionStep pick = options[rng() % options.size()];
        state = apply_region_step(automaton, state, pick);
        run.steps.push_back(pick);
    }
    return run;
}

/// Word acceptance over a region automaton from one initial state, epsilon
/// transitions included, against an explicit accepting set.
inline bool accepts_word(const RegionNfa& nfa, std::uint32_t initial,
                         const std::vector<ClockId>& word,
                         const std::vector<std::uint32_t>& accepting) {
    std::set<std::pair<std::uint32_t, std::size_t>> seen;
    std::deque<std::pair<std::uint32_t, std::size_t>> queue{{initial, 0}};
    seen.insert(queue.front());
    while (!queue.empty()) {
        const auto [state, pos] = queue.front();
        queue.pop_front();
        if (pos == word.size() &&
            std::binary_search(accepting.begin(), accepting.end(), state)) {
            return true;
        }
        for (const auto& [label, to] : nfa.adjacency[state]) {
            std::pair<std::uint32_t, std::size_t> next{to, pos};
            if (label != kEpsilon) {
                if (pos == word.size() || static_cast<ClockId>(label) != word[pos]) {
                    continue;
                }
                next.second = pos + 1;
            }
            if (seen.insert(next).second) {
                queue.push_back(next);
            }
        }
    }
    return false;
}

/// All words over {0..alphabet-1} of length <= max_len, shortest first.
inline std::vector<std::vector<ClockId>> all_words(std::uint32_t alphabet,
                                                   std::uint32_t max_len) {
    std::vector<std::vector<ClockId>> words{{}};
    std::size_t level_begin = 0;
    for (std::uint32_t len = 1; len <= max_len; ++len) {
        const std::size_t level_end = words.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            for (ClockId a = 0; a < alphabet; ++a) {
                auto word = words[i];
                word.push_back(a);
                words.push_back(std::move(word));
            }
        }
        level_begin = level_end;
    }
    return words;
}

/// Visible letters of a region run (wraps of clocks outside the prophecy).
inline std::vector<ClockId> visible_word(const TimedAutomaton& automaton,
                                         const RegionRun& run) {
    const auto states = replay_region(automaton, run);
    std::vector<ClockId> word;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        if (run.steps[i].kind == RegionStep::Kind::Wrap &&
            !states[i].prophecy.contains(run.steps[i].clock)) {
            word.push_back(run.steps[i].clock);
        }
    }
    return word;
}

/// Deterministic random nonempty zones: random tightenings over the box.
inline BoundedZone random_zone(std::mt19937_64& rng, std::uint32_t n) {
    while (true) {
        RawZone raw(n);
        const std::uint32_t dim = n + 1;
        for (std::uint32_t i = 0; i < dim; ++i) {
            for (std::uint32_t j = 0; j < dim; ++j) {
                if (i == j || rng() % 3 != 0) {
                    continue;
                }
                const int value = static_cast<int>(rng() % 3) - 1;
                raw.constrain(i, j, rng() % 2 ? Bound::weak(value) : Bound::strict(value));
            }
        }
        if (auto zone = BoundedZone::canonicalize(raw)) {
            return *zone;
        }
    }
}

}  // namespace tareach::testing
