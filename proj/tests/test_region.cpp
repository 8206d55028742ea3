#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tareach/io.hpp"
#include "tareach/region_nfa.hpp"
#include "test_support.hpp"

using namespace tareach;
using namespace tareach::testing;

namespace {

TimedAutomaton one_clock_no_edges() {
    return parse_automaton(R"({"clocks": ["x"], "locations": ["l0"], "edges": []})");
}

TimedAutomaton one_clock_reset_gadget() {
    return parse_automaton(R"({
        "clocks": ["x"], "locations": ["l0", "l1"],
        "edges": [{"source": "l0", "guard": [{"clock": "x", "op": "=", "const": 1}],
                   "resets": ["x"], "target": "l1"}]})");
}

bool has_successor(const std::vector<std::pair<std::int32_t, RegionState>>& successors,
                   std::int32_t label, const RegionState& state) {
    for (const auto& [l, s] : successors) {
        if (l == label && s == state) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("memorise counts") {
    const auto small = one_clock_no_edges();
    const auto mem1 = memorise(small, 0);
    CHECK(mem1.automaton.num_locations() == 2);
    CHECK(mem1.automaton.num_clocks() == 3);
    CHECK(mem1.automaton.edges.size() == 2);
    CHECK(mem1.automaton.c_max == small.c_max);

    const auto bigger = parse_automaton(R"({
        "clocks": ["x", "y"], "locations": ["l0", "l1"],
        "edges": [
          {"source": "l0", "guard": [{"clock": "x", "op": ">", "const": 1}], "resets": ["x"], "target": "l1"},
          {"source": "l1", "guard": [], "resets": ["y"], "target": "l0"},
          {"source": "l0", "guard": [], "resets": [], "target": "l0"}
        ]})");
    const auto mem2 = memorise(bigger, 0);
    CHECK(mem2.automaton.num_clocks() == 5);
    CHECK(mem2.automaton.edges.size() == 3 + 2 + 1);
    CHECK(mem2.automaton.c_max == bigger.c_max);
    CHECK(mem2.automaton.locations.back() == "l0'");
    CHECK(mem2.automaton.clocks[mem2.primed(0)] == "x'");
    CHECK(mem2.automaton.clocks[mem2.reference()] == "z");

    // The entry edge resets exactly the reference clock.
    const Edge& enter = mem2.automaton.edges.back();
    CHECK(enter.source == mem2.pre_start);
    CHECK(enter.target == 0);
    CHECK(enter.resets == ClockSet::single(mem2.reference()));

    CHECK_THROWS_AS(memorise(small, 7), SemanticError);
}

TEST_CASE("memorise freshens colliding names") {
    const auto tricky = parse_automaton(
        R"({"clocks": ["x", "x'", "z"], "locations": ["l0", "l0'"], "edges": []})");
    const auto mem = memorise(tricky, 0);
    std::set<std::string> clock_names(mem.automaton.clocks.begin(), mem.automaton.clocks.end());
    CHECK(clock_names.size() == mem.automaton.clocks.size());
    std::set<std::string> loc_names(mem.automaton.locations.begin(),
                                    mem.automaton.locations.end());
    CHECK(loc_names.size() == mem.automaton.locations.size());
}

TEST_CASE("region_successors on the one-clock automaton") {
    const auto automaton = one_clock_no_edges();
    const std::uint32_t cap = automaton.c_max + 1;  // = 1

    const RegionState origin{0, CappedIntVector::zero(1, cap), BoundedZone::zero_point(1), {}};
    const auto from_origin = region_successors(automaton, origin);
    const BoundedZone box = time_successor(BoundedZone::zero_point(1));
    CHECK(from_origin.size() == 1);
    CHECK(has_successor(from_origin, kEpsilon,
                        RegionState{0, CappedIntVector::zero(1, cap), box, {}}));

    const RegionState spread{0, CappedIntVector::zero(1, cap), box, {}};
    const auto from_spread = region_successors(automaton, spread);
    // Delay self-successor plus the visible wrap back to the origin zone with
    // a bumped integer part.
    CappedIntVector bumped = CappedIntVector::zero(1, cap);
    bumped.bump(0);
    CHECK(has_successor(from_spread, 0,
                        RegionState{0, bumped, BoundedZone::zero_point(1), {}}));

    // With x in the prophecy set the wrap is silent.
    const RegionState promised{0, CappedIntVector::zero(1, cap), box, ClockSet::single(0)};
    const auto from_promised = region_successors(automaton, promised);
    CHECK(has_successor(from_promised, kEpsilon,
                        RegionState{0, bumped, BoundedZone::zero_point(1),
                                    ClockSet::single(0)}));
}

TEST_CASE("build_nfa on the one-clock automaton") {
    const auto automaton = one_clock_no_edges();
    const auto nfa = build_nfa(automaton, 0, 0);
    CHECK(nfa.states.size() <= 12);
    CHECK(nfa.initial.size() == 2);

    // From the empty prophecy the language is x*; from {x} it is empty.
    const std::uint32_t init_empty = nfa.initial.at(0);
    const std::uint32_t init_x = nfa.initial.at(1);
    for (const auto& word : all_words(1, 5)) {
        CHECK(accepts_word(nfa, init_empty, word, nfa.accepting));
        CHECK_FALSE(accepts_word(nfa, init_x, word, nfa.accepting));
    }
}

TEST_CASE("prophecy can only shrink at discrete steps") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto automaton = random_small_automaton(rng, 3, 2, 3, 2);
        const ClockSet gamma(static_cast<std::uint32_t>(rng()) &
                             automaton.all_clocks().bits());
        const auto run = random_region_walk(rng, automaton, gamma, 10);
        const auto states = replay_region(automaton, run);
        for (std::size_t i = 0; i < run.steps.size(); ++i) {
            CHECK(states[i + 1].prophecy.subset_of(states[i].prophecy));
            if (states[i + 1].prophecy != states[i].prophecy) {
                CHECK(run.steps[i].kind == RegionStep::Kind::Discrete);
                const ClockSet removed = states[i].prophecy - states[i + 1].prophecy;
                CHECK(removed.subset_of(automaton.edges[run.steps[i].edge].resets));
            }
        }
    }
}

TEST_CASE("quotient states stay within the finiteness bound") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const auto automaton = random_small_automaton(rng, 2, 2, 3, 1);
        const auto nfa = build_nfa(automaton, 0, 0);
        const std::uint32_t n = automaton.num_clocks();
        std::size_t bound = automaton.num_locations();
        bound *= static_cast<std::size_t>(std::pow(automaton.c_max + 2.0, n));
        std::size_t factorial = 1;
        for (std::size_t k = 2; k <= 2 * n + 1; ++k) {
            factorial *= k;
        }
        bound *= factorial;
        bound <<= n;
        CHECK(nfa.states.size() <= bound);
    }
}

TEST_CASE("eliminate_epsilon collapses pure-epsilon reachability") {
    const auto automaton = one_clock_reset_gadget();
    // l0 -> l1 fires at x = 1 with a reset; with gamma = {x} the accepting
    // states are reached through epsilon moves only.
    const auto nfa = build_nfa(automaton, 0, 1);
    const auto eps_free = eliminate_epsilon(nfa);
    for (const NfaTransition& t : eps_free.transitions) {
        CHECK(t.label != kEpsilon);
    }
    const std::uint32_t init = eps_free.initial.at(ClockSet::single(0).bits());
    CHECK(accepts_word(eps_free, init, {}, eps_free.accepting));
}

TEST_CASE("eliminate_epsilon preserves the language on random automata") {
    std::mt19937_64 rng(2718);
    const auto words2 = all_words(2, 6);
    const auto words1 = all_words(1, 6);
    for (int trial = 0; trial < 60; ++trial) {
        const auto automaton = random_small_automaton(rng, 2, 2, 3, 1);
        const auto target = static_cast<LocId>(rng() % automaton.num_locations());
        const auto nfa = build_nfa(automaton, 0, target);
        const auto eps_free = eliminate_epsilon(nfa);
        CHECK(eps_free.states.size() <= nfa.states.size());
        const auto& words = automaton.num_clocks() == 2 ? words2 : words1;
        for (const auto& [gamma, init] : nfa.initial) {
            (void)gamma;
            for (const auto& word : words) {
                CHECK(accepts_word(nfa, init, word, nfa.accepting) ==
                      accepts_word(eps_free, init, word, eps_free.accepting));
            }
        }
    }
}

TEST_CASE("abstract_run on spec delays") {
    const auto automaton = one_clock_no_edges();

    ConcreteRun three_halves{0, ClockValuation::zero(1),
                             {ConcreteStep{ConcreteStep::Kind::Delay, Rational(3, 2), 0}}};
    const auto run = abstract_run(automaton, three_halves, {});
    REQUIRE(run.steps.size() == 3);
    CHECK(run.steps[0].kind == RegionStep::Kind::Delay);
    CHECK(run.steps[1].kind == RegionStep::Kind::Wrap);
    CHECK(run.steps[1].clock == 0);
    CHECK(run.steps[2].kind == RegionStep::Kind::Delay);
    CHECK(visible_word(automaton, run) == std::vector<ClockId>{0});
    const auto states = replay_region(automaton, run);
    CHECK(states.back().ints.v[0] == 1);
    CHECK(zone_member(states.back().zone, std::vector<Rational>{Rational(1, 2)}));

    ConcreteRun unit{0, ClockValuation::zero(1),
                     {ConcreteStep{ConcreteStep::Kind::Delay, Rational(1), 0}}};
    const auto run2 = abstract_run(automaton, unit, {});
    REQUIRE(run2.steps.size() == 2);
    CHECK(run2.steps[0].kind == RegionStep::Kind::Delay);
    CHECK(run2.steps[1].kind == RegionStep::Kind::Wrap);
    const auto states2 = replay_region(automaton, run2);
    CHECK(states2.back().ints.v[0] == 1);
    CHECK(states2.back().zone == BoundedZone::zero_point(1));
}

TEST_CASE("abstract_run with a reset edge keeps the word silent") {
    const auto automaton = one_clock_reset_gadget();
    ConcreteRun run{0, ClockValuation::zero(1),
                    {ConcreteStep{ConcreteStep::Kind::Delay, Rational(1), 0},
                     ConcreteStep{ConcreteStep::Kind::Edge, Rational(0), 0},
                     ConcreteStep{ConcreteStep::Kind::Delay, Rational(1, 2), 0}}};
    const auto region = abstract_run(automaton, run, ClockSet::single(0));
    CHECK(visible_word(automaton, region).empty());

    const auto states = replay_region(automaton, region);
    CHECK(states.back().loc == 1);
    CHECK(states.back().prophecy.empty());

    // The wrap fires while x is still promised, so it is an epsilon step.
    bool found_wrap = false;
    for (std::size_t i = 0; i < region.steps.size(); ++i) {
        if (region.steps[i].kind == RegionStep::Kind::Wrap) {
            found_wrap = true;
            CHECK(states[i].prophecy.contains(0));
        }
        if (region.steps[i].kind == RegionStep::Kind::Discrete) {
            CHECK(region.steps[i].dropped == ClockSet::single(0));
        }
    }
    CHECK(found_wrap);

    CHECK_THROWS_AS(abstract_run(automaton, run, ClockSet::none()), SemanticError);
}

TEST_CASE("abstract_run output is legal step by step") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 60; ++trial) {
        const auto automaton = random_small_automaton(rng, 3, 2, 3, 2);
        const auto walk = random_concrete_walk(rng, automaton, 6);
        const auto region = abstract_run(automaton, walk, resets_along(automaton, walk));
        const auto states = replay_region(automaton, region);
        for (std::size_t i = 0; i < region.steps.size(); ++i) {
            const auto successors = region_successors(automaton, states[i]);
            bool found = false;
            for (const auto& [label, succ] : successors) {
                (void)label;
                if (succ == states[i + 1]) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }

        // Final membership: nu_final - upsilon lies in the final zone.
        const auto trajectory = replay_concrete(automaton, walk);
        const auto& final_state = states.back();
        std::vector<Rational> frac(automaton.num_clocks());
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            frac[x] = trajectory.back().valuation[x] -
                      Rational(static_cast<std::int64_t>(final_state.ints.v[x]));
        }
        CHECK(zone_member(final_state.zone, frac));

        // Visible letters count the final integer parts.
        std::vector<std::uint32_t> counts(automaton.num_clocks(), 0);
        for (ClockId letter : visible_word(automaton, region)) {
            counts[letter] += 1;
        }
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            CHECK(counts[x] == final_state.ints.v[x]);
        }
    }
}

TEST_CASE("concretize_run on spec examples") {
    const auto automaton = one_clock_no_edges();

    RegionRun wrap_run{0, {}, {RegionStep{RegionStep::Kind::Delay, 0, 0, {}},
                               RegionStep{RegionStep::Kind::Wrap, 0, 0, {}}}};
    const auto concrete = concretize_run(automaton, wrap_run, {Rational(0)});
    const auto trajectory = replay_concrete(automaton, concrete);
    CHECK(trajectory.back().valuation[0] == Rational(1));

    RegionRun delay_run{0, {}, {RegionStep{RegionStep::Kind::Delay, 0, 0, {}}}};
    const auto half = concretize_run(automaton, delay_run, {Rational(1, 2)});
    REQUIRE(half.steps.size() == 1);
    CHECK(half.steps[0].delay == Rational(1, 2));

    CHECK_THROWS_AS(concretize_run(automaton, delay_run, {Rational(3, 2)}), SemanticError);
}

TEST_CASE("abstract then concretize round-trips the final configuration") {
    std::mt19937_64 rng(808);
    int checked = 0;
    for (int trial = 0; trial < 120 && checked < 60; ++trial) {
        const auto automaton = random_small_automaton(rng, 3, 2, 3, 2);
        const auto walk = random_concrete_walk(rng, automaton, 6);
        const auto region = abstract_run(automaton, walk, resets_along(automaton, walk));
        const auto states = replay_region(automaton, region);
        const auto trajectory = replay_concrete(automaton, walk);

        std::vector<Rational> frac(automaton.num_clocks());
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            frac[x] = trajectory.back().valuation[x] -
                      Rational(static_cast<std::int64_t>(states.back().ints.v[x]));
        }
        const auto rebuilt = concretize_run(automaton, region, frac);
        const auto rebuilt_trajectory = replay_concrete(automaton, rebuilt);
        CHECK(rebuilt_trajectory.back() == trajectory.back());
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("concretize_run handles accepted random region runs") {
    std::mt19937_64 rng(909);
    int accepted = 0;
    for (int trial = 0; trial < 400 && accepted < 50; ++trial) {
        const auto automaton = random_small_automaton(rng, 3, 2, 3, 2);
        const ClockSet gamma(static_cast<std::uint32_t>(rng()) &
                             automaton.all_clocks().bits());
        const auto run = random_region_walk(rng, automaton, gamma, 12);
        const auto states = replay_region(automaton, run);
        if (!states.back().prophecy.empty()) {
            continue;
        }
        ++accepted;
        const auto point = zone_find_point(
            states.back().zone,
            std::vector<std::optional<Rational>>(automaton.num_clocks()));
        REQUIRE(point.has_value());
        const auto concrete = concretize_run(automaton, run, *point);
        const auto trajectory = replay_concrete(automaton, concrete);
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            const Rational expected =
                Rational(static_cast<std::int64_t>(states.back().ints.v[x])) + (*point)[x];
            CHECK(trajectory.back().valuation[x] == expected);
        }
    }
    CHECK(accepted == 50);
}

TEST_CASE("dot export mentions states and eps labels") {
    const auto automaton = one_clock_no_edges();
    const auto nfa = build_nfa(automaton, 0, 0);
    const auto dot = to_dot(nfa, automaton);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("eps") != std::string::npos);
    CHECK(dot.find("l0 | (0) | x<=0 & -x<=0 | {}") != std::string::npos);
}
