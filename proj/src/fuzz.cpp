#include "tareach/fuzz.hpp"

#include <deque>

#include <json.hpp>

#include "tareach/io.hpp"
#include "tareach/oracle.hpp"
#include "tareach/reach.hpp"

namespace tareach {

void FuzzConfig::validate() const {
    for (const std::uint32_t bound :
         {automata, max_locations, max_clocks, max_edges, queries_per_automaton,
          denominator_bound, value_bound}) {
        if (bound == 0) {
            throw SemanticError("fuzz bounds must be at least 1");
        }
    }
}

namespace {

bool all_locations_reachable(const TimedAutomaton& automaton) {
    std::vector<bool> seen(automaton.num_locations(), false);
    std::deque<LocId> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
        const LocId loc = queue.front();
        queue.pop_front();
        for (const Edge& e : automaton.edges) {
            if (e.source == loc && !seen[e.target]) {
                seen[e.target] = true;
                ++count;
                queue.push_back(e.target);
            }
        }
    }
    return count == automaton.num_locations();
}

}  // namespace

TimedAutomaton random_automaton(const FuzzConfig& config) {
    config.validate();
    Rng rng(config.seed);
    while (true) {
        TimedAutomaton a;
        const auto locations = static_cast<std::uint32_t>(1 + rng.below(config.max_locations));
        const auto clocks = static_cast<std::uint32_t>(1 + rng.below(config.max_clocks));
        const auto edges = static_cast<std::uint32_t>(rng.below(config.max_edges + 1));
        for (std::uint32_t i = 0; i < locations; ++i) {
            a.locations.push_back("l" + std::to_string(i));
        }
        for (std::uint32_t i = 0; i < clocks; ++i) {
            a.clocks.push_back(std::string(1, static_cast<char>('x' + i % 3)) +
                               (i < 3 ? "" : std::to_string(i)));
        }
        for (std::uint32_t i = 0; i < edges; ++i) {
            Edge e;
            e.source = static_cast<LocId>(rng.below(locations));
            e.target = static_cast<LocId>(rng.below(locations));
            const auto atoms = static_cast<std::uint32_t>(rng.below(3));
            for (std::uint32_t j = 0; j < atoms; ++j) {
                e.guard.atoms.push_back(
                    GuardAtom{static_cast<ClockId>(rng.below(clocks)),
                              static_cast<GuardOp>(rng.below(3)),
                              static_cast<std::uint32_t>(rng.below(config.max_constant + 1))});
            }
            for (ClockId x = 0; x < clocks; ++x) {
                if (rng.coin()) {
                    e.resets.add(x);
                }
            }
            a.edges.push_back(std::move(e));
        }
        a.finalize();
        if (all_locations_reachable(a)) {
            return a;
        }
    }
}

ClockValuation random_valuation(Rng& rng, const FuzzConfig& config, std::uint32_t clocks) {
    ClockValuation v = ClockValuation::zero(clocks);
    for (ClockId x = 0; x < clocks; ++x) {
        const auto den = static_cast<std::int64_t>(1 + rng.below(config.denominator_bound));
        const auto num =
            static_cast<std::int64_t>(rng.below(config.value_bound * den + 1));
        v[x] = Rational(num, den);
    }
    return v;
}

namespace {

struct Query {
    LocId from = 0;
    LocId to = 0;
    ClockValuation source;
    ClockValuation target;
};

bool results_differ(const TimedAutomaton& automaton, const Query& q) {
    const bool main = check_pair(automaton, q.from, q.to, q.source, q.target);
    const bool oracle = oracle_reachable(automaton, Configuration{q.from, q.source},
                                         Configuration{q.to, q.target});
    return main != oracle;
}

/// Deterministic shrinking: drop edges while the mismatch persists, then
/// decrement guard constants.
TimedAutomaton minimize(TimedAutomaton automaton, const Query& q) {
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (std::size_t e = 0; e < automaton.edges.size(); ++e) {
            TimedAutomaton candidate = automaton;
            candidate.edges.erase(candidate.edges.begin() +
                                  static_cast<std::ptrdiff_t>(e));
            candidate.finalize();
            if (results_differ(candidate, q)) {
                automaton = std::move(candidate);
                progressed = true;
                break;
            }
        }
        if (progressed) {
            continue;
        }
        for (std::size_t e = 0; e < automaton.edges.size() && !progressed; ++e) {
            for (std::size_t a = 0; a < automaton.edges[e].guard.atoms.size(); ++a) {
                if (automaton.edges[e].guard.atoms[a].bound == 0) {
                    continue;
                }
                TimedAutomaton candidate = automaton;
                candidate.edges[e].guard.atoms[a].bound -= 1;
                candidate.finalize();
                if (results_differ(candidate, q)) {
                    automaton = std::move(candidate);
                    progressed = true;
                    break;
                }
            }
        }
    }
    return automaton;
}

Mismatch make_mismatch(std::uint64_t seed, const TimedAutomaton& automaton, const Query& q,
                       bool main, bool oracle, bool witness) {
    Mismatch m;
    m.seed = seed;
    m.automaton_json = serialize_automaton(automaton);
    m.from = automaton.locations[q.from];
    m.to = automaton.locations[q.to];
    m.source = format_valuation(automaton, q.source);
    m.target = format_valuation(automaton, q.target);
    m.main_result = main;
    m.oracle_result = oracle;
    m.witness = witness;
    m.minimized_json =
        witness ? m.automaton_json : serialize_automaton(minimize(automaton, q));
    return m;
}

}  // namespace

DiffReport differential_test(const FuzzConfig& config) {
    config.validate();
    DiffReport report;
    report.seed = config.seed;
    Rng top(config.seed);

    for (std::uint32_t i = 0; i < config.automata; ++i) {
        FuzzConfig sub = config;
        sub.seed = top.next();
        const TimedAutomaton automaton = random_automaton(sub);
        ReachChecker checker(automaton);
        Rng rng(top.next());
        ++report.automata;

        for (std::uint32_t qn = 0; qn < config.queries_per_automaton; ++qn) {
            Query q;
            q.from = static_cast<LocId>(rng.below(automaton.num_locations()));
            q.to = static_cast<LocId>(rng.below(automaton.num_locations()));
            q.source = random_valuation(rng, config, automaton.num_clocks());
            q.target = random_valuation(rng, config, automaton.num_clocks());
            const bool main = checker.query(q.from, q.to, q.source, q.target);
            const bool oracle =
                oracle_reachable(automaton, Configuration{q.from, q.source},
                                 Configuration{q.to, q.target});
            ++report.queries;
            if (main != oracle) {
                report.mismatches.push_back(
                    make_mismatch(sub.seed, automaton, q, main, oracle, false));
            }
        }

        for (std::uint32_t w = 0; w < config.witness_walks; ++w) {
            Query q;
            q.from = 0;
            q.source = random_valuation(rng, config, automaton.num_clocks());
            Configuration current{0, q.source};
            const auto steps = rng.below(6);
            for (std::uint64_t s = 0; s < steps; ++s) {
                const auto successors =
                    concrete_successors(automaton, current, Rational(2), 2);
                current = successors[rng.below(successors.size())].second;
            }
            q.to = current.location;
            q.target = current.valuation;
            const bool main = checker.query(q.from, q.to, q.source, q.target);
            const bool oracle = oracle_reachable(automaton, Configuration{q.from, q.source},
                                                 current);
            ++report.witness_queries;
            if (!main || !oracle) {
                report.mismatches.push_back(
                    make_mismatch(sub.seed, automaton, q, main, oracle, true));
            }
        }
    }
    return report;
}

std::string report_to_jsonl(const DiffReport& report) {
    using nlohmann::json;
    std::string out;
    for (const Mismatch& m : report.mismatches) {
        json line;
        line["seed"] = m.seed;
        line["automaton"] = json::parse(m.automaton_json);
        line["query"] = {{"from", m.from}, {"to", m.to}, {"source", m.source},
                         {"target", m.target}};
        line["main_result"] = m.main_result;
        line["oracle_result"] = m.oracle_result;
        line["witness"] = m.witness;
        line["minimized"] = json::parse(m.minimized_json);
        out += line.dump() + "\n";
    }
    json summary;
    summary["summary"] = {{"seed", report.seed},
                          {"automata", report.automata},
                          {"queries", report.queries},
                          {"witness_queries", report.witness_queries},
                          {"mismatches", report.mismatches.size()}};
    out += summary.dump() + "\n";
    return out;
}

}  // namespace tareach
