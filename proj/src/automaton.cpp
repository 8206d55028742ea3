#include "tareach/automaton.hpp"

namespace tareach {

std::optional<LocId> TimedAutomaton::find_location(std::string_view name) const {
    for (std::uint32_t i = 0; i < locations.size(); ++i) {
        if (locations[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<ClockId> TimedAutomaton::find_clock(std::string_view name) const {
    for (std::uint32_t i = 0; i < clocks.size(); ++i) {
        if (clocks[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

void TimedAutomaton::finalize() {
    c_max = 0;
    const ClockSet known = all_clocks();
    for (const Edge& e : edges) {
        if (e.source >= num_locations() || e.target >= num_locations()) {
            throw SemanticError("edge references a location out of range");
        }
        if (!e.resets.subset_of(known)) {
            throw SemanticError("edge resets a clock out of range");
        }
        for (const GuardAtom& atom : e.guard.atoms) {
            if (atom.clock >= num_clocks()) {
                throw SemanticError("guard references a clock out of range");
            }
            c_max = std::max(c_max, atom.bound);
        }
    }
}

bool operator==(const TimedAutomaton& a, const TimedAutomaton& b) {
    if (a.locations != b.locations || a.clocks != b.clocks ||
        a.edges.size() != b.edges.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        const Edge& ea = a.edges[i];
        const Edge& eb = b.edges[i];
        if (ea.source != eb.source || ea.target != eb.target ||
            ea.resets != eb.resets || !(ea.guard == eb.guard)) {
            return false;
        }
    }
    return true;
}

bool eval_guard(const Guard& guard, const ClockValuation& valuation) {
    for (const GuardAtom& atom : guard.atoms) {
        const Rational& v = valuation[atom.clock];
        const Rational k(static_cast<std::int64_t>(atom.bound));
        const bool ok = atom.op == GuardOp::Lt   ? v < k
                        : atom.op == GuardOp::Eq ? v == k
                                                 : v > k;
        if (!ok) {
            return false;
        }
    }
    return true;
}

ClockValuation delay(const ClockValuation& valuation, const Rational& t) {
    if (!t.is_nonnegative()) {
        throw SemanticError("negative delay " + t.to_string());
    }
    ClockValuation result = valuation;
    for (Rational& v : result.values) {
        v = v + t;
    }
    return result;
}

ClockValuation apply_reset(const ClockValuation& valuation, ClockSet resets) {
    if (!resets.subset_of(ClockSet::all(valuation.size()))) {
        throw SemanticError("reset of a clock outside the valuation");
    }
    ClockValuation result = valuation;
    for (ClockId x = 0; x < valuation.size(); ++x) {
        if (resets.contains(x)) {
            result[x] = Rational(0);
        }
    }
    return result;
}

std::vector<std::pair<StepLabel, Configuration>> concrete_successors(
    const TimedAutomaton& automaton, const Configuration& config,
    const Rational& delay_bound, std::uint32_t granularity) {
    std::vector<std::pair<StepLabel, Configuration>> result;
    const std::int64_t steps =
        (delay_bound * Rational(static_cast<std::int64_t>(granularity))).floor();
    for (std::int64_t k = 0; k <= steps; ++k) {
        const Rational t(k, static_cast<std::int64_t>(granularity));
        result.emplace_back(StepLabel::make_delay(t),
                            Configuration{config.location, delay(config.valuation, t)});
    }
    for (std::uint32_t i = 0; i < automaton.edges.size(); ++i) {
        const Edge& e = automaton.edges[i];
        if (e.source != config.location || !eval_guard(e.guard, config.valuation)) {
            continue;
        }
        result.emplace_back(
            StepLabel::make_edge(i),
            Configuration{e.target, apply_reset(config.valuation, e.resets)});
    }
    return result;
}

}  // namespace tareach
