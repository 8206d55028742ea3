#pragma once

#include <string>
#include <string_view>

#include "tareach/automaton.hpp"

namespace tareach {

/// Parses the JSON input format:
///   {"clocks": ["x", ...], "locations": ["l0", ...],
///    "edges": [{"source": "l0",
///               "guard": [{"clock": "x", "op": "<"|"="|">", "const": 1}, ...],
///               "resets": ["x", ...], "target": "l1"}, ...]}
/// An empty "guard" array means true. Throws ParseError on malformed JSON
/// (with byte offset) and SemanticError on unknown names, duplicates or
/// negative constants.
TimedAutomaton parse_automaton(std::string_view text);

/// Inverse of parse_automaton; parse(serialize(a)) == a.
std::string serialize_automaton(const TimedAutomaton& automaton);

/// Parses "x=1/2,y=3" style valuation strings over the automaton's clocks.
/// Decimals are read exactly; negative values are rejected. Clocks that are
/// not mentioned default to 0; their names are reported through `defaulted`
/// when the caller wants to warn.
ClockValuation parse_valuation(const TimedAutomaton& automaton, std::string_view text,
                               std::vector<std::string>* defaulted = nullptr);

std::string format_valuation(const TimedAutomaton& automaton, const ClockValuation& v);

}  // namespace tareach
