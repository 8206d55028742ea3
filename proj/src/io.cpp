#include "tareach/io.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

namespace tareach {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw SemanticError(std::string("missing key \"") + key + "\"");
    }
    return *it;
}

std::vector<std::string> name_array(const json& value, const char* what) {
    if (!value.is_array()) {
        throw SemanticError(std::string(what) + " must be an array of strings");
    }
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const json& item : value) {
        if (!item.is_string()) {
            throw SemanticError(std::string(what) + " must contain only strings");
        }
        std::string name = item.get<std::string>();
        if (!seen.insert(name).second) {
            throw SemanticError(std::string("duplicate ") + what + " name \"" + name + "\"");
        }
        names.push_back(std::move(name));
    }
    return names;
}

GuardOp parse_op(const std::string& op) {
    if (op == "<") return GuardOp::Lt;
    if (op == "=") return GuardOp::Eq;
    if (op == ">") return GuardOp::Gt;
    throw SemanticError("unknown guard operator \"" + op + "\" (expected <, = or >)");
}

const char* op_string(GuardOp op) {
    switch (op) {
        case GuardOp::Lt: return "<";
        case GuardOp::Eq: return "=";
        default: return ">";
    }
}

}  // namespace

TimedAutomaton parse_automaton(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw SemanticError("top-level value must be an object");
    }

    TimedAutomaton automaton;
    automaton.clocks = name_array(require(doc, "clocks"), "clock");
    automaton.locations = name_array(require(doc, "locations"), "location");
    if (automaton.clocks.size() > 15) {
        throw SemanticError("at most 15 clocks are supported");
    }

    const json& edges = require(doc, "edges");
    if (!edges.is_array()) {
        throw SemanticError("\"edges\" must be an array");
    }
    for (const json& item : edges) {
        if (!item.is_object()) {
            throw SemanticError("each edge must be an object");
        }
        Edge edge;
        const auto source = require(item, "source").get<std::string>();
        const auto target = require(item, "target").get<std::string>();
        const auto src_id = automaton.find_location(source);
        const auto tgt_id = automaton.find_location(target);
        if (!src_id) {
            throw SemanticError("unknown location \"" + source + "\"");
        }
        if (!tgt_id) {
            throw SemanticError("unknown location \"" + target + "\"");
        }
        edge.source = *src_id;
        edge.target = *tgt_id;

        for (const json& atom : require(item, "guard")) {
            const auto clock = require(atom, "clock").get<std::string>();
            const auto clock_id = automaton.find_clock(clock);
            if (!clock_id) {
                throw SemanticError("unknown clock \"" + clock + "\" in guard");
            }
            const json& constant = require(atom, "const");
            if (!constant.is_number_integer() || constant.get<std::int64_t>() < 0) {
                throw SemanticError("guard constant must be a nonnegative integer");
            }
            GuardAtom parsed;
            parsed.clock = *clock_id;
            parsed.op = parse_op(require(atom, "op").get<std::string>());
            parsed.bound = constant.get<std::uint32_t>();
            edge.guard.atoms.push_back(parsed);
        }
        for (const json& reset : require(item, "resets")) {
            const auto clock = reset.get<std::string>();
            const auto clock_id = automaton.find_clock(clock);
            if (!clock_id) {
                throw SemanticError("unknown clock \"" + clock + "\" in resets");
            }
            edge.resets.add(*clock_id);
        }
        automaton.edges.push_back(std::move(edge));
    }

    automaton.finalize();
    return automaton;
}

std::string serialize_automaton(const TimedAutomaton& automaton) {
    json doc;
    doc["clocks"] = automaton.clocks;
    doc["locations"] = automaton.locations;
    json edges = json::array();
    for (const Edge& e : automaton.edges) {
        json edge;
        edge["source"] = automaton.locations[e.source];
        edge["target"] = automaton.locations[e.target];
        json guard = json::array();
        for (const GuardAtom& atom : e.guard.atoms) {
            guard.push_back({{"clock", automaton.clocks[atom.clock]},
                             {"op", op_string(atom.op)},
                             {"const", atom.bound}});
        }
        edge["guard"] = std::move(guard);
        json resets = json::array();
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            if (e.resets.contains(x)) {
                resets.push_back(automaton.clocks[x]);
            }
        }
        edge["resets"] = std::move(resets);
        edges.push_back(std::move(edge));
    }
    doc["edges"] = std::move(edges);
    return doc.dump();
}

ClockValuation parse_valuation(const TimedAutomaton& automaton, std::string_view text,
                               std::vector<std::string>* defaulted) {
    ClockValuation result = ClockValuation::zero(automaton.num_clocks());
    std::vector<bool> assigned(automaton.num_clocks(), false);

    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, end - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected name=value in valuation, got \"" + std::string(item) + "\"");
        }
        const std::string name(item.substr(0, eq));
        const auto clock = automaton.find_clock(name);
        if (!clock) {
            throw SemanticError("unknown clock \"" + name + "\" in valuation");
        }
        const Rational value = Rational::parse(item.substr(eq + 1));
        if (!value.is_nonnegative()) {
            throw SemanticError("clock value must be nonnegative: " + std::string(item));
        }
        result[*clock] = value;
        assigned[*clock] = true;
        pos = end == text.size() ? end : end + 1;
    }

    if (defaulted != nullptr) {
        for (ClockId x = 0; x < automaton.num_clocks(); ++x) {
            if (!assigned[x]) {
                defaulted->push_back(automaton.clocks[x]);
            }
        }
    }
    return result;
}

std::string format_valuation(const TimedAutomaton& automaton, const ClockValuation& v) {
    std::ostringstream out;
    for (ClockId x = 0; x < v.size(); ++x) {
        if (x > 0) {
            out << ",";
        }
        out << automaton.clocks[x] << "=" << v[x].to_string();
    }
    return out.str();
}

}  // namespace tareach
