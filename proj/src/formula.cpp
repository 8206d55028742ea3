#include "tareach/formula.hpp"

#include <functional>
#include <sstream>

#include <json.hpp>

namespace tareach {

std::size_t count_atoms(const FormulaNode& node) {
    if (node.kind == FormulaNode::Kind::Atom) {
        return 1;
    }
    std::size_t total = 0;
    for (const FormulaNode& child : node.children) {
        total += count_atoms(child);
    }
    return total;
}

bool well_formed_matrix(const MixedFormula& formula) {
    const std::uint32_t vars = formula.num_vars();
    std::function<bool(const FormulaNode&)> walk = [&](const FormulaNode& node) {
        switch (node.kind) {
            case FormulaNode::Kind::Atom:
                if (!node.children.empty()) {
                    return false;
                }
                for (const auto& [var, coeff] : node.atom.coeffs) {
                    if (var >= vars || coeff == 0) {
                        return false;
                    }
                }
                return true;
            case FormulaNode::Kind::And:
            case FormulaNode::Kind::Or:
                for (const FormulaNode& child : node.children) {
                    if (!walk(child)) {
                        return false;
                    }
                }
                return true;
        }
        return false;
    };
    return walk(formula.matrix);
}

void canonicalize_bound_names(MixedFormula& formula) {
    std::uint32_t ints = 0;
    std::uint32_t reals = 0;
    for (VarDecl& decl : formula.bound_vars) {
        if (decl.sort == Sort::Integer) {
            decl.name = "u" + std::to_string(++ints);
        } else {
            decl.name = "f" + std::to_string(++reals);
        }
    }
}

namespace {

// --- SMT-LIB emission ---------------------------------------------------

std::string render_var(const MixedFormula& f, std::uint32_t id) {
    const VarDecl& decl = f.var(id);
    if (decl.sort == Sort::Integer) {
        return "(to_real " + decl.name + ")";
    }
    return decl.name;
}

std::string render_side(const MixedFormula& f,
                        const std::vector<std::pair<std::uint32_t, std::int64_t>>& terms,
                        std::int64_t constant) {
    std::vector<std::string> parts;
    for (const auto& [var, coeff] : terms) {
        if (coeff == 1) {
            parts.push_back(render_var(f, var));
        } else {
            parts.push_back("(* " + std::to_string(coeff) + " " + render_var(f, var) + ")");
        }
    }
    if (constant != 0 || parts.empty()) {
        parts.push_back(std::to_string(constant));
    }
    if (parts.size() == 1) {
        return parts.front();
    }
    std::string out = "(+";
    for (const std::string& part : parts) {
        out += " " + part;
    }
    return out + ")";
}

std::string render_atom(const MixedFormula& f, const LinearAtom& atom) {
    std::vector<std::pair<std::uint32_t, std::int64_t>> pos;
    std::vector<std::pair<std::uint32_t, std::int64_t>> neg;
    for (const auto& [var, coeff] : atom.coeffs) {
        if (coeff > 0) {
            pos.emplace_back(var, coeff);
        } else if (coeff < 0) {
            neg.emplace_back(var, -coeff);
        }
    }
    const std::int64_t left_const = atom.constant > 0 ? atom.constant : 0;
    const std::int64_t right_const = atom.constant < 0 ? -atom.constant : 0;
    const std::string left = render_side(f, pos, left_const);
    const std::string right = render_side(f, neg, right_const);
    // "0 <= R" reads better flipped as "R >= 0"; equalities keep their sides.
    if (pos.empty() && left_const == 0 && atom.rel != Rel::Eq) {
        const char* op = atom.rel == Rel::Lt ? ">" : ">=";
        return std::string("(") + op + " " + right + " " + left + ")";
    }
    const char* op = atom.rel == Rel::Lt ? "<" : atom.rel == Rel::Le ? "<=" : "=";
    return std::string("(") + op + " " + left + " " + right + ")";
}

std::string render_node(const MixedFormula& f, const FormulaNode& node) {
    switch (node.kind) {
        case FormulaNode::Kind::Atom:
            return render_atom(f, node.atom);
        case FormulaNode::Kind::And:
        case FormulaNode::Kind::Or: {
            if (node.children.empty()) {
                return node.kind == FormulaNode::Kind::And ? "true" : "false";
            }
            if (node.children.size() == 1) {
                return render_node(f, node.children.front());
            }
            std::string out = node.kind == FormulaNode::Kind::And ? "(and" : "(or";
            for (const FormulaNode& child : node.children) {
                out += " " + render_node(f, child);
            }
            return out + ")";
        }
    }
    throw SemanticError("unreachable formula node kind");
}

// --- s-expression reader -------------------------------------------------

struct SExp {
    bool is_list = false;
    std::string atom;
    std::vector<SExp> items;
};

struct SExpReader {
    std::string_view text;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() &&
               (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ';')) {
            if (text[pos] == ';') {
                while (pos < text.size() && text[pos] != '\n') {
                    ++pos;
                }
            } else {
                ++pos;
            }
        }
    }

    bool done() {
        skip_space();
        return pos >= text.size();
    }

    SExp read() {
        skip_space();
        if (pos >= text.size()) {
            throw ParseError("unexpected end of script at byte " + std::to_string(pos));
        }
        if (text[pos] == '(') {
            ++pos;
            SExp list;
            list.is_list = true;
            while (true) {
                skip_space();
                if (pos >= text.size()) {
                    throw ParseError("unbalanced parenthesis at byte " + std::to_string(pos));
                }
                if (text[pos] == ')') {
                    ++pos;
                    return list;
                }
                list.items.push_back(read());
            }
        }
        SExp atom;
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != '(' && text[pos] != ')' &&
               !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        atom.atom = std::string(text.substr(start, pos - start));
        if (atom.atom.empty()) {
            throw ParseError("empty token at byte " + std::to_string(start));
        }
        return atom;
    }
};

struct LinearTerm {
    std::map<std::uint32_t, std::int64_t> coeffs;
    std::int64_t constant = 0;
};

bool is_number(const std::string& s) {
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i >= s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

LinearTerm parse_term(const SExp& e, const std::map<std::string, std::uint32_t>& vars) {
    LinearTerm result;
    if (!e.is_list) {
        if (is_number(e.atom)) {
            result.constant = std::stoll(e.atom);
            return result;
        }
        auto it = vars.find(e.atom);
        if (it == vars.end()) {
            throw ParseError("unknown variable \"" + e.atom + "\"");
        }
        result.coeffs[it->second] = 1;
        return result;
    }
    if (e.items.empty() || e.items[0].is_list) {
        throw ParseError("malformed term");
    }
    const std::string& head = e.items[0].atom;
    if (head == "to_real") {
        return parse_term(e.items.at(1), vars);
    }
    if (head == "+") {
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            LinearTerm part = parse_term(e.items[i], vars);
            result.constant += part.constant;
            for (const auto& [var, coeff] : part.coeffs) {
                result.coeffs[var] += coeff;
            }
        }
        return result;
    }
    if (head == "*") {
        if (e.items.size() != 3 || e.items[1].is_list || !is_number(e.items[1].atom)) {
            throw ParseError("expected (* k term)");
        }
        const std::int64_t k = std::stoll(e.items[1].atom);
        LinearTerm part = parse_term(e.items[2], vars);
        part.constant *= k;
        for (auto& [var, coeff] : part.coeffs) {
            coeff *= k;
        }
        return part;
    }
    throw ParseError("unsupported term head \"" + head + "\"");
}

FormulaNode parse_body(const SExp& e, const std::map<std::string, std::uint32_t>& vars) {
    if (!e.is_list) {
        if (e.atom == "true") {
            return FormulaNode::truth();
        }
        if (e.atom == "false") {
            return FormulaNode::falsity();
        }
        throw ParseError("unexpected token \"" + e.atom + "\" in formula body");
    }
    if (e.items.empty() || e.items[0].is_list) {
        throw ParseError("malformed formula body");
    }
    const std::string& head = e.items[0].atom;
    if (head == "and" || head == "or") {
        std::vector<FormulaNode> children;
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            children.push_back(parse_body(e.items[i], vars));
        }
        FormulaNode node;
        node.kind = head == "and" ? FormulaNode::Kind::And : FormulaNode::Kind::Or;
        node.children = std::move(children);
        return node;
    }
    if (head == "<" || head == "<=" || head == "=" || head == ">" || head == ">=") {
        const LinearTerm a = parse_term(e.items.at(1), vars);
        const LinearTerm b = parse_term(e.items.at(2), vars);
        const bool flip = head == ">" || head == ">=";
        const LinearTerm& lhs = flip ? b : a;
        const LinearTerm& rhs = flip ? a : b;
        LinearAtom atom;
        atom.rel = head == "=" ? Rel::Eq : (head == "<" || head == ">") ? Rel::Lt : Rel::Le;
        atom.constant = lhs.constant - rhs.constant;
        for (const auto& [var, coeff] : lhs.coeffs) {
            atom.coeffs[var] += coeff;
        }
        for (const auto& [var, coeff] : rhs.coeffs) {
            atom.coeffs[var] -= coeff;
        }
        std::erase_if(atom.coeffs, [](const auto& kv) { return kv.second == 0; });
        return FormulaNode::make_atom(std::move(atom));
    }
    throw ParseError("unsupported connective \"" + head + "\"");
}

Sort parse_sort(const std::string& name) {
    if (name == "Real") {
        return Sort::Real;
    }
    if (name == "Int") {
        return Sort::Integer;
    }
    throw ParseError("unknown sort \"" + name + "\"");
}

// --- JSON ----------------------------------------------------------------

using nlohmann::json;

json node_to_json(const MixedFormula& f, const FormulaNode& node) {
    switch (node.kind) {
        case FormulaNode::Kind::Atom: {
            json coeffs = json::object();
            for (const auto& [var, coeff] : node.atom.coeffs) {
                coeffs[f.var(var).name] = coeff;
            }
            const char* rel = node.atom.rel == Rel::Lt    ? "<"
                              : node.atom.rel == Rel::Le ? "<="
                                                         : "=";
            return json{{"atom",
                         {{"coeffs", std::move(coeffs)},
                          {"const", node.atom.constant},
                          {"rel", rel}}}};
        }
        case FormulaNode::Kind::And:
        case FormulaNode::Kind::Or: {
            json children = json::array();
            for (const FormulaNode& child : node.children) {
                children.push_back(node_to_json(f, child));
            }
            return json{{node.kind == FormulaNode::Kind::And ? "and" : "or",
                         std::move(children)}};
        }
    }
    throw SemanticError("unreachable formula node kind");
}

json decls_to_json(const std::vector<VarDecl>& decls) {
    json out = json::array();
    for (const VarDecl& decl : decls) {
        out.push_back({{"name", decl.name},
                       {"sort", decl.sort == Sort::Real ? "real" : "int"}});
    }
    return out;
}

std::vector<VarDecl> decls_from_json(const json& value) {
    std::vector<VarDecl> decls;
    for (const json& item : value) {
        VarDecl decl;
        decl.name = item.at("name").get<std::string>();
        const auto sort = item.at("sort").get<std::string>();
        if (sort == "real") {
            decl.sort = Sort::Real;
        } else if (sort == "int") {
            decl.sort = Sort::Integer;
        } else {
            throw ParseError("unknown sort \"" + sort + "\"");
        }
        decls.push_back(std::move(decl));
    }
    return decls;
}

FormulaNode node_from_json(const json& value,
                           const std::map<std::string, std::uint32_t>& vars) {
    if (!value.is_object() || value.size() != 1) {
        throw ParseError("formula node must be a single-key object");
    }
    if (auto it = value.find("atom"); it != value.end()) {
        LinearAtom atom;
        for (const auto& [name, coeff] : it->at("coeffs").items()) {
            auto var = vars.find(name);
            if (var == vars.end()) {
                throw ParseError("unknown variable \"" + name + "\" in formula");
            }
            atom.coeffs[var->second] = coeff.get<std::int64_t>();
        }
        atom.constant = it->at("const").get<std::int64_t>();
        const auto rel = it->at("rel").get<std::string>();
        if (rel == "<") {
            atom.rel = Rel::Lt;
        } else if (rel == "<=") {
            atom.rel = Rel::Le;
        } else if (rel == "=") {
            atom.rel = Rel::Eq;
        } else {
            throw ParseError("unknown relation \"" + rel + "\"");
        }
        return FormulaNode::make_atom(std::move(atom));
    }
    const bool is_and = value.contains("and");
    const json& children = is_and ? value.at("and") : value.at("or");
    FormulaNode node;
    node.kind = is_and ? FormulaNode::Kind::And : FormulaNode::Kind::Or;
    for (const json& child : children) {
        node.children.push_back(node_from_json(child, vars));
    }
    return node;
}

std::map<std::string, std::uint32_t> name_table(const MixedFormula& f) {
    std::map<std::string, std::uint32_t> vars;
    for (std::uint32_t id = 0; id < f.num_vars(); ++id) {
        if (!vars.emplace(f.var(id).name, id).second) {
            throw SemanticError("duplicate variable name \"" + f.var(id).name + "\"");
        }
    }
    return vars;
}

}  // namespace

std::string emit_smtlib(const MixedFormula& formula) {
    std::ostringstream out;
    out << "(set-logic ALL)\n";
    for (const VarDecl& decl : formula.free_vars) {
        out << "(declare-const " << decl.name << " Real)\n";
    }
    std::string body = render_node(formula, formula.matrix);
    if (!formula.bound_vars.empty()) {
        std::string bindings;
        for (const VarDecl& decl : formula.bound_vars) {
            bindings += "(" + decl.name + " " +
                        (decl.sort == Sort::Integer ? "Int" : "Real") + ") ";
        }
        bindings.pop_back();
        body = "(exists (" + bindings + ") " + body + ")";
    }
    out << "(assert " << body << ")\n(check-sat)\n";
    return out.str();
}

MixedFormula parse_formula_smtlib(std::string_view text) {
    SExpReader reader{text};
    MixedFormula formula;
    bool seen_assert = false;
    while (!reader.done()) {
        const SExp form = reader.read();
        if (!form.is_list || form.items.empty() || form.items[0].is_list) {
            throw ParseError("expected a command form");
        }
        const std::string& head = form.items[0].atom;
        if (head == "set-logic" || head == "check-sat") {
            continue;
        }
        if (head == "declare-const") {
            formula.free_vars.push_back(
                VarDecl{form.items.at(1).atom, parse_sort(form.items.at(2).atom)});
            continue;
        }
        if (head != "assert") {
            throw ParseError("unsupported command \"" + head + "\"");
        }
        if (seen_assert) {
            throw ParseError("multiple assert commands");
        }
        seen_assert = true;

        std::map<std::string, std::uint32_t> vars;
        for (std::uint32_t id = 0; id < formula.free_vars.size(); ++id) {
            vars[formula.free_vars[id].name] = id;
        }
        const SExp* body = &form.items.at(1);
        if (body->is_list && !body->items.empty() && !body->items[0].is_list &&
            body->items[0].atom == "exists") {
            for (const SExp& binding : body->items.at(1).items) {
                VarDecl decl{binding.items.at(0).atom, parse_sort(binding.items.at(1).atom)};
                vars[decl.name] =
                    static_cast<std::uint32_t>(formula.free_vars.size() +
                                               formula.bound_vars.size());
                formula.bound_vars.push_back(std::move(decl));
            }
            body = &body->items.at(2);
        }
        formula.matrix = parse_body(*body, vars);
    }
    if (!seen_assert) {
        throw ParseError("script has no assert command");
    }
    return formula;
}

std::string emit_json(const MixedFormula& formula) {
    json doc;
    doc["free"] = decls_to_json(formula.free_vars);
    doc["exists"] = decls_to_json(formula.bound_vars);
    doc["matrix"] = node_to_json(formula, formula.matrix);
    return doc.dump();
}

MixedFormula parse_formula_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    MixedFormula formula;
    formula.free_vars = decls_from_json(doc.at("free"));
    formula.bound_vars = decls_from_json(doc.at("exists"));
    formula.matrix = node_from_json(doc.at("matrix"), name_table(formula));
    return formula;
}

}  // namespace tareach
