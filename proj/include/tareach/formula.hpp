#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tareach/error.hpp"

namespace tareach {

enum class Sort : std::uint8_t { Real, Integer };
enum class Rel : std::uint8_t { Lt, Le, Eq };

struct VarDecl {
    std::string name;
    Sort sort = Sort::Real;

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

/// sum(coeffs[v] * v) + constant REL 0, with integer coefficients.
struct LinearAtom {
    std::map<std::uint32_t, std::int64_t> coeffs;
    std::int64_t constant = 0;
    Rel rel = Rel::Le;

    friend bool operator==(const LinearAtom&, const LinearAtom&) = default;
};

/// Positive boolean combination of linear atoms. The empty conjunction is
/// true and the empty disjunction is false; smart constructors keep the tree
/// free of single-child connectives.
struct FormulaNode {
    enum class Kind : std::uint8_t { Atom, And, Or };
    Kind kind = Kind::And;
    LinearAtom atom;
    std::vector<FormulaNode> children;

    static FormulaNode make_atom(LinearAtom a) {
        FormulaNode node;
        node.kind = Kind::Atom;
        node.atom = std::move(a);
        return node;
    }
    static FormulaNode conj(std::vector<FormulaNode> children) {
        if (children.size() == 1) {
            return std::move(children.front());
        }
        FormulaNode node;
        node.kind = Kind::And;
        node.children = std::move(children);
        return node;
    }
    static FormulaNode disj(std::vector<FormulaNode> children) {
        if (children.size() == 1) {
            return std::move(children.front());
        }
        FormulaNode node;
        node.kind = Kind::Or;
        node.children = std::move(children);
        return node;
    }
    static FormulaNode truth() { return conj({}); }
    static FormulaNode falsity() { return disj({}); }

    friend bool operator==(const FormulaNode&, const FormulaNode&) = default;
};

/// An existential formula of mixed linear arithmetic: one block of bound
/// variables (mixed sorts) over a quantifier-free positive matrix. Variable
/// ids index free variables first, then bound variables.
struct MixedFormula {
    std::vector<VarDecl> free_vars;
    std::vector<VarDecl> bound_vars;
    FormulaNode matrix;

    [[nodiscard]] std::uint32_t num_vars() const {
        return static_cast<std::uint32_t>(free_vars.size() + bound_vars.size());
    }
    [[nodiscard]] const VarDecl& var(std::uint32_t id) const {
        return id < free_vars.size() ? free_vars[id] : bound_vars[id - free_vars.size()];
    }

    friend bool operator==(const MixedFormula&, const MixedFormula&) = default;
};

/// Counts the linear atoms in a node tree.
std::size_t count_atoms(const FormulaNode& node);

/// True iff the matrix is a pure and/or/atom tree with every variable
/// reference in range: the structural "single existential block over a
/// quantifier-free matrix" shape.
bool well_formed_matrix(const MixedFormula& formula);

/// Renames bound variables to the documented scheme: integer-sorted bound
/// variables become u1, u2, ... and real-sorted ones f1, f2, ..., in
/// declaration order.
void canonicalize_bound_names(MixedFormula& formula);

/// SMT-LIB2 script: free variables declared as Real, the matrix wrapped in
/// an `exists` block when bound variables exist, integer variables coerced
/// via to_real at use sites.
std::string emit_smtlib(const MixedFormula& formula);

/// Lossless JSON rendering of the whole formula.
std::string emit_json(const MixedFormula& formula);

MixedFormula parse_formula_json(std::string_view text);

/// Reads back exactly the scripts produced by emit_smtlib.
MixedFormula parse_formula_smtlib(std::string_view text);

}  // namespace tareach
