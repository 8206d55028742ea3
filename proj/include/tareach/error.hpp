#pragma once

#include <stdexcept>
#include <string>

namespace tareach {

/// Malformed input text (JSON documents, valuation strings, formula files).
/// The message carries a byte offset when one is known.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates a semantic rule (unknown clock,
/// duplicate name, reference to a missing location, ...).
struct SemanticError : std::runtime_error {
    explicit SemanticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tareach
