#pragma once

#include <stdexcept>
#include <string>

namespace tuplix {

/// Root of the engine's error hierarchy.
struct engine_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input is structurally unusable for the requested operation: wrong node
/// kind, a signed attribute where a flat one is required, operator nodes
/// left in a term an operation requires operator-free, and so on.
struct malformed_input : engine_error {
    using engine_error::engine_error;
};

/// Evaluation met a variable the assignment does not bind.
struct unbound_variable : engine_error {
    using engine_error::engine_error;
};

/// A function application does not match its definition's parameter count.
struct arity_mismatch : engine_error {
    using engine_error::engine_error;
};

/// The zero-decision procedure exhausted its case-split budget. Callers
/// treat this as Unknown.
struct resource_limit : engine_error {
    using engine_error::engine_error;
};

/// Attribute not declared by the network under consideration.
struct unknown_attribute : engine_error {
    using engine_error::engine_error;
};

/// Unit name not declared by any network in scope.
struct unknown_unit : engine_error {
    using engine_error::engine_error;
};

/// A function variable is still free where a basic form is required.
struct unbound_function_var : engine_error {
    using engine_error::engine_error;
};

/// Raised by the concrete-syntax reader; carries a source position.
struct parse_error : engine_error {
    int line = 0;
    int column = 0;
    parse_error(const std::string& msg, int line_, int col_)
        : engine_error(msg), line(line_), column(col_) {}
};

}  // namespace tuplix
