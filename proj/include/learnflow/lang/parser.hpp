#pragma once

#include <string>
#include <string_view>

#include "learnflow/lang/ast.hpp"
#include "learnflow/lang/diagnostic.hpp"

namespace learnflow::lang {

/// Parses a model file. Throws ModelError with a located diagnostic on the
/// first syntax error, and for duplicate declarations.
ModelAst parse_model(std::string_view source);

/// Parses a standalone expression (used for scenario bindings and queries).
ExprPtr parse_expression(std::string_view source);

/// Parses a standalone type, resolving aliases declared in `ast`.
Type parse_type(std::string_view source, const ModelAst& ast);

/// Canonical text of a model; parse_model(print_model(a)) is syntactically
/// equal to a.
std::string print_model(const ModelAst& ast);
std::string print_expr(const Expr& e);
std::string print_inscription(const Inscription& ins);
std::string print_name(const std::string& name);

}  // namespace learnflow::lang
