#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "learnflow/lang/ast.hpp"
#include "learnflow/lang/diagnostic.hpp"
#include "learnflow/lang/value.hpp"
#include "learnflow/multiset.hpp"

namespace learnflow::lang {

using TokenBag = Multiset<Value>;

struct ArcRef {
  std::size_t place = 0;
  Inscription inscription;
};

struct PlaceInfo {
  std::string name;
  Type type;
  TokenBag initial;
};

struct TransitionInfo {
  std::string name;
  ExprPtr guard;  // null: true
  std::vector<Action> op;
  std::vector<ArcRef> inputs;   // sorted by place index
  std::vector<ArcRef> outputs;  // sorted by place index
  std::vector<std::string> variables;  // bound by input patterns, sorted
  std::vector<std::string> allocated;  // introduced by `new` actions
};

struct InvariantInfo {
  std::string name;
  std::vector<std::pair<ExprPtr, std::vector<std::size_t>>> over;  // pattern, place indices
  ExprPtr predicate;
  std::vector<std::string> variables;
};

/// A parsed and type-checked model: (P, T, F, τ, γ, θ, ε) plus declarations,
/// the initial marking and the initial global store.
struct Model {
  ModelAst ast;
  std::vector<PlaceInfo> places;
  std::vector<TransitionInfo> transitions;
  std::vector<InvariantInfo> invariants;
  std::map<std::string, Value> constants;
  std::map<std::string, Type> variables;
  std::map<std::string, Type> pointer_types;  // pointee types of declared pointers
  std::map<std::string, Value> pointer_init;

  std::optional<std::size_t> find_place(const std::string& name) const;
  std::optional<std::size_t> find_transition(const std::string& name) const;
  std::size_t place(const std::string& name) const;       // throws std::out_of_range
  std::size_t transition(const std::string& name) const;  // throws std::out_of_range
  const InvariantInfo& invariant(const std::string& name) const;

  /// True when the model uses no pointer declarations, Ref types or operators
  /// other than skip.
  bool is_colored_only() const;
  /// True when every place is Unit-typed and every inscription is constant.
  bool is_classical() const;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Type checks a parsed model. Throws ModelError listing every violation.
Model typecheck(ModelAst ast);

/// parse_model + typecheck.
ModelPtr load_model(std::string_view source);

/// Type checks a standalone expression against the model's declarations.
/// `expected` (may be null) drives bidirectional checking.
Type check_expression(const Model& model, Expr& e, const Type* expected);

/// Parses and evaluates a closed literal of the given type (e.g. a binding
/// value in a scenario file).
Value parse_value(const Model& model, std::string_view text, const Type& type);

}  // namespace learnflow::lang
