#pragma once

// ν(e, b, s): evaluation of expressions, guards and operators under a binding
// and a global store.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "learnflow/lang/ast.hpp"
#include "learnflow/lang/diagnostic.hpp"
#include "learnflow/lang/model.hpp"
#include "learnflow/lang/value.hpp"

namespace learnflow::lang {

/// Variable name -> value; reference variables map to Pointer values.
class Binding {
 public:
  Binding() = default;
  Binding(std::initializer_list<std::pair<const std::string, Value>> init) : values_(init) {}

  const Value* find(const std::string& var) const;
  bool has(const std::string& var) const { return values_.count(var) != 0; }
  void bind(const std::string& var, Value v) { values_[var] = std::move(v); }
  const std::map<std::string, Value>& values() const { return values_; }
  bool empty() const { return values_.empty(); }

  /// Canonical text "{id=34, r=[]}".
  std::string to_string() const;

  friend bool operator==(const Binding&, const Binding&) = default;
  friend bool operator<(const Binding& a, const Binding& b) { return a.values_ < b.values_; }

 private:
  std::map<std::string, Value> values_;
};

/// s : Pnt -> U, plus the counter for fresh pointer names `@<n>`.
class GlobalStore {
 public:
  GlobalStore() = default;

  /// Throws EvalError for an unallocated name.
  const Value& at(const std::string& pointer) const;
  const Type& type_of(const std::string& pointer) const;
  bool allocated(const std::string& pointer) const { return cells_.count(pointer) != 0; }
  /// Declares a named pointer with its pointee type and value.
  void declare(const std::string& pointer, Type pointee, Value v);
  /// Overwrites an allocated cell; throws EvalError on a type violation.
  void assign(const std::string& pointer, Value v);
  /// Allocates `@<n>` with the next counter value.
  std::string allocate(Type pointee, Value v);

  std::size_t size() const { return cells_.size(); }
  std::uint64_t next_fresh() const { return next_fresh_; }
  std::vector<std::string> pointers() const;

  /// Canonical text of all cells plus the fresh counter.
  std::string key() const;

  friend bool operator==(const GlobalStore& a, const GlobalStore& b) {
    return a.next_fresh_ == b.next_fresh_ && a.values_equal(b);
  }

 private:
  bool values_equal(const GlobalStore& other) const;
  struct Cell {
    Type type;
    Value value;
  };
  std::map<std::string, Cell> cells_;
  std::uint64_t next_fresh_ = 0;
};

/// The store holding every declared pointer at its initial value.
GlobalStore initial_store(const Model& model);

Value eval_expr(const Expr& e, const Binding& b, const GlobalStore& s);
/// Absent guard (null) evaluates to true.
bool eval_guard(const ExprPtr& g, const Binding& b, const GlobalStore& s);
/// Evaluates every term of an inscription into a token multiset.
TokenBag eval_inscription(const Inscription& ins, const Binding& b, const GlobalStore& s);

struct Transformed {
  GlobalStore store;
  Binding binding;  // extended with pointers created by `new`
};

/// o(θ(t))(s): applies actions in order; the input store is not modified.
Transformed apply_operator(const std::vector<Action>& op, const Binding& b, const GlobalStore& s,
                           const Model& model);

enum class MatchResult { Matched, Failed, Deferred };

/// Matches a checked pattern expression against a token, extending `b`.
/// Variables in pattern positions bind; any other subexpression must be
/// fully bound (Deferred otherwise) and compares by value. On Failed or
/// Deferred, `b` may hold partial bindings and should be discarded.
MatchResult match_pattern(const Expr& pattern, const Value& token, Binding& b, const GlobalStore& s);

/// Variables occurring in binding (pattern) positions of an expression.
void pattern_variables(const Expr& e, std::vector<std::string>& out);
/// Variables an expression needs bound before it can be matched/evaluated.
void required_variables(const Expr& e, std::vector<std::string>& out);

}  // namespace learnflow::lang
