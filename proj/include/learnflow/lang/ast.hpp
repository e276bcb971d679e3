#pragma once

// Abstract syntax of model files. The parser fills in the syntactic fields;
// the type checker fills in `type` and `role` on expressions.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "learnflow/lang/type.hpp"
#include "learnflow/lang/value.hpp"

namespace learnflow::lang {

struct SourceLoc {
  int line = 0;
  int column = 0;
  std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// How a name occurrence is interpreted after type checking.
enum class NameRole {
  Unresolved,
  Variable,         // value variable: b(v)
  Deref,            // reference variable in a value position: s(b(w))
  Pointer,          // reference variable in a pointer position: b(w)
  Constant,         // declared constant
  PointerConstant,  // declared pointer name
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
  enum class Kind {
    Literal,  // literal
    Name,     // name
    RefOf,    // ref(name)
    Tuple,    // (args...)
    Set,      // {args...}
    List,     // [args...]
    Record,   // {fields[i] = args[i], ...}
    Field,    // args[0].name
    Proj,     // args[0].index (1-based)
    Unary,    // name in {"-", "!"}
    Binary,   // name is the operator
    Call,     // builtin name(args...)
    If,       // if args[0] then args[1] else args[2]
  };

  Kind kind = Kind::Literal;
  SourceLoc loc;
  Value literal;
  std::string name;
  std::size_t index = 0;
  std::vector<ExprPtr> args;
  std::vector<std::string> fields;

  Type type = Type::any();
  NameRole role = NameRole::Unresolved;

  static ExprPtr make(Kind k, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->loc = loc;
    return e;
  }
};

/// A multiset inscription: sum of count'expr terms.
struct Inscription {
  struct Term {
    std::uint64_t count = 1;
    ExprPtr expr;
  };
  std::vector<Term> terms;
  bool empty() const { return terms.empty(); }
};

/// One global-store action of a transition operator.
struct Action {
  enum class Kind { Set, Append, Add, New, Skip };
  Kind kind = Kind::Skip;
  std::string target;  // reference variable or pointer constant
  std::string field;   // empty: the whole pointee
  ExprPtr value;
  SourceLoc loc;
};

struct TypeDecl {
  std::string name;
  Type type;
  SourceLoc loc;
};

struct ConstDecl {
  std::string name;
  Type type;
  ExprPtr value;
  SourceLoc loc;
};

struct PointerDecl {
  std::string name;
  Type pointee;
  ExprPtr init;
  SourceLoc loc;
};

struct VarDecl {
  std::string name;
  Type type;
  SourceLoc loc;
};

struct PlaceDecl {
  std::string name;
  Type type;
  Inscription initial;
  SourceLoc loc;
};

struct TransitionDecl {
  std::string name;
  ExprPtr guard;  // null: true
  bool has_op = false;
  std::vector<Action> op;  // empty with has_op=false: skip
  SourceLoc loc;
};

struct ArcDecl {
  std::string from;
  std::string to;
  Inscription inscription;
  SourceLoc loc;
};

// `forall pat in "a" + "b"` ranges over the sum of the places' tokens.
struct Quantifier {
  ExprPtr pattern;
  std::vector<std::string> places;
};

struct InvariantDecl {
  std::string name;
  std::vector<Quantifier> over;
  ExprPtr predicate;
  SourceLoc loc;
};

struct ModelAst {
  std::vector<TypeDecl> types;
  std::vector<ConstDecl> consts;
  std::vector<PointerDecl> pointers;
  std::vector<VarDecl> vars;
  std::vector<PlaceDecl> places;
  std::vector<TransitionDecl> transitions;
  std::vector<ArcDecl> arcs;
  std::vector<InvariantDecl> invariants;
};

/// Deep syntactic equality, ignoring source locations and checker annotations.
bool same_syntax(const Expr& a, const Expr& b);
bool same_syntax(const ModelAst& a, const ModelAst& b);

/// Free variable names referenced by an expression (names not yet resolved
/// are reported as candidates; callers filter against declarations).
void collect_names(const Expr& e, std::vector<std::string>& out);

}  // namespace learnflow::lang
