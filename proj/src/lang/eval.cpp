#include "learnflow/lang/eval.hpp"

#include <algorithm>

namespace learnflow::lang {

// --- Binding ---------------------------------------------------------------

const Value* Binding::find(const std::string& var) const {
  auto it = values_.find(var);
  return it == values_.end() ? nullptr : &it->second;
}

std::string Binding::to_string() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : values_) {
    if (!first) s += ", ";
    first = false;
    s += k + "=" + v.to_string();
  }
  return s + "}";
}

// --- GlobalStore -----------------------------------------------------------

const Value& GlobalStore::at(const std::string& pointer) const {
  auto it = cells_.find(pointer);
  if (it == cells_.end()) throw EvalError("dangling pointer '" + pointer + "'");
  return it->second.value;
}

const Type& GlobalStore::type_of(const std::string& pointer) const {
  auto it = cells_.find(pointer);
  if (it == cells_.end()) throw EvalError("dangling pointer '" + pointer + "'");
  return it->second.type;
}

void GlobalStore::declare(const std::string& pointer, Type pointee, Value v) {
  if (!conforms(v, pointee))
    throw EvalError("value " + v.to_string() + " does not fit pointer '" + pointer + "' of type " + pointee.to_string());
  cells_[pointer] = Cell{std::move(pointee), std::move(v)};
}

void GlobalStore::assign(const std::string& pointer, Value v) {
  auto it = cells_.find(pointer);
  if (it == cells_.end()) throw EvalError("dangling pointer '" + pointer + "'");
  if (!conforms(v, it->second.type))
    throw EvalError("type-violating assignment of " + v.to_string() + " to '" + pointer + "'");
  it->second.value = std::move(v);
}

std::string GlobalStore::allocate(Type pointee, Value v) {
  std::string name = "@" + std::to_string(next_fresh_);
  while (cells_.count(name)) name = "@" + std::to_string(++next_fresh_);
  ++next_fresh_;
  declare(name, std::move(pointee), std::move(v));
  return name;
}

std::vector<std::string> GlobalStore::pointers() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : cells_) out.push_back(k);
  return out;
}

std::string GlobalStore::key() const {
  std::string s = "#" + std::to_string(next_fresh_);
  for (const auto& [k, c] : cells_) s += ";" + k + "=" + c.value.to_string();
  return s;
}

bool GlobalStore::values_equal(const GlobalStore& other) const {
  if (cells_.size() != other.cells_.size()) return false;
  auto it = other.cells_.begin();
  for (const auto& [k, c] : cells_) {
    if (k != it->first || !(c.value == it->second.value)) return false;
    ++it;
  }
  return true;
}

GlobalStore initial_store(const Model& model) {
  GlobalStore s;
  for (const auto& [name, type] : model.pointer_types) s.declare(name, type, model.pointer_init.at(name));
  return s;
}

// --- evaluation ------------------------------------------------------------

namespace {

std::int64_t checked(bool overflow, std::int64_t r) {
  if (overflow) throw EvalError("integer overflow");
  return r;
}

const Value& lookup(const Expr& e, const Binding& b) {
  const Value* v = b.find(e.name);
  if (!v) throw EvalError("unbound variable '" + e.name + "' at " + e.loc.to_string());
  return *v;
}

Value eval_binary(const Expr& e, const Binding& b, const GlobalStore& s) {
  const std::string& op = e.name;
  if (op == "&&") return Value::boolean(eval_expr(*e.args[0], b, s).as_bool() && eval_expr(*e.args[1], b, s).as_bool());
  if (op == "||") return Value::boolean(eval_expr(*e.args[0], b, s).as_bool() || eval_expr(*e.args[1], b, s).as_bool());
  Value l = eval_expr(*e.args[0], b, s);
  Value r = eval_expr(*e.args[1], b, s);
  if (op == "==") return Value::boolean(l == r);
  if (op == "!=") return Value::boolean(!(l == r));
  if (op == "in") {
    if (r.is(Value::Kind::Set)) return Value::boolean(r.set_contains(l));
    return Value::boolean(std::find(r.items().begin(), r.items().end(), l) != r.items().end());
  }
  if (op == "subset")
    return Value::boolean(std::includes(r.items().begin(), r.items().end(), l.items().begin(), l.items().end()));
  std::int64_t x = l.as_int(), y = r.as_int(), out = 0;
  bool overflow = false;
  if (op == "+" || op == "-" || op == "*") {
    overflow = op == "+"   ? __builtin_add_overflow(x, y, &out)
               : op == "-" ? __builtin_sub_overflow(x, y, &out)
                           : __builtin_mul_overflow(x, y, &out);
    return Value::integer(checked(overflow, out));
  }
  if (op == "/" || op == "%") {
    if (y == 0) throw EvalError("division by zero at " + e.loc.to_string());
    if (x == INT64_MIN && y == -1) throw EvalError("integer overflow");
    return Value::integer(op == "/" ? x / y : x % y);
  }
  if (op == "<") return Value::boolean(x < y);
  if (op == "<=") return Value::boolean(x <= y);
  if (op == ">") return Value::boolean(x > y);
  if (op == ">=") return Value::boolean(x >= y);
  throw EvalError("unknown operator '" + op + "'");
}

Value eval_call(const Expr& e, const Binding& b, const GlobalStore& s) {
  std::vector<Value> args;
  for (const auto& a : e.args) args.push_back(eval_expr(*a, b, s));
  const std::string& fn = e.name;
  if (fn == "union" || fn == "inter" || fn == "diff") {
    const auto& x = args[0].items();
    const auto& y = args[1].items();
    std::vector<Value> out;
    if (fn == "union") std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    else if (fn == "inter") std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    else std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return Value::set(std::move(out));
  }
  if (fn == "insert" || fn == "remove") {
    std::vector<Value> items = args[0].items();
    if (fn == "insert") items.push_back(args[1]);
    else items.erase(std::remove(items.begin(), items.end(), args[1]), items.end());
    return Value::set(std::move(items));
  }
  if (fn == "append") {
    std::vector<Value> items = args[0].items();
    items.push_back(args[1]);
    return Value::list(std::move(items));
  }
  if (fn == "concat") {
    std::vector<Value> items = args[0].items();
    items.insert(items.end(), args[1].items().begin(), args[1].items().end());
    return Value::list(std::move(items));
  }
  if (fn == "elems") return Value::set(args[0].items());
  if (fn == "size") return Value::integer(static_cast<std::int64_t>(args[0].items().size()));
  throw EvalError("unknown function '" + fn + "'");
}

}  // namespace

Value eval_expr(const Expr& e, const Binding& b, const GlobalStore& s) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Literal: return e.literal;
    case K::Name:
      switch (e.role) {
        case NameRole::Variable:
        case NameRole::Pointer: return lookup(e, b);
        case NameRole::Deref: return s.at(lookup(e, b).pointer_name());
        case NameRole::Constant: return e.literal;
        case NameRole::PointerConstant: return Value::pointer(e.name);
        case NameRole::Unresolved: break;
      }
      throw EvalError("unresolved name '" + e.name + "' (expression not type checked)");
    case K::RefOf: return lookup(e, b);
    case K::Tuple:
    case K::Set:
    case K::List: {
      std::vector<Value> items;
      items.reserve(e.args.size());
      for (const auto& a : e.args) items.push_back(eval_expr(*a, b, s));
      if (e.kind == K::Tuple) return Value::tuple(std::move(items));
      if (e.kind == K::Set) return Value::set(std::move(items));
      return Value::list(std::move(items));
    }
    case K::Record: {
      std::vector<std::pair<std::string, Value>> fields;
      for (std::size_t i = 0; i < e.args.size(); ++i) fields.emplace_back(e.fields[i], eval_expr(*e.args[i], b, s));
      return Value::record(std::move(fields));
    }
    case K::Field: return eval_expr(*e.args[0], b, s).field(e.name);
    case K::Proj: return eval_expr(*e.args[0], b, s).items().at(e.index - 1);
    case K::Unary: {
      Value v = eval_expr(*e.args[0], b, s);
      if (e.name == "!") return Value::boolean(!v.as_bool());
      if (v.as_int() == INT64_MIN) throw EvalError("integer overflow");
      return Value::integer(-v.as_int());
    }
    case K::Binary: return eval_binary(e, b, s);
    case K::Call: return eval_call(e, b, s);
    case K::If:
      return eval_expr(*e.args[0], b, s).as_bool() ? eval_expr(*e.args[1], b, s) : eval_expr(*e.args[2], b, s);
  }
  throw EvalError("unsupported expression");
}

bool eval_guard(const ExprPtr& g, const Binding& b, const GlobalStore& s) {
  if (!g) return true;
  return eval_expr(*g, b, s).as_bool();
}

TokenBag eval_inscription(const Inscription& ins, const Binding& b, const GlobalStore& s) {
  TokenBag bag;
  for (const auto& term : ins.terms) bag.add(eval_expr(*term.expr, b, s), term.count);
  return bag;
}

Transformed apply_operator(const std::vector<Action>& op, const Binding& b, const GlobalStore& s,
                           const Model& model) {
  Transformed out{s, b};
  for (const auto& act : op) {
    if (act.kind == Action::Kind::Skip) continue;
    // actions see the store as left by the previous action
    Value v = eval_expr(*act.value, out.binding, out.store);
    if (act.kind == Action::Kind::New) {
      const Type& pointee = model.variables.at(act.target).elem();
      std::string name = out.store.allocate(pointee, std::move(v));
      out.binding.bind(act.target, Value::pointer(name));
      continue;
    }
    std::string ptr;
    if (const Value* bound = out.binding.find(act.target)) ptr = bound->pointer_name();
    else if (model.pointer_types.count(act.target)) ptr = act.target;
    else throw EvalError("unbound reference variable '" + act.target + "'");

    Value cell = out.store.at(ptr);
    Value slot = act.field.empty() ? cell : cell.field(act.field);
    Value updated;
    switch (act.kind) {
      case Action::Kind::Set: updated = std::move(v); break;
      case Action::Kind::Append: {
        std::vector<Value> items = slot.items();
        items.push_back(std::move(v));
        updated = Value::list(std::move(items));
        break;
      }
      case Action::Kind::Add: {
        std::vector<Value> items = slot.items();
        items.push_back(std::move(v));
        updated = Value::set(std::move(items));
        break;
      }
      default: break;
    }
    out.store.assign(ptr, act.field.empty() ? std::move(updated) : cell.with_field(act.field, std::move(updated)));
  }
  return out;
}

// --- pattern matching ------------------------------------------------------

namespace {

bool is_binder(const Expr& e) {
  return (e.kind == Expr::Kind::Name && (e.role == NameRole::Variable || e.role == NameRole::Pointer)) ||
         e.kind == Expr::Kind::RefOf;
}

void all_variables(const Expr& e, std::vector<std::string>& out) {
  if ((e.kind == Expr::Kind::Name &&
       (e.role == NameRole::Variable || e.role == NameRole::Deref || e.role == NameRole::Pointer)) ||
      e.kind == Expr::Kind::RefOf)
    out.push_back(e.name);
  for (const auto& a : e.args) all_variables(*a, out);
}

bool fully_bound(const Expr& e, const Binding& b) {
  std::vector<std::string> vars;
  all_variables(e, vars);
  return std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return b.has(v); });
}

}  // namespace

MatchResult match_pattern(const Expr& pattern, const Value& token, Binding& b, const GlobalStore& s) {
  if (is_binder(pattern)) {
    if (const Value* v = b.find(pattern.name)) return *v == token ? MatchResult::Matched : MatchResult::Failed;
    b.bind(pattern.name, token);
    return MatchResult::Matched;
  }
  if ((pattern.kind == Expr::Kind::Tuple && token.is(Value::Kind::Tuple)) ||
      (pattern.kind == Expr::Kind::List && token.is(Value::Kind::List))) {
    if (pattern.args.size() != token.items().size()) return MatchResult::Failed;
    MatchResult result = MatchResult::Matched;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
      MatchResult r = match_pattern(*pattern.args[i], token.items()[i], b, s);
      if (r == MatchResult::Failed) return r;
      if (r == MatchResult::Deferred) result = r;
    }
    return result;
  }
  if (!fully_bound(pattern, b)) return MatchResult::Deferred;
  return eval_expr(pattern, b, s) == token ? MatchResult::Matched : MatchResult::Failed;
}

void pattern_variables(const Expr& e, std::vector<std::string>& out) {
  if (is_binder(e)) {
    out.push_back(e.name);
    return;
  }
  if (e.kind == Expr::Kind::Tuple || e.kind == Expr::Kind::List)
    for (const auto& a : e.args) pattern_variables(*a, out);
}

void required_variables(const Expr& e, std::vector<std::string>& out) {
  if (is_binder(e)) return;
  if (e.kind == Expr::Kind::Tuple || e.kind == Expr::Kind::List) {
    for (const auto& a : e.args) required_variables(*a, out);
    return;
  }
  all_variables(e, out);
}

}  // namespace learnflow::lang
