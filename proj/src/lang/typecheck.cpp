#include <algorithm>
#include <stdexcept>

#include "learnflow/lang/eval.hpp"
#include "learnflow/lang/model.hpp"
#include "learnflow/lang/parser.hpp"

namespace learnflow::lang {

namespace {

struct TypeFailure {
  SourceLoc loc;
  std::string message;
};

[[noreturn]] void type_fail(SourceLoc loc, std::string msg) { throw TypeFailure{loc, std::move(msg)}; }

std::string show(const Type& t) { return t.to_string(); }

Type literal_type(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool: return Type::boolean();
    case Value::Kind::Int: return Type::integer();
    case Value::Kind::Str: return Type::string();
    default: return Type::unit();
  }
}

class Checker {
 public:
  explicit Checker(const Model& m) : model_(m) {}

  Type check(Expr& e, const Type* exp) {
    Type t = infer(e, exp);
    if (exp && compatible(t, *exp)) t = unify(t, *exp);
    e.type = t;
    return t;
  }

  Type expect_type(Expr& e, const Type& want, const std::string& context) {
    Type t = check(e, &want);
    if (!compatible(t, want))
      type_fail(e.loc, context + ": expected " + show(want) + ", found " + show(t));
    return t;
  }

 private:
  Type infer(Expr& e, const Type* exp) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Literal: return literal_type(e.literal);
      case K::Name: return name(e, exp);
      case K::RefOf: {
        auto it = model_.variables.find(e.name);
        if (it == model_.variables.end() || !it->second.is(Type::Kind::Ref))
          type_fail(e.loc, "ref(" + e.name + ") requires a reference variable");
        e.role = NameRole::Pointer;
        return it->second;
      }
      case K::Tuple: {
        std::vector<Type> items;
        bool guided = exp && exp->is(Type::Kind::Tuple) && exp->items().size() == e.args.size();
        for (std::size_t i = 0; i < e.args.size(); ++i)
          items.push_back(check(*e.args[i], guided ? &exp->items()[i] : nullptr));
        return Type::tuple(std::move(items));
      }
      case K::Set:
      case K::List: {
        Type::Kind want = e.kind == K::Set ? Type::Kind::Set : Type::Kind::List;
        Type elem = exp && exp->is(want) ? exp->elem() : Type::any();
        for (auto& a : e.args) {
          Type t = check(*a, &elem);
          if (!compatible(t, elem))
            type_fail(a->loc, "collection elements disagree: " + show(elem) + " vs " + show(t));
          elem = unify(elem, t);
        }
        return want == Type::Kind::Set ? Type::set_of(elem) : Type::list_of(elem);
      }
      case K::Record: {
        std::vector<std::pair<std::string, Type>> fields;
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          const Type* fexp = exp && exp->is(Type::Kind::Record) ? exp->field(e.fields[i]) : nullptr;
          fields.emplace_back(e.fields[i], check(*e.args[i], fexp));
        }
        return Type::record(std::move(fields));
      }
      case K::Field: {
        Type r = check(*e.args[0], nullptr);
        if (!r.is(Type::Kind::Record)) type_fail(e.loc, "field access ." + e.name + " on non-record " + show(r));
        const Type* f = r.field(e.name);
        if (!f) type_fail(e.loc, "record " + show(r) + " has no field '" + e.name + "'");
        return *f;
      }
      case K::Proj: {
        Type t = check(*e.args[0], nullptr);
        if (!t.is(Type::Kind::Tuple) || e.index > t.items().size())
          type_fail(e.loc, "projection ." + std::to_string(e.index) + " on " + show(t));
        return t.items()[e.index - 1];
      }
      case K::Unary: {
        Type want = e.name == "-" ? Type::integer() : Type::boolean();
        expect_type(*e.args[0], want, "operand of '" + e.name + "'");
        return want;
      }
      case K::Binary: return binary(e);
      case K::Call: return call(e);
      case K::If: {
        expect_type(*e.args[0], Type::boolean(), "if condition");
        Type a = check(*e.args[1], exp);
        Type b = check(*e.args[2], &a);
        if (!compatible(a, b)) type_fail(e.loc, "if branches disagree: " + show(a) + " vs " + show(b));
        Type t = unify(a, b);
        if (t.is(Type::Kind::Ref)) type_fail(e.loc, "operations on pointers are not allowed (conditional pointer)");
        return t;
      }
    }
    type_fail(e.loc, "unsupported expression");
  }

  Type name(Expr& e, const Type* exp) {
    if (auto it = model_.variables.find(e.name); it != model_.variables.end()) {
      const Type& t = it->second;
      if (t.is(Type::Kind::Ref)) {
        if (exp && exp->is(Type::Kind::Ref)) {
          e.role = NameRole::Pointer;
          return t;
        }
        e.role = NameRole::Deref;
        return t.elem();
      }
      e.role = NameRole::Variable;
      return t;
    }
    if (auto it = model_.constants.find(e.name); it != model_.constants.end()) {
      e.role = NameRole::Constant;
      e.literal = it->second;
      return const_types_.count(e.name) ? const_types_.at(e.name) : Type::any();
    }
    if (auto it = model_.pointer_types.find(e.name); it != model_.pointer_types.end()) {
      e.role = NameRole::PointerConstant;
      if (it->second.is(Type::Kind::Ref)) type_fail(e.loc, "pointer '" + e.name + "' cannot point to a pointer");
      return Type::ref(it->second);
    }
    if (!e.name.empty() && e.name[0] == '@') {
      e.role = NameRole::PointerConstant;
      return exp && exp->is(Type::Kind::Ref) ? *exp : Type::ref(Type::any());
    }
    type_fail(e.loc, "unknown name '" + e.name + "'");
  }

  Type binary(Expr& e) {
    const std::string& op = e.name;
    Expr& l = *e.args[0];
    Expr& r = *e.args[1];
    if (op == "+" || op == "-" || op == "*" || op == "/" || op == "%") {
      expect_type(l, Type::integer(), "left operand of '" + op + "'");
      expect_type(r, Type::integer(), "right operand of '" + op + "'");
      return Type::integer();
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      expect_type(l, Type::integer(), "left operand of '" + op + "'");
      expect_type(r, Type::integer(), "right operand of '" + op + "'");
      return Type::boolean();
    }
    if (op == "&&" || op == "||") {
      expect_type(l, Type::boolean(), "left operand of '" + op + "'");
      expect_type(r, Type::boolean(), "right operand of '" + op + "'");
      return Type::boolean();
    }
    if (op == "==" || op == "!=") {
      Type lt = check(l, nullptr);
      Type rt = check(r, &lt);
      if (!compatible(lt, rt)) type_fail(e.loc, "cannot compare " + show(lt) + " with " + show(rt));
      if (lt.contains_any()) check(l, &rt);
      return Type::boolean();
    }
    if (op == "in") {
      Type rt = check(r, nullptr);
      if (!rt.is(Type::Kind::Set) && !rt.is(Type::Kind::List))
        type_fail(r.loc, "right operand of 'in' must be a set or list, found " + show(rt));
      expect_type(l, rt.elem(), "left operand of 'in'");
      return Type::boolean();
    }
    if (op == "subset") {
      Type lt = check(l, nullptr);
      if (!lt.is(Type::Kind::Set)) type_fail(l.loc, "operands of 'subset' must be sets, found " + show(lt));
      Type rt = expect_type(r, lt, "right operand of 'subset'");
      if (lt.contains_any()) check(l, &rt);
      return Type::boolean();
    }
    type_fail(e.loc, "unknown operator '" + op + "'");
  }

  Type collection(Expr& a, Type::Kind want, const std::string& fn) {
    Type t = check(a, nullptr);
    if (!t.is(want))
      type_fail(a.loc, fn + " expects a " + (want == Type::Kind::Set ? "set" : "list") + ", found " + show(t));
    return t;
  }

  void arity(const Expr& e, std::size_t n) {
    if (e.args.size() != n)
      type_fail(e.loc, e.name + " takes " + std::to_string(n) + " argument(s), got " + std::to_string(e.args.size()));
  }

  Type call(Expr& e) {
    const std::string& fn = e.name;
    if (fn == "union" || fn == "diff" || fn == "inter") {
      arity(e, 2);
      Type a = collection(*e.args[0], Type::Kind::Set, fn);
      Type b = expect_type(*e.args[1], a, fn + " second argument");
      return unify(a, b);
    }
    if (fn == "insert" || fn == "remove") {
      arity(e, 2);
      Type s = collection(*e.args[0], Type::Kind::Set, fn);
      Type x = expect_type(*e.args[1], s.elem(), fn + " element");
      return Type::set_of(unify(s.elem(), x));
    }
    if (fn == "append") {
      arity(e, 2);
      Type l = collection(*e.args[0], Type::Kind::List, fn);
      Type x = expect_type(*e.args[1], l.elem(), "append element");
      return Type::list_of(unify(l.elem(), x));
    }
    if (fn == "concat") {
      arity(e, 2);
      Type a = collection(*e.args[0], Type::Kind::List, fn);
      Type b = expect_type(*e.args[1], a, "concat second argument");
      return unify(a, b);
    }
    if (fn == "elems") {
      arity(e, 1);
      Type l = collection(*e.args[0], Type::Kind::List, fn);
      return Type::set_of(l.elem());
    }
    if (fn == "size") {
      arity(e, 1);
      Type c = check(*e.args[0], nullptr);
      if (!c.is(Type::Kind::Set) && !c.is(Type::Kind::List))
        type_fail(e.args[0]->loc, "size expects a set or list, found " + show(c));
      return Type::integer();
    }
    type_fail(e.loc, "unknown function '" + fn + "'");
  }

 public:
  std::map<std::string, Type> const_types_;

 private:
  const Model& model_;
};

// Variable occurrences (value, deref or pointer role).
void used_variables(const Expr& e, std::vector<std::string>& out) {
  if ((e.kind == Expr::Kind::Name &&
       (e.role == NameRole::Variable || e.role == NameRole::Deref || e.role == NameRole::Pointer)) ||
      e.kind == Expr::Kind::RefOf)
    out.push_back(e.name);
  for (const auto& a : e.args) used_variables(*a, out);
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::optional<std::size_t> Model::find_place(const std::string& name) const {
  for (std::size_t i = 0; i < places.size(); ++i)
    if (places[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Model::find_transition(const std::string& name) const {
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].name == name) return i;
  return std::nullopt;
}

std::size_t Model::place(const std::string& name) const {
  if (auto p = find_place(name)) return *p;
  throw std::out_of_range("unknown place '" + name + "'");
}

std::size_t Model::transition(const std::string& name) const {
  if (auto t = find_transition(name)) return *t;
  throw std::out_of_range("unknown transition '" + name + "'");
}

const InvariantInfo& Model::invariant(const std::string& name) const {
  for (const auto& inv : invariants)
    if (inv.name == name) return inv;
  throw std::out_of_range("unknown invariant '" + name + "'");
}

bool Model::is_colored_only() const {
  if (!pointer_types.empty()) return false;
  for (const auto& p : places)
    if (p.type.contains_ref()) return false;
  for (const auto& [_, t] : variables)
    if (t.contains_ref()) return false;
  for (const auto& t : transitions)
    for (const auto& a : t.op)
      if (a.kind != Action::Kind::Skip) return false;
  return true;
}

bool Model::is_classical() const {
  if (!is_colored_only()) return false;
  for (const auto& p : places)
    if (!p.type.is(Type::Kind::Unit)) return false;
  for (const auto& t : transitions) {
    if (t.guard) return false;
    for (const auto* arcs : {&t.inputs, &t.outputs})
      for (const auto& a : *arcs)
        for (const auto& term : a.inscription.terms)
          if (term.expr->kind != Expr::Kind::Literal) return false;
  }
  return true;
}

Model typecheck(ModelAst ast) {
  Model m;
  std::vector<Diagnostic> diags;
  Checker checker(m);
  auto guarded = [&](auto&& fn) {
    try {
      fn();
      return true;
    } catch (const TypeFailure& f) {
      diags.push_back({f.loc, f.message});
    } catch (const EvalError& err) {
      diags.push_back({{}, err.what()});
    }
    return false;
  };
  auto closed = [&](const Expr& e, const std::string& what) {
    std::vector<std::string> vars;
    used_variables(e, vars);
    if (!vars.empty()) type_fail(e.loc, what + " must not mention variable '" + vars.front() + "'");
  };

  // Variables first so that names resolve in any order of sections.
  for (const auto& v : ast.vars) m.variables[v.name] = v.type;

  for (auto& c : ast.consts) {
    guarded([&] {
      checker.expect_type(*c.value, c.type, "constant '" + c.name + "'");
      closed(*c.value, "constant '" + c.name + "'");
      m.constants[c.name] = eval_expr(*c.value, {}, {});
      checker.const_types_[c.name] = c.type;
    });
    // keep the name resolvable even if its definition was rejected
    if (!m.constants.count(c.name)) {
      m.constants[c.name] = Value::unit();
      checker.const_types_[c.name] = c.type;
    }
  }

  for (const auto& p : ast.pointers) m.pointer_types[p.name] = p.pointee;
  for (auto& p : ast.pointers) {
    guarded([&] {
      if (p.pointee.is(Type::Kind::Ref)) type_fail(p.loc, "pointer '" + p.name + "' cannot point to a pointer");
      checker.expect_type(*p.init, p.pointee, "initial value of pointer '" + p.name + "'");
      closed(*p.init, "initial value of pointer '" + p.name + "'");
      Value v = eval_expr(*p.init, {}, {});
      std::vector<std::string> ptrs;
      collect_pointers(v, ptrs);
      for (const auto& q : ptrs)
        if (!m.pointer_types.count(q)) type_fail(p.loc, "pointer '" + p.name + "' refers to undeclared pointer '" + q + "'");
      m.pointer_init[p.name] = std::move(v);
    });
  }

  for (auto& p : ast.places) {
    PlaceInfo info{p.name, p.type, {}};
    for (auto& term : p.initial.terms) {
      guarded([&] {
        checker.expect_type(*term.expr, p.type, "initial marking of place '" + p.name + "'");
        closed(*term.expr, "initial marking of place '" + p.name + "'");
        Value v = eval_expr(*term.expr, {}, {});
        std::vector<std::string> ptrs;
        collect_pointers(v, ptrs);
        for (const auto& q : ptrs)
          if (!m.pointer_types.count(q))
            type_fail(term.expr->loc, "initial token of '" + p.name + "' refers to undeclared pointer '" + q + "'");
        info.initial.add(v, term.count);
      });
    }
    m.places.push_back(std::move(info));
  }

  for (const auto& t : ast.transitions) {
    TransitionInfo info;
    info.name = t.name;
    info.guard = t.guard;
    info.op = t.op;
    m.transitions.push_back(std::move(info));
  }

  // arcs
  std::map<std::pair<std::size_t, std::size_t>, SourceLoc> seen_in, seen_out;
  for (auto& a : ast.arcs) {
    auto fp = m.find_place(a.from), tp = m.find_place(a.to);
    auto ft = m.find_transition(a.from), tt = m.find_transition(a.to);
    std::string arc_name = "arc " + print_name(a.from) + " -> " + print_name(a.to);
    if (!fp && !ft) {
      diags.push_back({a.loc, arc_name + ": unknown node '" + a.from + "'"});
      continue;
    }
    if (!tp && !tt) {
      diags.push_back({a.loc, arc_name + ": unknown node '" + a.to + "'"});
      continue;
    }
    bool input = fp && tt;
    bool output = ft && tp;
    if (!input && !output) {
      diags.push_back({a.loc, arc_name + ": arcs must connect a place and a transition"});
      continue;
    }
    std::size_t place = input ? *fp : *tp;
    std::size_t trans = input ? *tt : *ft;
    auto& seen = input ? seen_in : seen_out;
    if (!seen.emplace(std::make_pair(place, trans), a.loc).second) {
      diags.push_back({a.loc, "duplicate " + arc_name});
      continue;
    }
    if (a.inscription.empty()) {
      diags.push_back({a.loc, arc_name + ": empty inscription"});
      continue;
    }
    bool ok = true;
    for (auto& term : a.inscription.terms) {
      ok &= guarded([&] {
        Type t = checker.check(*term.expr, &m.places[place].type);
        if (!compatible(t, m.places[place].type))
          type_fail(term.expr->loc, arc_name + ": expression type " + show(t) + " does not match place '" +
                                        m.places[place].name + "' of type " + show(m.places[place].type));
      });
    }
    if (!ok) continue;
    auto& list = input ? m.transitions[trans].inputs : m.transitions[trans].outputs;
    list.push_back({place, a.inscription});
  }

  // per-transition: guards, operators, bindability
  for (std::size_t ti = 0; ti < m.transitions.size(); ++ti) {
    auto& t = m.transitions[ti];
    auto by_place = [](const ArcRef& x, const ArcRef& y) { return x.place < y.place; };
    std::sort(t.inputs.begin(), t.inputs.end(), by_place);
    std::sort(t.outputs.begin(), t.outputs.end(), by_place);
    std::string tname = "transition '" + t.name + "'";

    std::vector<std::string> bound;
    for (const auto& arc : t.inputs)
      for (const auto& term : arc.inscription.terms) pattern_variables(*term.expr, bound);
    bound = sorted_unique(bound);
    auto is_bound = [&](const std::string& v) { return std::binary_search(bound.begin(), bound.end(), v); };

    for (const auto& arc : t.inputs) {
      for (const auto& term : arc.inscription.terms) {
        std::vector<std::string> req;
        required_variables(*term.expr, req);
        for (const auto& v : req)
          if (!is_bound(v))
            diags.push_back({term.expr->loc, tname + ": unbindable variable '" + v + "' on input arc from '" +
                                                 m.places[arc.place].name + "'"});
      }
    }

    if (t.guard) {
      guarded([&] {
        checker.expect_type(*t.guard, Type::boolean(), tname + " guard");
        std::vector<std::string> used;
        used_variables(*t.guard, used);
        for (const auto& v : sorted_unique(used))
          if (!is_bound(v)) type_fail(t.guard->loc, tname + ": unbindable variable '" + v + "' in guard");
      });
    }

    std::vector<std::string> allocated;
    auto available = [&](const std::string& v) {
      return is_bound(v) || std::find(allocated.begin(), allocated.end(), v) != allocated.end();
    };
    for (auto& act : t.op) {
      guarded([&] {
        if (act.kind == Action::Kind::Skip) return;
        if (act.kind == Action::Kind::New) {
          auto it = m.variables.find(act.target);
          if (it == m.variables.end() || !it->second.is(Type::Kind::Ref))
            type_fail(act.loc, tname + ": 'new' needs a declared reference variable, got '" + act.target + "'");
          if (available(act.target))
            type_fail(act.loc, tname + ": '" + act.target + "' is already bound and cannot be allocated");
          checker.expect_type(*act.value, it->second.elem(), tname + " initializer of '" + act.target + "'");
          std::vector<std::string> used;
          used_variables(*act.value, used);
          for (const auto& v : used)
            if (!available(v)) type_fail(act.value->loc, tname + ": unbindable variable '" + v + "' in operator");
          allocated.push_back(act.target);
          return;
        }
        Type pointee;
        if (auto it = m.variables.find(act.target); it != m.variables.end()) {
          if (!it->second.is(Type::Kind::Ref))
            type_fail(act.loc, tname + ": operator target '" + act.target + "' is not a reference variable");
          if (!available(act.target))
            type_fail(act.loc, tname + ": unbindable variable '" + act.target + "' in operator");
          pointee = it->second.elem();
        } else if (auto pt = m.pointer_types.find(act.target); pt != m.pointer_types.end()) {
          pointee = pt->second;
        } else {
          type_fail(act.loc, tname + ": unknown operator target '" + act.target + "'");
        }
        Type slot = pointee;
        if (!act.field.empty()) {
          const Type* f = pointee.is(Type::Kind::Record) ? pointee.field(act.field) : nullptr;
          if (!f) type_fail(act.loc, tname + ": " + show(pointee) + " has no field '" + act.field + "'");
          slot = *f;
        }
        std::string what = tname + " operator on " + act.target + (act.field.empty() ? "" : "." + act.field);
        if (act.kind == Action::Kind::Set) {
          checker.expect_type(*act.value, slot, what);
        } else if (act.kind == Action::Kind::Append) {
          if (!slot.is(Type::Kind::List)) type_fail(act.loc, what + ": append needs a list, found " + show(slot));
          checker.expect_type(*act.value, slot.elem(), what);
        } else {
          if (!slot.is(Type::Kind::Set)) type_fail(act.loc, what + ": add needs a set, found " + show(slot));
          checker.expect_type(*act.value, slot.elem(), what);
        }
        std::vector<std::string> used;
        used_variables(*act.value, used);
        for (const auto& v : used)
          if (!available(v)) type_fail(act.value->loc, tname + ": unbindable variable '" + v + "' in operator");
      });
    }
    t.allocated = allocated;

    for (const auto& arc : t.outputs) {
      for (const auto& term : arc.inscription.terms) {
        std::vector<std::string> used;
        used_variables(*term.expr, used);
        for (const auto& v : sorted_unique(used))
          if (!available(v))
            diags.push_back({term.expr->loc, tname + ": unbindable variable '" + v + "' on output arc to '" +
                                                 m.places[arc.place].name + "'"});
      }
    }
    t.variables = bound;
  }

  // invariants
  for (auto& inv : ast.invariants) {
    InvariantInfo info;
    info.name = inv.name;
    info.predicate = inv.predicate;
    bool ok = true;
    std::vector<std::string> bound;
    for (auto& q : inv.over) {
      std::vector<std::size_t> idx;
      for (const auto& name : q.places) {
        auto p = m.find_place(name);
        if (!p) {
          diags.push_back({inv.loc, "invariant '" + inv.name + "': unknown place '" + name + "'"});
          ok = false;
          continue;
        }
        if (!idx.empty() && !(m.places[*p].type == m.places[idx.front()].type)) {
          diags.push_back({inv.loc, "invariant '" + inv.name + "': places '" + m.places[idx.front()].name + "' and '" +
                                        name + "' have different types"});
          ok = false;
          continue;
        }
        idx.push_back(*p);
      }
      if (idx.empty()) continue;
      ok &= guarded([&] {
        checker.expect_type(*q.pattern, m.places[idx.front()].type, "invariant '" + inv.name + "' pattern");
        pattern_variables(*q.pattern, bound);
      });
      info.over.emplace_back(q.pattern, std::move(idx));
    }
    bound = sorted_unique(bound);
    ok &= guarded([&] {
      checker.expect_type(*inv.predicate, Type::boolean(), "invariant '" + inv.name + "'");
      std::vector<std::string> used;
      used_variables(*inv.predicate, used);
      for (auto& q : inv.over) {
        required_variables(*q.pattern, used);
      }
      for (const auto& v : sorted_unique(used))
        if (!std::binary_search(bound.begin(), bound.end(), v))
          type_fail(inv.loc, "invariant '" + inv.name + "': variable '" + v + "' is not bound by a quantifier");
    });
    info.variables = bound;
    if (ok) m.invariants.push_back(std::move(info));
  }

  if (!diags.empty()) throw ModelError(std::move(diags));
  m.ast = std::move(ast);
  return m;
}

ModelPtr load_model(std::string_view source) {
  return std::make_shared<const Model>(typecheck(parse_model(source)));
}

Type check_expression(const Model& model, Expr& e, const Type* expected) {
  Checker checker(model);
  for (const auto& c : model.ast.consts) checker.const_types_[c.name] = c.type;
  try {
    Type t = checker.check(e, expected);
    if (expected && !compatible(t, *expected))
      throw ModelError({{e.loc, "expected " + show(*expected) + ", found " + show(t)}});
    return t;
  } catch (const TypeFailure& f) {
    throw ModelError({{f.loc, f.message}});
  }
}

Value parse_value(const Model& model, std::string_view text, const Type& type) {
  ExprPtr e = parse_expression(text);
  check_expression(model, *e, &type);
  std::vector<std::string> vars;
  used_variables(*e, vars);
  if (!vars.empty()) throw ModelError({{e->loc, "value literal must not mention variable '" + vars.front() + "'"}});
  Value v = eval_expr(*e, {}, {});
  if (!conforms(v, type)) throw ModelError({{e->loc, "value " + v.to_string() + " is not of type " + show(type)}});
  return v;
}

}  // namespace learnflow::lang
