#include "learnflow/lang/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace learnflow::lang {

namespace {

// --- lexer -----------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Int, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t int_value = 0;
  SourceLoc loc;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "types", "consts", "pointers", "vars", "places", "transitions", "arcs", "invariants",
      "guard", "op", "forall", "in", "subset", "true", "false", "if", "then", "else",
      "and", "or", "not", "new", "skip", "Int", "Bool", "Str", "Unit", "SetOf", "ListOf", "Ref"};
  return k;
}

const std::set<std::string>& section_keywords() {
  static const std::set<std::string> k = {"types", "consts", "pointers", "vars",
                                          "places", "transitions", "arcs", "invariants"};
  return k;
}

[[noreturn]] void fail(SourceLoc loc, std::string message) { throw ModelError({{loc, std::move(message)}}); }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* puncts[] = {"->", "++", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}",
                                 "[", "]", ",", ";", ":", ".", "=", "<", ">", "+", "-", "*", "/",
                                 "%", "!", "'"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      SourceLoc start{line, col};
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance();
      if (i >= src.size()) fail(start, "unterminated comment");
      advance(2);
      continue;
    }
    Token tok;
    tok.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(src.substr(i, j - i));
      if (c == '@' && tok.text.size() == 1) fail(tok.loc, "expected pointer name after '@'");
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.kind = Token::Kind::Int;
      tok.text = std::string(src.substr(i, j - i));
      auto res = std::from_chars(src.data() + i, src.data() + j, tok.int_value);
      if (res.ec != std::errc()) fail(tok.loc, "integer literal out of range: " + tok.text);
      advance(j - i);
    } else if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (i >= src.size() || src[i] == '\n') fail(tok.loc, "unterminated string literal");
        char d = src[i];
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\\') {
          advance();
          if (i >= src.size()) fail(tok.loc, "unterminated string literal");
          char e = src[i];
          if (e == 'n') s += '\n';
          else if (e == 't') s += '\t';
          else if (e == '"' || e == '\\') s += e;
          else fail({line, col}, std::string("unknown escape '\\") + e + "'");
          advance();
          continue;
        }
        s += d;
        advance();
      }
      tok.kind = Token::Kind::String;
      tok.text = std::move(s);
    } else {
      bool matched = false;
      for (const char* p : puncts) {
        std::string_view pv(p);
        if (src.substr(i, pv.size()) == pv) {
          tok.kind = Token::Kind::Punct;
          tok.text = std::string(pv);
          advance(pv.size());
          matched = true;
          break;
        }
      }
      if (!matched) fail(tok.loc, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

// --- parser ----------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view src, const std::map<std::string, Type>* aliases = nullptr)
      : tokens_(lex(src)) {
    if (aliases) aliases_ = *aliases;
  }

  ModelAst model() {
    ModelAst ast;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != Token::Kind::Ident || !section_keywords().count(t.text))
        fail(t.loc, "expected a section keyword (types, consts, pointers, vars, places, transitions, arcs, invariants), found " + describe(t));
      std::string section = next().text;
      while (!at_end() && !is_section_start()) {
        if (section == "types") type_decl(ast);
        else if (section == "consts") const_decl(ast);
        else if (section == "pointers") pointer_decl(ast);
        else if (section == "vars") var_decl(ast);
        else if (section == "places") place_decl(ast);
        else if (section == "transitions") transition_decl(ast);
        else if (section == "arcs") arc_decl(ast);
        else invariant_decl(ast);
      }
    }
    return ast;
  }

  ExprPtr standalone_expr() {
    auto e = expr();
    if (!at_end()) fail(peek().loc, "unexpected " + describe(peek()) + " after expression");
    return e;
  }

  Type standalone_type() {
    auto t = type();
    if (!at_end()) fail(peek().loc, "unexpected " + describe(peek()) + " after type");
    return t;
  }

 private:
  // token helpers
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Punct && t.text == p;
  }
  bool is_word(const char* w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && t.text == w;
  }
  bool is_section_start() const {
    return peek().kind == Token::Kind::Ident && section_keywords().count(peek().text);
  }
  bool accept(const char* p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_word(const char* w) {
    if (is_word(w)) {
      next();
      return true;
    }
    return false;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End: return "end of input";
      case Token::Kind::String: return "string " + quote_string(t.text);
      default: return "'" + t.text + "'";
    }
  }
  const Token& expect(const char* p) {
    if (!is_punct(p)) fail(peek().loc, std::string("expected '") + p + "', found " + describe(peek()));
    return next();
  }
  void expect_word(const char* w) {
    if (!is_word(w)) fail(peek().loc, std::string("expected '") + w + "', found " + describe(peek()));
    next();
  }
  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || keywords().count(t.text) || t.text[0] == '@')
      fail(t.loc, std::string("expected ") + what + ", found " + describe(t));
    return next().text;
  }
  // Node names may be identifiers or quoted strings.
  std::string node_name(const char* what) {
    if (peek().kind == Token::Kind::String) return next().text;
    return identifier(what);
  }

  void declare(std::set<std::string>& ns, const std::string& name, SourceLoc loc, const char* what) {
    if (!ns.insert(name).second) fail(loc, std::string("duplicate declaration of ") + what + " '" + name + "'");
  }

  // --- declarations
  void type_decl(ModelAst& ast) {
    SourceLoc loc = peek().loc;
    std::string name = identifier("type name");
    if (aliases_.count(name)) fail(loc, "duplicate declaration of type '" + name + "'");
    expect("=");
    Type t = type();
    expect(";");
    aliases_[name] = t;
    ast.types.push_back({name, t, loc});
  }

  void const_decl(ModelAst& ast) {
    SourceLoc loc = peek().loc;
    std::string name = identifier("constant name");
    declare(values_, name, loc, "name");
    expect(":");
    Type t = type();
    expect("=");
    auto e = expr();
    expect(";");
    ast.consts.push_back({name, t, e, loc});
  }

  void pointer_decl(ModelAst& ast) {
    SourceLoc loc = peek().loc;
    std::string name = identifier("pointer name");
    declare(values_, name, loc, "name");
    expect(":");
    Type t = type();
    expect("=");
    auto e = expr();
    expect(";");
    ast.pointers.push_back({name, t, e, loc});
  }

  void var_decl(ModelAst& ast) {
    std::vector<std::pair<std::string, SourceLoc>> names;
    do {
      SourceLoc loc = peek().loc;
      names.emplace_back(identifier("variable name"), loc);
    } while (accept(","));
    expect(":");
    Type t = type();
    expect(";");
    for (auto& [n, loc] : names) {
      declare(values_, n, loc, "name");
      ast.vars.push_back({n, t, loc});
    }
  }

  void place_decl(ModelAst& ast) {
    SourceLoc loc = peek().loc;
    std::string name = node_name("place name");
    declare(nodes_, name, loc, "node");
    expect(":");
    Type t = type();
    Inscription init;
    if (accept("=")) init = inscription();
    expect(";");
    ast.places.push_back({name, t, std::move(init), loc});
  }

  void transition_decl(ModelAst& ast) {
    TransitionDecl d;
    d.loc = peek().loc;
    d.name = node_name("transition name");
    declare(nodes_, d.name, d.loc, "node");
    while (!is_punct(";")) {
      if (accept_word("guard")) {
        if (d.guard) fail(peek().loc, "transition '" + d.name + "' has two guards");
        d.guard = expr();
      } else if (is_word("op")) {
        SourceLoc oloc = next().loc;
        if (d.has_op) fail(oloc, "transition '" + d.name + "' has two operators");
        d.has_op = true;
        d.op = operator_block();
      } else {
        fail(peek().loc, "expected 'guard', 'op' or ';' after transition '" + d.name + "', found " + describe(peek()));
      }
    }
    expect(";");
    ast.transitions.push_back(std::move(d));
  }

  std::vector<Action> operator_block() {
    std::vector<Action> actions;
    if (is_word("skip")) {
      Action a;
      a.loc = next().loc;
      actions.push_back(a);
      return actions;
    }
    expect("{");
    while (!is_punct("}")) {
      actions.push_back(action());
      if (!accept(";")) break;
    }
    expect("}");
    return actions;
  }

  Action action() {
    Action a;
    a.loc = peek().loc;
    if (accept_word("skip")) return a;
    if (accept_word("new")) {
      a.kind = Action::Kind::New;
      a.target = identifier("reference variable");
      expect("=");
      a.value = expr();
      return a;
    }
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(t.loc, "expected an operator action, found " + describe(t));
    if (t.text == "set") a.kind = Action::Kind::Set;
    else if (t.text == "append") a.kind = Action::Kind::Append;
    else if (t.text == "add") a.kind = Action::Kind::Add;
    else fail(t.loc, "unknown operator action '" + t.text + "' (expected set, append, add, new or skip)");
    next();
    expect("(");
    a.target = identifier("pointer or reference variable");
    if (accept(".")) a.field = identifier("field name");
    expect(",");
    a.value = expr();
    expect(")");
    return a;
  }

  void arc_decl(ModelAst& ast) {
    ArcDecl d;
    d.loc = peek().loc;
    d.from = node_name("arc source");
    expect("->");
    d.to = node_name("arc target");
    expect(":");
    SourceLoc iloc = peek().loc;
    try {
      d.inscription = inscription();
      expect(";");
    } catch (const ModelError& e) {
      auto diag = e.diagnostics().front();
      fail(diag.loc.line ? diag.loc : iloc,
           "in arc " + print_name(d.from) + " -> " + print_name(d.to) + ": " + diag.message);
    }
    ast.arcs.push_back(std::move(d));
  }

  void invariant_decl(ModelAst& ast) {
    InvariantDecl d;
    d.loc = peek().loc;
    d.name = node_name("invariant name");
    declare(invariants_, d.name, d.loc, "invariant");
    expect(":");
    if (accept_word("forall")) {
      do {
        Quantifier q;
        q.pattern = expr_no_in();
        expect_word("in");
        do q.places.push_back(node_name("place name"));
        while (accept("+"));
        d.over.push_back(std::move(q));
      } while (accept(","));
      expect(":");
    }
    d.predicate = expr();
    expect(";");
    ast.invariants.push_back(std::move(d));
  }

  Inscription inscription() {
    Inscription ins;
    do {
      Inscription::Term term;
      if (peek().kind == Token::Kind::Int && is_punct("'", 1)) {
        const Token& n = next();
        if (n.int_value <= 0) fail(n.loc, "multiset coefficient must be positive");
        term.count = static_cast<std::uint64_t>(n.int_value);
        next();
      }
      term.expr = expr();
      ins.terms.push_back(std::move(term));
    } while (accept("++"));
    return ins;
  }

  // --- types
  Type type() {
    const Token& t = peek();
    if (accept_word("SetOf")) return Type::set_of(type());
    if (accept_word("ListOf")) return Type::list_of(type());
    if (accept_word("Ref")) {
      Type inner = type();
      if (inner.is(Type::Kind::Ref)) fail(t.loc, "pointers to pointers are not allowed");
      return Type::ref(inner);
    }
    return type_atom();
  }

  Type type_atom() {
    const Token& t = peek();
    if (accept_word("Int")) return Type::integer();
    if (accept_word("Bool")) return Type::boolean();
    if (accept_word("Str")) return Type::string();
    if (accept_word("Unit")) return Type::unit();
    if (accept("(")) {
      std::vector<Type> items;
      bool trailing_comma = false;
      items.push_back(type());
      while (accept(",")) {
        if (is_punct(")")) {
          trailing_comma = true;
          break;
        }
        items.push_back(type());
      }
      expect(")");
      if (items.size() == 1 && !trailing_comma) return items[0];
      return Type::tuple(std::move(items));
    }
    if (accept("{")) {
      std::vector<std::pair<std::string, Type>> fields;
      std::set<std::string> seen;
      do {
        SourceLoc loc = peek().loc;
        std::string f = identifier("field name");
        if (!seen.insert(f).second) fail(loc, "duplicate record field '" + f + "'");
        expect(":");
        fields.emplace_back(f, type());
      } while (accept(","));
      expect("}");
      return Type::record(std::move(fields));
    }
    if (t.kind == Token::Kind::Ident && !keywords().count(t.text)) {
      auto it = aliases_.find(t.text);
      if (it == aliases_.end()) fail(t.loc, "unknown type '" + t.text + "'");
      next();
      return it->second;
    }
    fail(t.loc, "expected a type, found " + describe(t));
  }

  // --- expressions
  ExprPtr expr() {
    bool saved = no_in_;
    no_in_ = false;
    auto e = if_expr();
    no_in_ = saved;
    return e;
  }

  // Quantifier patterns stop before the `in` keyword.
  ExprPtr expr_no_in() {
    bool saved = no_in_;
    no_in_ = true;
    auto e = if_expr();
    no_in_ = saved;
    return e;
  }

  ExprPtr if_expr() {
    if (is_word("if")) {
      auto e = Expr::make(Expr::Kind::If, next().loc);
      e->args.push_back(expr());
      expect_word("then");
      e->args.push_back(expr());
      expect_word("else");
      e->args.push_back(expr());
      return e;
    }
    return or_expr();
  }

  ExprPtr binary(const std::string& op, SourceLoc loc, ExprPtr l, ExprPtr r) {
    auto e = Expr::make(Expr::Kind::Binary, loc);
    e->name = op;
    e->args = {std::move(l), std::move(r)};
    return e;
  }

  ExprPtr or_expr() {
    auto l = and_expr();
    while (is_punct("||") || is_word("or")) {
      SourceLoc loc = next().loc;
      l = binary("||", loc, l, and_expr());
    }
    return l;
  }

  ExprPtr and_expr() {
    auto l = cmp_expr();
    while (is_punct("&&") || is_word("and")) {
      SourceLoc loc = next().loc;
      l = binary("&&", loc, l, cmp_expr());
    }
    return l;
  }

  ExprPtr cmp_expr() {
    auto l = add_expr();
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : ops) {
      if (is_punct(op)) {
        SourceLoc loc = next().loc;
        return binary(op, loc, l, add_expr());
      }
    }
    if ((is_word("in") && !no_in_) || is_word("subset")) {
      const Token& t = next();
      return binary(t.text, t.loc, l, add_expr());
    }
    return l;
  }

  ExprPtr add_expr() {
    auto l = mul_expr();
    while (is_punct("+") || is_punct("-")) {
      const Token& t = next();
      l = binary(t.text, t.loc, l, mul_expr());
    }
    return l;
  }

  ExprPtr mul_expr() {
    auto l = unary_expr();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      const Token& t = next();
      l = binary(t.text, t.loc, l, unary_expr());
    }
    return l;
  }

  ExprPtr unary_expr() {
    if (is_punct("-") || is_punct("!") || is_word("not")) {
      const Token& t = next();
      auto e = Expr::make(Expr::Kind::Unary, t.loc);
      e->name = t.text == "-" ? "-" : "!";
      e->args.push_back(unary_expr());
      return e;
    }
    return postfix_expr();
  }

  ExprPtr postfix_expr() {
    auto e = primary();
    while (is_punct(".")) {
      SourceLoc loc = next().loc;
      const Token& t = peek();
      if (t.kind == Token::Kind::Int) {
        if (t.int_value < 1) fail(t.loc, "tuple projections are 1-based");
        auto p = Expr::make(Expr::Kind::Proj, loc);
        p->index = static_cast<std::size_t>(next().int_value);
        p->args.push_back(e);
        e = p;
      } else {
        auto f = Expr::make(Expr::Kind::Field, loc);
        f->name = identifier("field name");
        f->args.push_back(e);
        e = f;
      }
    }
    return e;
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (t.kind == Token::Kind::Int) {
      auto e = Expr::make(Expr::Kind::Literal, loc);
      e->literal = Value::integer(next().int_value);
      return e;
    }
    if (t.kind == Token::Kind::String) {
      auto e = Expr::make(Expr::Kind::Literal, loc);
      e->literal = Value::string(next().text);
      return e;
    }
    if (is_word("true") || is_word("false")) {
      auto e = Expr::make(Expr::Kind::Literal, loc);
      e->literal = Value::boolean(next().text == "true");
      return e;
    }
    if (accept("(")) {
      if (accept(")")) {
        auto e = Expr::make(Expr::Kind::Literal, loc);
        e->literal = Value::unit();
        return e;
      }
      auto first = expr();
      if (accept(")")) return first;
      auto tup = Expr::make(Expr::Kind::Tuple, loc);
      tup->args.push_back(first);
      while (accept(",")) {
        if (is_punct(")")) break;
        tup->args.push_back(expr());
      }
      expect(")");
      return tup;
    }
    if (accept("[")) {
      auto e = Expr::make(Expr::Kind::List, loc);
      if (!accept("]")) {
        do e->args.push_back(expr());
        while (accept(","));
        expect("]");
      }
      return e;
    }
    if (accept("{")) {
      // record literal: { name = expr, ... }; otherwise a set literal
      if (peek().kind == Token::Kind::Ident && is_punct("=", 1)) {
        auto e = Expr::make(Expr::Kind::Record, loc);
        std::set<std::string> seen;
        do {
          SourceLoc floc = peek().loc;
          std::string f = identifier("field name");
          if (!seen.insert(f).second) fail(floc, "duplicate record field '" + f + "'");
          expect("=");
          e->fields.push_back(f);
          e->args.push_back(expr());
        } while (accept(","));
        expect("}");
        return e;
      }
      auto e = Expr::make(Expr::Kind::Set, loc);
      if (!accept("}")) {
        do e->args.push_back(expr());
        while (accept(","));
        expect("}");
      }
      return e;
    }
    if (t.kind == Token::Kind::Ident && is_punct("(", 1) && !keywords().count(t.text)) {
      std::string fn = next().text;
      next();
      if (fn == "ref") {
        auto e = Expr::make(Expr::Kind::RefOf, loc);
        e->name = identifier("reference variable");
        expect(")");
        return e;
      }
      auto e = Expr::make(Expr::Kind::Call, loc);
      e->name = fn;
      if (!accept(")")) {
        do e->args.push_back(expr());
        while (accept(","));
        expect(")");
      }
      return e;
    }
    if (t.kind == Token::Kind::Ident && !keywords().count(t.text)) {
      auto e = Expr::make(Expr::Kind::Name, loc);
      e->name = next().text;
      return e;
    }
    fail(loc, "expected an expression, found " + describe(t));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool no_in_ = false;
  std::map<std::string, Type> aliases_;
  std::set<std::string> values_, nodes_, invariants_;
};

bool is_plain_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !keywords().count(s);
}

// --- printer ---------------------------------------------------------------

int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::If) return 0;
  if (e.kind == Expr::Kind::Unary) return 6;
  if (e.kind != Expr::Kind::Binary) return 8;
  const std::string& op = e.name;
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "+" || op == "-") return 4;
  if (op == "*" || op == "/" || op == "%") return 5;
  return 3;  // comparisons, in, subset
}

std::string print_at(const Expr& e, int min_prec);

std::string join_args(const std::vector<ExprPtr>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += print_at(*args[i], 0);
  }
  return s;
}

std::string print_literal(const Value& v) {
  // Value::to_string is already literal syntax for scalars.
  return v.to_string();
}

std::string print_at(const Expr& e, int min_prec) {
  std::string s;
  int prec = precedence(e);
  switch (e.kind) {
    case Expr::Kind::Literal:
      s = print_literal(e.literal);
      if (e.literal.is(Value::Kind::Int) && e.literal.as_int() < 0) s = "(" + s + ")";
      break;
    case Expr::Kind::Name: s = e.name; break;
    case Expr::Kind::RefOf: s = "ref(" + e.name + ")"; break;
    case Expr::Kind::Tuple:
      s = "(" + join_args(e.args) + (e.args.size() == 1 ? ",)" : ")");
      break;
    case Expr::Kind::Set: s = "{" + join_args(e.args) + "}"; break;
    case Expr::Kind::List: s = "[" + join_args(e.args) + "]"; break;
    case Expr::Kind::Record: {
      s = "{";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += ", ";
        s += e.fields[i] + " = " + print_at(*e.args[i], 0);
      }
      s += "}";
      break;
    }
    case Expr::Kind::Field: s = print_at(*e.args[0], 8) + "." + e.name; break;
    case Expr::Kind::Proj: s = print_at(*e.args[0], 8) + "." + std::to_string(e.index); break;
    case Expr::Kind::Unary: s = e.name + print_at(*e.args[0], 6); break;
    case Expr::Kind::Binary: {
      // comparisons are non-associative: parenthesize both operands at equal level
      bool cmp = prec == 3;
      s = print_at(*e.args[0], cmp ? prec + 1 : prec) + " " + e.name + " " + print_at(*e.args[1], prec + 1);
      break;
    }
    case Expr::Kind::Call: s = e.name + "(" + join_args(e.args) + ")"; break;
    case Expr::Kind::If:
      s = "if " + print_at(*e.args[0], 0) + " then " + print_at(*e.args[1], 0) + " else " + print_at(*e.args[2], 0);
      break;
  }
  return prec < min_prec ? "(" + s + ")" : s;
}

std::string print_action(const Action& a) {
  switch (a.kind) {
    case Action::Kind::Skip: return "skip";
    case Action::Kind::New: return "new " + a.target + " = " + print_expr(*a.value);
    default: break;
  }
  const char* name = a.kind == Action::Kind::Set ? "set" : a.kind == Action::Kind::Append ? "append" : "add";
  std::string target = a.target + (a.field.empty() ? "" : "." + a.field);
  return std::string(name) + "(" + target + ", " + print_expr(*a.value) + ")";
}

}  // namespace

ModelAst parse_model(std::string_view source) { return Parser(source).model(); }

ExprPtr parse_expression(std::string_view source) { return Parser(source).standalone_expr(); }

Type parse_type(std::string_view source, const ModelAst& ast) {
  std::map<std::string, Type> aliases;
  for (const auto& t : ast.types) aliases[t.name] = t.type;
  return Parser(source, &aliases).standalone_type();
}

std::string print_name(const std::string& name) {
  return is_plain_identifier(name) ? name : quote_string(name);
}

std::string print_expr(const Expr& e) { return print_at(e, 0); }

std::string print_inscription(const Inscription& ins) {
  std::string s;
  for (std::size_t i = 0; i < ins.terms.size(); ++i) {
    if (i) s += " ++ ";
    if (ins.terms[i].count != 1) s += std::to_string(ins.terms[i].count) + "'";
    s += print_expr(*ins.terms[i].expr);
  }
  return s;
}

std::string print_model(const ModelAst& ast) {
  std::string out;
  auto section = [&](const char* name, bool nonempty) {
    if (!nonempty) return false;
    if (!out.empty()) out += "\n";
    out += name;
    out += "\n";
    return true;
  };
  if (section("types", !ast.types.empty()))
    for (const auto& d : ast.types) out += "  " + d.name + " = " + d.type.to_string() + ";\n";
  if (section("consts", !ast.consts.empty()))
    for (const auto& d : ast.consts)
      out += "  " + d.name + " : " + d.type.to_string() + " = " + print_expr(*d.value) + ";\n";
  if (section("pointers", !ast.pointers.empty()))
    for (const auto& d : ast.pointers)
      out += "  " + d.name + " : " + d.pointee.to_string() + " = " + print_expr(*d.init) + ";\n";
  if (section("vars", !ast.vars.empty()))
    for (const auto& d : ast.vars) out += "  " + d.name + " : " + d.type.to_string() + ";\n";
  if (section("places", !ast.places.empty())) {
    for (const auto& d : ast.places) {
      out += "  " + print_name(d.name) + " : " + d.type.to_string();
      if (!d.initial.empty()) out += " = " + print_inscription(d.initial);
      out += ";\n";
    }
  }
  if (section("transitions", !ast.transitions.empty())) {
    for (const auto& d : ast.transitions) {
      out += "  " + print_name(d.name);
      if (d.guard) out += "\n    guard " + print_expr(*d.guard);
      if (d.has_op) {
        out += "\n    op {";
        for (std::size_t i = 0; i < d.op.size(); ++i) {
          out += i ? "; " : " ";
          out += print_action(d.op[i]);
        }
        out += " }";
      }
      out += ";\n";
    }
  }
  if (section("arcs", !ast.arcs.empty()))
    for (const auto& d : ast.arcs)
      out += "  " + print_name(d.from) + " -> " + print_name(d.to) + " : " + print_inscription(d.inscription) + ";\n";
  if (section("invariants", !ast.invariants.empty())) {
    for (const auto& d : ast.invariants) {
      out += "  " + print_name(d.name) + " :";
      if (!d.over.empty()) {
        out += " forall";
        for (std::size_t i = 0; i < d.over.size(); ++i) {
          out += i ? ", " : " ";
          // parenthesize so that an `in` inside the pattern cannot be misread
          out += print_at(*d.over[i].pattern, 4) + " in ";
          for (std::size_t k = 0; k < d.over[i].places.size(); ++k)
            out += (k ? " + " : "") + print_name(d.over[i].places[k]);
        }
        out += " :";
      }
      out += " " + print_expr(*d.predicate) + ";\n";
    }
  }
  return out;
}

// --- syntactic equality ------------------------------------------------------

bool same_syntax(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.index != b.index || a.fields != b.fields ||
      a.args.size() != b.args.size())
    return false;
  if (a.kind == Expr::Kind::Literal && !(a.literal == b.literal)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_syntax(*a.args[i], *b.args[i])) return false;
  return true;
}

namespace {
bool same_expr_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_syntax(*a, *b);
}

bool same_inscription(const Inscription& a, const Inscription& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].count != b.terms[i].count || !same_syntax(*a.terms[i].expr, *b.terms[i].expr)) return false;
  return true;
}
}  // namespace

bool same_syntax(const ModelAst& a, const ModelAst& b) {
  auto all = [](const auto& xs, const auto& ys, auto eq) {
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!eq(xs[i], ys[i])) return false;
    return true;
  };
  return all(a.types, b.types, [](const auto& x, const auto& y) { return x.name == y.name && x.type == y.type; }) &&
         all(a.consts, b.consts,
             [](const auto& x, const auto& y) {
               return x.name == y.name && x.type == y.type && same_expr_ptr(x.value, y.value);
             }) &&
         all(a.pointers, b.pointers,
             [](const auto& x, const auto& y) {
               return x.name == y.name && x.pointee == y.pointee && same_expr_ptr(x.init, y.init);
             }) &&
         all(a.vars, b.vars, [](const auto& x, const auto& y) { return x.name == y.name && x.type == y.type; }) &&
         all(a.places, b.places,
             [](const auto& x, const auto& y) {
               return x.name == y.name && x.type == y.type && same_inscription(x.initial, y.initial);
             }) &&
         all(a.transitions, b.transitions,
             [](const auto& x, const auto& y) {
               if (x.name != y.name || x.has_op != y.has_op || !same_expr_ptr(x.guard, y.guard) ||
                   x.op.size() != y.op.size())
                 return false;
               for (std::size_t i = 0; i < x.op.size(); ++i) {
                 const auto& p = x.op[i];
                 const auto& q = y.op[i];
                 if (p.kind != q.kind || p.target != q.target || p.field != q.field || !same_expr_ptr(p.value, q.value))
                   return false;
               }
               return true;
             }) &&
         all(a.arcs, b.arcs,
             [](const auto& x, const auto& y) {
               return x.from == y.from && x.to == y.to && same_inscription(x.inscription, y.inscription);
             }) &&
         all(a.invariants, b.invariants, [](const auto& x, const auto& y) {
           if (x.name != y.name || x.over.size() != y.over.size() || !same_expr_ptr(x.predicate, y.predicate))
             return false;
           for (std::size_t i = 0; i < x.over.size(); ++i)
             if (x.over[i].places != y.over[i].places || !same_syntax(*x.over[i].pattern, *y.over[i].pattern))
               return false;
           return true;
         });
}

void collect_names(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Name || e.kind == Expr::Kind::RefOf) out.push_back(e.name);
  for (const auto& a : e.args) collect_names(*a, out);
}

}  // namespace learnflow::lang
