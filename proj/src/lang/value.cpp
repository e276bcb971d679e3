#include "learnflow/lang/value.hpp"

#include <algorithm>
#include <stdexcept>

namespace learnflow::lang {

Value Value::boolean(bool b) {
  Value v(Kind::Bool);
  v.int_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v(Kind::Int);
  v.int_ = i;
  return v;
}

Value Value::string(std::string s) {
  Value v(Kind::Str);
  v.str_ = std::move(s);
  return v;
}

Value Value::pointer(std::string name) {
  Value v(Kind::Pointer);
  v.str_ = std::move(name);
  return v;
}

Value Value::tuple(std::vector<Value> items) {
  Value v(Kind::Tuple);
  v.items_ = std::move(items);
  return v;
}

Value Value::set(std::vector<Value> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Value v(Kind::Set);
  v.items_ = std::move(items);
  return v;
}

Value Value::list(std::vector<Value> items) {
  Value v(Kind::List);
  v.items_ = std::move(items);
  return v;
}

Value Value::record(std::vector<std::pair<std::string, Value>> fields) {
  std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Value v(Kind::Record);
  for (auto& [name, val] : fields) {
    if (!v.fields_.empty() && v.fields_.back() == name)
      throw std::invalid_argument("duplicate record field '" + name + "'");
    v.fields_.push_back(std::move(name));
    v.items_.push_back(std::move(val));
  }
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw std::logic_error("value is not a Bool: " + to_string());
  return int_ != 0;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw std::logic_error("value is not an Int: " + to_string());
  return int_;
}

const std::string& Value::as_string() const {
  if (kind_ != Kind::Str) throw std::logic_error("value is not a Str: " + to_string());
  return str_;
}

const std::string& Value::pointer_name() const {
  if (kind_ != Kind::Pointer) throw std::logic_error("value is not a pointer: " + to_string());
  return str_;
}

const Value& Value::field(const std::string& name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i] == name) return items_[i];
  throw std::out_of_range("no field '" + name + "' in " + to_string());
}

bool Value::set_contains(const Value& v) const { return std::binary_search(items_.begin(), items_.end(), v); }

Value Value::with_field(const std::string& name, Value v) const {
  Value out = *this;
  for (std::size_t i = 0; i < out.fields_.size(); ++i) {
    if (out.fields_[i] == name) {
      out.items_[i] = std::move(v);
      return out;
    }
  }
  throw std::out_of_range("no field '" + name + "' in " + to_string());
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string Value::to_string() const {
  auto join = [this](char open, char close) {
    std::string s(1, open);
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i) s += ',';
      s += items_[i].to_string();
    }
    if (kind_ == Kind::Tuple && items_.size() == 1) s += ',';
    return s + close;
  };
  switch (kind_) {
    case Kind::Unit: return "()";
    case Kind::Bool: return int_ ? "true" : "false";
    case Kind::Int: return std::to_string(int_);
    case Kind::Str: return quote_string(str_);
    case Kind::Pointer: return str_;
    case Kind::Tuple: return join('(', ')');
    case Kind::Set: return join('{', '}');
    case Kind::List: return join('[', ']');
    case Kind::Record: {
      std::string s = "{";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) s += ',';
        s += fields_[i] + '=' + items_[i].to_string();
      }
      return s + '}';
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Value::Kind::Unit: return std::strong_ordering::equal;
    case Value::Kind::Bool:
    case Value::Kind::Int: return a.int_ <=> b.int_;
    case Value::Kind::Str:
    case Value::Kind::Pointer: return a.str_ <=> b.str_;
    default: break;
  }
  if (auto c = a.fields_ <=> b.fields_; c != 0) return c;
  std::size_t n = std::min(a.items_.size(), b.items_.size());
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = a.items_[i] <=> b.items_[i]; c != 0) return c;
  return a.items_.size() <=> b.items_.size();
}

bool conforms(const Value& v, const Type& t) {
  using K = Type::Kind;
  switch (t.kind()) {
    case K::Any: return true;
    case K::Unit: return v.is(Value::Kind::Unit);
    case K::Bool: return v.is(Value::Kind::Bool);
    case K::Int: return v.is(Value::Kind::Int);
    case K::Str: return v.is(Value::Kind::Str);
    case K::Ref: return v.is(Value::Kind::Pointer);
    case K::Set:
    case K::List:
      if (!v.is(t.is(K::Set) ? Value::Kind::Set : Value::Kind::List)) return false;
      return std::all_of(v.items().begin(), v.items().end(), [&](const Value& x) { return conforms(x, t.elem()); });
    case K::Tuple:
      if (!v.is(Value::Kind::Tuple) || v.items().size() != t.items().size()) return false;
      for (std::size_t i = 0; i < t.items().size(); ++i)
        if (!conforms(v.items()[i], t.items()[i])) return false;
      return true;
    case K::Record:
      if (!v.is(Value::Kind::Record) || v.field_names() != t.field_names()) return false;
      for (std::size_t i = 0; i < t.items().size(); ++i)
        if (!conforms(v.items()[i], t.items()[i])) return false;
      return true;
  }
  return false;
}

void collect_pointers(const Value& v, std::vector<std::string>& out) {
  if (v.is(Value::Kind::Pointer)) {
    out.push_back(v.pointer_name());
    return;
  }
  for (const auto& x : v.items()) collect_pointers(x, out);
}

}  // namespace learnflow::lang
