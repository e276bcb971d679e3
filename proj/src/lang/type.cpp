#include "learnflow/lang/type.hpp"

#include <algorithm>
#include <stdexcept>

namespace learnflow::lang {

Type Type::tuple(std::vector<Type> items) {
  if (items.empty()) throw std::invalid_argument("tuple type needs at least one component");
  Type t(Kind::Tuple);
  t.items_ = std::move(items);
  return t;
}

Type Type::set_of(Type elem) {
  Type t(Kind::Set);
  t.items_.push_back(std::move(elem));
  return t;
}

Type Type::list_of(Type elem) {
  Type t(Kind::List);
  t.items_.push_back(std::move(elem));
  return t;
}

Type Type::record(std::vector<std::pair<std::string, Type>> fields) {
  if (fields.empty()) throw std::invalid_argument("record type needs at least one field");
  std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Type t(Kind::Record);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0 && fields[i].first == fields[i - 1].first)
      throw std::invalid_argument("duplicate record field '" + fields[i].first + "'");
    t.fields_.push_back(std::move(fields[i].first));
    t.items_.push_back(std::move(fields[i].second));
  }
  return t;
}

Type Type::ref(Type pointee) {
  if (pointee.is(Kind::Ref)) throw std::invalid_argument("pointers to pointers are not allowed");
  Type t(Kind::Ref);
  t.items_.push_back(std::move(pointee));
  return t;
}

const Type* Type::field(const std::string& name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i] == name) return &items_[i];
  return nullptr;
}

bool Type::contains_ref() const {
  if (kind_ == Kind::Ref) return true;
  return std::any_of(items_.begin(), items_.end(), [](const Type& t) { return t.contains_ref(); });
}

bool Type::contains_any() const {
  if (kind_ == Kind::Any) return true;
  return std::any_of(items_.begin(), items_.end(), [](const Type& t) { return t.contains_any(); });
}

namespace {
std::string wrap(const Type& t) {
  auto s = t.to_string();
  bool compound = t.is(Type::Kind::Set) || t.is(Type::Kind::List) || t.is(Type::Kind::Ref);
  return compound ? "(" + s + ")" : s;
}
}  // namespace

std::string Type::to_string() const {
  switch (kind_) {
    case Kind::Unit: return "Unit";
    case Kind::Bool: return "Bool";
    case Kind::Int: return "Int";
    case Kind::Str: return "Str";
    case Kind::Any: return "?";
    case Kind::Set: return "SetOf " + wrap(items_[0]);
    case Kind::List: return "ListOf " + wrap(items_[0]);
    case Kind::Ref: return "Ref " + wrap(items_[0]);
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) s += ", ";
        s += items_[i].to_string();
      }
      if (items_.size() == 1) s += ",";
      return s + ")";
    }
    case Kind::Record: {
      std::string s = "{ ";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) s += ", ";
        s += fields_[i] + ": " + items_[i].to_string();
      }
      return s + " }";
    }
  }
  return "?";
}

bool compatible(const Type& a, const Type& b) {
  if (a.is(Type::Kind::Any) || b.is(Type::Kind::Any)) return true;
  if (a.kind() != b.kind() || a.items().size() != b.items().size() || a.field_names() != b.field_names())
    return false;
  for (std::size_t i = 0; i < a.items().size(); ++i)
    if (!compatible(a.items()[i], b.items()[i])) return false;
  return true;
}

Type unify(const Type& a, const Type& b) {
  if (a.is(Type::Kind::Any)) return b;
  if (b.is(Type::Kind::Any)) return a;
  switch (a.kind()) {
    case Type::Kind::Set: return Type::set_of(unify(a.elem(), b.elem()));
    case Type::Kind::List: return Type::list_of(unify(a.elem(), b.elem()));
    case Type::Kind::Ref: return Type::ref(unify(a.elem(), b.elem()));
    case Type::Kind::Tuple: {
      std::vector<Type> items;
      for (std::size_t i = 0; i < a.items().size(); ++i) items.push_back(unify(a.items()[i], b.items()[i]));
      return Type::tuple(std::move(items));
    }
    case Type::Kind::Record: {
      std::vector<std::pair<std::string, Type>> fields;
      for (std::size_t i = 0; i < a.items().size(); ++i)
        fields.emplace_back(a.field_names()[i], unify(a.items()[i], b.items()[i]));
      return Type::record(std::move(fields));
    }
    default: return a;
  }
}

}  // namespace learnflow::lang
