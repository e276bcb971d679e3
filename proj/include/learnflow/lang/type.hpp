#pragma once

#include <string>
#include <utility>
#include <vector>

namespace learnflow::lang {

/// Static types of the model language. `Any` only appears as the element type
/// of an empty collection literal before it is unified with a context.
class Type {
 public:
  enum class Kind { Unit, Bool, Int, Str, Tuple, Set, List, Record, Ref, Any };

  Type() = default;
  static Type unit() { return Type(Kind::Unit); }
  static Type boolean() { return Type(Kind::Bool); }
  static Type integer() { return Type(Kind::Int); }
  static Type string() { return Type(Kind::Str); }
  static Type any() { return Type(Kind::Any); }
  static Type tuple(std::vector<Type> items);
  static Type set_of(Type elem);
  static Type list_of(Type elem);
  /// Fields are stored sorted by name.
  static Type record(std::vector<std::pair<std::string, Type>> fields);
  /// Throws std::invalid_argument for a pointer to a pointer.
  static Type ref(Type pointee);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }
  const std::vector<Type>& items() const { return items_; }
  const Type& elem() const { return items_.at(0); }
  const std::vector<std::string>& field_names() const { return fields_; }
  const Type* field(const std::string& name) const;

  bool contains_ref() const;
  bool contains_any() const;

  /// Concrete syntax, e.g. "(Int, ListOf Int)" or "Ref { completed: SetOf Int }".
  std::string to_string() const;

  friend bool operator==(const Type&, const Type&) = default;

 private:
  explicit Type(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Unit;
  std::vector<Type> items_;
  std::vector<std::string> fields_;
};

/// Structural compatibility treating Any as a wildcard.
bool compatible(const Type& a, const Type& b);
/// The more specific of two compatible types.
Type unify(const Type& a, const Type& b);

}  // namespace learnflow::lang
