#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "learnflow/lang/type.hpp"

namespace learnflow::lang {

/// A token or data value: scalars, tuples, finite sets, lists, records and
/// pointer names. Sets are kept sorted and duplicate-free; record fields are
/// kept sorted by name. Equality and ordering are structural.
class Value {
 public:
  enum class Kind { Unit, Bool, Int, Str, Tuple, Set, List, Record, Pointer };

  Value() = default;
  static Value unit() { return Value(Kind::Unit); }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value string(std::string s);
  static Value pointer(std::string name);
  static Value tuple(std::vector<Value> items);
  static Value set(std::vector<Value> items);
  static Value list(std::vector<Value> items);
  static Value record(std::vector<std::pair<std::string, Value>> fields);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }

  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_string() const;   // Str
  const std::string& pointer_name() const;  // Pointer
  const std::vector<Value>& items() const { return items_; }  // Tuple/Set/List/Record values
  const std::vector<std::string>& field_names() const { return fields_; }
  const Value& field(const std::string& name) const;  // throws if absent

  bool set_contains(const Value& v) const;
  Value with_field(const std::string& name, Value v) const;

  /// Canonical text in model-language literal syntax, e.g. (1,[1,2]).
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  explicit Value(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Unit;
  std::int64_t int_ = 0;  // Bool and Int
  std::string str_;       // Str and Pointer
  std::vector<Value> items_;
  std::vector<std::string> fields_;
};

/// True iff v inhabits t (Any matches everything).
bool conforms(const Value& v, const Type& t);

/// Every pointer name occurring anywhere inside v.
void collect_pointers(const Value& v, std::vector<std::string>& out);

std::string quote_string(const std::string& s);

}  // namespace learnflow::lang
