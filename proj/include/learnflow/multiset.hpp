#pragma once

// Finite multisets (bags) with the sum / union / truncated-subtraction algebra
// used for markings and arc demands.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace learnflow {

using Count = std::uint64_t;

/// A finite multiset over an ordered element type. Zero counts are never
/// stored, so two multisets are equal iff their entry maps are equal.
template <class T, class Compare = std::less<T>>
class Multiset {
 public:
  using Entries = std::map<T, Count, Compare>;
  using const_iterator = typename Entries::const_iterator;

  Multiset() = default;
  Multiset(std::initializer_list<std::pair<const T, Count>> init) {
    for (const auto& [elem, n] : init) add(elem, n);
  }

  static Multiset singleton(T elem, Count n = 1) {
    Multiset m;
    m.add(std::move(elem), n);
    return m;
  }

  void add(const T& elem, Count n = 1) {
    if (n == 0) return;
    auto [it, inserted] = entries_.try_emplace(elem, 0);
    if (it->second > max_count() - n) throw std::overflow_error("multiset count overflow");
    it->second += n;
    size_ = checked_add(size_, n);
  }

  /// Removes up to n copies; removing more than present truncates at zero.
  void remove(const T& elem, Count n = 1) {
    auto it = entries_.find(elem);
    if (it == entries_.end() || n == 0) return;
    Count taken = n < it->second ? n : it->second;
    it->second -= taken;
    size_ -= taken;
    if (it->second == 0) entries_.erase(it);
  }

  Count count(const T& elem) const {
    auto it = entries_.find(elem);
    return it == entries_.end() ? 0 : it->second;
  }

  bool contains(const T& elem) const { return entries_.count(elem) != 0; }
  Count size() const { return size_; }
  bool empty() const { return entries_.empty(); }
  std::size_t distinct() const { return entries_.size(); }

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  const Entries& entries() const { return entries_; }

  /// Every element repeated by its count, in element order.
  std::vector<T> elements() const {
    std::vector<T> out;
    for (const auto& [elem, n] : entries_)
      for (Count k = 0; k < n; ++k) out.push_back(elem);
    return out;
  }

  friend bool operator==(const Multiset& a, const Multiset& b) { return a.entries_ == b.entries_; }
  friend bool operator<(const Multiset& a, const Multiset& b) { return a.entries_ < b.entries_; }

  Multiset& operator+=(const Multiset& other) {
    for (const auto& [elem, n] : other.entries_) add(elem, n);
    return *this;
  }
  Multiset& operator-=(const Multiset& other) {
    for (const auto& [elem, n] : other.entries_) remove(elem, n);
    return *this;
  }

 private:
  static constexpr Count max_count() { return ~Count{0}; }
  static Count checked_add(Count a, Count b) {
    if (a > max_count() - b) throw std::overflow_error("multiset size overflow");
    return a + b;
  }

  Entries entries_;
  Count size_ = 0;
};

/// (a + b)(s) = a(s) + b(s)
template <class T, class C>
Multiset<T, C> ms_sum(const Multiset<T, C>& a, const Multiset<T, C>& b) {
  Multiset<T, C> out = a;
  out += b;
  return out;
}

/// (a ∪ b)(s) = max(a(s), b(s))
template <class T, class C>
Multiset<T, C> ms_union(const Multiset<T, C>& a, const Multiset<T, C>& b) {
  Multiset<T, C> out = a;
  for (const auto& [elem, n] : b) {
    Count have = out.count(elem);
    if (n > have) out.add(elem, n - have);
  }
  return out;
}

/// Truncated subtraction: (a - b)(s) = max(a(s) - b(s), 0)
template <class T, class C>
Multiset<T, C> ms_subtract(const Multiset<T, C>& a, const Multiset<T, C>& b) {
  Multiset<T, C> out = a;
  out -= b;
  return out;
}

/// Inclusion: a(s) <= b(s) for every s.
template <class T, class C>
bool ms_leq(const Multiset<T, C>& a, const Multiset<T, C>& b) {
  if (a.size() > b.size()) return false;
  for (const auto& [elem, n] : a)
    if (b.count(elem) < n) return false;
  return true;
}

}  // namespace learnflow
