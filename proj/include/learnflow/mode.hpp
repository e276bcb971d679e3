#pragma once

#include <string>
#include <vector>

#include "learnflow/lang/eval.hpp"
#include "learnflow/lang/model.hpp"

namespace learnflow {

/// A transition together with a binding: one way the transition can fire.
struct Mode {
  std::size_t transition = 0;
  lang::Binding binding;

  /// "select course{id=34, r=[]}"
  std::string label(const lang::Model& model) const {
    return model.transitions.at(transition).name + binding.to_string();
  }

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Canonical text of a marking: nonempty places in name order, each token
/// as count'value, tokens ordered by their serialization.
std::string marking_key(const lang::Model& model, const std::vector<lang::TokenBag>& marking);

/// Sorted (serialization, count) pairs of a token multiset.
std::vector<std::pair<std::string, Count>> canonical_entries(const lang::TokenBag& bag);

namespace detail {

/// Binding search shared by the colored and reference engines: pattern
/// matching of input inscriptions against distinct tokens, then the
/// enabledness check (input demands included in the marking, guard true)
/// evaluated under `store`. Result is duplicate-free and sorted.
std::vector<lang::Binding> search_bindings(const lang::Model& model, const std::vector<lang::TokenBag>& marking,
                                           const lang::GlobalStore& store, std::size_t transition);

/// Input demands included in the marking and guard true, under `store`.
bool mode_enabled(const lang::Model& model, const std::vector<lang::TokenBag>& marking,
                  const lang::GlobalStore& store, std::size_t transition, const lang::Binding& b);

/// Throws std::invalid_argument unless every transition variable is bound.
void require_complete(const lang::Model& model, std::size_t transition, const lang::Binding& b);

}  // namespace detail
}  // namespace learnflow
