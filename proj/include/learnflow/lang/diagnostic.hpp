#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "learnflow/lang/ast.hpp"

namespace learnflow::lang {

struct Diagnostic {
  SourceLoc loc;
  std::string message;
  std::string to_string() const { return loc.to_string() + ": " + message; }
};

/// Parse or type errors; carries every diagnostic found.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(std::vector<Diagnostic> diags)
      : std::runtime_error(join(diags)), diagnostics_(std::move(diags)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string join(const std::vector<Diagnostic>& diags) {
    std::string s;
    for (const auto& d : diags) {
      if (!s.empty()) s += "\n";
      s += d.to_string();
    }
    return s;
  }
  std::vector<Diagnostic> diagnostics_;
};

/// Runtime evaluation failures: unbound variable, dangling pointer, overflow.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace learnflow::lang
