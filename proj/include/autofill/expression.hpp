#pragma once

// Small expression language for replacement rules:
//
//   if <cond> then <e> elif <cond> then <e> ... else <e>
//   + - * /   floor(e)   < <= > >= == !=   and or not   missing(name)
//
// Names are identifiers or back-quoted (`1`) for ids that are not. Values are
// doubles or booleans; `and`/`or` short-circuit, so `missing(x) or x > 16`
// never reads a missing x.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace autofill {

class ExprError : public std::runtime_error {
public:
  enum class Kind { Syntax, DivisionByZero, MissingUnhandled, TypeError };

  ExprError(Kind kind, const std::string &message, std::size_t column = 0)
      : std::runtime_error(message), kind_(kind), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based column for syntax errors, 0 otherwise.
  std::size_t column() const noexcept { return column_; }

private:
  Kind kind_;
  std::size_t column_;
};

/// Argument bindings; std::nullopt (or an absent name) means missing.
using Env = std::map<std::string, std::optional<double>, std::less<>>;

class Expression {
public:
  struct Node;

  /// Throws ExprError(Syntax) with the offending column.
  static Expression parse(std::string_view source);

  /// Numeric result. Throws DivisionByZero, MissingUnhandled, or TypeError
  /// (e.g. a comparison where a number is expected).
  double evaluate(const Env &env) const;

  const std::string &source() const noexcept { return source_; }
  /// Fully parenthesized rendering; parses back to an equal tree.
  std::string canonical() const;

  std::set<std::string> references() const;
  bool uses_missing() const;

  /// Structural equality of the syntax trees.
  friend bool operator==(const Expression &a, const Expression &b);

private:
  Expression(std::string source, std::shared_ptr<const Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  std::string source_;
  std::shared_ptr<const Node> root_;
};

} // namespace autofill
