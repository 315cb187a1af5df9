#pragma once

#include "autofill/expression.hpp"
#include "autofill/filling.hpp"
#include "autofill/graph.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace autofill {

enum class FieldKind { Number, Integer, Enum };

std::string_view to_string(FieldKind k);

struct FieldDecl {
  VertexId id;
  std::string label;
  FieldKind kind = FieldKind::Number;
  std::vector<std::string> values; // enum symbols
  std::optional<double> min;
  std::optional<double> max;

  friend bool operator==(const FieldDecl &, const FieldDecl &) = default;
};

struct ReplacementRule {
  VertexId target;
  std::vector<VertexId> args;
  Mode mode = Mode::Complete;
  Expression expr;

  friend bool operator==(const ReplacementRule &, const ReplacementRule &) = default;
};

struct FormSpec {
  std::string name;
  std::vector<FieldDecl> fields;
  std::vector<ReplacementRule> rules;

  const FieldDecl &field(const VertexId &id) const;
  const ReplacementRule *rule_for(const VertexId &target) const;
  /// The common mode when every rule uses the same one (or there are no
  /// rules, which reads as complete).
  std::optional<Mode> uniform_mode() const;

  friend bool operator==(const FormSpec &, const FormSpec &) = default;
};

/// Spec file problems. `where` is "line:col" for JSON syntax, the rule target
/// for rule problems, or the field id for field problems.
class SpecError : public std::runtime_error {
public:
  enum class Kind {
    Syntax, InvalidField, DuplicateField, DuplicateRule, SelfReference, UnknownArg, ModeViolation
  };

  SpecError(Kind kind, std::string where, const std::string &message)
      : std::runtime_error(message), kind_(kind), where_(std::move(where)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string &where() const noexcept { return where_; }

private:
  Kind kind_;
  std::string where_;
};

FormSpec parse_form_spec(std::string_view text);
std::string serialize_form_spec(const FormSpec &spec);

/// Edge a -> target for every rule argument a.
DepGraph induced_graph(const FormSpec &spec);

/// A stored field value. Enum fields carry their symbol; `number` is then the
/// symbol's index, which is what expressions see.
struct Value {
  double number = 0.0;
  std::string symbol;

  friend bool operator==(const Value &, const Value &) = default;
};

/// Input as it arrives from a CLI flag (string) or a JSON body.
using RawValue = std::variant<double, std::string>;
using RawInput = std::map<VertexId, RawValue>;

/// Input and rule-evaluation failures, attributed to a field.
class FillError : public std::runtime_error {
public:
  enum class Kind { UnknownField, TypeError, RuleFailed };

  FillError(Kind kind, std::string field, const std::string &message,
            std::optional<ExprError::Kind> cause = std::nullopt)
      : std::runtime_error(message), kind_(kind), field_(std::move(field)), cause_(cause) {}

  Kind kind() const noexcept { return kind_; }
  const std::string &field() const noexcept { return field_; }
  /// Set for RuleFailed.
  std::optional<ExprError::Kind> cause() const noexcept { return cause_; }

private:
  Kind kind_;
  std::string field_;
  std::optional<ExprError::Kind> cause_;
};

/// Type-checks one raw input against its declaration.
Value coerce_input(const FieldDecl &field, const RawValue &raw);
/// Converts a rule result for storage in `field` (integrality, enum index).
Value coerce_derived(const FieldDecl &field, double result);

enum class Origin { User, Derived };

struct FilledValue {
  Value value;
  Origin origin = Origin::User;
};

struct TraceEntry {
  VertexId field;
  std::size_t stage = 0;
  /// Rule arguments that had values when the rule fired.
  std::vector<VertexId> available_args;
};

enum class FillStatus { Filled, Incomplete };

struct FillReport {
  std::map<VertexId, FilledValue> values;
  std::vector<TraceEntry> trace;
  FillStatus status = FillStatus::Incomplete;
  VertexSet missing;
  VertexSet suggestions;
};

/// Closure of `provided` using each rule's own mode.
ClosureTrace spec_closure(const FormSpec &spec, const VertexSet &provided);

/// Extra inputs that make `provided` fill the spec. Uniform-mode specs use
/// suggest_additional; mixed specs use a greedy closure-gain search.
VertexSet suggest_inputs(const FormSpec &spec, const VertexSet &provided);

/// Stage-synchronous autofill: every rule ready at stage k is evaluated
/// against the values known after stage k-1. User values are never replaced.
FillReport autofill(const FormSpec &spec, const RawInput &input);

struct SpecAnalysis {
  AnalysisReport report;
  VertexSet mandatory;
  VertexSet min_p_filling;
  /// True when the spec has partial rules and one vertex per source
  /// component is fewer inputs than the greedy complete filling.
  bool partial_rules_reduce_inputs = false;
};

SpecAnalysis validate_spec_consistency(const FormSpec &spec, bool with_exact = true);

} // namespace autofill
