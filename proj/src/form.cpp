#include "autofill/form.hpp"

#include "autofill/report_json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace autofill {

using json = nlohmann::ordered_json;

std::string_view to_string(FieldKind k) {
  switch (k) {
  case FieldKind::Number: return "number";
  case FieldKind::Integer: return "integer";
  case FieldKind::Enum: return "enum";
  }
  return "number";
}

const FieldDecl &FormSpec::field(const VertexId &id) const {
  for (const auto &f : fields) {
    if (f.id == id) {
      return f;
    }
  }
  throw FillError(FillError::Kind::UnknownField, id.str(), "unknown field '" + id.str() + "'");
}

const ReplacementRule *FormSpec::rule_for(const VertexId &target) const {
  for (const auto &r : rules) {
    if (r.target == target) {
      return &r;
    }
  }
  return nullptr;
}

std::optional<Mode> FormSpec::uniform_mode() const {
  if (rules.empty()) {
    return Mode::Complete;
  }
  const Mode first = rules.front().mode;
  for (const auto &r : rules) {
    if (r.mode != first) {
      return std::nullopt;
    }
  }
  return first;
}

namespace {

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

[[noreturn]] void bad_field(const std::string &where, const std::string &msg) {
  throw SpecError(SpecError::Kind::InvalidField, where, msg);
}

std::string require_string(const json &obj, const char *key, const std::string &where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    bad_field(where, std::string("'") + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

FieldDecl parse_field(const json &j, std::size_t index) {
  const std::string where = "fields[" + std::to_string(index) + "]";
  if (!j.is_object()) {
    bad_field(where, where + " must be an object");
  }
  const std::string id = require_string(j, "id", where);
  if (id.empty()) {
    bad_field(where, "field id must be non-empty");
  }
  FieldDecl f{VertexId(id), j.contains("label") ? require_string(j, "label", id) : id,
              FieldKind::Number, {}, std::nullopt, std::nullopt};
  const std::string kind = require_string(j, "kind", id);
  if (kind == "number") {
    f.kind = FieldKind::Number;
  } else if (kind == "integer") {
    f.kind = FieldKind::Integer;
  } else if (kind == "enum") {
    f.kind = FieldKind::Enum;
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
      bad_field(id, "enum field '" + id + "' needs a non-empty 'values' list");
    }
    for (const auto &v : j["values"]) {
      if (!v.is_string() || v.get<std::string>().empty()) {
        bad_field(id, "enum values of '" + id + "' must be non-empty strings");
      }
      f.values.push_back(v.get<std::string>());
    }
    auto sorted = f.values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      bad_field(id, "enum values of '" + id + "' must be distinct");
    }
  } else {
    bad_field(id, "unknown kind '" + kind + "' for field '" + id + "'");
  }
  for (const char *bound : {"min", "max"}) {
    if (j.contains(bound)) {
      if (!j[bound].is_number()) {
        bad_field(id, std::string("'") + bound + "' of '" + id + "' must be a number");
      }
      (std::string_view(bound) == "min" ? f.min : f.max) = j[bound].get<double>();
    }
  }
  if (f.min && f.max && *f.min > *f.max) {
    bad_field(id, "min exceeds max for field '" + id + "'");
  }
  return f;
}

ReplacementRule parse_rule(const json &j, std::size_t index, const std::set<VertexId> &field_ids) {
  const std::string where = "rules[" + std::to_string(index) + "]";
  if (!j.is_object()) {
    throw SpecError(SpecError::Kind::Syntax, where, where + " must be an object");
  }
  const std::string target = require_string(j, "target", where);
  if (target.empty() || !field_ids.contains(VertexId(target))) {
    throw SpecError(SpecError::Kind::UnknownArg, target,
                    "rule target '" + target + "' is not a declared field");
  }
  if (!j.contains("args") || !j["args"].is_array() || j["args"].empty()) {
    throw SpecError(SpecError::Kind::Syntax, target,
                    "rule for '" + target + "' needs a non-empty 'args' list");
  }
  std::vector<VertexId> args;
  for (const auto &a : j["args"]) {
    if (!a.is_string() || a.get<std::string>().empty()) {
      throw SpecError(SpecError::Kind::Syntax, target,
                      "args of rule '" + target + "' must be field ids");
    }
    VertexId arg(a.get<std::string>());
    if (arg.str() == target) {
      throw SpecError(SpecError::Kind::SelfReference, target,
                      "rule for '" + target + "' lists its own target as an argument");
    }
    if (!field_ids.contains(arg)) {
      throw SpecError(SpecError::Kind::UnknownArg, target,
                      "rule for '" + target + "' uses unknown field '" + arg.str() + "'");
    }
    if (std::find(args.begin(), args.end(), arg) != args.end()) {
      throw SpecError(SpecError::Kind::Syntax, target,
                      "rule for '" + target + "' repeats argument '" + arg.str() + "'");
    }
    args.push_back(std::move(arg));
  }

  Mode mode = Mode::Complete;
  if (j.contains("mode")) {
    const std::string m = require_string(j, "mode", target);
    auto parsed = parse_mode(m);
    if (!parsed) {
      throw SpecError(SpecError::Kind::Syntax, target, "unknown mode '" + m + "'");
    }
    mode = *parsed;
  }

  const std::string source = require_string(j, "expr", target);
  std::optional<Expression> expr;
  try {
    expr = Expression::parse(source);
  } catch (const ExprError &e) {
    throw SpecError(SpecError::Kind::Syntax, target + ":" + std::to_string(e.column()),
                    "rule for '" + target + "': " + e.what());
  }
  for (const auto &name : expr->references()) {
    if (std::find(args.begin(), args.end(), VertexId(name)) == args.end()) {
      if (name == target) {
        throw SpecError(SpecError::Kind::SelfReference, target,
                        "rule for '" + target + "' references its own target");
      }
      throw SpecError(SpecError::Kind::UnknownArg, target,
                      "rule for '" + target + "' references '" + name +
                          "', which is not one of its args");
    }
  }
  if (mode == Mode::Complete && expr->uses_missing()) {
    throw SpecError(SpecError::Kind::ModeViolation, target,
                    "rule for '" + target + "' uses missing() but is in complete mode");
  }
  return ReplacementRule{VertexId(target), std::move(args), mode, std::move(*expr)};
}

std::string format_integral(double d) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(d));
  return std::string(buf, end);
}

constexpr double kIntegralTolerance = 1e-9;

std::optional<long long> as_integral(double d) {
  const double r = std::round(d);
  if (!std::isfinite(d) || std::abs(d - r) > kIntegralTolerance) {
    return std::nullopt;
  }
  return static_cast<long long>(r);
}

} // namespace

FormSpec parse_form_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    const std::string where = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    // Keep nlohmann's detail ("unexpected ...; expected ...") but not its
    // own position prefix, which counts differently.
    std::string detail = e.what();
    if (auto dash = detail.rfind(" - "); dash != std::string::npos) {
      detail = detail.substr(dash + 3);
    }
    throw SpecError(SpecError::Kind::Syntax, where, "JSON syntax error: " + detail);
  }
  if (!doc.is_object()) {
    throw SpecError(SpecError::Kind::Syntax, "1:1", "form spec must be a JSON object");
  }

  FormSpec spec;
  spec.name = doc.contains("name") ? require_string(doc, "name", "name") : "";
  if (!doc.contains("fields") || !doc["fields"].is_array() || doc["fields"].empty()) {
    throw SpecError(SpecError::Kind::InvalidField, "fields", "spec needs a non-empty 'fields' list");
  }
  std::set<VertexId> ids;
  for (std::size_t i = 0; i < doc["fields"].size(); ++i) {
    FieldDecl f = parse_field(doc["fields"][i], i);
    if (!ids.insert(f.id).second) {
      throw SpecError(SpecError::Kind::DuplicateField, f.id.str(),
                      "field '" + f.id.str() + "' declared twice");
    }
    spec.fields.push_back(std::move(f));
  }

  if (doc.contains("rules")) {
    if (!doc["rules"].is_array()) {
      throw SpecError(SpecError::Kind::Syntax, "rules", "'rules' must be a list");
    }
    std::set<VertexId> targets;
    for (std::size_t i = 0; i < doc["rules"].size(); ++i) {
      ReplacementRule r = parse_rule(doc["rules"][i], i, ids);
      if (!targets.insert(r.target).second) {
        throw SpecError(SpecError::Kind::DuplicateRule, r.target.str(),
                        "field '" + r.target.str() + "' has more than one rule");
      }
      spec.rules.push_back(std::move(r));
    }
  }
  return spec;
}

std::string serialize_form_spec(const FormSpec &spec) {
  return dump_json(to_json(spec));
}

DepGraph induced_graph(const FormSpec &spec) {
  std::vector<VertexId> vs;
  for (const auto &f : spec.fields) {
    vs.push_back(f.id);
  }
  std::vector<Edge> es;
  for (const auto &r : spec.rules) {
    for (const auto &a : r.args) {
      es.emplace_back(a, r.target);
    }
  }
  return DepGraph::build(std::move(vs), es);
}

Value coerce_input(const FieldDecl &field, const RawValue &raw) {
  const std::string &id = field.id.str();
  auto type_error = [&](const std::string &msg) {
    return FillError(FillError::Kind::TypeError, id, "field '" + id + "': " + msg);
  };

  if (field.kind == FieldKind::Enum) {
    std::string symbol;
    if (const auto *s = std::get_if<std::string>(&raw)) {
      symbol = *s;
    } else {
      const auto integral = as_integral(std::get<double>(raw));
      if (!integral) {
        throw type_error("expected one of the enum values");
      }
      symbol = format_integral(static_cast<double>(*integral));
    }
    auto it = std::find(field.values.begin(), field.values.end(), symbol);
    if (it == field.values.end()) {
      throw type_error("'" + symbol + "' is not one of the enum values");
    }
    return Value{static_cast<double>(it - field.values.begin()), symbol};
  }

  double number = 0.0;
  if (const auto *s = std::get_if<std::string>(&raw)) {
    const char *first = s->data();
    const char *last = s->data() + s->size();
    auto [end, ec] = std::from_chars(first, last, number);
    if (s->empty() || ec != std::errc() || end != last) {
      throw type_error("'" + *s + "' is not a number");
    }
  } else {
    number = std::get<double>(raw);
  }
  if (!std::isfinite(number)) {
    throw type_error("value must be finite");
  }
  if (field.kind == FieldKind::Integer) {
    const auto integral = as_integral(number);
    if (!integral) {
      throw type_error("expected an integer");
    }
    number = static_cast<double>(*integral);
  }
  if ((field.min && number < *field.min) || (field.max && number > *field.max)) {
    throw type_error("value out of range");
  }
  return Value{number, ""};
}

Value coerce_derived(const FieldDecl &field, double result) {
  const std::string &id = field.id.str();
  auto fail = [&](const std::string &msg) {
    return FillError(FillError::Kind::RuleFailed, id, "rule for '" + id + "': " + msg,
                     ExprError::Kind::TypeError);
  };
  if (!std::isfinite(result)) {
    throw fail("result is not finite");
  }
  switch (field.kind) {
  case FieldKind::Number:
    return Value{result, ""};
  case FieldKind::Integer: {
    const auto integral = as_integral(result);
    if (!integral) {
      throw fail("result " + std::to_string(result) + " is not an integer");
    }
    return Value{static_cast<double>(*integral), ""};
  }
  case FieldKind::Enum: {
    const auto integral = as_integral(result);
    if (!integral || *integral < 0 || *integral >= static_cast<long long>(field.values.size())) {
      throw fail("result is not a valid enum index");
    }
    return Value{static_cast<double>(*integral), field.values[static_cast<std::size_t>(*integral)]};
  }
  }
  return Value{result, ""};
}

namespace {

// Fields whose rule is ready given `known`, in id order.
std::vector<const ReplacementRule *> ready_rules(const FormSpec &spec,
                                                 const std::vector<VertexId> &order,
                                                 const VertexSet &known) {
  std::vector<const ReplacementRule *> ready;
  for (const auto &id : order) {
    if (known.contains(id)) {
      continue;
    }
    const ReplacementRule *r = spec.rule_for(id);
    if (!r) {
      continue;
    }
    auto have = [&](const VertexId &a) { return known.contains(a); };
    const bool ok = r->mode == Mode::Complete ? std::all_of(r->args.begin(), r->args.end(), have)
                                              : std::any_of(r->args.begin(), r->args.end(), have);
    if (ok) {
      ready.push_back(r);
    }
  }
  return ready;
}

std::vector<VertexId> sorted_ids(const FormSpec &spec) {
  std::vector<VertexId> ids;
  for (const auto &f : spec.fields) {
    ids.push_back(f.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

} // namespace

ClosureTrace spec_closure(const FormSpec &spec, const VertexSet &provided) {
  const auto order = sorted_ids(spec);
  for (const auto &v : provided) {
    spec.field(v);
  }
  ClosureTrace trace;
  trace.stages.push_back(provided);
  for (;;) {
    const auto ready = ready_rules(spec, order, trace.stages.back());
    if (ready.empty()) {
      break;
    }
    VertexSet next = trace.stages.back();
    for (const auto *r : ready) {
      next.insert(r->target);
    }
    trace.stages.push_back(std::move(next));
  }
  trace.filled = trace.fixed_point().size() == spec.fields.size();
  return trace;
}

VertexSet suggest_inputs(const FormSpec &spec, const VertexSet &provided) {
  const DepGraph g = induced_graph(spec);
  if (auto mode = spec.uniform_mode()) {
    return suggest_additional(g, provided, *mode);
  }
  VertexSet chosen = provided;
  VertexSet added;
  for (const auto &s : sources(g)) {
    if (chosen.insert(s).second) {
      added.insert(s);
    }
  }
  for (;;) {
    const auto reached = spec_closure(spec, chosen).fixed_point();
    if (reached.size() == spec.fields.size()) {
      return added;
    }
    std::optional<VertexId> best;
    std::size_t best_size = 0;
    for (const auto &v : g.vertices()) {
      if (reached.contains(v)) {
        continue;
      }
      VertexSet trial = chosen;
      trial.insert(v);
      const std::size_t size = spec_closure(spec, trial).fixed_point().size();
      if (!best || size > best_size) {
        best = v;
        best_size = size;
      }
    }
    chosen.insert(*best);
    added.insert(*best);
  }
}

FillReport autofill(const FormSpec &spec, const RawInput &input) {
  FillReport report;
  VertexSet provided;
  for (const auto &[id, raw] : input) {
    const FieldDecl &f = spec.field(id);
    report.values.emplace(id, FilledValue{coerce_input(f, raw), Origin::User});
    provided.insert(id);
  }

  const auto order = sorted_ids(spec);
  VertexSet known = provided;
  for (std::size_t stage = 1;; ++stage) {
    const auto ready = ready_rules(spec, order, known);
    if (ready.empty()) {
      break;
    }
    // Evaluate the whole stage against the previous stage's values first.
    std::vector<std::pair<const ReplacementRule *, Value>> results;
    for (const auto *r : ready) {
      Env env;
      std::vector<VertexId> available;
      for (const auto &a : r->args) {
        auto it = report.values.find(a);
        if (it != report.values.end()) {
          env.emplace(a.str(), it->second.value.number);
          available.push_back(a);
        } else {
          env.emplace(a.str(), std::nullopt);
        }
      }
      double result = 0.0;
      try {
        result = r->expr.evaluate(env);
      } catch (const ExprError &e) {
        throw FillError(FillError::Kind::RuleFailed, r->target.str(),
                        "rule for '" + r->target.str() + "': " + e.what(), e.kind());
      }
      results.emplace_back(r, coerce_derived(spec.field(r->target), result));
      report.trace.push_back(TraceEntry{r->target, stage, std::move(available)});
    }
    for (auto &[r, value] : results) {
      report.values.emplace(r->target, FilledValue{std::move(value), Origin::Derived});
      known.insert(r->target);
    }
  }

  for (const auto &id : order) {
    if (!known.contains(id)) {
      report.missing.insert(id);
    }
  }
  if (report.missing.empty()) {
    report.status = FillStatus::Filled;
  } else {
    report.status = FillStatus::Incomplete;
    report.suggestions = suggest_inputs(spec, provided);
  }
  return report;
}

SpecAnalysis validate_spec_consistency(const FormSpec &spec, bool with_exact) {
  const DepGraph g = induced_graph(spec);
  SpecAnalysis a;
  a.report = analyze(g, with_exact);
  for (const auto &f : spec.fields) {
    if (!spec.rule_for(f.id)) {
      a.mandatory.insert(f.id);
    }
  }
  a.min_p_filling = min_p_filling(g);
  const bool has_partial = std::any_of(spec.rules.begin(), spec.rules.end(),
                                       [](const ReplacementRule &r) { return r.mode == Mode::Partial; });
  a.partial_rules_reduce_inputs =
      has_partial && a.report.min_p_filling_cardinality < a.report.greedy_min_filling.size();
  return a;
}

} // namespace autofill
