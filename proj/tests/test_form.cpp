#include "autofill/form.hpp"
#include "autofill/report_json.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <random>

namespace autofill {
namespace {

using test::load_form;

SpecError::Kind spec_error(const std::string &text, std::string *where = nullptr) {
  try {
    parse_form_spec(text);
  } catch (const SpecError &e) {
    if (where) {
      *where = e.where();
    }
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return SpecError::Kind::Syntax;
}

std::string two_fields(const std::string &rules) {
  return R"({"name": "t", "fields": [{"id": "a", "kind": "number"}, {"id": "b", "kind": "number"}],
             "rules": [)" + rules + "]}";
}

TEST(FormSpec, ParsesWeightSpec) {
  const auto spec = load_form("weight.json");
  EXPECT_EQ(spec.name, "weight-calculator");
  ASSERT_EQ(spec.fields.size(), 3u);
  EXPECT_EQ(spec.field("Sex").kind, FieldKind::Enum);
  EXPECT_EQ(spec.field("Age").max, 130.0);
  ASSERT_NE(spec.rule_for("Height"), nullptr);
  EXPECT_EQ(spec.rule_for("Sex"), nullptr);
  EXPECT_EQ(spec.uniform_mode(), Mode::Complete);
  EXPECT_EQ(induced_graph(spec), oracle::weight_graph());
  EXPECT_EQ(induced_graph(load_form("pregnant.json")), oracle::pregnant_graph());
  EXPECT_EQ(induced_graph(load_form("path3.json")), oracle::path3_graph());
  EXPECT_EQ(induced_graph(load_form("k3.json")), oracle::k3_graph());
  EXPECT_EQ(load_form("weight_partial.json").uniform_mode(), std::nullopt);
  EXPECT_THROW(spec.field("Weight"), FillError);
}

TEST(FormSpec, RoundTrip) {
  for (const char *name : {"weight.json", "weight_partial.json", "pregnant.json", "path3.json",
                           "k3.json", "edgeless.json"}) {
    const auto spec = load_form(name);
    const auto text = serialize_form_spec(spec);
    EXPECT_EQ(parse_form_spec(text), spec) << name;
    EXPECT_EQ(serialize_form_spec(parse_form_spec(text)), text) << name;
  }
}

TEST(FormSpec, JsonSyntaxErrorHasLocation) {
  std::string where;
  EXPECT_EQ(spec_error("{\n  \"name\": \"x\",\n  \"fields\": [,]\n}", &where),
            SpecError::Kind::Syntax);
  EXPECT_EQ(where, "3:14");
  EXPECT_EQ(spec_error("[]"), SpecError::Kind::Syntax);
}

TEST(FormSpec, RuleErrors) {
  std::string where;
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["b"], "expr": "b"},
                                     {"target": "a", "args": ["b"], "expr": "b + 1"})"),
                       &where),
            SpecError::Kind::DuplicateRule);
  EXPECT_EQ(where, "a");
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["a"], "expr": "1"})")),
            SpecError::Kind::SelfReference);
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["b"], "expr": "a + b"})")),
            SpecError::Kind::SelfReference);
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["c"], "expr": "c"})")),
            SpecError::Kind::UnknownArg);
  EXPECT_EQ(spec_error(two_fields(R"({"target": "c", "args": ["a"], "expr": "a"})")),
            SpecError::Kind::UnknownArg);
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["b"], "expr": "x + b"})")),
            SpecError::Kind::UnknownArg);
  EXPECT_EQ(spec_error(two_fields(
                R"({"target": "a", "args": ["b"], "mode": "complete", "expr": "if missing(b) then 0 else b"})")),
            SpecError::Kind::ModeViolation);
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["b"], "expr": "b +"})"), &where),
            SpecError::Kind::Syntax);
  EXPECT_EQ(where, "a:4");
  EXPECT_EQ(spec_error(two_fields(R"({"target": "a", "args": ["b"], "mode": "some", "expr": "b"})")),
            SpecError::Kind::Syntax);
}

TEST(FormSpec, FieldErrors) {
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [{"id": "a", "kind": "number"}, {"id": "a", "kind": "number"}], "rules": []})"),
            SpecError::Kind::DuplicateField);
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [], "rules": []})"),
            SpecError::Kind::InvalidField);
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [{"id": "a", "kind": "enum"}]})"),
            SpecError::Kind::InvalidField);
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [{"id": "a", "kind": "text"}]})"),
            SpecError::Kind::InvalidField);
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [{"id": "a", "kind": "number", "min": 3, "max": 1}]})"),
            SpecError::Kind::InvalidField);
  EXPECT_EQ(spec_error(R"({"name": "t", "fields": [{"id": ""}]})"), SpecError::Kind::InvalidField);
}

TEST(Coerce, Inputs) {
  const auto spec = load_form("weight.json");
  EXPECT_EQ(coerce_input(spec.field("Sex"), RawValue{"1"}), (Value{1.0, "1"}));
  EXPECT_EQ(coerce_input(spec.field("Sex"), RawValue{0.0}), (Value{0.0, "0"}));
  EXPECT_EQ(coerce_input(spec.field("Age"), RawValue{"40"}), (Value{40.0, ""}));
  EXPECT_EQ(coerce_input(spec.field("Age"), RawValue{40.0000000001}), (Value{40.0, ""}));
  for (auto [field, raw] : std::vector<std::pair<const char *, RawValue>>{
           {"Sex", "2"}, {"Sex", 0.5}, {"Age", "forty"}, {"Age", 40.5}, {"Age", 131.0},
           {"Age", -1.0}, {"Height", ""}, {"Height", "12x"}}) {
    try {
      coerce_input(spec.field(field), raw);
      ADD_FAILURE() << field;
    } catch (const FillError &e) {
      EXPECT_EQ(e.kind(), FillError::Kind::TypeError);
      EXPECT_EQ(e.field(), field);
    }
  }
}

TEST(Coerce, DerivedValues) {
  const auto spec = load_form("weight.json");
  EXPECT_EQ(coerce_derived(spec.field("Sex"), 1.0), (Value{1.0, "1"}));
  // Range limits apply to user input only.
  EXPECT_EQ(coerce_derived(spec.field("Age"), 500.0), (Value{500.0, ""}));
  EXPECT_THROW(coerce_derived(spec.field("Age"), 2.5), FillError);
  EXPECT_THROW(coerce_derived(spec.field("Sex"), 2.0), FillError);
}

FillReport fill(const FormSpec &spec, const RawInput &in) { return autofill(spec, in); }

TEST(Autofill, HeightFromAgeAndSex) {
  const auto spec = load_form("weight.json");
  auto r = fill(spec, {{"Sex", "1"}, {"Age", 40.0}});
  EXPECT_EQ(r.status, FillStatus::Filled);
  EXPECT_EQ(r.values.at("Height").value.number, 178.0);
  EXPECT_EQ(r.values.at("Height").origin, Origin::Derived);
  EXPECT_EQ(r.values.at("Age").origin, Origin::User);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].field, VertexId("Height"));
  EXPECT_EQ(r.trace[0].stage, 1u);
  EXPECT_EQ(r.trace[0].available_args, (std::vector<VertexId>{"Age", "Sex"}));
  EXPECT_TRUE(r.suggestions.empty());
}

TEST(Autofill, AgeFromHeight) {
  auto r = fill(load_form("weight.json"), {{"Sex", "1"}, {"Height", 160.0}});
  EXPECT_EQ(r.values.at("Age").value.number, 17.0);
  EXPECT_EQ(r.status, FillStatus::Filled);
}

TEST(Autofill, SexAloneIsIncomplete) {
  auto r = fill(load_form("weight.json"), {{"Sex", "0"}});
  EXPECT_EQ(r.status, FillStatus::Incomplete);
  EXPECT_EQ(r.missing, (VertexSet{"Age", "Height"}));
  EXPECT_EQ(r.suggestions, (VertexSet{"Age"}));
  EXPECT_TRUE(r.trace.empty());
}

TEST(Autofill, UserValuesAreKept) {
  auto r = fill(load_form("weight.json"), {{"Sex", "1"}, {"Age", 40.0}, {"Height", 100.0}});
  EXPECT_EQ(r.values.at("Height").value.number, 100.0);
  EXPECT_EQ(r.values.at("Height").origin, Origin::User);
  EXPECT_TRUE(r.trace.empty());
}

TEST(Autofill, PregnantChain) {
  auto r = fill(load_form("pregnant.json"), {{"Pregnant", 0.0}});
  EXPECT_EQ(r.status, FillStatus::Filled);
  EXPECT_EQ(r.values.at("Sex").value.symbol, "1");
  EXPECT_EQ(r.values.at("Height").value.number, 178.0);
  EXPECT_EQ(r.values.at("Age").value.number, 40.0);
  std::vector<std::pair<std::string, std::size_t>> stages;
  for (const auto &t : r.trace) {
    stages.emplace_back(t.field.str(), t.stage);
  }
  EXPECT_EQ(stages, (std::vector<std::pair<std::string, std::size_t>>{
                        {"Sex", 1}, {"Height", 2}, {"Age", 3}}));
}

TEST(Autofill, PartialRule) {
  const auto spec = load_form("weight_partial.json");
  for (int sex : {0, 1}) {
    auto r = fill(spec, {{"Sex", std::to_string(sex)}});
    EXPECT_EQ(r.status, FillStatus::Filled);
    EXPECT_EQ(r.values.at("Height").value.number, 162.0 + 16.0 * sex);
    EXPECT_EQ(r.values.at("Age").value.number, 40.0);
  }
  auto r = fill(spec, {{"Age", 40.0}});
  EXPECT_EQ(r.values.at("Height").value.number, 170.0);
  EXPECT_EQ(r.trace[0].available_args, std::vector<VertexId>{"Age"});
  // Sex has no rule, so it stays missing.
  EXPECT_EQ(r.status, FillStatus::Incomplete);
  EXPECT_EQ(r.missing, VertexSet{"Sex"});
  EXPECT_EQ(fill(spec, {{"Age", 5.0}}).values.at("Height").value.number, 63.0);
  EXPECT_EQ(suggest_inputs(spec, {}), (VertexSet{"Sex"}));
  EXPECT_EQ(suggest_inputs(spec, {"Age"}), (VertexSet{"Sex"}));
}

TEST(Autofill, RuleFailures) {
  auto spec = parse_form_spec(two_fields(R"({"target": "a", "args": ["b"], "expr": "1 / b"})"));
  try {
    fill(spec, {{"b", 0.0}});
    FAIL();
  } catch (const FillError &e) {
    EXPECT_EQ(e.kind(), FillError::Kind::RuleFailed);
    EXPECT_EQ(e.field(), "a");
    EXPECT_EQ(e.cause(), ExprError::Kind::DivisionByZero);
  }
  auto partial = parse_form_spec(
      two_fields(R"({"target": "a", "args": ["b"], "mode": "partial", "expr": "b * 2"})"));
  EXPECT_EQ(fill(partial, {{"b", 2.0}}).values.at("a").value.number, 4.0);
  auto unguarded = parse_form_spec(R"({"name": "t", "fields": [{"id": "a", "kind": "number"}, {"id": "b", "kind": "number"}, {"id": "c", "kind": "number"}],
      "rules": [{"target": "a", "args": ["b", "c"], "mode": "partial", "expr": "b + c"}]})");
  try {
    fill(unguarded, {{"b", 1.0}});
    FAIL();
  } catch (const FillError &e) {
    EXPECT_EQ(e.cause(), ExprError::Kind::MissingUnhandled);
  }
  auto integral = parse_form_spec(R"({"name": "t", "fields": [{"id": "a", "kind": "integer"},
      {"id": "b", "kind": "number"}], "rules": [{"target": "a", "args": ["b"], "expr": "b / 2"}]})");
  try {
    fill(integral, {{"b", 5.0}});
    FAIL();
  } catch (const FillError &e) {
    EXPECT_EQ(e.cause(), ExprError::Kind::TypeError);
  }
  EXPECT_THROW(fill(spec, {{"z", 1.0}}), FillError);
}

TEST(Analysis, Specs) {
  auto weight = validate_spec_consistency(load_form("weight.json"));
  EXPECT_EQ(weight.mandatory, (VertexSet{"Sex"}));
  EXPECT_EQ(weight.min_p_filling, (VertexSet{"Sex"}));
  EXPECT_FALSE(weight.partial_rules_reduce_inputs);
  EXPECT_TRUE(validate_spec_consistency(load_form("weight_partial.json"))
                  .partial_rules_reduce_inputs);
  auto edgeless = validate_spec_consistency(load_form("edgeless.json"));
  EXPECT_EQ(edgeless.mandatory, (VertexSet{"a", "b"}));
  EXPECT_TRUE(edgeless.report.minimal_cycles.empty());
}

// Random specs: each rule sums its arguments (guarding every one in partial
// mode), so evaluation always succeeds and values are easy to predict.
FormSpec random_spec(std::mt19937 &rng, std::size_t n, double density, int mode_mix) {
  const DepGraph g = oracle::random_graph(rng, n, density);
  nlohmann::json doc;
  doc["name"] = "random";
  doc["fields"] = nlohmann::json::array();
  for (const auto &v : g.vertices()) {
    doc["fields"].push_back({{"id", v.str()}, {"kind", "number"}});
  }
  doc["rules"] = nlohmann::json::array();
  std::bernoulli_distribution coin(0.5);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.predecessors(v).empty()) {
      continue;
    }
    const bool partial = mode_mix == 1 || (mode_mix == 2 && coin(rng));
    std::string expr = "1";
    nlohmann::json args = nlohmann::json::array();
    for (auto u : g.predecessors(v)) {
      const std::string &a = g.vertex(u).str();
      args.push_back(a);
      expr += partial ? " + (if missing(" + a + ") then 0 else " + a + ")" : " + " + a;
    }
    doc["rules"].push_back({{"target", g.vertex(v).str()},
                            {"args", args},
                            {"mode", partial ? "partial" : "complete"},
                            {"expr", expr}});
  }
  return parse_form_spec(doc.dump());
}

TEST(AutofillProperty, MatchesClosureAndIsStable) {
  std::mt19937 rng(99);
  for (int round = 0; round < 60; ++round) {
    const int mix = round % 3;
    const auto spec = random_spec(rng, 2 + round % 5, 0.2 + 0.1 * (round % 6), mix);
    const DepGraph g = induced_graph(spec);
    auto shuffled = spec;
    std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);

    for (std::uint32_t m = 0; m < (1u << g.size()); ++m) {
      RawInput in;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (m & (1u << i)) {
          in.emplace(g.vertex(i), static_cast<double>(i + 1));
        }
      }
      const auto provided = oracle::to_set(g, m);
      const auto r = autofill(spec, in);

      VertexSet known;
      for (const auto &[id, v] : r.values) {
        known.insert(id);
      }
      ASSERT_EQ(known, spec_closure(spec, provided).fixed_point());
      if (mix < 2) {
        const Mode mode = mix == 0 ? Mode::Complete : Mode::Partial;
        ASSERT_EQ(known, closure(g, provided, mode).fixed_point());
        ASSERT_EQ(r.status == FillStatus::Filled, is_filling(g, provided, mode));
      }
      for (const auto &[id, raw] : in) {
        ASSERT_EQ(r.values.at(id).origin, Origin::User);
        ASSERT_EQ(r.values.at(id).value.number, std::get<double>(raw));
      }
      if (r.status == FillStatus::Incomplete) {
        VertexSet more = provided;
        more.insert(r.suggestions.begin(), r.suggestions.end());
        ASSERT_EQ(spec_closure(spec, more).fixed_point().size(), g.size());
      }

      const auto again = autofill(spec, in);
      ASSERT_EQ(dump_json(to_json(again, spec)), dump_json(to_json(r, spec)));
      const auto permuted = autofill(shuffled, in);
      for (const auto *other : {&again, &permuted}) {
        ASSERT_EQ(other->status, r.status);
        ASSERT_EQ(other->missing, r.missing);
        ASSERT_EQ(other->suggestions, r.suggestions);
        ASSERT_EQ(other->trace.size(), r.trace.size());
        for (std::size_t t = 0; t < r.trace.size(); ++t) {
          ASSERT_EQ(other->trace[t].field, r.trace[t].field);
          ASSERT_EQ(other->trace[t].stage, r.trace[t].stage);
        }
        for (const auto &[id, v] : r.values) {
          ASSERT_EQ(other->values.at(id).value, v.value);
        }
      }
    }
  }
}

} // namespace
} // namespace autofill
