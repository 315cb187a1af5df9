#include "autofill/report_json.hpp"

#include <stdexcept>

namespace autofill {

std::string dump_json(const Json &j) {
  return j.dump(2) + "\n";
}

Json to_json(const VertexSet &s) {
  Json arr = Json::array();
  for (const auto &v : s) {
    arr.push_back(v.str());
  }
  return arr;
}

Json to_json(const std::vector<VertexSet> &sets) {
  Json arr = Json::array();
  for (const auto &s : sets) {
    arr.push_back(to_json(s));
  }
  return arr;
}

Json to_json(const DepGraph &g) {
  Json vs = Json::array();
  for (const auto &v : g.vertices()) {
    vs.push_back(v.str());
  }
  Json es = Json::array();
  for (const auto &[from, to] : g.edges()) {
    es.push_back(Json::array({from.str(), to.str()}));
  }
  return Json{{"vertices", vs}, {"edges", es}};
}

Json to_json(const AnalysisReport &r) {
  Json cycles = Json::array();
  for (const auto &c : r.minimal_cycles) {
    cycles.push_back(to_json(c.members));
  }
  Json j;
  j["sources"] = to_json(r.sources);
  j["minimal_cycles"] = cycles;
  j["sccs"] = to_json(r.condensation.components);
  j["source_components"] = to_json(r.source_components);
  j["greedy_min_filling"] = to_json(r.greedy_min_filling);
  j["exact_min_fillings"] = r.exact_min_fillings ? to_json(*r.exact_min_fillings) : Json(nullptr);
  j["min_p_filling_cardinality"] = r.min_p_filling_cardinality;
  return j;
}

Json to_json(const SpecAnalysis &a) {
  Json j = to_json(a.report);
  j["mandatory"] = to_json(a.mandatory);
  j["min_p_filling"] = to_json(a.min_p_filling);
  j["partial_rules_reduce_inputs"] = a.partial_rules_reduce_inputs;
  return j;
}

Json to_json(const FormSpec &spec) {
  Json fields = Json::array();
  for (const auto &f : spec.fields) {
    Json jf;
    jf["id"] = f.id.str();
    jf["label"] = f.label;
    jf["kind"] = std::string(to_string(f.kind));
    if (f.kind == FieldKind::Enum) {
      jf["values"] = f.values;
    }
    if (f.min) {
      jf["min"] = *f.min;
    }
    if (f.max) {
      jf["max"] = *f.max;
    }
    fields.push_back(std::move(jf));
  }
  Json rules = Json::array();
  for (const auto &r : spec.rules) {
    Json args = Json::array();
    for (const auto &a : r.args) {
      args.push_back(a.str());
    }
    rules.push_back(Json{{"target", r.target.str()},
                         {"args", args},
                         {"mode", std::string(to_string(r.mode))},
                         {"expr", r.expr.source()}});
  }
  return Json{{"name", spec.name}, {"fields", fields}, {"rules", rules}};
}

Json to_json(const Value &v, const FieldDecl &field) {
  switch (field.kind) {
  case FieldKind::Enum:
    return v.symbol;
  case FieldKind::Integer:
    return static_cast<long long>(v.number);
  case FieldKind::Number:
    break;
  }
  return v.number;
}

Json to_json(const FillReport &r, const FormSpec &spec) {
  Json values = Json::object();
  for (const auto &[id, fv] : r.values) {
    values[id.str()] = Json{{"value", to_json(fv.value, spec.field(id))},
                            {"origin", fv.origin == Origin::User ? "user" : "derived"}};
  }
  Json trace = Json::array();
  for (const auto &t : r.trace) {
    Json args = Json::array();
    for (const auto &a : t.available_args) {
      args.push_back(a.str());
    }
    trace.push_back(Json{{"field", t.field.str()}, {"stage", t.stage}, {"args", args}});
  }
  return Json{{"status", r.status == FillStatus::Filled ? "filled" : "incomplete"},
              {"values", values},
              {"trace", trace},
              {"missing", to_json(r.missing)},
              {"suggestions", to_json(r.suggestions)}};
}

Json check_json(const ClosureTrace &trace, const VertexSet &suggestions) {
  return Json{{"filling", trace.filled},
              {"stages", to_json(trace.stages)},
              {"suggestions", to_json(suggestions)}};
}

DepGraph graph_from_json(const Json &j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array()) {
    throw std::invalid_argument("graph document needs a 'vertices' list");
  }
  std::vector<VertexId> vs;
  for (const auto &v : j["vertices"]) {
    if (!v.is_string() || v.get<std::string>().empty()) {
      throw std::invalid_argument("vertices must be non-empty strings");
    }
    vs.emplace_back(v.get<std::string>());
  }
  std::vector<Edge> es;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) {
      throw std::invalid_argument("'edges' must be a list");
    }
    for (const auto &e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string() ||
          e[0].get<std::string>().empty() || e[1].get<std::string>().empty()) {
        throw std::invalid_argument("each edge must be a [from, to] pair of vertex ids");
      }
      es.emplace_back(VertexId(e[0].get<std::string>()), VertexId(e[1].get<std::string>()));
    }
  }
  return DepGraph::build(std::move(vs), es);
}

} // namespace autofill
