#pragma once

// JSON shapes shared by the CLI (--json) and the HTTP service. Keys are
// emitted in a fixed order so output is byte-stable.

#include "autofill/filling.hpp"
#include "autofill/form.hpp"
#include "autofill/graph.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace autofill {

using Json = nlohmann::ordered_json;

/// Two-space indented dump with a trailing newline.
std::string dump_json(const Json &j);

Json to_json(const VertexSet &s);
Json to_json(const std::vector<VertexSet> &sets);
Json to_json(const DepGraph &g);
Json to_json(const AnalysisReport &r);
Json to_json(const SpecAnalysis &a);
Json to_json(const FormSpec &spec);
Json to_json(const FillReport &r, const FormSpec &spec);
Json to_json(const Value &v, const FieldDecl &field);

/// {"filling", "stages", "suggestions"}: the check payload.
Json check_json(const ClosureTrace &trace, const VertexSet &suggestions);

/// Reads {"vertices": [...], "edges": [[from, to], ...]}. Throws
/// std::invalid_argument on shape errors and GraphError on graph errors.
DepGraph graph_from_json(const Json &j);

} // namespace autofill
