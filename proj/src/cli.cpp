#include "autofill/cli.hpp"

#include "autofill/filling.hpp"
#include "autofill/form.hpp"
#include "autofill/report_json.hpp"
#include "autofill/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

namespace autofill::cli {

namespace {

// A loaded input file: a form spec, or a bare graph for the structural
// commands.
struct Loaded {
  std::optional<FormSpec> spec;
  std::optional<DepGraph> graph;

  const DepGraph &g() const { return *graph; }
};

struct UsageError {
  int code;
  std::string message;
};

Loaded load(const std::string &path, bool allow_graph) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError{kInputError, "cannot read '" + path + "'"};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  Loaded l;
  if (allow_graph) {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_object() && doc.contains("vertices") && !doc.contains("fields")) {
      try {
        l.graph = graph_from_json(doc);
      } catch (const std::exception &e) {
        throw UsageError{kInputError, path + ": " + e.what()};
      }
      return l;
    }
  }
  try {
    l.spec = parse_form_spec(text);
    l.graph = induced_graph(*l.spec);
  } catch (const SpecError &e) {
    throw UsageError{kInputError, path + ":" + e.where() + ": " + e.what()};
  }
  return l;
}

VertexSet resolve_ids(const DepGraph &g, const std::vector<std::string> &ids) {
  VertexSet s;
  for (const auto &raw : ids) {
    if (raw.empty()) {
      continue;
    }
    VertexId id(raw);
    if (!g.contains(id)) {
      throw UsageError{kInputError, "unknown field '" + raw + "'"};
    }
    s.insert(std::move(id));
  }
  return s;
}

std::string braces(const VertexSet &s) {
  std::string out = "{";
  bool first = true;
  for (const auto &v : s) {
    if (!first) {
      out += ", ";
    }
    out += v.str();
    first = false;
  }
  return out + "}";
}

std::string format_number(double d) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), end);
}

std::string format_value(const Value &v, const FieldDecl &f) {
  switch (f.kind) {
  case FieldKind::Enum:
    return v.symbol;
  case FieldKind::Integer:
    return std::to_string(static_cast<long long>(v.number));
  case FieldKind::Number:
    break;
  }
  return format_number(v.number);
}

void print_listing(std::ostream &out, const std::string &title, const std::vector<VertexSet> &sets) {
  out << title << ": " << sets.size() << '\n';
  for (const auto &s : sets) {
    out << "  " << braces(s) << '\n';
  }
}

int cmd_analyze(const std::string &path, bool exact, bool json, std::ostream &out) {
  const Loaded l = load(path, true);
  if (exact && l.g().size() > kExactSearchLimit) {
    throw UsageError{kTooLarge, "--exact supports at most " + std::to_string(kExactSearchLimit) +
                                    " fields, got " + std::to_string(l.g().size())};
  }

  std::optional<SpecAnalysis> spec_analysis;
  AnalysisReport report;
  if (l.spec) {
    spec_analysis = validate_spec_consistency(*l.spec, exact);
    report = spec_analysis->report;
  } else {
    report = analyze(l.g(), exact);
  }

  if (json) {
    out << dump_json(spec_analysis ? to_json(*spec_analysis) : to_json(report));
    return kOk;
  }

  if (l.spec) {
    out << "name: " << l.spec->name << '\n'
        << "fields: " << l.spec->fields.size() << '\n'
        << "rules: " << l.spec->rules.size() << '\n'
        << "mandatory: " << braces(spec_analysis->mandatory) << '\n';
  } else {
    out << "vertices: " << l.g().size() << '\n' << "edges: " << l.g().edge_count() << '\n';
  }
  out << "sources: " << braces(report.sources) << '\n';
  out << "minimal cycles: " << report.minimal_cycles.size() << '\n';
  for (const auto &c : report.minimal_cycles) {
    out << "  " << braces(c.members) << "  via ";
    for (const auto &v : c.witness) {
      out << v.str() << " -> ";
    }
    out << c.witness.front().str() << '\n';
  }
  print_listing(out, "sccs", report.condensation.components);
  print_listing(out, "source components", report.source_components);
  out << "greedy minimal filling: " << braces(report.greedy_min_filling) << '\n';
  out << "min p-filling cardinality: " << report.min_p_filling_cardinality << '\n';
  if (spec_analysis) {
    out << "min p-filling: " << braces(spec_analysis->min_p_filling) << '\n'
        << "partial rules reduce inputs: "
        << (spec_analysis->partial_rules_reduce_inputs ? "yes" : "no") << '\n';
  }
  if (report.exact_min_fillings) {
    print_listing(out, "exact minimal fillings", *report.exact_min_fillings);
  }
  return kOk;
}

int cmd_check(const std::string &path, const std::vector<std::string> &provided_ids,
              const std::string &mode_name, bool json, std::ostream &out) {
  const Loaded l = load(path, true);
  const VertexSet provided = resolve_ids(l.g(), provided_ids);
  const Mode mode = *parse_mode(mode_name);
  const ClosureTrace trace = closure(l.g(), provided, mode);
  if (json) {
    out << dump_json(check_json(trace, suggest_additional(l.g(), provided, mode)));
  } else {
    out << "mode: " << mode_name << '\n' << "provided: " << braces(provided) << '\n';
    for (std::size_t i = 0; i < trace.stages.size(); ++i) {
      out << "stage " << i << ": " << braces(trace.stages[i]) << '\n';
    }
    out << (trace.filled ? "FILLING" : "NOT FILLING") << '\n';
  }
  return trace.filled ? kOk : kNotFilled;
}

int cmd_suggest(const std::string &path, const std::vector<std::string> &provided_ids,
                const std::string &mode_name, bool json, std::ostream &out) {
  const Loaded l = load(path, true);
  const VertexSet provided = resolve_ids(l.g(), provided_ids);
  const Mode mode = *parse_mode(mode_name);
  const VertexSet suggestions = suggest_additional(l.g(), provided, mode);
  if (json) {
    out << dump_json(Json{{"mode", mode_name},
                          {"provided", to_json(provided)},
                          {"suggestions", to_json(suggestions)}});
  } else {
    out << "mode: " << mode_name << '\n'
        << "provided: " << braces(provided) << '\n'
        << "suggested: " << braces(suggestions) << '\n';
  }
  return suggestions.empty() ? kOk : kNotFilled;
}

int cmd_fill(const std::string &path, const std::vector<std::string> &assignments, bool json,
             std::ostream &out) {
  const Loaded l = load(path, false);
  const FormSpec &spec = *l.spec;
  RawInput input;
  for (const auto &a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError{kInputError, "--set expects id=value, got '" + a + "'"};
    }
    VertexId id(a.substr(0, eq));
    if (!l.g().contains(id)) {
      throw UsageError{kInputError, "unknown field '" + id.str() + "'"};
    }
    input.insert_or_assign(std::move(id), a.substr(eq + 1));
  }

  FillReport report;
  try {
    report = autofill(spec, input);
  } catch (const FillError &e) {
    throw UsageError{kInputError, e.what()};
  }

  if (json) {
    out << dump_json(to_json(report, spec));
  } else {
    std::map<VertexId, std::size_t> stage_of;
    for (const auto &t : report.trace) {
      stage_of.emplace(t.field, t.stage);
    }
    // Columns: id, value, origin.
    std::vector<std::array<std::string, 3>> rows;
    std::size_t id_width = 0;
    std::size_t value_width = 0;
    for (const auto &id : l.g().vertices()) {
      auto it = report.values.find(id);
      std::array<std::string, 3> row{id.str(), "-", "missing"};
      if (it != report.values.end()) {
        row[1] = format_value(it->second.value, spec.field(id));
        row[2] = it->second.origin == Origin::User
                     ? "user"
                     : "derived (stage " + std::to_string(stage_of.at(id)) + ")";
      }
      id_width = std::max(id_width, row[0].size());
      value_width = std::max(value_width, row[1].size());
      rows.push_back(std::move(row));
    }
    for (const auto &[id, value, origin] : rows) {
      out << id << std::string(id_width - id.size() + 2, ' ') << value
          << std::string(value_width - value.size() + 2, ' ') << origin << '\n';
    }
    if (report.status == FillStatus::Filled) {
      out << "status: filled\n";
    } else {
      out << "status: incomplete\n"
          << "missing: " << braces(report.missing) << '\n'
          << "suggestions: " << braces(report.suggestions) << '\n';
    }
  }
  return report.status == FillStatus::Filled ? kOk : kNotFilled;
}

int cmd_serve(const std::string &path, const std::string &host, int port,
              const std::optional<std::string> &static_dir, std::ostream &err) {
  const Loaded l = load(path, false);
  FormService service(*l.spec);
  const int rc = run_server(service, host, port, static_dir, err);
  return rc == 4 ? kBindFailure : rc;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Dependency-graph autofill: analyze form specs, check and suggest inputs, "
               "autofill records, serve the HTTP API"};
  app.require_subcommand(1);

  std::string path;
  bool json = false;
  bool exact = false;
  std::vector<std::string> provided;
  std::string mode = "complete";
  std::vector<std::string> assignments;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir;

  auto add_spec = [&](CLI::App *cmd) {
    cmd->add_option("spec", path, "Form spec (or graph) JSON file")->required();
  };
  auto add_provided = [&](CLI::App *cmd) {
    cmd->add_option("--provided", provided, "Comma-separated ids the user supplied")
        ->delimiter(',');
    cmd->add_option("--mode", mode, "Determination mode")
        ->check(CLI::IsMember({"complete", "partial"}));
    cmd->add_flag("--json", json, "Emit JSON");
  };

  auto *analyze_cmd = app.add_subcommand("analyze", "Structural analysis of the dependency graph");
  add_spec(analyze_cmd);
  analyze_cmd->add_flag("--exact", exact, "Include all minimal filling sets (<= 12 fields)");
  analyze_cmd->add_flag("--json", json, "Emit JSON");

  auto *check_cmd = app.add_subcommand("check", "Does the provided set fill the form?");
  add_spec(check_cmd);
  add_provided(check_cmd);

  auto *suggest_cmd = app.add_subcommand("suggest", "Extra fields that would complete the form");
  add_spec(suggest_cmd);
  add_provided(suggest_cmd);

  auto *fill_cmd = app.add_subcommand("fill", "Autofill a partial record");
  add_spec(fill_cmd);
  fill_cmd->add_option("--set", assignments, "id=value (repeatable)")->allow_extra_args(false);
  fill_cmd->add_flag("--json", json, "Emit JSON");

  auto *serve_cmd = app.add_subcommand("serve", "Serve the HTTP API for one spec");
  add_spec(serve_cmd);
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--static", static_dir, "Directory of UI assets served at /");

  std::vector<const char *> argv;
  argv.reserve(args.size());
  for (const auto &a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (analyze_cmd->parsed()) {
      return cmd_analyze(path, exact, json, out);
    }
    if (check_cmd->parsed()) {
      return cmd_check(path, provided, mode, json, out);
    }
    if (suggest_cmd->parsed()) {
      return cmd_suggest(path, provided, mode, json, out);
    }
    if (fill_cmd->parsed()) {
      return cmd_fill(path, assignments, json, out);
    }
    return cmd_serve(path, host, port, static_dir, err);
  } catch (const UsageError &e) {
    err << "error: " << e.message << '\n';
    return e.code;
  }
}

} // namespace autofill::cli
