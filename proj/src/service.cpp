#include "autofill/service.hpp"

#include "autofill/report_json.hpp"

#include <httplib.h>

#include <atomic>
#include <csignal>
#include <mutex>

namespace autofill {

namespace {

ApiResponse api_error(int status, std::string_view code, const std::string &message,
                      const std::string &field = "") {
  Json j{{"code", code}, {"message", message}};
  if (!field.empty()) {
    j["field"] = field;
  }
  return {status, dump_json(j)};
}

std::optional<Json> parse_body(std::string_view body) {
  try {
    return Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error &) {
    return std::nullopt;
  }
}

} // namespace

FormService::FormService(FormSpec spec)
    : spec_(std::move(spec)), graph_(induced_graph(spec_)) {
  Json schema;
  schema["spec"] = to_json(spec_);
  schema["graph"] = to_json(graph_);
  schema["mandatory"] = to_json(sources(graph_));
  schema_body_ = dump_json(schema);
  analysis_body_ = dump_json(to_json(validate_spec_consistency(spec_, true)));
}

ApiResponse FormService::fill(std::string_view body) const {
  auto doc = parse_body(body);
  if (!doc || !doc->is_object()) {
    return api_error(400, "parse_error", "request body must be a JSON object");
  }
  const Json *values = &*doc;
  if (doc->contains("values")) {
    values = &(*doc)["values"];
    if (!values->is_object()) {
      return api_error(400, "parse_error", "'values' must be an object");
    }
  }

  RawInput input;
  for (const auto &[key, value] : values->items()) {
    if (key.empty()) {
      return api_error(400, "unknown_field", "empty field id");
    }
    VertexId id(key);
    if (!graph_.contains(id)) {
      return api_error(400, "unknown_field", "unknown field '" + key + "'", key);
    }
    if (value.is_null()) {
      continue;
    }
    if (value.is_number()) {
      input.emplace(id, value.get<double>());
    } else if (value.is_string()) {
      input.emplace(id, value.get<std::string>());
    } else {
      return api_error(400, "type_error", "field '" + key + "' must be a number or string", key);
    }
  }

  try {
    return {200, dump_json(to_json(autofill(spec_, input), spec_))};
  } catch (const FillError &e) {
    switch (e.kind()) {
    case FillError::Kind::UnknownField:
      return api_error(400, "unknown_field", e.what(), e.field());
    case FillError::Kind::TypeError:
      return api_error(400, "type_error", e.what(), e.field());
    case FillError::Kind::RuleFailed:
      return api_error(422, e.cause() == ExprError::Kind::TypeError ? "type_error" : "internal",
                       e.what(), e.field());
    }
  }
  return api_error(500, "internal", "unreachable");
}

ApiResponse FormService::check(std::string_view body) const {
  auto doc = parse_body(body);
  if (!doc || !doc->is_object()) {
    return api_error(400, "parse_error", "request body must be a JSON object");
  }
  Mode mode = Mode::Complete;
  if (doc->contains("mode")) {
    const Json &m = (*doc)["mode"];
    auto parsed = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
    if (!parsed) {
      return api_error(400, "parse_error", "'mode' must be \"complete\" or \"partial\"");
    }
    mode = *parsed;
  }
  VertexSet provided;
  if (doc->contains("provided")) {
    const Json &p = (*doc)["provided"];
    if (!p.is_array()) {
      return api_error(400, "parse_error", "'provided' must be a list of field ids");
    }
    for (const auto &v : p) {
      if (!v.is_string() || v.get<std::string>().empty()) {
        return api_error(400, "parse_error", "'provided' must be a list of field ids");
      }
      VertexId id(v.get<std::string>());
      if (!graph_.contains(id)) {
        return api_error(400, "unknown_field", "unknown field '" + id.str() + "'", id.str());
      }
      provided.insert(std::move(id));
    }
  }
  const auto trace = closure(graph_, provided, mode);
  return {200, dump_json(check_json(trace, suggest_additional(graph_, provided, mode)))};
}

void FormService::mount(httplib::Server &server, std::ostream &log) const {
  auto reply = [](httplib::Response &res, const ApiResponse &r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get("/api/schema", [this, reply](const httplib::Request &, httplib::Response &res) {
    reply(res, schema());
  });
  server.Get("/api/analysis", [this, reply](const httplib::Request &, httplib::Response &res) {
    reply(res, analysis());
  });
  server.Post("/api/fill", [this, reply](const httplib::Request &req, httplib::Response &res) {
    reply(res, fill(req.body));
  });
  server.Post("/api/check", [this, reply](const httplib::Request &req, httplib::Response &res) {
    reply(res, check(req.body));
  });
  server.Options(R"(/api/.*)", [](const httplib::Request &, httplib::Response &res) {
    res.status = 204;
  });

  server.set_post_routing_handler([](const httplib::Request &req, httplib::Response &res) {
    const std::string origin = req.get_header_value("Origin");
    if (origin.starts_with("http://localhost") || origin.starts_with("http://127.0.0.1")) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Vary", "Origin");
    }
  });

  auto log_mutex = std::make_shared<std::mutex>();
  server.set_logger([&log, log_mutex](const httplib::Request &req, const httplib::Response &res) {
    std::lock_guard lock(*log_mutex);
    log << req.method << ' ' << req.path << ' ' << res.status << '\n' << std::flush;
  });
}

namespace {

std::atomic<httplib::Server *> g_running{nullptr};

extern "C" void stop_on_signal(int) {
  if (auto *s = g_running.load()) {
    s->stop();
  }
}

} // namespace

int run_server(const FormService &service, const std::string &host, int port,
               const std::optional<std::string> &static_dir, std::ostream &log) {
  httplib::Server server;
  // httplib's defaults include SO_REUSEPORT, which lets a second server share
  // a busy port silently; a taken port must be a bind failure instead.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  service.mount(server, log);
  if (static_dir && !server.set_mount_point("/", *static_dir)) {
    log << "error: static directory '" << *static_dir << "' is not readable\n";
    return 2;
  }
  if (!server.bind_to_port(host, port)) {
    log << "error: cannot bind " << host << ':' << port << '\n';
    return 4;
  }
  log << "serving '" << service.spec().name << "' on http://" << host << ':' << port << '\n'
      << std::flush;
  g_running.store(&server);
  auto previous_int = std::signal(SIGINT, stop_on_signal);
  auto previous_term = std::signal(SIGTERM, stop_on_signal);
  server.listen_after_bind();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  g_running.store(nullptr);
  log << "shut down\n";
  return 0;
}

} // namespace autofill
