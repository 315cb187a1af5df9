#pragma once

#include "autofill/form.hpp"
#include "autofill/graph.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace autofill {

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Stateless HTTP API over one form spec. The spec, its graph, and the
/// schema/analysis payloads are fixed at construction; handlers only read.
class FormService {
public:
  explicit FormService(FormSpec spec);

  const FormSpec &spec() const noexcept { return spec_; }

  ApiResponse schema() const { return {200, schema_body_}; }
  ApiResponse analysis() const { return {200, analysis_body_}; }
  /// Body: {"values": {id: value}}; a bare {id: value} object is accepted too.
  ApiResponse fill(std::string_view body) const;
  /// Body: {"provided": [id], "mode": "complete" | "partial"}; mode defaults
  /// to complete.
  ApiResponse check(std::string_view body) const;

  /// Registers /api/* routes, CORS handling and request logging.
  void mount(httplib::Server &server, std::ostream &log) const;

private:
  FormSpec spec_;
  DepGraph graph_;
  std::string schema_body_;
  std::string analysis_body_;
};

/// Exit status for `serve`: 0 after a clean shutdown, 2 for a bad static
/// directory, 4 when the port cannot be bound.
int run_server(const FormService &service, const std::string &host, int port,
               const std::optional<std::string> &static_dir, std::ostream &log);

} // namespace autofill
