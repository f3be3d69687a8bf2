#pragma once

// Minimal service embedding: POST /parse runs the same pipeline-to-JSON path
// as the parse command, one request at a time per connection, no state.

#include <memory>
#include <string>
#include <string_view>

#include "anchordoc/assembler.hpp"
#include "anchordoc/io.hpp"
#include "anchordoc/pipeline.hpp"

namespace anchordoc {

struct ParseService {
  std::shared_ptr<Backend> backend;
  PipelineConfig pipeline_config;

  // Body: PNG/JPEG bytes, or a page spec as application/json (parsed for its
  // id and dimensions only). Returns the DocumentOutput JSON for the page.
  njson handle(const std::string& body, std::string_view content_type,
               const std::string& page_id) const;
};

// Blocks serving POST /parse and GET /healthz until the process exits.
// Returns false if the port could not be bound.
bool run_parse_server(const ParseService& service, const std::string& host, int port);

}  // namespace anchordoc
