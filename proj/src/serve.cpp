#include "anchordoc/serve.hpp"

#include <httplib.h>

#include <opencv2/imgcodecs.hpp>

#include "anchordoc/serialize.hpp"

namespace anchordoc {

njson ParseService::handle(const std::string& body, std::string_view content_type,
                           const std::string& page_id) const {
  cv::Mat page;
  std::string id = page_id;

  if (content_type.find("application/json") != std::string_view::npos) {
    njson value = njson::parse(body, nullptr, false);
    if (value.is_discarded()) raise(Errc::Config, "request body is not valid JSON");
    const datagen::PageSpec spec = page_spec_from_json(value);
    if (id.empty()) id = spec.id;
    page = blank_page(spec.page_w, spec.page_h);
  } else {
    const std::vector<uchar> bytes(body.begin(), body.end());
    page = cv::imdecode(bytes, cv::IMREAD_COLOR);
    if (page.empty()) raise(Errc::Encoding, "request body is not a decodable image");
  }
  if (id.empty()) id = "page";

  const Pipeline pipeline(backend, pipeline_config);
  const DocumentOutput doc = pipeline.parse_document(page, id);
  return to_json(doc);
}

bool run_parse_server(const ParseService& service, const std::string& host, int port) {
  httplib::Server server;

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok\n", "text/plain");
  });

  server.Post("/parse", [&service](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string id = req.get_param_value("id");
      const njson doc = service.handle(req.body, req.get_header_value("Content-Type"), id);
      res.set_content(doc.dump(2) + "\n", "application/json");
    } catch (const Error& e) {
      const bool client_fault = e.code() == Errc::Config || e.code() == Errc::Encoding;
      res.status = client_fault ? 400 : 500;
      res.set_content(njson{{"error", e.what()}}.dump() + "\n", "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(njson{{"error", e.what()}}.dump() + "\n", "application/json");
    }
  });

  return server.listen(host, port);
}

}  // namespace anchordoc
