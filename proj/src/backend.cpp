#include "anchordoc/backend.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "anchordoc/io.hpp"

namespace anchordoc {

std::string layout_region_id(std::string_view page_id) {
  return std::string(page_id) + "#layout";
}

std::string holistic_region_id(std::string_view page_id) {
  return std::string(page_id) + "#holistic";
}

std::string element_region_id(std::string_view page_id, int order) {
  return std::string(page_id) + "#" + std::to_string(order);
}

// ---------------------------------------------------------------------------
// Fixture table

void FixtureTable::insert(std::string region_id, std::string prompt, std::string response,
                          std::optional<int> delay_ms) {
  entries[{std::move(region_id), std::move(prompt)}] = FixtureEntry{std::move(response), delay_ms};
}

void FixtureTable::merge(const FixtureTable& other) {
  for (const auto& [key, entry] : other.entries) {
    auto [it, inserted] = entries.emplace(key, entry);
    if (!inserted && it->second.response != entry.response)
      raise(Errc::Config, "conflicting fixture responses for region " + key.first);
  }
}

FixtureTable FixtureTable::load(const std::filesystem::path& file) {
  const njson doc = read_json_file(file);
  FixtureTable table;
  table.default_delay_ms = doc.value("default_delay_ms", 0);
  if (!doc.contains("entries") || !doc["entries"].is_array())
    raise(Errc::Config, "fixture file missing entries array: " + file.string());
  for (const njson& item : doc["entries"]) {
    FixtureEntry entry;
    entry.response = item.at("response").get<std::string>();
    if (item.contains("delay_ms") && !item["delay_ms"].is_null())
      entry.delay_ms = item["delay_ms"].get<int>();
    table.entries[{item.at("region_id").get<std::string>(),
                   item.at("prompt").get<std::string>()}] = std::move(entry);
  }
  return table;
}

void FixtureTable::save(const std::filesystem::path& file) const {
  njson doc;
  doc["default_delay_ms"] = default_delay_ms;
  doc["entries"] = njson::array();
  for (const auto& [key, entry] : entries) {
    njson item;
    item["region_id"] = key.first;
    item["prompt"] = key.second;
    item["response"] = entry.response;
    if (entry.delay_ms) item["delay_ms"] = *entry.delay_ms;
    doc["entries"].push_back(std::move(item));
  }
  write_json_file(file, doc);
}

// ---------------------------------------------------------------------------
// Mock backend

MockBackend::MockBackend(FixtureTable table) : table_(std::move(table)) {}

void MockBackend::reset_counters() {
  total_ = 0;
  high_water_ = 0;
}

ModelResponse MockBackend::request(const ModelRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  total_.fetch_add(1, std::memory_order_relaxed);
  const int now_in_flight = in_flight_.fetch_add(1, std::memory_order_acq_rel) + 1;
  int seen = high_water_.load(std::memory_order_relaxed);
  while (seen < now_in_flight &&
         !high_water_.compare_exchange_weak(seen, now_in_flight, std::memory_order_relaxed)) {
  }

  struct InFlightGuard {
    std::atomic<int>& counter;
    ~InFlightGuard() { counter.fetch_sub(1, std::memory_order_acq_rel); }
  } guard{in_flight_};

  const auto it = table_.entries.find({req.region_id, req.prompt});
  if (it == table_.entries.end())
    raise(Errc::FixtureMiss,
          "no fixture entry for region \"" + req.region_id + "\" prompt \"" + req.prompt + "\"");

  const int delay = it->second.delay_ms.value_or(table_.default_delay_ms);
  if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));

  ModelResponse response;
  response.text = it->second.response;
  response.backend_tag = "mock";
  response.latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return response;
}

// ---------------------------------------------------------------------------
// Remote backend

std::string base64_encode(std::span<const uint8_t> data) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  const size_t rest = data.size() - i;
  if (rest == 1) {
    const uint32_t n = data[i] << 16;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

namespace {

std::string_view sniff_mime(std::span<const uint8_t> bytes) {
  if (bytes.size() >= 4 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G')
    return "image/png";
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return "image/jpeg";
  return "application/octet-stream";
}

}  // namespace

std::string encode_remote_request(const ModelRequest& req, const EndpointConfig& config) {
  if (req.prompt.empty()) raise(Errc::Encoding, "prompt must be non-empty");
  if (req.image.bytes.empty() || req.image.width <= 0 || req.image.height <= 0)
    raise(Errc::Encoding, "image payload must carry encoded bytes and positive dimensions");

  const std::string_view mime = sniff_mime(req.image.bytes);
  if (mime == "application/octet-stream")
    raise(Errc::Encoding, "image bytes are neither PNG nor JPEG");

  njson image_part;
  image_part["type"] = "image_url";
  image_part["image_url"]["url"] =
      "data:" + std::string(mime) + ";base64," + base64_encode(req.image.bytes);

  njson text_part;
  text_part["type"] = "text";
  text_part["text"] = req.prompt;

  njson body;
  body["model"] = config.model;
  body["messages"] = njson::array({njson{{"role", "user"},
                                         {"content", njson::array({text_part, image_part})}}});
  body["temperature"] = 0;
  body["max_tokens"] = config.max_tokens;
  return body.dump();
}

HttpBackend::HttpBackend(EndpointConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) raise(Errc::Config, "remote backend requires a base URL");
}

ModelResponse HttpBackend::request(const ModelRequest& req) {
  const std::string body = encode_remote_request(req, config_);
  const auto start = std::chrono::steady_clock::now();

  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_transport_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_base_ms << (attempt - 1)));

    // One client per request: connections are not shared across workers.
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    httplib::Result res =
        client.Post("/v1/chat/completions", headers, body, "application/json");

    if (!res) {
      last_transport_error = httplib::to_string(res.error());
      continue;  // transport failure: retry
    }
    if (res->status == 429) {
      const std::string retry_after = res->get_header_value("Retry-After");
      raise(Errc::RateLimited, retry_after.empty() ? "rate limited"
                                                   : "rate limited, retry after " + retry_after + " s");
    }
    if (res->status >= 500) {
      last_transport_error = "server returned status " + std::to_string(res->status);
      continue;  // treat 5xx like a transport failure
    }
    if (res->status != 200)
      raise(Errc::Protocol, "unexpected status " + std::to_string(res->status));

    const njson doc = njson::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty() || !doc["choices"][0].contains("message") ||
        !doc["choices"][0]["message"].contains("content"))
      raise(Errc::Protocol, "malformed chat-completion response body");

    ModelResponse response;
    response.text = doc["choices"][0]["message"]["content"].get<std::string>();
    response.backend_tag = "http";
    response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return response;
  }
  raise(Errc::Transport, "request failed after " + std::to_string(config_.max_retries + 1) +
                             " attempts: " + last_transport_error);
}

}  // namespace anchordoc
