#pragma once

// Vision-language model access behind a request/response contract. Two
// implementations: a deterministic fixture-driven mock for offline tests and
// a remote client speaking the OpenAI-compatible chat-completions protocol.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anchordoc/error.hpp"

namespace anchordoc {

// Encoded raster (PNG or JPEG bytes) plus pixel dimensions.
struct ImagePayload {
  std::vector<uint8_t> bytes;
  int width = 0;
  int height = 0;
};

struct ModelRequest {
  std::string prompt;
  ImagePayload image;
  std::string region_id;  // page id + element order, or page id + holistic/layout
};

struct ModelResponse {
  std::string text;
  std::chrono::milliseconds latency{0};
  std::string backend_tag;
};

// Region identity shared by the fixture emitter and the pipeline. Fixture
// keys are (region_id, prompt), not image hashes: crop bytes vary with the
// rasterizer, region ids do not.
std::string layout_region_id(std::string_view page_id);
std::string holistic_region_id(std::string_view page_id);
std::string element_region_id(std::string_view page_id, int order);

class Backend {
 public:
  virtual ~Backend() = default;

  // Blocking; safe to call from any number of concurrent workers.
  virtual ModelResponse request(const ModelRequest& req) = 0;
  virtual std::string_view tag() const = 0;
};

struct FixtureEntry {
  std::string response;
  std::optional<int> delay_ms;  // overrides the table default
};

struct FixtureTable {
  std::map<std::pair<std::string, std::string>, FixtureEntry> entries;  // (region_id, prompt)
  int default_delay_ms = 0;

  void insert(std::string region_id, std::string prompt, std::string response,
              std::optional<int> delay_ms = std::nullopt);
  // Entries of `other` are added; duplicate keys must carry identical
  // responses (throws Config otherwise).
  void merge(const FixtureTable& other);

  static FixtureTable load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(FixtureTable table);

  ModelResponse request(const ModelRequest& req) override;
  std::string_view tag() const override { return "mock"; }

  int total_calls() const { return total_.load(); }
  int max_in_flight() const { return high_water_.load(); }
  void reset_counters();

 private:
  FixtureTable table_;
  std::atomic<int> total_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> high_water_{0};
};

struct EndpointConfig {
  std::string base_url;  // e.g. http://localhost:8000
  std::string model = "default";
  std::string api_key;   // bearer token; empty for unauthenticated endpoints
  int max_tokens = 8192;
  int timeout_ms = 120000;
  int max_retries = 2;       // transport errors only
  int backoff_base_ms = 100; // doubled per retry
};

std::string base64_encode(std::span<const uint8_t> data);

// Chat-completion request body: one user message with a text part and a
// base64 data-URL image part, temperature 0, deterministic field order.
// Throws Encoding on an empty prompt or empty image.
std::string encode_remote_request(const ModelRequest& req, const EndpointConfig& config);

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(EndpointConfig config);

  ModelResponse request(const ModelRequest& req) override;
  std::string_view tag() const override { return "http"; }

 private:
  EndpointConfig config_;
};

}  // namespace anchordoc
