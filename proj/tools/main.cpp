// anchordoc command line: parse pages through the two-stage pipeline,
// evaluate predictions against ground truth, generate synthetic corpora,
// and serve the parser over HTTP.
//
// Exit codes: 0 success, 2 partial page failure, 64 usage, 65 no shared
// evaluation ids, 74 I/O failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <opencv2/imgcodecs.hpp>

#include "anchordoc/assembler.hpp"
#include "anchordoc/datagen.hpp"
#include "anchordoc/evaluate.hpp"
#include "anchordoc/serialize.hpp"
#include "anchordoc/serve.hpp"

namespace fs = std::filesystem;
using namespace anchordoc;

namespace {

constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;
constexpr int kExitNoOverlap = 65;
constexpr int kExitIo = 74;

struct BackendOptions {
  std::string spec;
  std::string api_key;
  std::string model = "default";
  int max_tokens = 8192;
};

struct PipelineOptions {
  int concurrency = 4;
  int crop_padding = 0;
  bool include_marginalia = false;
  std::string prompts_file;
  bool holistic_photographed = false;
  bool no_classify = false;
  bool unified_formula = false;
};

std::shared_ptr<Backend> make_backend(const BackendOptions& opts) {
  if (opts.spec.rfind("mock:", 0) == 0) {
    const fs::path fixture = opts.spec.substr(5);
    return std::make_shared<MockBackend>(FixtureTable::load(fixture));
  }
  std::string url;
  if (opts.spec.rfind("http://", 0) == 0 || opts.spec.rfind("https://", 0) == 0) {
    url = opts.spec;
  } else if (opts.spec.rfind("http:", 0) == 0) {
    url = opts.spec.substr(5);
    if (url.rfind("http", 0) != 0) url = "http://" + url;
  } else {
    raise(Errc::Config, "unknown backend scheme in \"" + opts.spec +
                            "\" (expected mock:<fixture.json> or http:<url>)");
  }
  EndpointConfig config;
  config.base_url = url;
  config.model = opts.model;
  config.api_key = opts.api_key;
  config.max_tokens = opts.max_tokens;
  return std::make_shared<HttpBackend>(config);
}

PipelineConfig make_pipeline_config(const PipelineOptions& opts, const fs::path& crop_dir) {
  PipelineConfig config;
  config.concurrency = opts.concurrency;
  config.crop_padding = opts.crop_padding;
  config.include_marginalia = opts.include_marginalia;
  config.classify = !opts.no_classify;
  config.dedicated_formula = !opts.unified_formula;
  config.crop_dir = crop_dir;
  if (!opts.prompts_file.empty())
    config.prompts = prompt_table_from_json(read_json_file(opts.prompts_file));
  if (opts.holistic_photographed)
    config.prompts.holistic = std::string(kHolisticPhotographedPrompt);
  return config;
}

struct PageInput {
  std::string id;
  fs::path path;
  bool is_spec = false;
};

bool has_suffix(const std::string& name, std::string_view suffix) {
  return name.size() >= suffix.size() &&
         name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<PageInput> collect_page_inputs(const std::vector<std::string>& raw_inputs) {
  std::vector<PageInput> pages;
  auto classify_file = [&](const fs::path& path) {
    const std::string name = path.filename().string();
    if (has_suffix(name, ".spec.json"))
      pages.push_back({name.substr(0, name.size() - 10), path, true});
    else if (has_suffix(name, ".png") || has_suffix(name, ".jpg") || has_suffix(name, ".jpeg"))
      pages.push_back({path.stem().string(), path, false});
  };
  for (const std::string& input : raw_inputs) {
    const fs::path path(input);
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const fs::path& file : files) classify_file(file);
    } else if (fs::is_regular_file(path)) {
      classify_file(path);
    } else {
      raise(Errc::Io, "input does not exist: " + input);
    }
  }
  if (pages.empty()) raise(Errc::Io, "no page inputs found (expected .png/.jpg/.spec.json)");
  return pages;
}

cv::Mat load_page_image(const PageInput& input) {
  if (input.is_spec) {
    const datagen::PageSpec spec = page_spec_from_json(read_json_file(input.path));
    return blank_page(spec.page_w, spec.page_h);
  }
  cv::Mat image = cv::imread(input.path.string(), cv::IMREAD_COLOR);
  if (image.empty()) raise(Errc::Io, "cannot decode image " + input.path.string());
  return image;
}

int cmd_parse(const std::vector<std::string>& inputs, const BackendOptions& backend_opts,
              const PipelineOptions& pipeline_opts, const fs::path& out_dir,
              const std::string& format) {
  if (format != "md" && format != "json" && format != "both")
    raise(Errc::Config, "--format must be md, json or both");

  const auto backend = make_backend(backend_opts);
  const PipelineConfig config = make_pipeline_config(pipeline_opts, out_dir / "crops");
  const Pipeline pipeline(backend, config);
  AssembleOptions assemble_opts;
  assemble_opts.include_marginalia = config.include_marginalia;

  const std::vector<PageInput> pages = collect_page_inputs(inputs);
  fs::create_directories(out_dir);

  int failed = 0;
  for (const PageInput& page : pages) {
    try {
      const cv::Mat image = load_page_image(page);
      const DocumentOutput doc = pipeline.parse_document(image, page.id);
      if (format != "md") write_json_file(out_dir / (page.id + ".json"), to_json(doc));
      if (format != "json") write_text_file(out_dir / (page.id + ".md"), assemble(doc, assemble_opts));
      std::fprintf(stderr,
                   "[parse] id=%s status=ok doc_type=%s elements=%zu stage1_ms=%.1f stage2_ms=%.1f\n",
                   page.id.c_str(), std::string(doc_type_token(doc.doc_type)).c_str(),
                   doc.parsed.size(), doc.timing.stage1_ms, doc.timing.stage2_ms);
    } catch (const Error& e) {
      ++failed;
      std::fprintf(stderr, "[parse] id=%s status=failed error=%s\n", page.id.c_str(), e.what());
    }
  }
  std::fprintf(stderr, "[parse] done pages=%zu ok=%zu failed=%d\n", pages.size(),
               pages.size() - static_cast<size_t>(failed), failed);
  return failed == 0 ? 0 : kExitPartial;
}

int cmd_evaluate(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path) {
  std::vector<std::string> warnings;
  const metrics::EvalReport report = metrics::evaluate_directories(pred_dir, gt_dir, &warnings);
  for (const std::string& warning : warnings)
    std::fprintf(stderr, "[evaluate] warning: %s\n", warning.c_str());

  njson report_json = to_json(report);
  report_json["config"] = njson{{"pred_dir", pred_dir.string()}, {"gt_dir", gt_dir.string()}};
  write_json_file(report_path, report_json);

  auto show = [](const std::optional<double>& v, const char* spec) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, *v);
    return std::string(buf);
  };
  const auto& agg = report.aggregate;
  std::printf("docs=%zu overall=%s text_edit=%s formula=%s teds=%s teds_s=%s order_edit=%s\n",
              report.per_document.size(), show(report.overall, "%.2f").c_str(),
              show(agg.text_edit, "%.4f").c_str(), show(agg.formula_score, "%.2f").c_str(),
              show(agg.table_teds, "%.2f").c_str(), show(agg.table_teds_s, "%.2f").c_str(),
              show(agg.order_edit, "%.4f").c_str());
  return 0;
}

int cmd_generate(const std::string& kind, int count, uint64_t seed, const fs::path& out_dir) {
  if (count < 1) raise(Errc::Config, "--count must be at least 1");
  if (kind != "catalog" && kind != "code" && kind != "page-warped")
    raise(Errc::Config, "--kind must be catalog, code or page-warped");

  fs::create_directories(out_dir);
  FixtureTable fixtures;
  if (fs::exists(out_dir / "fixtures.json"))
    fixtures = FixtureTable::load(out_dir / "fixtures.json");  // incremental corpus
  for (int i = 0; i < count; ++i) {
    const uint64_t page_seed = seed + static_cast<uint64_t>(i);
    char id[64];
    datagen::GeneratedPage page;
    if (kind == "catalog") {
      std::snprintf(id, sizeof id, "catalog_%03d", i);
      datagen::Rng rng(page_seed);
      page = datagen::gen_catalog(rng.uniform(10, 60), rng.uniform(1, 2), page_seed, id);
    } else if (kind == "code") {
      std::snprintf(id, sizeof id, "code_%03d", i);
      const auto language = static_cast<datagen::CodeLanguage>(i % 4);
      page = datagen::gen_code_page(language, page_seed, id);
    } else {
      std::snprintf(id, sizeof id, "photo_%03d", i);
      page = datagen::gen_warped_page(page_seed, id);
    }
    write_json_file(out_dir / (page.spec.id + ".spec.json"), to_json(page.spec));
    write_text_file(out_dir / (page.spec.id + ".svg"), page.svg);
    fixtures.merge(page.fixture);
  }
  fixtures.save(out_dir / "fixtures.json");
  std::fprintf(stderr, "[generate] kind=%s count=%d seed=%llu out=%s\n", kind.c_str(), count,
               static_cast<unsigned long long>(seed), out_dir.string().c_str());
  return 0;
}

int cmd_serve(const BackendOptions& backend_opts, const PipelineOptions& pipeline_opts,
              const std::string& host, int port, const fs::path& crop_dir) {
  ParseService service;
  service.backend = make_backend(backend_opts);
  service.pipeline_config = make_pipeline_config(pipeline_opts, crop_dir);
  std::fprintf(stderr, "[serve] listening on %s:%d\n", host.c_str(), port);
  if (!run_parse_server(service, host, port)) {
    std::fprintf(stderr, "[serve] failed to bind %s:%d\n", host.c_str(), port);
    return kExitIo;
  }
  return 0;
}

void add_backend_options(CLI::App* cmd, BackendOptions& opts) {
  cmd->add_option("--backend", opts.spec, "Backend: mock:<fixture.json> or http:<url>")
      ->required();
  cmd->add_option("--api-key", opts.api_key, "Bearer token for the remote backend")
      ->envname("ANCHORDOC_API_KEY");
  cmd->add_option("--model", opts.model, "Remote model name");
  cmd->add_option("--max-tokens", opts.max_tokens, "Remote generation budget");
}

void add_pipeline_options(CLI::App* cmd, PipelineOptions& opts) {
  cmd->add_option("--concurrency", opts.concurrency, "Parallel Stage-2 requests per page")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--crop-padding", opts.crop_padding, "Pixels of padding around element crops")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--include-marginalia", opts.include_marginalia,
                "Keep headers, footers, watermarks and page numbers in output");
  cmd->add_option("--prompts", opts.prompts_file, "Prompt-table override (JSON)");
  cmd->add_flag("--holistic-photographed", opts.holistic_photographed,
                "Use the photographed-document phrasing for the holistic prompt");
  cmd->add_flag("--no-classify", opts.no_classify,
                "Ablation: treat every page as digital (element-wise path)");
  cmd->add_flag("--unified-formula", opts.unified_formula,
                "Ablation: parse formulas with the paragraph prompt");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage document parsing: layout anchors, hybrid dispatch, metrics, fixtures"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file with long-option values");

  std::vector<std::string> parse_inputs;
  BackendOptions parse_backend, serve_backend;
  PipelineOptions parse_pipeline, serve_pipeline;
  std::string parse_out = "out", parse_format = "both";

  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse page images or page specs");
  parse_cmd->add_option("inputs", parse_inputs, "Image files, page specs, or directories")
      ->required();
  parse_cmd->add_option("--out", parse_out, "Output directory");
  parse_cmd->add_option("--format", parse_format, "Outputs to write: md, json or both");
  add_backend_options(parse_cmd, parse_backend);
  add_pipeline_options(parse_cmd, parse_pipeline);

  std::string eval_pred, eval_gt, eval_report = "report.json";
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("pred", eval_pred, "Directory of predicted page JSON")->required();
  eval_cmd->add_option("gt", eval_gt, "Directory of ground-truth page JSON")->required();
  eval_cmd->add_option("--report", eval_report, "Report JSON path");

  std::string gen_kind;
  int gen_count = 1;
  uint64_t gen_seed = 0;
  std::string gen_out = "corpus";
  CLI::App* gen_cmd = app.add_subcommand("generate", "Generate synthetic pages with fixtures");
  gen_cmd->add_option("--kind", gen_kind, "catalog, code or page-warped")->required();
  gen_cmd->add_option("--count", gen_count, "Number of pages");
  gen_cmd->add_option("--seed", gen_seed, "Base seed");
  gen_cmd->add_option("--out", gen_out, "Output directory");

  std::string serve_host = "127.0.0.1";
  int serve_port = 8088;
  std::string serve_crops = "crops";
  CLI::App* serve_cmd = app.add_subcommand("serve", "Expose POST /parse over HTTP");
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Bind port");
  serve_cmd->add_option("--crop-dir", serve_crops, "Directory for figure crops");
  add_backend_options(serve_cmd, serve_backend);
  add_pipeline_options(serve_cmd, serve_pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (parse_cmd->parsed())
      return cmd_parse(parse_inputs, parse_backend, parse_pipeline, parse_out, parse_format);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_pred, eval_gt, eval_report);
    if (gen_cmd->parsed()) return cmd_generate(gen_kind, gen_count, gen_seed, gen_out);
    if (serve_cmd->parsed())
      return cmd_serve(serve_backend, serve_pipeline, serve_host, serve_port, serve_crops);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case Errc::Io: return kExitIo;
      case Errc::EmptyInput: return kExitNoOverlap;
      case Errc::Config:
      case Errc::Range: return kExitUsage;
      default: return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
