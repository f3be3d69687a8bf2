#include "anchordoc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <thread>

#include <opencv2/imgcodecs.hpp>

namespace anchordoc {

PromptTable PromptTable::defaults() {
  PromptTable table;
  table.layout = "Parse the reading order of this document.";
  table.holistic = "Read text in the image.";
  table.formula = "Read formula in the image.";
  table.code = "Read code in the image.";
  table.table = "Parse the table in the image.";
  table.paragraph = "Read text in the image.";
  return table;
}

bool PromptTable::complete() const {
  return !layout.empty() && !holistic.empty() && !formula.empty() && !code.empty() &&
         !table.empty() && !paragraph.empty();
}

ContentKind content_kind_for(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::Tab: return ContentKind::TableHtml;
    case SemanticLabel::Equ: return ContentKind::FormulaLatex;
    case SemanticLabel::Code: return ContentKind::CodeBlock;
    case SemanticLabel::Fig: return ContentKind::FigurePlaceholder;
    default: return ContentKind::Text;
  }
}

const std::string& select_prompt(SemanticLabel label, const PromptTable& prompts) {
  switch (label) {
    case SemanticLabel::Fig:
    case SemanticLabel::Watermark:
      raise(Errc::NotParseable, std::string(to_string(label)) + " elements are not model-parsed");
    case SemanticLabel::Tab: return prompts.table;
    case SemanticLabel::Equ: return prompts.formula;
    case SemanticLabel::Code: return prompts.code;
    default: return prompts.paragraph;
  }
}

cv::Mat crop_region(const cv::Mat& page, const BBox& bbox, int padding) {
  const int x1 = std::max(bbox.x1 - padding, 0);
  const int y1 = std::max(bbox.y1 - padding, 0);
  const int x2 = std::min(bbox.x2 + padding, page.cols);
  const int y2 = std::min(bbox.y2 + padding, page.rows);
  if (x1 >= x2 || y1 >= y2)
    raise(Errc::DegenerateRegion, "crop region has no overlap with the page");
  return page(cv::Rect(x1, y1, x2 - x1, y2 - y1)).clone();
}

cv::Mat blank_page(int width, int height) {
  return cv::Mat(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
}

ImagePayload encode_image(const cv::Mat& image) {
  ImagePayload payload;
  payload.width = image.cols;
  payload.height = image.rows;
  std::vector<uchar> buf;
  if (!cv::imencode(".png", image, buf))
    raise(Errc::Encoding, "PNG encoding failed");
  payload.bytes.assign(buf.begin(), buf.end());
  return payload;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Fan-out/fan-in over an index range: `workers` threads pull the next index
// from a shared counter, so at most `workers` tasks are in flight and every
// result lands in its own slot.
void parallel_for_index(int total, int workers, const std::function<void(int)>& fn) {
  if (total <= 0) return;
  workers = std::clamp(workers, 1, total);
  if (workers == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

Pipeline::Pipeline(std::shared_ptr<Backend> backend, PipelineConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  if (!backend_) raise(Errc::Config, "pipeline requires a backend");
  if (config_.concurrency < 1) raise(Errc::Config, "concurrency must be at least 1");
  if (config_.crop_padding < 0) raise(Errc::Config, "crop padding must be non-negative");
  if (!config_.prompts.complete()) raise(Errc::Config, "all six prompts must be non-empty");
}

StageOneResult Pipeline::run_stage1(const cv::Mat& page, std::string_view page_id) const {
  ModelRequest req;
  req.prompt = config_.prompts.layout;
  req.image = encode_image(page);
  req.region_id = layout_region_id(page_id);
  const ModelResponse res = backend_->request(req);
  try {
    return parse_layout_sequence(res.text, page.cols, page.rows).result;
  } catch (const Error& e) {
    raise(Errc::LayoutParse,
          std::string(e.what()) + "; raw response: \"" + res.text + "\"");
  }
}

std::string Pipeline::run_stage2_holistic(const cv::Mat& page, std::string_view page_id) const {
  ModelRequest req;
  req.prompt = config_.prompts.holistic;
  req.image = encode_image(page);
  req.region_id = holistic_region_id(page_id);
  return backend_->request(req).text;
}

std::vector<ParsedElement> Pipeline::run_stage2_elements(
    const cv::Mat& page, std::string_view page_id, std::span<const LayoutElement> elements) const {
  std::vector<ParsedElement> slots(elements.size());

  // Pre-fill the synthesized elements and collect the model-bound ones.
  std::vector<int> model_tasks;
  for (int i = 0; i < static_cast<int>(elements.size()); ++i) {
    const LayoutElement& el = elements[static_cast<size_t>(i)];
    ParsedElement& slot = slots[static_cast<size_t>(i)];
    slot.element = el;
    slot.kind = content_kind_for(el.label);
    if (el.label == SemanticLabel::Fig) {
      slot.source = ContentSource::Synthesized;
      try {
        const cv::Mat crop = crop_region(page, el.bbox, config_.crop_padding);
        const std::string name = std::string(page_id) + "_" + std::to_string(el.order) + ".png";
        std::filesystem::create_directories(config_.crop_dir);
        if (!cv::imwrite((config_.crop_dir / name).string(), crop))
          raise(Errc::Io, "failed to write crop " + name);
        slot.content = "crops/" + name;
      } catch (const Error& e) {
        slot.error = e.what();
      }
    } else if (el.label == SemanticLabel::Watermark) {
      slot.source = ContentSource::Synthesized;  // carried with empty content
    } else {
      model_tasks.push_back(i);
    }
  }

  std::atomic<int> failures{0};
  auto run_one = [&](int task) {
    const int i = model_tasks[static_cast<size_t>(task)];
    const LayoutElement& el = elements[static_cast<size_t>(i)];
    ParsedElement& slot = slots[static_cast<size_t>(i)];
    try {
      const cv::Mat crop = crop_region(page, el.bbox, config_.crop_padding);
      ModelRequest req;
      req.prompt = (!config_.dedicated_formula && el.label == SemanticLabel::Equ)
                       ? config_.prompts.paragraph
                       : select_prompt(el.label, config_.prompts);
      req.image = encode_image(crop);
      req.region_id = element_region_id(page_id, el.order);
      slot.content = backend_->request(req).text;
    } catch (const Error& e) {
      slot.error = e.what();
      failures.fetch_add(1, std::memory_order_relaxed);
    }
  };
  parallel_for_index(static_cast<int>(model_tasks.size()), config_.concurrency, run_one);

  if (!model_tasks.empty() && failures.load() == static_cast<int>(model_tasks.size()))
    raise(Errc::BatchFailed, "all " + std::to_string(model_tasks.size()) +
                                 " model-bound elements failed for page " + std::string(page_id));
  return slots;
}

DocumentOutput Pipeline::parse_document(const cv::Mat& page, std::string_view page_id) const {
  DocumentOutput out;
  out.page_w = page.cols;
  out.page_h = page.rows;

  const auto t1 = std::chrono::steady_clock::now();
  StageOneResult layout = run_stage1(page, page_id);
  out.timing.stage1_ms = ms_since(t1);

  // With classification off every page takes the digital path (whatever
  // elements Stage 1 produced; none for a photographed emission).
  const bool holistic =
      config_.classify && layout.doc_type == DocumentType::Photographed;
  out.doc_type = holistic ? DocumentType::Photographed : DocumentType::Digital;

  const auto t2 = std::chrono::steady_clock::now();
  if (holistic) {
    out.holistic_text = run_stage2_holistic(page, page_id);
  } else {
    out.parsed = run_stage2_elements(page, page_id, layout.elements);
  }
  out.timing.stage2_ms = ms_since(t2);
  return out;
}

}  // namespace anchordoc
