#pragma once

// Two-stage orchestration: Stage 1 classifies the page and emits layout
// anchors; Stage 2 either parses the whole page holistically (photographed)
// or crops every anchor and parses the crops in parallel with type-specific
// prompts (digital). Results assemble in reading order regardless of
// completion order.

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "anchordoc/backend.hpp"
#include "anchordoc/layout.hpp"

namespace anchordoc {

struct PromptTable {
  std::string layout;
  std::string holistic;
  std::string formula;
  std::string code;
  std::string table;
  std::string paragraph;

  static PromptTable defaults();
  bool complete() const;  // all six prompts non-empty
};

// Alternative holistic phrasing, selectable via config override.
inline constexpr std::string_view kHolisticPhotographedPrompt =
    "Parse the content of this photographed document.";

enum class ContentKind { Text, TableHtml, FormulaLatex, CodeBlock, FigurePlaceholder };
enum class ContentSource { ModelCall, Synthesized };

ContentKind content_kind_for(SemanticLabel label);

struct ParsedElement {
  LayoutElement element;
  ContentKind kind = ContentKind::Text;
  std::string content;  // text / HTML / LaTeX / code; crop path for figures
  ContentSource source = ContentSource::ModelCall;
  std::optional<std::string> error;  // set when this element's parse failed
};

struct StageTiming {
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
};

struct DocumentOutput {
  DocumentType doc_type = DocumentType::Digital;
  int page_w = 0, page_h = 0;
  std::vector<ParsedElement> parsed;  // digital path
  std::string holistic_text;          // photographed path
  StageTiming timing;
};

struct PipelineConfig {
  int concurrency = 4;
  int crop_padding = 0;
  bool include_marginalia = false;
  PromptTable prompts = PromptTable::defaults();
  bool classify = true;           // false: every page takes the element-wise path
  bool dedicated_formula = true;  // false: formulas share the paragraph prompt
  std::filesystem::path crop_dir = "crops";
};

// Type-specific prompt per dispatch table. Throws NotParseable for fig and
// watermark, which never reach the model.
const std::string& select_prompt(SemanticLabel label, const PromptTable& prompts);

// Sub-raster of the padded box intersected with the page. Throws
// DegenerateRegion when the intersection has no area.
cv::Mat crop_region(const cv::Mat& page, const BBox& bbox, int padding);

cv::Mat blank_page(int width, int height);

// Encodes a raster to a PNG payload for a model request.
ImagePayload encode_image(const cv::Mat& image);

class Pipeline {
 public:
  Pipeline(std::shared_ptr<Backend> backend, PipelineConfig config);

  // One layout request over the full page, parsed and validated. Grammar
  // failures surface as LayoutParse with the raw response attached.
  StageOneResult run_stage1(const cv::Mat& page, std::string_view page_id) const;

  // One holistic request over the full page; generated text verbatim.
  std::string run_stage2_holistic(const cv::Mat& page, std::string_view page_id) const;

  // Crop + prompt + request per parseable element, at most
  // config.concurrency in flight. fig becomes a saved-crop placeholder,
  // watermark an empty carry; neither calls the model. Per-element failures
  // are recorded in place; if every model-bound element fails, throws
  // BatchFailed.
  std::vector<ParsedElement> run_stage2_elements(const cv::Mat& page, std::string_view page_id,
                                                 std::span<const LayoutElement> elements) const;

  DocumentOutput parse_document(const cv::Mat& page, std::string_view page_id) const;

  const PipelineConfig& config() const { return config_; }

 private:
  std::shared_ptr<Backend> backend_;
  PipelineConfig config_;
};

}  // namespace anchordoc
