#pragma once

// Document-level scoring: normalizes prediction and ground-truth page JSON
// (DocumentOutput or PageSpec schema) into one comparable view, scores each
// metric where the element type is present, and aggregates a report over a
// directory pair keyed by shared ids.

#include <filesystem>
#include <string>
#include <vector>

#include "anchordoc/io.hpp"
#include "anchordoc/metrics.hpp"

namespace anchordoc::metrics {

struct EvalDoc {
  std::string id;
  DocumentType doc_type = DocumentType::Digital;
  int page_w = 0, page_h = 0;
  std::vector<LayoutElement> elements;   // sorted by order
  std::vector<std::string> contents;     // aligned with elements
  std::string holistic_text;

  StageOneResult layout() const;
};

// Accepts either page schema; a "contents" member marks a ground-truth spec.
EvalDoc eval_doc_from_json(const njson& value, std::string fallback_id);

DocScores evaluate_document(const EvalDoc& pred, const EvalDoc& gt);

// Prediction files are <id>.json; ground truth <id>.spec.json or <id>.json.
// Ids present on only one side are reported in `warnings`. Throws EmptyInput
// when the id sets do not overlap.
EvalReport evaluate_directories(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& gt_dir,
                                std::vector<std::string>* warnings = nullptr);

}  // namespace anchordoc::metrics
