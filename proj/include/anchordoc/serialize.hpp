#pragma once

// JSON forms of the external file formats: page ground-truth specs,
// per-page document outputs, prompt tables, and evaluation reports.

#include <string_view>

#include "anchordoc/datagen.hpp"
#include "anchordoc/io.hpp"
#include "anchordoc/metrics.hpp"
#include "anchordoc/pipeline.hpp"

namespace anchordoc {

std::string_view doc_type_token(DocumentType type);  // "digital" / "photographed"
DocumentType doc_type_from_token(std::string_view token);

std::string_view to_string(ContentKind kind);
ContentKind content_kind_from_token(std::string_view token);

njson to_json(const BBox& box);
BBox bbox_from_json(const njson& value);

njson to_json(const LayoutElement& element);
LayoutElement element_from_json(const njson& value);

njson to_json(const DocumentOutput& doc);
DocumentOutput document_output_from_json(const njson& value);

njson to_json(const datagen::PageSpec& spec);
datagen::PageSpec page_spec_from_json(const njson& value);

njson to_json(const PromptTable& prompts);
PromptTable prompt_table_from_json(const njson& value);

njson to_json(const metrics::DocScores& scores);
njson to_json(const metrics::EvalReport& report);

}  // namespace anchordoc
