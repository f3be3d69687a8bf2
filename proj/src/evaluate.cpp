#include "anchordoc/evaluate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "anchordoc/serialize.hpp"

namespace anchordoc::metrics {

StageOneResult EvalDoc::layout() const {
  StageOneResult result;
  result.doc_type = doc_type;
  result.elements = elements;
  result.page_w = page_w;
  result.page_h = page_h;
  return result;
}

EvalDoc eval_doc_from_json(const njson& value, std::string fallback_id) {
  EvalDoc doc;
  doc.id = value.value("id", fallback_id);

  if (value.contains("contents")) {
    // Ground-truth spec schema.
    const datagen::PageSpec spec = page_spec_from_json(value);
    doc.doc_type = spec.doc_type;
    doc.page_w = spec.page_w;
    doc.page_h = spec.page_h;
    doc.holistic_text = spec.holistic_text;
    std::vector<LayoutElement> ordered = spec.elements;
    std::sort(ordered.begin(), ordered.end(),
              [](const LayoutElement& a, const LayoutElement& b) { return a.order < b.order; });
    for (const LayoutElement& el : ordered) {
      doc.elements.push_back(el);
      const auto it = spec.contents.find(el.order);
      doc.contents.push_back(it == spec.contents.end() ? std::string() : it->second);
    }
    return doc;
  }

  const DocumentOutput output = document_output_from_json(value);
  doc.doc_type = output.doc_type;
  doc.page_w = output.page_w;
  doc.page_h = output.page_h;
  doc.holistic_text = output.holistic_text;
  std::vector<const ParsedElement*> ordered;
  for (const ParsedElement& pe : output.parsed) ordered.push_back(&pe);
  std::sort(ordered.begin(), ordered.end(), [](const ParsedElement* a, const ParsedElement* b) {
    return a->element.order < b->element.order;
  });
  for (const ParsedElement* pe : ordered) {
    doc.elements.push_back(pe->element);
    doc.contents.push_back(pe->error ? std::string() : pe->content);
  }
  return doc;
}

namespace {

// Main-text view: textual and code payloads in reading order, marginalia and
// separately-scored element types excluded.
std::string text_of(const EvalDoc& doc) {
  if (doc.doc_type == DocumentType::Photographed) return doc.holistic_text;
  std::string out;
  for (size_t i = 0; i < doc.elements.size(); ++i) {
    const LayoutElement& el = doc.elements[i];
    if (!is_parseable(el.label)) continue;
    if (el.label == SemanticLabel::Header || el.label == SemanticLabel::Foot) continue;
    const ContentKind kind = content_kind_for(el.label);
    if (kind != ContentKind::Text && kind != ContentKind::CodeBlock) continue;
    if (!out.empty()) out += '\n';
    out += doc.contents[i];
  }
  return out;
}

struct LabeledContent {
  std::vector<LayoutElement> elements;
  std::vector<std::string> contents;
};

LabeledContent filter_label(const EvalDoc& doc, SemanticLabel label) {
  LabeledContent out;
  for (size_t i = 0; i < doc.elements.size(); ++i) {
    if (doc.elements[i].label != label) continue;
    out.elements.push_back(doc.elements[i]);
    out.contents.push_back(doc.contents[i]);
  }
  return out;
}

// Matched pairs score the metric; unmatched elements on either side score 0.
template <typename ScoreFn>
std::optional<double> score_label(const EvalDoc& pred, const EvalDoc& gt, SemanticLabel label,
                                  std::string_view metric_name, ScoreFn&& fn,
                                  std::vector<ElementScore>* breakdown) {
  const LabeledContent p = filter_label(pred, label);
  const LabeledContent g = filter_label(gt, label);
  if (p.elements.empty() && g.elements.empty()) return std::nullopt;

  const Matching matching = match_elements(p.elements, g.elements);
  double sum = 0.0;
  int count = 0;
  auto record = [&](int gt_order, int pred_order, double score) {
    sum += score;
    ++count;
    if (breakdown)
      breakdown->push_back({gt_order, pred_order, label, score, std::string(metric_name)});
  };
  for (auto [pi, gi] : matching.pairs) {
    const double score = fn(p.contents[static_cast<size_t>(pi)], g.contents[static_cast<size_t>(gi)]);
    record(g.elements[static_cast<size_t>(gi)].order, p.elements[static_cast<size_t>(pi)].order, score);
  }
  for (int gi : matching.unmatched_gt) record(g.elements[static_cast<size_t>(gi)].order, -1, 0.0);
  for (int pi : matching.unmatched_pred) record(-1, p.elements[static_cast<size_t>(pi)].order, 0.0);
  return sum / count;
}

}  // namespace

DocScores evaluate_document(const EvalDoc& pred, const EvalDoc& gt) {
  DocScores scores;
  scores.id = gt.id;

  const std::string pred_text = text_of(pred);
  const std::string gt_text = text_of(gt);
  if (!pred_text.empty() || !gt_text.empty())
    scores.text_edit = normalized_edit_distance(pred_text, gt_text);

  scores.formula_score = score_label(
      pred, gt, SemanticLabel::Equ, "formula",
      [](const std::string& p, const std::string& g) { return formula_token_score(p, g); },
      &scores.elements);
  scores.table_teds = score_label(
      pred, gt, SemanticLabel::Tab, "teds",
      [](const std::string& p, const std::string& g) { return 100.0 * teds(p, g); },
      &scores.elements);
  scores.table_teds_s = score_label(
      pred, gt, SemanticLabel::Tab, "teds_s",
      [](const std::string& p, const std::string& g) { return 100.0 * teds_s(p, g); }, nullptr);

  if (gt.doc_type == DocumentType::Digital) {
    if (pred.doc_type == DocumentType::Digital)
      scores.order_edit = reading_order_edit(pred.layout(), gt.layout());
    else
      scores.order_edit = 1.0;  // no comparable layout was produced
  }
  return scores;
}

namespace {

std::map<std::string, std::filesystem::path> index_pages(const std::filesystem::path& dir) {
  std::map<std::string, std::filesystem::path> pages;
  if (!std::filesystem::is_directory(dir)) raise(Errc::Io, dir.string() + " is not a directory");

  // Spec files win over same-id plain json.
  std::vector<std::filesystem::path> plain;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "fixtures.json" || name == "report.json") continue;
    if (name.size() > 10 && name.ends_with(".spec.json")) {
      pages[name.substr(0, name.size() - 10)] = entry.path();
    } else if (name.ends_with(".json")) {
      plain.push_back(entry.path());
    }
  }
  for (const auto& path : plain) {
    const std::string id = path.stem().string();
    pages.emplace(id, path);
  }
  return pages;
}

}  // namespace

EvalReport evaluate_directories(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& gt_dir,
                                std::vector<std::string>* warnings) {
  const auto pred_pages = index_pages(pred_dir);
  const auto gt_pages = index_pages(gt_dir);

  std::vector<std::string> shared;
  for (const auto& [id, path] : gt_pages) {
    if (pred_pages.count(id)) {
      shared.push_back(id);
    } else if (warnings) {
      warnings->push_back("ground truth id \"" + id + "\" has no prediction");
    }
  }
  if (warnings)
    for (const auto& [id, path] : pred_pages)
      if (!gt_pages.count(id)) warnings->push_back("prediction id \"" + id + "\" has no ground truth");

  if (shared.empty())
    raise(Errc::EmptyInput, "prediction and ground-truth directories share no page ids");

  std::vector<DocScores> per_doc;
  per_doc.reserve(shared.size());
  for (const std::string& id : shared) {
    const EvalDoc pred = eval_doc_from_json(read_json_file(pred_pages.at(id)), id);
    const EvalDoc gt = eval_doc_from_json(read_json_file(gt_pages.at(id)), id);
    DocScores scores = evaluate_document(pred, gt);
    scores.id = id;
    per_doc.push_back(std::move(scores));
  }
  return aggregate(std::move(per_doc));
}

}  // namespace anchordoc::metrics
