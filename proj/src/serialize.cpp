#include "anchordoc/serialize.hpp"

#include <algorithm>

namespace anchordoc {

namespace {

njson attrs_to_json(const std::vector<AttributeTag>& attrs) {
  njson out = njson::array();
  for (AttributeTag tag : attrs) out.push_back(std::string(to_string(tag)));
  return out;
}

std::vector<AttributeTag> attrs_from_json(const njson& value) {
  std::vector<AttributeTag> attrs;
  for (const njson& item : value) {
    const auto tag = parse_attribute(item.get<std::string>());
    if (!tag) raise(Errc::UnknownAttribute, "unknown attribute tag " + item.dump());
    attrs.push_back(*tag);
  }
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

}  // namespace

std::string_view doc_type_token(DocumentType type) {
  return type == DocumentType::Digital ? "digital" : "photographed";
}

DocumentType doc_type_from_token(std::string_view token) {
  if (token == "digital") return DocumentType::Digital;
  if (token == "photographed") return DocumentType::Photographed;
  raise(Errc::UnknownDocType, "unknown document type token \"" + std::string(token) + "\"");
}

std::string_view to_string(ContentKind kind) {
  switch (kind) {
    case ContentKind::Text: return "text";
    case ContentKind::TableHtml: return "table_html";
    case ContentKind::FormulaLatex: return "formula_latex";
    case ContentKind::CodeBlock: return "code";
    case ContentKind::FigurePlaceholder: return "figure";
  }
  return "text";
}

ContentKind content_kind_from_token(std::string_view token) {
  if (token == "text") return ContentKind::Text;
  if (token == "table_html") return ContentKind::TableHtml;
  if (token == "formula_latex") return ContentKind::FormulaLatex;
  if (token == "code") return ContentKind::CodeBlock;
  if (token == "figure") return ContentKind::FigurePlaceholder;
  raise(Errc::Config, "unknown content kind \"" + std::string(token) + "\"");
}

njson to_json(const BBox& box) {
  return njson::array({box.x1, box.y1, box.x2, box.y2});
}

BBox bbox_from_json(const njson& value) {
  if (!value.is_array() || value.size() != 4)
    raise(Errc::MalformedBBox, "bbox must be a 4-element array");
  return BBox{value[0].get<int>(), value[1].get<int>(), value[2].get<int>(), value[3].get<int>()};
}

njson to_json(const LayoutElement& element) {
  njson out;
  out["label"] = std::string(to_string(element.label));
  out["bbox"] = to_json(element.bbox);
  out["attrs"] = attrs_to_json(element.attrs);
  out["order"] = element.order;
  return out;
}

LayoutElement element_from_json(const njson& value) {
  LayoutElement el;
  const auto label = parse_label(value.at("label").get<std::string>());
  if (!label) raise(Errc::UnknownLabel, "unknown label " + value.at("label").dump());
  el.label = *label;
  el.bbox = bbox_from_json(value.at("bbox"));
  if (value.contains("attrs")) el.attrs = attrs_from_json(value["attrs"]);
  el.order = value.at("order").get<int>();
  return el;
}

njson to_json(const DocumentOutput& doc) {
  njson out;
  out["doc_type"] = std::string(doc_type_token(doc.doc_type));
  out["page_w"] = doc.page_w;
  out["page_h"] = doc.page_h;
  if (doc.doc_type == DocumentType::Photographed) {
    out["holistic_text"] = doc.holistic_text;
  } else {
    out["elements"] = njson::array();
    for (const ParsedElement& pe : doc.parsed) {
      njson item = to_json(pe.element);
      item["kind"] = std::string(to_string(pe.kind));
      item["content"] = pe.content;
      item["source"] = pe.source == ContentSource::ModelCall ? "model" : "synthesized";
      if (pe.error) item["error"] = *pe.error;
      out["elements"].push_back(std::move(item));
    }
  }
  out["timing"]["stage1_ms"] = doc.timing.stage1_ms;
  out["timing"]["stage2_ms"] = doc.timing.stage2_ms;
  return out;
}

DocumentOutput document_output_from_json(const njson& value) {
  DocumentOutput doc;
  doc.doc_type = doc_type_from_token(value.at("doc_type").get<std::string>());
  doc.page_w = value.at("page_w").get<int>();
  doc.page_h = value.at("page_h").get<int>();
  if (doc.doc_type == DocumentType::Photographed) {
    doc.holistic_text = value.value("holistic_text", std::string());
  } else if (value.contains("elements")) {
    for (const njson& item : value["elements"]) {
      ParsedElement pe;
      pe.element = element_from_json(item);
      pe.kind = content_kind_from_token(item.value("kind", "text"));
      pe.content = item.value("content", std::string());
      pe.source = item.value("source", "model") == std::string("synthesized")
                      ? ContentSource::Synthesized
                      : ContentSource::ModelCall;
      if (item.contains("error") && !item["error"].is_null())
        pe.error = item["error"].get<std::string>();
      doc.parsed.push_back(std::move(pe));
    }
  }
  if (value.contains("timing")) {
    doc.timing.stage1_ms = value["timing"].value("stage1_ms", 0.0);
    doc.timing.stage2_ms = value["timing"].value("stage2_ms", 0.0);
  }
  return doc;
}

njson to_json(const datagen::PageSpec& spec) {
  njson out;
  out["id"] = spec.id;
  out["page_w"] = spec.page_w;
  out["page_h"] = spec.page_h;
  out["doc_type"] = std::string(doc_type_token(spec.doc_type));
  out["elements"] = njson::array();
  for (const LayoutElement& el : spec.elements) out["elements"].push_back(to_json(el));
  out["contents"] = njson::object();
  for (const auto& [order, text] : spec.contents) out["contents"][std::to_string(order)] = text;
  out["holistic_text"] = spec.holistic_text;
  out["render_lines"] = njson::array();
  for (const datagen::TextLine& line : spec.render_lines) {
    njson item;
    item["text"] = line.text;
    item["x"] = line.x;
    item["y"] = line.y;
    item["size"] = line.size;
    item["family"] = line.family;
    item["fill"] = line.fill;
    if (line.rotate != 0.0) item["rotate"] = line.rotate;
    if (!line.anchor.empty()) item["anchor"] = line.anchor;
    out["render_lines"].push_back(std::move(item));
  }
  out["render_rects"] = njson::array();
  for (const datagen::RenderRect& rect : spec.render_rects) {
    out["render_rects"].push_back(njson{{"x", rect.x},
                                        {"y", rect.y},
                                        {"w", rect.w},
                                        {"h", rect.h},
                                        {"fill", rect.fill},
                                        {"stroke", rect.stroke}});
  }
  out["provenance"]["generator"] = spec.provenance.generator;
  out["provenance"]["seed"] = spec.provenance.seed;
  out["provenance"]["style"] = spec.provenance.style;
  out["provenance"]["quads"] = njson::array();
  for (const auto& quad : spec.provenance.quads) {
    njson q = njson::array();
    for (double v : quad) q.push_back(v);
    out["provenance"]["quads"].push_back(std::move(q));
  }
  return out;
}

datagen::PageSpec page_spec_from_json(const njson& value) {
  datagen::PageSpec spec;
  spec.id = value.at("id").get<std::string>();
  spec.page_w = value.at("page_w").get<int>();
  spec.page_h = value.at("page_h").get<int>();
  spec.doc_type = doc_type_from_token(value.at("doc_type").get<std::string>());
  for (const njson& item : value.value("elements", njson::array()))
    spec.elements.push_back(element_from_json(item));
  if (value.contains("contents"))
    for (const auto& [key, text] : value["contents"].items())
      spec.contents[std::stoi(key)] = text.get<std::string>();
  spec.holistic_text = value.value("holistic_text", std::string());
  for (const njson& item : value.value("render_lines", njson::array())) {
    datagen::TextLine line;
    line.text = item.at("text").get<std::string>();
    line.x = item.at("x").get<double>();
    line.y = item.at("y").get<double>();
    line.size = item.at("size").get<double>();
    line.family = item.value("family", std::string("Georgia"));
    line.fill = item.value("fill", std::string("#1a1a1a"));
    line.rotate = item.value("rotate", 0.0);
    line.anchor = item.value("anchor", std::string());
    spec.render_lines.push_back(std::move(line));
  }
  for (const njson& item : value.value("render_rects", njson::array())) {
    spec.render_rects.push_back({item.at("x").get<double>(), item.at("y").get<double>(),
                                 item.at("w").get<double>(), item.at("h").get<double>(),
                                 item.value("fill", std::string()),
                                 item.value("stroke", std::string())});
  }
  if (value.contains("provenance")) {
    const njson& prov = value["provenance"];
    spec.provenance.generator = prov.value("generator", std::string());
    spec.provenance.seed = prov.value("seed", static_cast<uint64_t>(0));
    spec.provenance.style = prov.value("style", std::string());
    for (const njson& quad : prov.value("quads", njson::array())) {
      std::array<double, 8> q{};
      for (size_t i = 0; i < 8 && i < quad.size(); ++i) q[i] = quad[i].get<double>();
      spec.provenance.quads.push_back(q);
    }
  }
  return spec;
}

njson to_json(const PromptTable& prompts) {
  njson out;
  out["layout"] = prompts.layout;
  out["holistic"] = prompts.holistic;
  out["formula"] = prompts.formula;
  out["code"] = prompts.code;
  out["table"] = prompts.table;
  out["paragraph"] = prompts.paragraph;
  return out;
}

PromptTable prompt_table_from_json(const njson& value) {
  PromptTable prompts = PromptTable::defaults();
  if (value.contains("layout")) prompts.layout = value["layout"].get<std::string>();
  if (value.contains("holistic")) prompts.holistic = value["holistic"].get<std::string>();
  if (value.contains("formula")) prompts.formula = value["formula"].get<std::string>();
  if (value.contains("code")) prompts.code = value["code"].get<std::string>();
  if (value.contains("table")) prompts.table = value["table"].get<std::string>();
  if (value.contains("paragraph")) prompts.paragraph = value["paragraph"].get<std::string>();
  if (!prompts.complete()) raise(Errc::Config, "prompt table entries must be non-empty");
  return prompts;
}

namespace {

njson optional_to_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return *value;
}

}  // namespace

njson to_json(const metrics::DocScores& scores) {
  njson out;
  out["id"] = scores.id;
  out["text_edit"] = optional_to_json(scores.text_edit);
  out["formula_score"] = optional_to_json(scores.formula_score);
  out["table_teds"] = optional_to_json(scores.table_teds);
  out["table_teds_s"] = optional_to_json(scores.table_teds_s);
  out["order_edit"] = optional_to_json(scores.order_edit);
  if (!scores.elements.empty()) {
    out["elements"] = njson::array();
    for (const metrics::ElementScore& es : scores.elements) {
      njson item;
      item["gt_order"] = es.gt_order;
      item["pred_order"] = es.pred_order;
      item["label"] = std::string(to_string(es.label));
      item["metric"] = es.metric;
      item["score"] = es.score;
      out["elements"].push_back(std::move(item));
    }
  }
  return out;
}

njson to_json(const metrics::EvalReport& report) {
  njson out;
  out["per_document"] = njson::array();
  for (const metrics::DocScores& doc : report.per_document)
    out["per_document"].push_back(to_json(doc));
  out["aggregate"] = to_json(report.aggregate);
  out["aggregate"].erase("id");
  out["aggregate"]["overall"] = optional_to_json(report.overall);
  return out;
}

}  // namespace anchordoc
