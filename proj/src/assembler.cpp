#include "anchordoc/assembler.hpp"

#include <algorithm>

namespace anchordoc {

namespace {

bool is_ascii_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

int heading_level_for(SemanticLabel label) {
  const int k = static_cast<int>(label) - static_cast<int>(SemanticLabel::Sec0);
  return std::min(k + 1, 6);
}

MarkdownBlock::Kind block_kind_for(SemanticLabel label) {
  using K = MarkdownBlock::Kind;
  switch (label) {
    case SemanticLabel::Sec0:
    case SemanticLabel::Sec1:
    case SemanticLabel::Sec2:
    case SemanticLabel::Sec3:
    case SemanticLabel::Sec4:
    case SemanticLabel::Sec5: return K::Heading;
    case SemanticLabel::Tab: return K::TableHtml;
    case SemanticLabel::Equ: return K::FormulaDisplay;
    case SemanticLabel::Code: return K::CodeFence;
    case SemanticLabel::Fig: return K::FigureRef;
    case SemanticLabel::Cap: return K::Caption;
    case SemanticLabel::Fnote: return K::Footnote;
    case SemanticLabel::List: return K::ListBlock;
    case SemanticLabel::Catalogue: return K::CatalogBlock;
    case SemanticLabel::Reference: return K::ReferenceBlock;
    case SemanticLabel::Header:
    case SemanticLabel::Foot:
    case SemanticLabel::Watermark: return K::Marginalia;
    default: return K::Paragraph;
  }
}

}  // namespace

bool is_marginalia(const LayoutElement& element) {
  if (element.label == SemanticLabel::Header || element.label == SemanticLabel::Foot ||
      element.label == SemanticLabel::Watermark)
    return true;
  return std::find(element.attrs.begin(), element.attrs.end(), AttributeTag::PageNum) !=
         element.attrs.end();
}

MarkdownBlock render_element(const ParsedElement& pe) {
  if (pe.kind != content_kind_for(pe.element.label))
    raise(Errc::IncompatibleContent,
          "content kind does not match label " + std::string(to_string(pe.element.label)));

  MarkdownBlock block;
  block.kind = block_kind_for(pe.element.label);
  block.origin = pe.element.label;
  block.attrs = pe.element.attrs;
  if (block.kind == MarkdownBlock::Kind::Heading)
    block.heading_level = heading_level_for(pe.element.label);
  block.body = pe.content;
  return block;
}

std::vector<MarkdownBlock> merge_spanning_paragraphs(std::vector<MarkdownBlock> blocks,
                                                     bool dehyphenate) {
  std::vector<MarkdownBlock> out;
  out.reserve(blocks.size());
  for (MarkdownBlock& block : blocks) {
    if (!out.empty() && out.back().origin == SemanticLabel::HalfPara &&
        (block.origin == SemanticLabel::HalfPara || block.origin == SemanticLabel::Para)) {
      MarkdownBlock& head = out.back();
      const size_t n = head.body.size();
      if (dehyphenate && n >= 2 && head.body[n - 1] == '-' && is_ascii_letter(head.body[n - 2])) {
        head.body.pop_back();
        head.body += block.body;
      } else {
        head.body += ' ';
        head.body += block.body;
      }
      // The joined block reads as the continuation's type.
      head.origin = block.origin;
      head.kind = block.kind;
      for (AttributeTag tag : block.attrs)
        if (std::find(head.attrs.begin(), head.attrs.end(), tag) == head.attrs.end())
          head.attrs.push_back(tag);
      std::sort(head.attrs.begin(), head.attrs.end());
      continue;
    }
    out.push_back(std::move(block));
  }
  return out;
}

std::string block_text(const MarkdownBlock& block) {
  using K = MarkdownBlock::Kind;
  switch (block.kind) {
    case K::Heading:
      return std::string(static_cast<size_t>(block.heading_level), '#') + " " + block.body;
    case K::FormulaDisplay:
      return "$$\n" + block.body + "\n$$";
    case K::CodeFence:
      return "```\n" + block.body + "\n```";
    case K::FigureRef:
      return "![fig](" + block.body + ")";
    default:
      return block.body;
  }
}

std::string assemble(const DocumentOutput& doc, const AssembleOptions& options) {
  if (doc.doc_type == DocumentType::Photographed) return doc.holistic_text;

  std::vector<MarkdownBlock> blocks;
  blocks.reserve(doc.parsed.size());
  for (const ParsedElement& pe : doc.parsed) {
    if (pe.error) continue;  // failed elements stay in the JSON, not the text
    if (!options.include_marginalia && is_marginalia(pe.element)) continue;
    blocks.push_back(render_element(pe));
  }
  blocks = merge_spanning_paragraphs(std::move(blocks), options.dehyphenate);

  std::string out;
  for (const MarkdownBlock& block : blocks) {
    const std::string text = block_text(block);
    if (text.empty()) continue;
    if (!out.empty()) out += "\n\n";
    if (options.attr_comments && !block.attrs.empty()) {
      out += "<!-- attrs: ";
      for (size_t i = 0; i < block.attrs.size(); ++i) {
        if (i > 0) out += ',';
        out += to_string(block.attrs[i]);
      }
      out += " -->\n";
    }
    out += text;
  }
  return out;
}

}  // namespace anchordoc
