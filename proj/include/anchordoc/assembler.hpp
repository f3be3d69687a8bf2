#pragma once

// Renders a DocumentOutput into one Markdown document in reading order:
// headings from section levels, tables as raw HTML, formulas as display
// math, code fenced with its bytes untouched, figures as image links.

#include <string>
#include <vector>

#include "anchordoc/pipeline.hpp"

namespace anchordoc {

struct AssembleOptions {
  bool include_marginalia = false;
  bool dehyphenate = true;     // elide a letter-trailing hyphen on spanning joins
  bool attr_comments = true;   // emit `<!-- attrs: ... -->` before tagged blocks
};

struct MarkdownBlock {
  enum class Kind {
    Heading, Paragraph, TableHtml, FormulaDisplay, CodeFence, Caption,
    Footnote, Marginalia, FigureRef, ListBlock, CatalogBlock, ReferenceBlock,
  };
  Kind kind = Kind::Paragraph;
  int heading_level = 0;  // 1..6 for Heading
  std::string body;
  SemanticLabel origin = SemanticLabel::Para;
  std::vector<AttributeTag> attrs;
};

// Marginalia: headers, footers, watermarks, and anything tagged page_num.
bool is_marginalia(const LayoutElement& element);

// Maps one parsed element to its block. Throws IncompatibleContent when the
// content kind does not match the element label.
MarkdownBlock render_element(const ParsedElement& element);

// Joins each half_para block with its immediate half_para/para successor
// (single-space joint; a letter-trailing hyphen on the first fragment is
// elided when dehyphenate is set). Other blocks pass through.
std::vector<MarkdownBlock> merge_spanning_paragraphs(std::vector<MarkdownBlock> blocks,
                                                     bool dehyphenate = true);

// Final Markdown text for one block, without the attribute comment.
std::string block_text(const MarkdownBlock& block);

// Photographed documents pass their holistic text through verbatim; digital
// documents render in reading order with marginalia filtered per options.
// Deterministic: identical inputs give identical bytes.
std::string assemble(const DocumentOutput& doc, const AssembleOptions& options = {});

}  // namespace anchordoc
