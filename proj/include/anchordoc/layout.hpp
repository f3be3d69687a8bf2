#pragma once

// Stage-1 output language: a document-type line followed by ordered element
// lines, one per layout anchor. This module owns the element/attribute
// vocabularies, the line grammar (parser + serializer) and layout validation.
//
// Canonical text form (UTF-8, \n separators, no trailing whitespace):
//
//   digital document
//   [sec_0] 100,40,800,90
//   [para]{author,page_num} 100,120,800,400
//
// or the single line `photographed document`, which carries no elements.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anchordoc/error.hpp"

namespace anchordoc {

enum class DocumentType : uint8_t { Digital, Photographed };

// The 21 element categories of the layout vocabulary.
enum class SemanticLabel : uint8_t {
  Sec0, Sec1, Sec2, Sec3, Sec4, Sec5,
  Para, HalfPara, Header, Foot, Fnote, Watermark,
  Fig, Tab, Cap, Anno, Equ, Code, Catalogue, Reference, List,
};
inline constexpr int kSemanticLabelCount = 21;

// The 12 distinct attribute tags (document metadata markers).
enum class AttributeTag : uint8_t {
  Author, AuthorAffili, AuthorMail, AuthorIntroduction,
  MetaPubDate, MetaSubject, MetaDoi, MetaNum,
  PaperAbstract, PaperKeywords, PaperConclusion, PageNum,
};
inline constexpr int kAttributeTagCount = 12;

std::string_view to_string(DocumentType type);
std::string_view to_string(SemanticLabel label);
std::string_view to_string(AttributeTag tag);

std::optional<DocumentType> parse_document_type(std::string_view text);
std::optional<SemanticLabel> parse_label(std::string_view text);
std::optional<AttributeTag> parse_attribute(std::string_view text);

// Absolute pixel coordinates, origin top-left, end-exclusive corners.
struct BBox {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool valid() const { return x1 >= 0 && y1 >= 0 && x1 < x2 && y1 < y2; }

  bool operator==(const BBox&) const = default;
};

struct LayoutElement {
  SemanticLabel label = SemanticLabel::Para;
  BBox bbox;
  std::vector<AttributeTag> attrs;  // canonical: sorted by enum value, unique
  int order = 0;                    // reading-order index, 0-based

  bool operator==(const LayoutElement&) const = default;
};

struct StageOneResult {
  DocumentType doc_type = DocumentType::Digital;
  std::vector<LayoutElement> elements;  // empty for photographed pages
  int page_w = 0, page_h = 0;

  bool operator==(const StageOneResult&) const = default;
};

// Parse result plus non-fatal clamp warnings (coordinates nudged back onto
// the page). Warnings do not affect round-trip equality of `result`.
struct ParsedLayout {
  StageOneResult result;
  std::vector<std::string> warnings;
};

// Parses a complete Stage-1 emission. Coordinates that overshoot a page
// bound by at most one page dimension are clamped and warned; overshoots
// beyond that, or boxes degenerate after clamping, are MalformedBBox.
// Throws Error with code UnknownDocType, UnknownLabel, MalformedBBox,
// UnknownAttribute or InvalidResult; never crashes on arbitrary bytes.
ParsedLayout parse_layout_sequence(std::string_view text, int page_w, int page_h);

// Canonical textual form. Throws InvalidResult when invariants are violated.
// parse_layout_sequence(serialize_layout_sequence(r), r.page_w, r.page_h)
// reconstructs r exactly.
std::string serialize_layout_sequence(const StageOneResult& result);

// Legacy compatibility shim: fractional corners on [0,1] scaled to pixels,
// rounded to nearest. Throws OutOfRange for fractions outside [0,1].
BBox convert_normalized_bbox(double nx1, double ny1, double nx2, double ny2,
                             int page_w, int page_h);

struct LayoutViolation {
  enum class Kind {
    PageDims,            // non-positive page dimensions
    PhotographedNonEmpty,
    NotSortedByOrder,
    OrderDuplicate,
    OrderGap,            // order indices are not exactly 0..n-1
    BBoxOrder,           // x1 >= x2 or y1 >= y2
    NegativeCoord,
    OutOfBounds,
    AttrsNotCanonical,   // attribute list not sorted-unique
  };
  Kind kind;
  int element_index;  // -1 for whole-result violations
  std::string message;
};

std::string_view to_string(LayoutViolation::Kind kind);

// Reports every invariant violation; empty list iff the result is valid.
std::vector<LayoutViolation> validate_layout(const StageOneResult& result);

// Dispatch rule: fig and watermark elements are never sent to the model.
inline bool is_parseable(SemanticLabel label) {
  return label != SemanticLabel::Fig && label != SemanticLabel::Watermark;
}

}  // namespace anchordoc
