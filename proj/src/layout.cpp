#include "anchordoc/layout.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace anchordoc {

namespace {

constexpr std::array<std::string_view, kSemanticLabelCount> kLabelNames = {
    "sec_0", "sec_1", "sec_2", "sec_3", "sec_4", "sec_5",
    "para",  "half_para", "header", "foot", "fnote", "watermark",
    "fig",   "tab", "cap", "anno", "equ", "code", "catalogue",
    "reference", "list",
};

constexpr std::array<std::string_view, kAttributeTagCount> kAttrNames = {
    "author", "author_affili", "author_mail", "author_introduction",
    "meta_pub_date", "meta_subject", "meta_doi", "meta_num",
    "paper_abstract", "paper_keywords", "paper_conclusion", "page_num",
};

std::string_view strip_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
    line.remove_suffix(1);
  return line;
}

// Clamps one coordinate to [0, limit]. Overshoot up to one page dimension is
// tolerated (warned); anything further is an error.
int clamp_coord(long long value, int limit, std::string_view axis, int line_no,
                std::vector<std::string>* warnings) {
  if (value > limit) {
    if (value > 2LL * limit)
      raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": " + std::string(axis) +
                                     " coordinate " + std::to_string(value) +
                                     " is more than a page dimension out of bounds");
    warnings->push_back("line " + std::to_string(line_no) + ": clamped " + std::string(axis) +
                        " coordinate " + std::to_string(value) + " to " + std::to_string(limit));
    return limit;
  }
  return static_cast<int>(value);
}

}  // namespace

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownDocType: return "UnknownDocType";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::MalformedBBox: return "MalformedBBox";
    case Errc::UnknownAttribute: return "UnknownAttribute";
    case Errc::InvalidResult: return "InvalidResult";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::FixtureMiss: return "FixtureMiss";
    case Errc::Transport: return "TransportError";
    case Errc::Protocol: return "ProtocolError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::Encoding: return "EncodingError";
    case Errc::DegenerateRegion: return "DegenerateRegion";
    case Errc::NotParseable: return "NotParseable";
    case Errc::LayoutParse: return "LayoutParseError";
    case Errc::BatchFailed: return "BatchFailed";
    case Errc::IncompatibleContent: return "IncompatibleContent";
    case Errc::BothMustBeDigital: return "BothMustBeDigital";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::Range: return "RangeError";
    case Errc::NonConvex: return "NonConvex";
    case Errc::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case Errc::Io: return "IoError";
    case Errc::Config: return "ConfigError";
  }
  return "Error";
}

std::string_view to_string(DocumentType type) {
  return type == DocumentType::Digital ? "digital document" : "photographed document";
}

std::string_view to_string(SemanticLabel label) {
  return kLabelNames[static_cast<size_t>(label)];
}

std::string_view to_string(AttributeTag tag) {
  return kAttrNames[static_cast<size_t>(tag)];
}

std::optional<DocumentType> parse_document_type(std::string_view text) {
  if (text == "digital document") return DocumentType::Digital;
  if (text == "photographed document") return DocumentType::Photographed;
  return std::nullopt;
}

std::optional<SemanticLabel> parse_label(std::string_view text) {
  for (size_t i = 0; i < kLabelNames.size(); ++i)
    if (kLabelNames[i] == text) return static_cast<SemanticLabel>(i);
  return std::nullopt;
}

std::optional<AttributeTag> parse_attribute(std::string_view text) {
  for (size_t i = 0; i < kAttrNames.size(); ++i)
    if (kAttrNames[i] == text) return static_cast<AttributeTag>(i);
  return std::nullopt;
}

ParsedLayout parse_layout_sequence(std::string_view text, int page_w, int page_h) {
  if (page_w <= 0 || page_h <= 0)
    raise(Errc::OutOfRange, "page dimensions must be positive");

  ParsedLayout out;
  StageOneResult& result = out.result;
  result.page_w = page_w;
  result.page_h = page_h;

  // Split into lines, dropping blank ones (a trailing newline is harmless).
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = strip_line(text.substr(pos, nl - pos));
    if (!line.empty()) lines.push_back(line);
    pos = nl + 1;
  }

  if (lines.empty()) raise(Errc::UnknownDocType, "empty input");
  auto doc_type = parse_document_type(lines[0]);
  if (!doc_type)
    raise(Errc::UnknownDocType, "unrecognized document type line: \"" + std::string(lines[0]) + "\"");
  result.doc_type = *doc_type;

  if (result.doc_type == DocumentType::Photographed) {
    if (lines.size() > 1)
      raise(Errc::InvalidResult, "photographed document must not carry element lines");
    return out;
  }

  for (size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const int line_no = static_cast<int>(i) + 1;
    LayoutElement el;
    el.order = static_cast<int>(i) - 1;

    if (line.empty() || line.front() != '[')
      raise(Errc::UnknownLabel, "line " + std::to_string(line_no) + ": expected [label]");
    size_t close = line.find(']');
    if (close == std::string_view::npos)
      raise(Errc::UnknownLabel, "line " + std::to_string(line_no) + ": unterminated label");
    std::string_view label_text = line.substr(1, close - 1);
    auto label = parse_label(label_text);
    if (!label)
      raise(Errc::UnknownLabel,
            "line " + std::to_string(line_no) + ": unknown label \"" + std::string(label_text) + "\"");
    el.label = *label;
    line.remove_prefix(close + 1);

    if (!line.empty() && line.front() == '{') {
      size_t brace = line.find('}');
      if (brace == std::string_view::npos)
        raise(Errc::UnknownAttribute, "line " + std::to_string(line_no) + ": unterminated attribute set");
      std::string_view attrs = line.substr(1, brace - 1);
      while (!attrs.empty()) {
        size_t comma = attrs.find(',');
        std::string_view tag_text = attrs.substr(0, comma);
        auto tag = parse_attribute(tag_text);
        if (!tag)
          raise(Errc::UnknownAttribute, "line " + std::to_string(line_no) + ": unknown attribute \"" +
                                            std::string(tag_text) + "\"");
        el.attrs.push_back(*tag);
        if (comma == std::string_view::npos) break;
        attrs.remove_prefix(comma + 1);
      }
      // Attribute lists are sets: canonicalize to sorted-unique.
      std::sort(el.attrs.begin(), el.attrs.end());
      el.attrs.erase(std::unique(el.attrs.begin(), el.attrs.end()), el.attrs.end());
      line.remove_prefix(brace + 1);
    }

    if (line.empty() || line.front() != ' ')
      raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": expected space before coordinates");
    line.remove_prefix(1);

    long long coords[4];
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 4; ++c) {
      if (c > 0) {
        if (cur == end || *cur != ',')
          raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": expected 4 comma-separated coordinates");
        ++cur;
      }
      auto [next, ec] = std::from_chars(cur, end, coords[c]);
      if (ec != std::errc() || next == cur)
        raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": non-numeric coordinate");
      cur = next;
    }
    if (cur != end)
      raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": trailing characters after coordinates");

    el.bbox.x1 = clamp_coord(coords[0], page_w, "x1", line_no, &out.warnings);
    el.bbox.y1 = clamp_coord(coords[1], page_h, "y1", line_no, &out.warnings);
    el.bbox.x2 = clamp_coord(coords[2], page_w, "x2", line_no, &out.warnings);
    el.bbox.y2 = clamp_coord(coords[3], page_h, "y2", line_no, &out.warnings);
    if (el.bbox.x1 >= el.bbox.x2 || el.bbox.y1 >= el.bbox.y2)
      raise(Errc::MalformedBBox, "line " + std::to_string(line_no) + ": box has no area after clamping");

    result.elements.push_back(std::move(el));
  }
  return out;
}

std::string serialize_layout_sequence(const StageOneResult& result) {
  auto violations = validate_layout(result);
  if (!violations.empty())
    raise(Errc::InvalidResult, violations.front().message);

  std::string text(to_string(result.doc_type));
  for (const LayoutElement& el : result.elements) {
    text += "\n[";
    text += to_string(el.label);
    text += ']';
    if (!el.attrs.empty()) {
      text += '{';
      for (size_t i = 0; i < el.attrs.size(); ++i) {
        if (i > 0) text += ',';
        text += to_string(el.attrs[i]);
      }
      text += '}';
    }
    text += ' ';
    text += std::to_string(el.bbox.x1) + ',' + std::to_string(el.bbox.y1) + ',' +
            std::to_string(el.bbox.x2) + ',' + std::to_string(el.bbox.y2);
  }
  return text;
}

BBox convert_normalized_bbox(double nx1, double ny1, double nx2, double ny2,
                             int page_w, int page_h) {
  for (double f : {nx1, ny1, nx2, ny2})
    if (!(f >= 0.0 && f <= 1.0))
      raise(Errc::OutOfRange, "normalized coordinate outside [0,1]");
  if (!(nx1 < nx2) || !(ny1 < ny2))
    raise(Errc::OutOfRange, "normalized corners must satisfy x1<x2 and y1<y2");
  if (page_w <= 0 || page_h <= 0)
    raise(Errc::OutOfRange, "page dimensions must be positive");

  BBox box;
  box.x1 = static_cast<int>(std::lround(nx1 * page_w));
  box.y1 = static_cast<int>(std::lround(ny1 * page_h));
  box.x2 = static_cast<int>(std::lround(nx2 * page_w));
  box.y2 = static_cast<int>(std::lround(ny2 * page_h));
  if (!box.valid())
    raise(Errc::MalformedBBox, "box degenerate after rounding to pixels");
  return box;
}

std::string_view to_string(LayoutViolation::Kind kind) {
  using K = LayoutViolation::Kind;
  switch (kind) {
    case K::PageDims: return "PageDims";
    case K::PhotographedNonEmpty: return "PhotographedNonEmpty";
    case K::NotSortedByOrder: return "NotSortedByOrder";
    case K::OrderDuplicate: return "OrderDuplicate";
    case K::OrderGap: return "OrderGap";
    case K::BBoxOrder: return "BBoxOrder";
    case K::NegativeCoord: return "NegativeCoord";
    case K::OutOfBounds: return "OutOfBounds";
    case K::AttrsNotCanonical: return "AttrsNotCanonical";
  }
  return "Unknown";
}

std::vector<LayoutViolation> validate_layout(const StageOneResult& result) {
  std::vector<LayoutViolation> violations;
  auto add = [&](LayoutViolation::Kind kind, int index, std::string message) {
    violations.push_back({kind, index, std::move(message)});
  };

  if (result.page_w <= 0 || result.page_h <= 0)
    add(LayoutViolation::Kind::PageDims, -1, "page dimensions must be positive");

  if (result.doc_type == DocumentType::Photographed && !result.elements.empty())
    add(LayoutViolation::Kind::PhotographedNonEmpty, -1,
        "photographed result must have no elements");

  const int n = static_cast<int>(result.elements.size());
  std::vector<int> seen(static_cast<size_t>(std::max(n, 1)), 0);
  int prev_order = -1;
  for (int i = 0; i < n; ++i) {
    const LayoutElement& el = result.elements[static_cast<size_t>(i)];
    const std::string at = "element " + std::to_string(i);

    if (el.order < prev_order)
      add(LayoutViolation::Kind::NotSortedByOrder, i, at + ": orders not ascending");
    prev_order = el.order;

    if (el.order < 0 || el.order >= n) {
      add(LayoutViolation::Kind::OrderGap, i,
          at + ": order " + std::to_string(el.order) + " outside 0.." + std::to_string(n - 1));
    } else if (seen[static_cast<size_t>(el.order)]++) {
      add(LayoutViolation::Kind::OrderDuplicate, i,
          at + ": duplicate order index " + std::to_string(el.order));
    }

    if (el.bbox.x1 < 0 || el.bbox.y1 < 0)
      add(LayoutViolation::Kind::NegativeCoord, i, at + ": negative coordinate");
    if (el.bbox.x1 >= el.bbox.x2 || el.bbox.y1 >= el.bbox.y2)
      add(LayoutViolation::Kind::BBoxOrder, i, at + ": box has no area");
    if (result.page_w > 0 && result.page_h > 0 &&
        (el.bbox.x2 > result.page_w || el.bbox.y2 > result.page_h))
      add(LayoutViolation::Kind::OutOfBounds, i, at + ": box extends past page bounds");

    if (!std::is_sorted(el.attrs.begin(), el.attrs.end()) ||
        std::adjacent_find(el.attrs.begin(), el.attrs.end()) != el.attrs.end())
      add(LayoutViolation::Kind::AttrsNotCanonical, i, at + ": attributes not sorted-unique");
  }

  // Contiguity: orders in range with no duplicates imply exactly 0..n-1.
  for (int o = 0; o < n; ++o) {
    if (seen[static_cast<size_t>(o)] == 0) {
      add(LayoutViolation::Kind::OrderGap, -1, "missing order index " + std::to_string(o));
      break;
    }
  }
  return violations;
}

}  // namespace anchordoc
