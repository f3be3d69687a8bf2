#include "anchordoc/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace anchordoc::datagen {

namespace {

constexpr std::array<std::string_view, 60> kWords = {
    "adaptive",  "anchor",   "baseline", "boundary", "buffer",   "catalog",
    "channel",   "cluster",  "context",  "contrast", "corpus",   "decoder",
    "detector",  "digital",  "document", "element",  "encoder",  "entropy",
    "feature",   "filter",   "formula",  "fragment", "gradient", "grammar",
    "heading",   "holistic", "hybrid",   "index",    "kernel",   "layout",
    "lattice",   "margin",   "matrix",   "metric",   "module",   "network",
    "notation",  "order",    "outline",  "parser",   "pipeline", "pixel",
    "prompt",    "raster",   "reading",  "region",   "register", "sampler",
    "schema",    "segment",  "sequence", "spectrum", "stage",    "stream",
    "structure", "table",    "token",    "vector",   "vision",   "window",
};

constexpr std::array<std::string_view, 5> kSerifFamilies = {
    "Georgia", "Times New Roman", "Palatino", "Garamond", "Book Antiqua",
};

constexpr std::array<std::string_view, 5> kMonoFamilies = {
    "Courier New", "Consolas", "Menlo", "DejaVu Sans Mono", "Source Code Pro",
};

struct ColorScheme {
  std::string_view bg;
  std::string_view fg;
};
constexpr std::array<ColorScheme, 5> kColorSchemes = {{
    {"#f5f5f5", "#1a1a1a"},
    {"#fdf6e3", "#586e75"},
    {"#282c34", "#abb2bf"},
    {"#0b2239", "#d9e2ec"},
    {"#fff8f0", "#4a3728"},
}};

constexpr double kCharWidth = 0.52;  // average glyph advance as a fraction of font size

std::string_view word(Rng& rng) { return rng.pick(kWords); }

std::string capitalized(std::string_view w) {
  std::string out(w);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string title_words(Rng& rng, int min_words, int max_words) {
  const int n = rng.uniform(min_words, max_words);
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += capitalized(word(rng));
  }
  return out;
}

std::string sentence(Rng& rng, int min_words, int max_words) {
  const int n = rng.uniform(min_words, max_words);
  std::string out = capitalized(word(rng));
  for (int i = 1; i < n; ++i) {
    out += ' ';
    out += word(rng);
  }
  out += '.';
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

size_t codepoint_count(std::string_view text) {
  size_t n = 0;
  for (char c : text)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace

std::string_view to_string(CodeLanguage language) {
  switch (language) {
    case CodeLanguage::Cpp: return "cpp";
    case CodeLanguage::Python: return "python";
    case CodeLanguage::Go: return "go";
    case CodeLanguage::JavaScript: return "javascript";
  }
  return "unknown";
}

StageOneResult PageSpec::layout() const {
  StageOneResult result;
  result.doc_type = doc_type;
  result.elements = elements;
  result.page_w = page_w;
  result.page_h = page_h;
  return result;
}

// ---------------------------------------------------------------------------
// SVG rendering

std::string render_svg(const PageSpec& spec) {
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(spec.page_w) + "\" height=\"" + std::to_string(spec.page_h) +
         "\" viewBox=\"0 0 " + std::to_string(spec.page_w) + " " + std::to_string(spec.page_h) +
         "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.page_w) + "\" height=\"" +
         std::to_string(spec.page_h) + "\" fill=\"#ffffff\"/>\n";

  for (const auto& quad : spec.provenance.quads) {
    svg += "<polygon points=\"";
    for (int i = 0; i < 4; ++i) {
      if (i > 0) svg += ' ';
      svg += fmt(quad[static_cast<size_t>(2 * i)]) + "," + fmt(quad[static_cast<size_t>(2 * i + 1)]);
    }
    svg += "\" fill=\"none\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
  }

  for (const RenderRect& rect : spec.render_rects) {
    svg += "<rect x=\"" + fmt(rect.x) + "\" y=\"" + fmt(rect.y) + "\" width=\"" + fmt(rect.w) +
           "\" height=\"" + fmt(rect.h) + "\"";
    svg += " fill=\"" + (rect.fill.empty() ? std::string("none") : rect.fill) + "\"";
    if (!rect.stroke.empty()) svg += " stroke=\"" + rect.stroke + "\"";
    svg += "/>\n";
  }

  // Figure anchors render as crossed placeholder boxes.
  for (const LayoutElement& el : spec.elements) {
    if (el.label != SemanticLabel::Fig) continue;
    const BBox& b = el.bbox;
    svg += "<rect x=\"" + std::to_string(b.x1) + "\" y=\"" + std::to_string(b.y1) + "\" width=\"" +
           std::to_string(b.width()) + "\" height=\"" + std::to_string(b.height()) +
           "\" fill=\"#fafafa\" stroke=\"#999999\"/>\n";
    svg += "<line x1=\"" + std::to_string(b.x1) + "\" y1=\"" + std::to_string(b.y1) + "\" x2=\"" +
           std::to_string(b.x2) + "\" y2=\"" + std::to_string(b.y2) + "\" stroke=\"#999999\"/>\n";
    svg += "<line x1=\"" + std::to_string(b.x1) + "\" y1=\"" + std::to_string(b.y2) + "\" x2=\"" +
           std::to_string(b.x2) + "\" y2=\"" + std::to_string(b.y1) + "\" stroke=\"#999999\"/>\n";
  }

  for (const TextLine& line : spec.render_lines) {
    svg += "<text x=\"" + fmt(line.x) + "\" y=\"" + fmt(line.y) + "\" font-family=\"" + line.family +
           "\" font-size=\"" + fmt(line.size) + "\" fill=\"" + line.fill + "\" xml:space=\"preserve\"";
    if (!line.anchor.empty()) svg += " text-anchor=\"" + line.anchor + "\"";
    if (line.rotate != 0.0)
      svg += " transform=\"rotate(" + fmt(line.rotate) + " " + fmt(line.x) + " " + fmt(line.y) + ")\"";
    svg += ">" + xml_escape(line.text) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

// ---------------------------------------------------------------------------
// Catalog pages

GeneratedPage gen_catalog(int entries, int columns, uint64_t seed, std::string id) {
  if (entries < 10 || entries > 60)
    raise(Errc::Range, "catalog entries must lie in [10,60], got " + std::to_string(entries));
  if (columns != 1 && columns != 2)
    raise(Errc::Range, "catalog columns must be 1 or 2, got " + std::to_string(columns));

  Rng rng(seed);
  GeneratedPage page;
  PageSpec& spec = page.spec;
  spec.id = id.empty() ? "catalog_s" + std::to_string(seed) : std::move(id);
  spec.page_w = 1240;
  spec.page_h = 1754;
  spec.doc_type = DocumentType::Digital;

  const int font_idx = rng.uniform(0, 4);
  const std::string family(kSerifFamilies[static_cast<size_t>(font_idx)]);
  spec.provenance = {"catalog", seed, "f" + std::to_string(font_idx), {}};

  const int margin = 110;
  const int gutter = 60;

  // Title element, order 0.
  {
    static constexpr std::array<std::string_view, 3> kTitles = {
        "Contents", "Table of Contents", "List of Chapters"};
    const std::string title(rng.pick(kTitles));
    const double size = 34;
    const double width = static_cast<double>(codepoint_count(title)) * size * kCharWidth;
    const double x = (spec.page_w - width) / 2.0;
    const double baseline = 170;
    spec.render_lines.push_back({title, x, baseline, size, family, "#1a1a1a", 0, ""});

    LayoutElement el;
    el.label = SemanticLabel::Sec0;
    el.order = 0;
    el.bbox = {static_cast<int>(x) - 4, static_cast<int>(baseline - size) - 2,
               static_cast<int>(x + width) + 4, static_cast<int>(baseline) + 8};
    spec.elements.push_back(el);
    spec.contents[0] = title;
  }

  const int rows = columns == 1 ? entries : (entries + 1) / 2;
  const int y0 = 240;
  const int avail = spec.page_h - margin - y0;
  const int step = std::clamp(avail / rows, 22, 40);
  const double font = std::clamp(std::round(step * 0.55), 12.0, 20.0);
  const double char_w = font * kCharWidth;
  const int col_w = (spec.page_w - 2 * margin - gutter * (columns - 1)) / columns;

  int depth = 0;
  std::array<int, 4> counters{};
  int page_no = rng.uniform(1, 9);
  const int leader_style = rng.uniform(0, 2);

  for (int i = 0; i < entries; ++i) {
    if (i > 0) depth = std::clamp(depth + rng.uniform(-1, 1), 0, 3);
    counters[static_cast<size_t>(depth)] += 1;
    for (int k = depth + 1; k < 4; ++k) counters[static_cast<size_t>(k)] = 0;

    std::string number = std::to_string(counters[0]);
    for (int k = 1; k <= depth; ++k) number += "." + std::to_string(counters[static_cast<size_t>(k)]);

    const std::string title = title_words(rng, 2, columns == 2 ? 3 : 5);
    page_no += rng.uniform(1, 8);
    const std::string page_str = std::to_string(page_no);

    const int col = (columns == 2 && i >= rows) ? 1 : 0;
    const int row = col == 0 ? i : i - rows;
    const int col_x = margin + col * (col_w + gutter);
    const double baseline = y0 + row * step + font;

    const std::string indent(static_cast<size_t>(4 * depth), ' ');
    const std::string prefix = number + " " + title + " ";
    const int budget = static_cast<int>(col_w / char_w);
    const int used = 4 * depth + static_cast<int>(prefix.size()) +
                     static_cast<int>(page_str.size()) + 1;
    const int dots = std::max(3, budget - used);

    // Ground truth standardizes the leader to one run of '.'.
    spec.contents[i + 1] = indent + prefix + std::string(static_cast<size_t>(dots), '.') +
                           " " + page_str;

    std::string leader;
    switch (leader_style) {
      case 0: leader = std::string(static_cast<size_t>(dots), '.'); break;
      case 1:
        for (int d = 0; d < dots / 2; ++d) leader += ". ";
        break;
      default:
        for (int d = 0; d < dots / 3; ++d) leader += "\xE2\x80\xA6";  // U+2026
        break;
    }
    spec.render_lines.push_back({indent + prefix + leader, static_cast<double>(col_x), baseline,
                                 font, family, "#222222", 0, ""});
    spec.render_lines.push_back({page_str, static_cast<double>(col_x + col_w), baseline, font,
                                 family, "#222222", 0, "end"});

    LayoutElement el;
    el.label = SemanticLabel::Catalogue;
    el.order = i + 1;
    el.bbox = {col_x, static_cast<int>(baseline - font), col_x + col_w,
               static_cast<int>(baseline + 0.35 * font) + 1};
    spec.elements.push_back(el);
  }

  page.svg = render_svg(spec);
  page.fixture = emit_fixture(spec);
  return page;
}

// ---------------------------------------------------------------------------
// Code pages

namespace {

struct SnippetNames {
  std::string fn, a, b, v, i;
};

SnippetNames make_names(Rng& rng) {
  SnippetNames n;
  n.fn = std::string(word(rng)) + "_" + std::string(word(rng));
  n.a = std::string(word(rng)).substr(0, 5);
  n.b = std::string(word(rng)).substr(0, 4);
  n.v = "acc";
  n.i = "idx";
  return n;
}

std::vector<std::string> python_snippet(Rng& rng) {
  const SnippetNames n = make_names(rng);
  const std::string u = "    ";
  const int k1 = rng.uniform(2, 19), k2 = rng.uniform(2, 9), k3 = rng.uniform(3, 40);
  std::vector<std::string> L;
  L.push_back("# " + sentence(rng, 4, 7));
  L.push_back("def " + n.fn + "(" + n.a + ", " + n.b + "):");
  L.push_back(u + n.v + " = " + n.a + " + " + std::to_string(k1));
  L.push_back(u + "for " + n.i + " in range(" + std::to_string(k2) + "):");
  L.push_back(u + u + n.v + " = " + n.v + " * 2 + " + n.i);
  L.push_back(u + u + "if " + n.v + " % " + std::to_string(k2) + " == 0:");
  L.push_back(u + u + u + n.v + " -= " + std::to_string(k3));
  if (rng.chance(0.5)) {
    L.push_back(u + u + u + "print(" + n.v + ")");
    L.push_back(u + u + "else:");
    L.push_back(u + u + u + n.v + " += " + n.b);
  }
  L.push_back(u + "return " + n.v);
  return L;
}

std::vector<std::string> cpp_snippet(Rng& rng) {
  const SnippetNames n = make_names(rng);
  const std::string u(rng.chance(0.5) ? 2u : 4u, ' ');
  const int k1 = rng.uniform(2, 19), k2 = rng.uniform(2, 9), k3 = rng.uniform(3, 40);
  std::vector<std::string> L;
  L.push_back("// " + sentence(rng, 4, 7));
  L.push_back("int " + n.fn + "(int " + n.a + ", int " + n.b + ") {");
  L.push_back(u + "int " + n.v + " = " + n.a + " + " + std::to_string(k1) + ";");
  L.push_back(u + "for (int " + n.i + " = 0; " + n.i + " < " + std::to_string(k2) + "; ++" + n.i + ") {");
  L.push_back(u + u + n.v + " += " + n.i + " * " + n.b + ";");
  L.push_back(u + u + "if (" + n.v + " > " + std::to_string(k3) + ") {");
  L.push_back(u + u + u + n.v + " -= " + std::to_string(k3) + ";");
  L.push_back(u + u + "}");
  if (rng.chance(0.5)) {
    L.push_back(u + u + "while (" + n.v + " % 2 == 0) {");
    L.push_back(u + u + u + n.v + " /= 2;");
    L.push_back(u + u + "}");
  }
  L.push_back(u + "}");
  L.push_back(u + "return " + n.v + ";");
  L.push_back("}");
  return L;
}

std::vector<std::string> go_snippet(Rng& rng) {
  const SnippetNames n = make_names(rng);
  const std::string u = "\t";
  const int k1 = rng.uniform(2, 19), k2 = rng.uniform(2, 9), k3 = rng.uniform(3, 40);
  std::vector<std::string> L;
  L.push_back("// " + sentence(rng, 4, 7));
  L.push_back("func " + n.fn + "(" + n.a + " int, " + n.b + " int) int {");
  L.push_back(u + n.v + " := " + n.a + " + " + std::to_string(k1));
  L.push_back(u + "for " + n.i + " := 0; " + n.i + " < " + std::to_string(k2) + "; " + n.i + "++ {");
  L.push_back(u + u + n.v + " += " + n.i + " * " + n.b);
  L.push_back(u + u + "if " + n.v + " > " + std::to_string(k3) + " {");
  L.push_back(u + u + u + n.v + " -= " + std::to_string(k3));
  L.push_back(u + u + "}");
  L.push_back(u + "}");
  if (rng.chance(0.5)) L.push_back(u + n.v + " *= 2");
  L.push_back(u + "return " + n.v);
  L.push_back("}");
  return L;
}

std::vector<std::string> js_snippet(Rng& rng) {
  const SnippetNames n = make_names(rng);
  const std::string u = "  ";
  const int k1 = rng.uniform(2, 19), k2 = rng.uniform(2, 9), k3 = rng.uniform(3, 40);
  std::vector<std::string> L;
  L.push_back("// " + sentence(rng, 4, 7));
  L.push_back("function " + n.fn + "(" + n.a + ", " + n.b + ") {");
  L.push_back(u + "let " + n.v + " = " + n.a + " + " + std::to_string(k1) + ";");
  L.push_back(u + "for (let " + n.i + " = 0; " + n.i + " < " + std::to_string(k2) + "; " + n.i + "++) {");
  L.push_back(u + u + n.v + " += " + n.i + " * " + n.b + ";");
  L.push_back(u + u + "if (" + n.v + " % " + std::to_string(k2) + " === 0) {");
  L.push_back(u + u + u + n.v + " -= " + std::to_string(k3) + ";");
  L.push_back(u + u + "}");
  L.push_back(u + "}");
  if (rng.chance(0.5)) L.push_back(u + n.v + " = Math.abs(" + n.v + ");");
  L.push_back(u + "return " + n.v + ";");
  L.push_back("}");
  return L;
}

std::vector<std::string> gen_snippet(CodeLanguage language, Rng& rng) {
  switch (language) {
    case CodeLanguage::Cpp: return cpp_snippet(rng);
    case CodeLanguage::Python: return python_snippet(rng);
    case CodeLanguage::Go: return go_snippet(rng);
    case CodeLanguage::JavaScript: return js_snippet(rng);
  }
  return {};
}

}  // namespace

GeneratedPage gen_code_page(CodeLanguage language, uint64_t seed, std::string id) {
  Rng rng(seed);
  GeneratedPage page;
  PageSpec& spec = page.spec;
  spec.id = id.empty() ? std::string(to_string(language)) + "_s" + std::to_string(seed)
                       : std::move(id);
  spec.page_w = 1180;
  spec.page_h = 1400;
  spec.doc_type = DocumentType::Digital;

  const int font_idx = rng.uniform(0, 4);
  const int color_idx = rng.uniform(0, 4);
  const std::string mono(kMonoFamilies[static_cast<size_t>(font_idx)]);
  const ColorScheme scheme = kColorSchemes[static_cast<size_t>(color_idx)];
  spec.provenance = {"code", seed, "f" + std::to_string(font_idx) + "c" + std::to_string(color_idx), {}};

  const int margin = 100;
  int order = 0;

  // Heading.
  {
    const std::string text = title_words(rng, 2, 4);
    const double size = 30;
    const double baseline = 150;
    spec.render_lines.push_back({text, static_cast<double>(margin), baseline, size, "Georgia",
                                 "#111111", 0, ""});
    LayoutElement el;
    el.label = SemanticLabel::Sec1;
    el.order = order;
    el.bbox = {margin, static_cast<int>(baseline - size) - 2,
               margin + static_cast<int>(codepoint_count(text) * size * kCharWidth) + 6,
               static_cast<int>(baseline) + 8};
    spec.elements.push_back(el);
    spec.contents[order++] = text;
  }

  // Intro paragraph; rendered wrapped, ground truth is the logical line.
  {
    const std::string text = sentence(rng, 10, 18);
    const double size = 18;
    const double line_h = size * 1.5;
    const int budget = static_cast<int>((spec.page_w - 2 * margin) / (size * kCharWidth));
    double baseline = 220;
    const double top = baseline - size;
    size_t start = 0;
    int lines = 0;
    while (start < text.size()) {
      size_t len = std::min(static_cast<size_t>(budget), text.size() - start);
      if (start + len < text.size()) {
        const size_t brk = text.rfind(' ', start + len);
        if (brk != std::string::npos && brk > start) len = brk - start;
      }
      spec.render_lines.push_back({text.substr(start, len), static_cast<double>(margin), baseline,
                                   size, "Georgia", "#222222", 0, ""});
      baseline += line_h;
      ++lines;
      start += len;
      while (start < text.size() && text[start] == ' ') ++start;
    }
    LayoutElement el;
    el.label = SemanticLabel::Para;
    el.order = order;
    el.bbox = {margin, static_cast<int>(top) - 2, spec.page_w - margin,
               static_cast<int>(baseline - line_h + 0.35 * size) + 2};
    spec.elements.push_back(el);
    spec.contents[order++] = text;
  }

  // Code block with its exact indentation as ground truth.
  int code_bottom;
  {
    const std::vector<std::string> lines = gen_snippet(language, rng);
    const double size = 17;
    const double line_h = 26;
    const double pad = 18;
    const double top = 330;
    const double block_h = lines.size() * line_h + 2 * pad;
    spec.render_rects.push_back({static_cast<double>(margin), top, static_cast<double>(spec.page_w - 2 * margin),
                                 block_h, std::string(scheme.bg), "#cccccc"});
    double baseline = top + pad + size;
    std::string content;
    for (const std::string& line : lines) {
      // Tabs render at four columns so Go keeps visible structure.
      std::string visual;
      for (char c : line) {
        if (c == '\t') visual += "    ";
        else visual += c;
      }
      spec.render_lines.push_back({visual, margin + pad, baseline, size, mono,
                                   std::string(scheme.fg), 0, ""});
      baseline += line_h;
      if (!content.empty()) content += '\n';
      content += line;
    }
    LayoutElement el;
    el.label = SemanticLabel::Code;
    el.order = order;
    el.bbox = {margin, static_cast<int>(top), spec.page_w - margin,
               static_cast<int>(top + block_h)};
    code_bottom = el.bbox.y2;
    spec.elements.push_back(el);
    spec.contents[order++] = content;
  }

  // Caption under the block.
  {
    const std::string text = "Listing: " + sentence(rng, 3, 6);
    const double size = 15;
    const double baseline = code_bottom + 40;
    spec.render_lines.push_back({text, static_cast<double>(margin), baseline, size, "Georgia",
                                 "#555555", 0, ""});
    LayoutElement el;
    el.label = SemanticLabel::Cap;
    el.order = order;
    el.bbox = {margin, static_cast<int>(baseline - size) - 2, spec.page_w - margin,
               static_cast<int>(baseline) + 6};
    spec.elements.push_back(el);
    spec.contents[order++] = text;
  }

  page.svg = render_svg(spec);
  page.fixture = emit_fixture(spec);
  return page;
}

// ---------------------------------------------------------------------------
// Photographed-page warps

namespace {

struct Homography {
  std::array<double, 8> h;  // x' = (h0 x + h1 y + h2)/(h6 x + h7 y + 1), y' analogous

  std::array<double, 2> apply(double x, double y) const {
    const double w = h[6] * x + h[7] * y + 1.0;
    return {(h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w};
  }
};

Homography solve_homography(const std::array<std::array<double, 2>, 4>& src,
                            const std::array<std::array<double, 2>, 4>& dst) {
  double m[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = src[static_cast<size_t>(i)][0], y = src[static_cast<size_t>(i)][1];
    const double X = dst[static_cast<size_t>(i)][0], Y = dst[static_cast<size_t>(i)][1];
    double* r0 = m[2 * i];
    double* r1 = m[2 * i + 1];
    r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -x * X; r0[7] = -y * X; r0[8] = X;
    r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -x * Y; r1[7] = -y * Y; r1[8] = Y;
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 8; ++row)
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    std::swap_ranges(m[col], m[col] + 9, m[pivot]);
    if (std::abs(m[col][col]) < 1e-12)
      raise(Errc::NonConvex, "degenerate corner configuration");
    for (int row = 0; row < 8; ++row) {
      if (row == col) continue;
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 9; ++k) m[row][k] -= f * m[col][k];
    }
  }
  Homography h{};
  for (int i = 0; i < 8; ++i) h.h[static_cast<size_t>(i)] = m[i][8] / m[i][i];
  return h;
}

bool convex_quad(const std::array<std::array<double, 2>, 4>& q) {
  for (int i = 0; i < 4; ++i) {
    const auto& a = q[static_cast<size_t>(i)];
    const auto& b = q[static_cast<size_t>((i + 1) % 4)];
    const auto& c = q[static_cast<size_t>((i + 2) % 4)];
    const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (cross <= 0) return false;  // corners are TL,TR,BR,BL: all turns clockwise
  }
  return true;
}

}  // namespace

WarpParams random_warp_params(int page_w, int page_h, Rng& rng) {
  WarpParams params;
  for (auto& shift : params.corner_shift) {
    shift[0] = rng.uniform_real(-0.025, 0.025) * page_w;
    shift[1] = rng.uniform_real(-0.025, 0.025) * page_h;
  }
  params.crease_amplitude = rng.uniform_real(2.0, 0.06 * page_h);
  params.crease_frequency = rng.uniform_real(0.6, 2.4);
  params.crease_axis = rng.chance(0.5) ? 'x' : 'y';
  return params;
}

WarpedPage warp_photographed(const PageSpec& digital, const WarpParams& params, uint64_t seed) {
  if (digital.doc_type != DocumentType::Digital)
    raise(Errc::Range, "warp input must be a digital page");
  const double w = digital.page_w, h = digital.page_h;
  if (params.crease_amplitude >= 0.1 * h)
    raise(Errc::AmplitudeTooLarge, "crease amplitude must stay below 10% of page height");

  const std::array<std::array<double, 2>, 4> src = {{{0, 0}, {w, 0}, {w, h}, {0, h}}};
  std::array<std::array<double, 2>, 4> dst;
  for (int i = 0; i < 4; ++i) {
    dst[static_cast<size_t>(i)] = {src[static_cast<size_t>(i)][0] + params.corner_shift[static_cast<size_t>(i)][0],
                                   src[static_cast<size_t>(i)][1] + params.corner_shift[static_cast<size_t>(i)][1]};
  }
  if (!convex_quad(dst))
    raise(Errc::NonConvex, "corner displacements make the page quad non-convex");

  const Homography hom = solve_homography(src, dst);
  const double two_pi = 2.0 * std::numbers::pi;
  auto warp_point = [&](double x, double y) -> std::array<double, 2> {
    auto [px, py] = hom.apply(x, y);
    if (params.crease_axis == 'x')
      py += params.crease_amplitude * std::sin(two_pi * params.crease_frequency * px / w);
    else
      px += params.crease_amplitude * std::sin(two_pi * params.crease_frequency * py / h);
    return {px, py};
  };

  Rng rng(seed);
  WarpedPage out;
  PageSpec& spec = out.spec;
  spec.id = digital.id;
  spec.page_w = digital.page_w;
  spec.page_h = digital.page_h;
  spec.doc_type = DocumentType::Photographed;
  spec.provenance.generator = "warp(" + digital.provenance.generator + ")";
  spec.provenance.seed = seed;
  spec.provenance.style = digital.provenance.style;

  // Holistic ground truth: reading-order concatenation of the digital page.
  std::vector<const LayoutElement*> ordered;
  for (const LayoutElement& el : digital.elements) ordered.push_back(&el);
  std::sort(ordered.begin(), ordered.end(),
            [](const LayoutElement* a, const LayoutElement* b) { return a->order < b->order; });
  for (const LayoutElement* el : ordered) {
    if (!is_parseable(el->label)) continue;
    const auto it = digital.contents.find(el->order);
    if (it == digital.contents.end()) continue;
    if (!spec.holistic_text.empty()) spec.holistic_text += '\n';
    spec.holistic_text += it->second;
  }

  // Element outlines survive only as provenance quads.
  spec.provenance.quads.push_back({dst[0][0], dst[0][1], dst[1][0], dst[1][1],
                                   dst[2][0], dst[2][1], dst[3][0], dst[3][1]});
  for (const LayoutElement& el : digital.elements) {
    const BBox& b = el.bbox;
    const auto tl = warp_point(b.x1, b.y1), tr = warp_point(b.x2, b.y1);
    const auto br = warp_point(b.x2, b.y2), bl = warp_point(b.x1, b.y2);
    spec.provenance.quads.push_back({tl[0], tl[1], tr[0], tr[1], br[0], br[1], bl[0], bl[1]});
  }

  for (const TextLine& line : digital.render_lines) {
    const double est_width =
        std::max(1.0, static_cast<double>(codepoint_count(line.text)) * line.size * kCharWidth);
    const auto p1 = warp_point(line.x, line.y);
    const auto p2 = warp_point(line.x + est_width, line.y);
    const double dx = p2[0] - p1[0], dy = p2[1] - p1[1];
    const double angle = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    const double scale = std::clamp(std::hypot(dx, dy) / est_width, 0.6, 1.4);

    TextLine warped = line;
    warped.x = p1[0] + rng.uniform_real(-1.5, 1.5);  // hand-held capture jitter
    warped.y = p1[1] + rng.uniform_real(-1.5, 1.5);
    warped.rotate = angle + rng.uniform_real(-0.8, 0.8);
    warped.size = line.size * scale;
    spec.render_lines.push_back(std::move(warped));
  }

  for (const RenderRect& rect : digital.render_rects) {
    // Approximate: warped axis-aligned hull of the original rect.
    const auto tl = warp_point(rect.x, rect.y);
    const auto br = warp_point(rect.x + rect.w, rect.y + rect.h);
    spec.render_rects.push_back({std::min(tl[0], br[0]), std::min(tl[1], br[1]),
                                 std::abs(br[0] - tl[0]), std::abs(br[1] - tl[1]), rect.fill,
                                 rect.stroke});
  }

  out.svg = render_svg(spec);
  return out;
}

GeneratedPage gen_warped_page(uint64_t seed, std::string id) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  GeneratedPage base;
  if (seed % 2 == 0) {
    base = gen_catalog(rng.uniform(10, 60), rng.uniform(1, 2), seed + 1,
                       id.empty() ? "photo_s" + std::to_string(seed) : id);
  } else {
    const auto language = static_cast<CodeLanguage>(rng.uniform(0, 3));
    base = gen_code_page(language, seed + 1, id.empty() ? "photo_s" + std::to_string(seed) : id);
  }
  const WarpParams params = random_warp_params(base.spec.page_w, base.spec.page_h, rng);
  WarpedPage warped = warp_photographed(base.spec, params, seed + 2);

  GeneratedPage page;
  page.spec = std::move(warped.spec);
  page.svg = std::move(warped.svg);
  page.fixture = emit_fixture(page.spec);
  return page;
}

// ---------------------------------------------------------------------------
// Fixture emission

FixtureTable emit_fixture(const PageSpec& spec, const PromptTable& prompts) {
  FixtureTable table;
  if (spec.doc_type == DocumentType::Digital) {
    table.insert(layout_region_id(spec.id), prompts.layout,
                 serialize_layout_sequence(spec.layout()));
    for (const LayoutElement& el : spec.elements) {
      if (!is_parseable(el.label)) continue;
      const auto it = spec.contents.find(el.order);
      if (it == spec.contents.end())
        raise(Errc::Config, "spec " + spec.id + " missing content for element order " +
                                std::to_string(el.order));
      table.insert(element_region_id(spec.id, el.order), select_prompt(el.label, prompts),
                   it->second);
    }
  } else {
    table.insert(layout_region_id(spec.id), prompts.layout,
                 std::string(to_string(DocumentType::Photographed)));
    table.insert(holistic_region_id(spec.id), prompts.holistic, spec.holistic_text);
  }
  return table;
}

}  // namespace anchordoc::datagen
