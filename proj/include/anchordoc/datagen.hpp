#pragma once

// Synthetic fixture generators: catalog pages, code pages, and geometric
// photographed-page simulations. Each page comes with pixel-level ground
// truth (a PageSpec), an SVG rendering of the vector page description, and
// a mock-backend fixture table, so the full pipeline runs offline and the
// closed loop spec -> fixture -> pipeline -> metrics is exact.

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "anchordoc/backend.hpp"
#include "anchordoc/layout.hpp"
#include "anchordoc/pipeline.hpp"

namespace anchordoc::datagen {

// Deterministic helpers over a fixed-width engine; the engine output is
// standardized, so generated corpora are reproducible across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }
  int uniform(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
  bool chance(double p) { return uniform_real(0.0, 1.0) < p; }
  template <typename T, size_t N>
  const T& pick(const std::array<T, N>& items) {
    return items[static_cast<size_t>(uniform(0, static_cast<int>(N) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

// One rendered text run of the vector page description.
struct TextLine {
  std::string text;
  double x = 0, y = 0;  // baseline start
  double size = 16;
  std::string family = "Georgia";
  std::string fill = "#1a1a1a";
  double rotate = 0;    // degrees, around (x, y)
  std::string anchor;   // "" (start) or "end"
};

struct RenderRect {
  double x = 0, y = 0, w = 0, h = 0;
  std::string fill;
  std::string stroke;
};

struct Provenance {
  std::string generator;
  uint64_t seed = 0;
  std::string style;  // e.g. "f2c4" = font family 2, color scheme 4
  std::vector<std::array<double, 8>> quads;  // warped element outlines, TL TR BR BL
};

struct PageSpec {
  std::string id;
  int page_w = 0, page_h = 0;
  DocumentType doc_type = DocumentType::Digital;
  std::vector<LayoutElement> elements;
  std::map<int, std::string> contents;  // order -> ground-truth payload (parseable only)
  std::string holistic_text;            // photographed ground truth
  std::vector<TextLine> render_lines;
  std::vector<RenderRect> render_rects;
  Provenance provenance;

  StageOneResult layout() const;
};

struct GeneratedPage {
  PageSpec spec;
  std::string svg;
  FixtureTable fixture;
};

enum class CodeLanguage { Cpp, Python, Go, JavaScript };
std::string_view to_string(CodeLanguage language);

// Catalog page: title plus `entries` leader lines across one or two column
// bands, randomized indentation depth 0-3, leaders canonicalized to a run
// of '.', page numbers right-aligned. Throws RangeError for entries outside
// [10,60] or columns outside {1,2}.
GeneratedPage gen_catalog(int entries, int columns, uint64_t seed, std::string id = {});

// Code page: heading, short intro paragraph, and a synthesized snippet with
// nested blocks; ground truth records leading whitespace byte-exactly.
// Styles draw from 5 font families x 5 color schemes.
GeneratedPage gen_code_page(CodeLanguage language, uint64_t seed, std::string id = {});

struct WarpParams {
  // Corner displacements in pixels, order TL, TR, BR, BL.
  std::array<std::array<double, 2>, 4> corner_shift{};
  double crease_amplitude = 0.0;  // px; must stay below 10% of page height
  double crease_frequency = 1.0;  // cycles per page
  char crease_axis = 'x';         // 'x': fold lines run across x (y displaced)
};

WarpParams random_warp_params(int page_w, int page_h, Rng& rng);

struct WarpedPage {
  PageSpec spec;
  std::string svg;
};

// Applies the perspective map then the sinusoidal crease to all geometry.
// The result is a photographed page: the element list is dropped (warped
// outlines are kept in provenance) and the holistic ground truth is the
// reading-order concatenation of the input contents. Throws NonConvex or
// AmplitudeTooLarge.
WarpedPage warp_photographed(const PageSpec& digital, const WarpParams& params, uint64_t seed);

// Catalog- or code-based page (by seed parity) pushed through a random warp.
GeneratedPage gen_warped_page(uint64_t seed, std::string id = {});

// Digital: one layout entry plus one entry per parseable element under its
// type-specific prompt. Photographed: a layout entry and a holistic entry.
FixtureTable emit_fixture(const PageSpec& spec,
                          const PromptTable& prompts = PromptTable::defaults());

std::string render_svg(const PageSpec& spec);

}  // namespace anchordoc::datagen
