#pragma once

// Evaluation metric family: normalized edit distance over Unicode code
// points, tree-edit-distance table similarity (TEDS and its structure-only
// variant), a token-level formula score, IoU-greedy element matching and
// reading-order scoring, plus per-document score containers and aggregation.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anchordoc/layout.hpp"

namespace anchordoc::metrics {

// ---------------------------------------------------------------------------
// Edit distance

std::vector<char32_t> decode_utf8(std::string_view text);

// Unit-cost Levenshtein distance, two-row DP. Allocation-free for short
// inputs so exhaustive sweeps stay cheap.
int levenshtein(std::span<const char32_t> a, std::span<const char32_t> b);
int levenshtein(std::span<const int> a, std::span<const int> b);

// Levenshtein(a,b) / max(|a|,|b|) over code points; 0 when both are empty.
double normalized_edit_distance(std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------
// Tree edit distance

struct TreeNode {
  std::string label;
  std::vector<TreeNode> children;
};

// Exact ordered tree edit distance (insert/delete/relabel, unit costs),
// Zhang-Shasha with keyroots.
int tree_edit_distance(const TreeNode& a, const TreeNode& b);

// Parses a table-HTML fragment into a tree rooted at `table`. Structural
// tags: table, thead, tbody, tr, td, th. Cell nodes fold colspan/rowspan
// and (when include_text) whitespace-normalized text into their label.
// Returns nullopt when no table element is found.
std::optional<TreeNode> parse_table_tree(std::string_view html, bool include_text);

// TEDS = 1 - TED / max(|T1|,|T2|). Parse failures behave as empty trees:
// both empty scores 1, empty-vs-nonempty scores 0.
double teds(std::string_view pred_html, std::string_view gt_html);

// Structure-only variant: cell text is ignored, spans still count.
double teds_s(std::string_view pred_html, std::string_view gt_html);

// ---------------------------------------------------------------------------
// Formula score

// Splits LaTeX into \commands, braces and single symbols; whitespace is not
// a token.
std::vector<std::string> tokenize_latex(std::string_view latex);

// 100 * (1 - normalized token edit distance), in [0,100].
double formula_token_score(std::string_view pred_latex, std::string_view gt_latex);

// ---------------------------------------------------------------------------
// Element matching and reading order

double iou(const BBox& a, const BBox& b);

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (pred index, gt index)
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gt;
};

// Greedy one-to-one matching by descending IoU at the given threshold.
Matching match_elements(std::span<const LayoutElement> pred,
                        std::span<const LayoutElement> gt,
                        double threshold = 0.5);

// Matches elements, takes the gt indices in predicted reading order, and
// scores them against the ascending gt index sequence with normalized edit
// distance; unmatched gt elements count as deletions. Both inputs must be
// digital (throws BothMustBeDigital).
double reading_order_edit(const StageOneResult& pred, const StageOneResult& gt);

// ---------------------------------------------------------------------------
// Reports

struct ElementScore {
  int gt_order = -1;    // -1 when the element exists only on the pred side
  int pred_order = -1;  // -1 when unmatched
  SemanticLabel label = SemanticLabel::Para;
  double score = 0.0;   // metric-native scale
  std::string metric;   // "teds", "teds_s", "formula"
};

// Per-document scores. A metric is absent when neither side carries the
// element type it measures. table_* and formula_score are on [0,100];
// the edit distances on [0,1].
struct DocScores {
  std::string id;
  std::optional<double> text_edit;
  std::optional<double> formula_score;
  std::optional<double> table_teds;
  std::optional<double> table_teds_s;
  std::optional<double> order_edit;
  std::vector<ElementScore> elements;
};

struct EvalReport {
  std::vector<DocScores> per_document;
  DocScores aggregate;              // per-metric means over documents possessing each type
  std::optional<double> overall;    // [0,100]
};

// Arithmetic means per metric over the documents possessing that element
// type; overall = mean of {100*(1-text_edit), formula, teds, 100*(1-order)}
// over the components present. Throws EmptyInput.
EvalReport aggregate(std::vector<DocScores> per_document);

}  // namespace anchordoc::metrics
