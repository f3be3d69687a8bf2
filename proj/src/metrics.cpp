#include "anchordoc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

namespace anchordoc::metrics {

namespace {

// Two-row DP. Rows live on the stack for short inputs.
template <typename T>
int levenshtein_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() > b.size()) std::swap(a, b);
  const size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);

  std::array<int, 64> stack_buf;
  std::vector<int> heap_buf;
  int* prev;
  int* cur;
  if (2 * (n + 1) <= stack_buf.size()) {
    prev = stack_buf.data();
    cur = stack_buf.data() + (n + 1);
  } else {
    heap_buf.resize(2 * (n + 1));
    prev = heap_buf.data();
    cur = heap_buf.data() + (n + 1);
  }

  for (size_t i = 0; i <= n; ++i) prev[i] = static_cast<int>(i);
  for (size_t j = 1; j <= m; ++j) {
    cur[0] = static_cast<int>(j);
    const T bj = b[j - 1];
    for (size_t i = 1; i <= n; ++i) {
      const int sub = prev[i - 1] + (a[i - 1] == bj ? 0 : 1);
      cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = c;
    if (c >= 0xF0) { extra = 3; cp = c & 0x07u; }
    else if (c >= 0xE0) { extra = 2; cp = c & 0x0Fu; }
    else if (c >= 0xC0) { extra = 1; cp = c & 0x1Fu; }
    if (extra > 0 && i + static_cast<size_t>(extra) >= text.size()) extra = 0;

    bool ok = extra > 0;
    for (int k = 1; k <= extra && ok; ++k) {
      const unsigned char cc = static_cast<unsigned char>(text[i + static_cast<size_t>(k)]);
      if ((cc & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (cc & 0x3Fu);
    }
    if (extra > 0 && ok) {
      out.push_back(cp);
      i += static_cast<size_t>(extra) + 1;
    } else {
      // Invalid or truncated sequence: take the raw byte as one unit.
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

int levenshtein(std::span<const char32_t> a, std::span<const char32_t> b) {
  return levenshtein_impl(a, b);
}

int levenshtein(std::span<const int> a, std::span<const int> b) {
  return levenshtein_impl(a, b);
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
  const std::vector<char32_t> ca = decode_utf8(a);
  const std::vector<char32_t> cb = decode_utf8(b);
  const size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(ca, cb)) / static_cast<double>(longest);
}

// ---------------------------------------------------------------------------
// Zhang-Shasha tree edit distance

namespace {

struct FlatTree {
  std::vector<const std::string*> labels;  // postorder
  std::vector<int> lld;                    // leftmost leaf descendant, postorder index
  std::vector<int> keyroots;
};

void flatten_postorder(const TreeNode& node, FlatTree& out, int& leftmost) {
  int my_leftmost = -1;
  for (const TreeNode& child : node.children) {
    int child_leftmost = -1;
    flatten_postorder(child, out, child_leftmost);
    if (my_leftmost < 0) my_leftmost = child_leftmost;
  }
  const int index = static_cast<int>(out.labels.size());
  if (my_leftmost < 0) my_leftmost = index;
  out.labels.push_back(&node.label);
  out.lld.push_back(my_leftmost);
  leftmost = my_leftmost;
}

FlatTree flatten(const TreeNode& root) {
  FlatTree flat;
  int leftmost = -1;
  flatten_postorder(root, flat, leftmost);
  // Keyroots: nodes with no later node sharing their leftmost leaf.
  const int n = static_cast<int>(flat.labels.size());
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[static_cast<size_t>(flat.lld[static_cast<size_t>(i)])]) {
      flat.keyroots.push_back(i);
      seen[static_cast<size_t>(flat.lld[static_cast<size_t>(i)])] = true;
    }
  }
  std::sort(flat.keyroots.begin(), flat.keyroots.end());
  return flat;
}

}  // namespace

int tree_edit_distance(const TreeNode& a, const TreeNode& b) {
  const FlatTree t1 = flatten(a);
  const FlatTree t2 = flatten(b);
  const int n1 = static_cast<int>(t1.labels.size());
  const int n2 = static_cast<int>(t2.labels.size());

  std::vector<std::vector<int>> td(static_cast<size_t>(n1),
                                   std::vector<int>(static_cast<size_t>(n2), 0));
  std::vector<std::vector<int>> fd(static_cast<size_t>(n1) + 1,
                                   std::vector<int>(static_cast<size_t>(n2) + 1, 0));

  auto rename_cost = [&](int i, int j) {
    return *t1.labels[static_cast<size_t>(i)] == *t2.labels[static_cast<size_t>(j)] ? 0 : 1;
  };

  for (int ki : t1.keyroots) {
    for (int kj : t2.keyroots) {
      const int li = t1.lld[static_cast<size_t>(ki)];
      const int lj = t2.lld[static_cast<size_t>(kj)];
      fd[0][0] = 0;
      for (int di = li; di <= ki; ++di) fd[di - li + 1][0] = fd[di - li][0] + 1;
      for (int dj = lj; dj <= kj; ++dj) fd[0][dj - lj + 1] = fd[0][dj - lj] + 1;
      for (int di = li; di <= ki; ++di) {
        for (int dj = lj; dj <= kj; ++dj) {
          const int fi = di - li + 1, fj = dj - lj + 1;
          if (t1.lld[static_cast<size_t>(di)] == li && t2.lld[static_cast<size_t>(dj)] == lj) {
            fd[fi][fj] = std::min({fd[fi - 1][fj] + 1, fd[fi][fj - 1] + 1,
                                   fd[fi - 1][fj - 1] + rename_cost(di, dj)});
            td[static_cast<size_t>(di)][static_cast<size_t>(dj)] = fd[fi][fj];
          } else {
            const int pi = t1.lld[static_cast<size_t>(di)] - li;
            const int pj = t2.lld[static_cast<size_t>(dj)] - lj;
            fd[fi][fj] = std::min({fd[fi - 1][fj] + 1, fd[fi][fj - 1] + 1,
                                   fd[pi][pj] + td[static_cast<size_t>(di)][static_cast<size_t>(dj)]});
          }
        }
      }
    }
  }
  return td[static_cast<size_t>(n1 - 1)][static_cast<size_t>(n2 - 1)];
}

// ---------------------------------------------------------------------------
// Table HTML parsing

namespace {

std::string normalize_space(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += ch;
    }
  }
  return out;
}

std::string decode_entities(std::string_view text) {
  static const std::array<std::pair<std::string_view, char>, 5> kEntities = {{
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''},
  }};
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      bool replaced = false;
      for (auto& [name, ch] : kEntities) {
        if (text.substr(i, name.size()) == name) {
          out += ch;
          i += name.size();
          replaced = true;
          break;
        }
      }
      if (text.substr(i, 6) == "&nbsp;") {
        out += ' ';
        i += 6;
        replaced = true;
      }
      if (replaced) continue;
    }
    out += text[i++];
  }
  return out;
}

struct HtmlTag {
  std::string name;
  bool closing = false;
  int colspan = 1;
  int rowspan = 1;
};

int parse_span_attr(std::string_view attrs, std::string_view key) {
  size_t pos = attrs.find(key);
  if (pos == std::string_view::npos) return 1;
  pos = attrs.find_first_of("0123456789", pos + key.size());
  if (pos == std::string_view::npos) return 1;
  int value = 0;
  while (pos < attrs.size() && std::isdigit(static_cast<unsigned char>(attrs[pos])))
    value = value * 10 + (attrs[pos++] - '0');
  return std::max(value, 1);  // spans are at least 1
}

HtmlTag parse_tag(std::string_view body) {
  HtmlTag tag;
  if (!body.empty() && body.front() == '/') {
    tag.closing = true;
    body.remove_prefix(1);
  }
  size_t name_end = 0;
  while (name_end < body.size() && std::isalnum(static_cast<unsigned char>(body[name_end])))
    ++name_end;
  tag.name = std::string(body.substr(0, name_end));
  std::transform(tag.name.begin(), tag.name.end(), tag.name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string_view attrs = body.substr(name_end);
  tag.colspan = parse_span_attr(attrs, "colspan");
  tag.rowspan = parse_span_attr(attrs, "rowspan");
  return tag;
}

std::string cell_label(const HtmlTag& tag, const std::string& text, bool include_text) {
  std::string label = tag.name + "[" + std::to_string(tag.colspan) + "," +
                      std::to_string(tag.rowspan) + "]";
  if (include_text) {
    label += ':';
    label += text;
  }
  return label;
}

}  // namespace

std::optional<TreeNode> parse_table_tree(std::string_view html, bool include_text) {
  TreeNode root{"table", {}};
  bool in_table = false;
  bool done = false;

  // Open structural context. Cells collect text until closed.
  TreeNode* group = nullptr;  // thead/tbody, directly under root
  TreeNode* row = nullptr;
  bool in_cell = false;
  HtmlTag cell_tag;
  std::string cell_text;

  auto rows_parent = [&]() -> TreeNode& { return group ? *group : root; };
  auto close_cell = [&]() {
    if (!in_cell || !row) { in_cell = false; return; }
    row->children.push_back(
        TreeNode{cell_label(cell_tag, normalize_space(decode_entities(cell_text)), include_text), {}});
    in_cell = false;
    cell_text.clear();
  };
  auto close_row = [&]() {
    close_cell();
    row = nullptr;
  };
  auto close_group = [&]() {
    close_row();
    group = nullptr;
  };

  size_t i = 0;
  while (i < html.size() && !done) {
    if (html[i] != '<') {
      if (in_table && in_cell) cell_text += html[i];
      ++i;
      continue;
    }
    const size_t end = html.find('>', i);
    if (end == std::string_view::npos) break;
    HtmlTag tag = parse_tag(html.substr(i + 1, end - i - 1));
    i = end + 1;

    if (!in_table) {
      if (!tag.closing && tag.name == "table") in_table = true;
      continue;
    }
    if (tag.name == "table") {
      if (tag.closing) { close_group(); done = true; }
      // A nested opening <table> inside a cell is out of scope; ignored.
    } else if (tag.name == "thead" || tag.name == "tbody") {
      close_group();
      if (!tag.closing) {
        root.children.push_back(TreeNode{tag.name, {}});
        group = &root.children.back();
      }
    } else if (tag.name == "tr") {
      close_row();
      if (!tag.closing) {
        rows_parent().children.push_back(TreeNode{"tr", {}});
        row = &rows_parent().children.back();
      }
    } else if (tag.name == "td" || tag.name == "th") {
      close_cell();
      if (!tag.closing && row) {
        in_cell = true;
        cell_tag = tag;
        cell_text.clear();
      }
    }
    // Other tags (b, i, span, br, ...) are formatting: dropped, text kept.
  }

  if (!in_table) return std::nullopt;
  close_group();
  return root;
}

namespace {

int tree_size(const TreeNode& node) {
  int n = 1;
  for (const TreeNode& child : node.children) n += tree_size(child);
  return n;
}

double teds_impl(std::string_view pred_html, std::string_view gt_html, bool include_text) {
  const auto pred = parse_table_tree(pred_html, include_text);
  const auto gt = parse_table_tree(gt_html, include_text);
  // A parse failure behaves as an empty tree.
  const int n_pred = pred ? tree_size(*pred) : 0;
  const int n_gt = gt ? tree_size(*gt) : 0;
  const int largest = std::max(n_pred, n_gt);
  if (largest == 0) return 1.0;
  if (!pred || !gt) return 0.0;
  const int dist = tree_edit_distance(*pred, *gt);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(largest);
}

}  // namespace

double teds(std::string_view pred_html, std::string_view gt_html) {
  return teds_impl(pred_html, gt_html, true);
}

double teds_s(std::string_view pred_html, std::string_view gt_html) {
  return teds_impl(pred_html, gt_html, false);
}

// ---------------------------------------------------------------------------
// Formula tokens

std::vector<std::string> tokenize_latex(std::string_view latex) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < latex.size()) {
    const unsigned char c = static_cast<unsigned char>(latex[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '\\') {
      size_t j = i + 1;
      while (j < latex.size() && std::isalpha(static_cast<unsigned char>(latex[j]))) ++j;
      if (j == i + 1 && j < latex.size()) ++j;  // escaped symbol like \{ or \,
      tokens.emplace_back(latex.substr(i, j - i));
      i = j;
      continue;
    }
    // One code point per token so Unicode math symbols stay intact.
    size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, latex.size() - i);
    tokens.emplace_back(latex.substr(i, len));
    i += len;
  }
  return tokens;
}

double formula_token_score(std::string_view pred_latex, std::string_view gt_latex) {
  const auto pred_tokens = tokenize_latex(pred_latex);
  const auto gt_tokens = tokenize_latex(gt_latex);
  const size_t longest = std::max(pred_tokens.size(), gt_tokens.size());
  if (longest == 0) return 100.0;

  std::map<std::string, int> ids;
  auto to_ids = [&](const std::vector<std::string>& tokens) {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens)
      out.push_back(ids.emplace(t, static_cast<int>(ids.size())).first->second);
    return out;
  };
  const std::vector<int> a = to_ids(pred_tokens);
  const std::vector<int> b = to_ids(gt_tokens);
  const double dist = static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
  return 100.0 * (1.0 - dist);
}

// ---------------------------------------------------------------------------
// Matching and reading order

double iou(const BBox& a, const BBox& b) {
  const long long ix = std::max(0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const long long iy = std::max(0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const long long inter = ix * iy;
  if (inter == 0) return 0.0;
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Matching match_elements(std::span<const LayoutElement> pred,
                        std::span<const LayoutElement> gt, double threshold) {
  struct Candidate {
    double score;
    int pred_idx;
    int gt_idx;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
    for (int g = 0; g < static_cast<int>(gt.size()); ++g) {
      const double score = iou(pred[static_cast<size_t>(p)].bbox, gt[static_cast<size_t>(g)].bbox);
      if (score >= threshold) candidates.push_back({score, p, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.gt_idx != b.gt_idx) return a.gt_idx < b.gt_idx;
    return a.pred_idx < b.pred_idx;
  });

  Matching result;
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const Candidate& c : candidates) {
    if (pred_used[static_cast<size_t>(c.pred_idx)] || gt_used[static_cast<size_t>(c.gt_idx)]) continue;
    pred_used[static_cast<size_t>(c.pred_idx)] = true;
    gt_used[static_cast<size_t>(c.gt_idx)] = true;
    result.pairs.emplace_back(c.pred_idx, c.gt_idx);
  }
  for (int p = 0; p < static_cast<int>(pred.size()); ++p)
    if (!pred_used[static_cast<size_t>(p)]) result.unmatched_pred.push_back(p);
  for (int g = 0; g < static_cast<int>(gt.size()); ++g)
    if (!gt_used[static_cast<size_t>(g)]) result.unmatched_gt.push_back(g);
  return result;
}

double reading_order_edit(const StageOneResult& pred, const StageOneResult& gt) {
  if (pred.doc_type != DocumentType::Digital || gt.doc_type != DocumentType::Digital)
    raise(Errc::BothMustBeDigital, "reading order is defined for digital pages only");

  const Matching matching = match_elements(pred.elements, gt.elements);

  // gt order index per matched pred element, walked in predicted order.
  std::vector<int> gt_of_pred(pred.elements.size(), -1);
  for (auto [p, g] : matching.pairs)
    gt_of_pred[static_cast<size_t>(p)] = gt.elements[static_cast<size_t>(g)].order;

  std::vector<int> predicted_seq;
  std::vector<int> sorted_pred(pred.elements.size());
  std::iota(sorted_pred.begin(), sorted_pred.end(), 0);
  std::sort(sorted_pred.begin(), sorted_pred.end(), [&](int a, int b) {
    return pred.elements[static_cast<size_t>(a)].order < pred.elements[static_cast<size_t>(b)].order;
  });
  for (int p : sorted_pred)
    if (gt_of_pred[static_cast<size_t>(p)] >= 0) predicted_seq.push_back(gt_of_pred[static_cast<size_t>(p)]);

  std::vector<int> target(gt.elements.size());
  std::iota(target.begin(), target.end(), 0);

  const size_t longest = std::max(predicted_seq.size(), target.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(std::span<const int>(predicted_seq),
                                         std::span<const int>(target))) /
         static_cast<double>(longest);
}

// ---------------------------------------------------------------------------
// Aggregation

EvalReport aggregate(std::vector<DocScores> per_document) {
  if (per_document.empty()) raise(Errc::EmptyInput, "no documents to aggregate");

  EvalReport report;
  report.aggregate.id = "aggregate";

  auto mean_of = [&](std::optional<double> DocScores::*field) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const DocScores& doc : per_document) {
      if (doc.*field) {
        sum += *(doc.*field);
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };

  report.aggregate.text_edit = mean_of(&DocScores::text_edit);
  report.aggregate.formula_score = mean_of(&DocScores::formula_score);
  report.aggregate.table_teds = mean_of(&DocScores::table_teds);
  report.aggregate.table_teds_s = mean_of(&DocScores::table_teds_s);
  report.aggregate.order_edit = mean_of(&DocScores::order_edit);

  double sum = 0.0;
  int parts = 0;
  if (report.aggregate.text_edit) { sum += 100.0 * (1.0 - *report.aggregate.text_edit); ++parts; }
  if (report.aggregate.formula_score) { sum += *report.aggregate.formula_score; ++parts; }
  if (report.aggregate.table_teds) { sum += *report.aggregate.table_teds; ++parts; }
  if (report.aggregate.order_edit) { sum += 100.0 * (1.0 - *report.aggregate.order_edit); ++parts; }
  if (parts > 0) report.overall = sum / parts;

  report.per_document = std::move(per_document);
  return report;
}

}  // namespace anchordoc::metrics
