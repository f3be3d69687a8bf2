// Acceptance suite: one check per release criterion, one pass/fail line
// each. Exits nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "anchordoc/assembler.hpp"
#include "anchordoc/datagen.hpp"
#include "anchordoc/evaluate.hpp"
#include "anchordoc/pipeline.hpp"
#include "anchordoc/serialize.hpp"
#include "oracles.hpp"

using namespace anchordoc;
namespace fs = std::filesystem;

namespace {

struct CheckFailure {
  std::string message;
};

#define ACHECK(cond, ...)                                                         \
  do {                                                                            \
    if (!(cond)) {                                                                \
      char buf_[512];                                                             \
      std::snprintf(buf_, sizeof buf_, __VA_ARGS__);                              \
      throw CheckFailure{std::string(#cond) + " failed at line " +                \
                         std::to_string(__LINE__) + ": " + buf_};                 \
    }                                                                             \
  } while (0)

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path scratch_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() / (std::string("anchordoc_accept_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// --------------------------------------------------------------------------

void criterion_grammar_round_trip() {
  std::mt19937 rng(20240501);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 10000; ++i) {
    const StageOneResult r = oracles::random_stage_one(rng);
    const ParsedLayout back = parse_layout_sequence(serialize_layout_sequence(r), r.page_w, r.page_h);
    ACHECK(back.result == r, "round-trip mismatch at case %d", i);
  }
  const double elapsed = seconds_since(start);
  ACHECK(elapsed < 5.0, "10k round trips took %.2f s", elapsed);
}

// --------------------------------------------------------------------------

void criterion_metric_oracles() {
  const auto start = std::chrono::steady_clock::now();

  // All strings over {a,b,c} up to length 8, pairs checked against the
  // full-matrix oracle; the implementation must agree in both argument
  // orders.
  std::vector<std::string> strings = {""};
  for (size_t i = 0; i < strings.size(); ++i)
    if (strings[i].size() < 8)
      for (char c : {'a', 'b', 'c'}) strings.push_back(strings[i] + c);
  const size_t n = strings.size();
  ACHECK(n == 9841, "expected 9841 strings, got %zu", n);

  std::vector<std::vector<char32_t>> decoded(n);
  for (size_t i = 0; i < n; ++i) decoded[i] = metrics::decode_utf8(strings[i]);

  std::atomic<size_t> next{0};
  std::atomic<long long> mismatches{0};
  const unsigned workers = std::max(2u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        const std::span<const char32_t> a(decoded[i]);
        for (size_t j = i; j < n; ++j) {
          const std::span<const char32_t> b(decoded[j]);
          const int want = oracles::edit_distance(strings[i], strings[j]);
          if (metrics::levenshtein(a, b) != want || metrics::levenshtein(b, a) != want)
            mismatches.fetch_add(1);
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  ACHECK(mismatches.load() == 0, "%lld edit-distance mismatches", mismatches.load());

  // Normalized form agrees through the public string interface.
  std::mt19937 rng(5);
  for (int k = 0; k < 5000; ++k) {
    const std::string& a = strings[rng() % n];
    const std::string& b = strings[rng() % n];
    const size_t longest = std::max(a.size(), b.size());
    const double want =
        longest == 0 ? 0.0 : static_cast<double>(oracles::edit_distance(a, b)) / longest;
    ACHECK(std::abs(metrics::normalized_edit_distance(a, b) - want) < 1e-12,
           "normalized mismatch for %s vs %s", a.c_str(), b.c_str());
  }

  // Every labeled tree pair with up to 5 nodes against the exhaustive
  // mapping oracle.
  std::vector<metrics::TreeNode> trees;
  for (int size = 1; size <= 5; ++size) {
    const auto batch = oracles::all_labeled_trees(size, {"a", "b"});
    trees.insert(trees.end(), batch.begin(), batch.end());
  }
  ACHECK(trees.size() == 550, "expected 550 labeled trees, got %zu", trees.size());

  std::atomic<size_t> tree_next{0};
  std::atomic<long long> tree_mismatches{0};
  std::vector<std::thread> tree_pool;
  for (unsigned w = 0; w < workers; ++w) {
    tree_pool.emplace_back([&] {
      for (size_t i = tree_next.fetch_add(1); i < trees.size(); i = tree_next.fetch_add(1))
        for (size_t j = 0; j < trees.size(); ++j)
          if (metrics::tree_edit_distance(trees[i], trees[j]) !=
              oracles::tree_edit_distance(trees[i], trees[j]))
            tree_mismatches.fetch_add(1);
    });
  }
  for (std::thread& t : tree_pool) t.join();
  ACHECK(tree_mismatches.load() == 0, "%lld tree-edit mismatches", tree_mismatches.load());

  // TEDS end to end on small rendered tables against the same oracle.
  std::vector<std::string> tables;
  for (int rows = 1; rows <= 2; ++rows) {
    for (int cells = 1; cells <= 2; ++cells) {
      for (const char* text : {"A", "B"}) {
        std::string html = "<table>";
        for (int r = 0; r < rows; ++r) {
          html += "<tr>";
          for (int c = 0; c < cells; ++c) html += std::string("<td>") + text + "</td>";
          html += "</tr>";
        }
        html += "</table>";
        tables.push_back(html);
      }
    }
  }
  for (const std::string& a : tables) {
    for (const std::string& b : tables) {
      const auto ta = metrics::parse_table_tree(a, true);
      const auto tb = metrics::parse_table_tree(b, true);
      const int dist = oracles::tree_edit_distance(*ta, *tb);
      auto count_nodes = [](const metrics::TreeNode& t) {
        std::function<int(const metrics::TreeNode&)> rec = [&](const metrics::TreeNode& n) {
          int total = 1;
          for (const auto& c : n.children) total += rec(c);
          return total;
        };
        return rec(t);
      };
      const double want = 1.0 - static_cast<double>(dist) /
                                    std::max(count_nodes(*ta), count_nodes(*tb));
      ACHECK(std::abs(metrics::teds(a, b) - want) < 1e-12, "teds disagrees with oracle");
    }
  }

  const double elapsed = seconds_since(start);
  ACHECK(elapsed < 120.0, "oracle equivalence took %.1f s", elapsed);
}

// --------------------------------------------------------------------------

void criterion_known_values() {
  ACHECK(std::abs(metrics::normalized_edit_distance("kitten", "sitting") - 0.428571) < 1e-6,
         "kitten/sitting = %.7f", metrics::normalized_edit_distance("kitten", "sitting"));
  const double one_cell = metrics::teds("<table><tr><td>x</td></tr></table>",
                                        "<table><tr><td>x</td><td>x</td></tr></table>");
  ACHECK(one_cell == 0.75, "single-vs-double cell TEDS = %f", one_cell);

  StageOneResult sorted, swapped;
  sorted.page_w = swapped.page_w = 100;
  sorted.page_h = swapped.page_h = 100;
  sorted.elements = {{SemanticLabel::Para, {0, 0, 50, 40}, {}, 0},
                     {SemanticLabel::Para, {0, 50, 50, 90}, {}, 1}};
  swapped.elements = {{SemanticLabel::Para, {0, 0, 50, 40}, {}, 1},
                      {SemanticLabel::Para, {0, 50, 50, 90}, {}, 0}};
  const double order = metrics::reading_order_edit(swapped, sorted);
  ACHECK(order == 1.0, "swapped order edit = %f", order);
}

// --------------------------------------------------------------------------

// Random page mixing parseable, figure and watermark elements.
datagen::PageSpec random_mixed_spec(std::mt19937& rng, const std::string& id) {
  datagen::PageSpec spec;
  spec.id = id;
  spec.page_w = 600;
  spec.page_h = 900;
  if (rng() % 4 == 0) {
    spec.doc_type = DocumentType::Photographed;
    spec.holistic_text = "page text " + std::to_string(rng() % 1000);
    return spec;
  }
  const int n = 1 + static_cast<int>(rng() % 12);
  static const SemanticLabel kPool[] = {
      SemanticLabel::Para, SemanticLabel::Sec1,      SemanticLabel::Tab,
      SemanticLabel::Equ,  SemanticLabel::Code,      SemanticLabel::Fig,
      SemanticLabel::Cap,  SemanticLabel::Watermark, SemanticLabel::List,
  };
  for (int i = 0; i < n; ++i) {
    LayoutElement el;
    el.label = kPool[rng() % std::size(kPool)];
    el.order = i;
    el.bbox = {10, 10 + 60 * i, 590, 50 + 60 * i};
    spec.elements.push_back(el);
    if (is_parseable(el.label)) {
      std::string content = "content " + std::to_string(i);
      if (el.label == SemanticLabel::Tab) content = "<table><tr><td>" + content + "</td></tr></table>";
      spec.contents[i] = content;
    }
  }
  return spec;
}

void criterion_dispatch_law() {
  std::mt19937 rng(77);
  const fs::path crops = scratch_dir("dispatch");
  for (int page_no = 0; page_no < 200; ++page_no) {
    const datagen::PageSpec spec = random_mixed_spec(rng, "p" + std::to_string(page_no));
    auto backend = std::make_shared<MockBackend>(datagen::emit_fixture(spec));
    PipelineConfig config;
    config.crop_dir = crops;
    const Pipeline pipeline(backend, config);
    pipeline.parse_document(blank_page(spec.page_w, spec.page_h), spec.id);

    const int stage2_calls = backend->total_calls() - 1;  // minus the layout call
    if (spec.doc_type == DocumentType::Photographed) {
      ACHECK(stage2_calls == 1, "photographed page %d made %d stage-2 calls", page_no, stage2_calls);
    } else {
      int parseable = 0;
      for (const LayoutElement& el : spec.elements)
        if (is_parseable(el.label)) ++parseable;
      ACHECK(stage2_calls == parseable, "digital page %d made %d stage-2 calls for %d parseable",
             page_no, stage2_calls, parseable);
    }
  }
}

// --------------------------------------------------------------------------

struct TimedBatch {
  std::shared_ptr<MockBackend> backend;
  std::vector<LayoutElement> elements;
  cv::Mat page;
};

TimedBatch sixteen_slow_elements() {
  TimedBatch batch;
  StageOneResult layout;
  layout.page_w = 400;
  layout.page_h = 1700;
  const PromptTable prompts = PromptTable::defaults();
  FixtureTable table;
  for (int i = 0; i < 16; ++i) {
    layout.elements.push_back({SemanticLabel::Para, {0, i * 100, 200, i * 100 + 50}, {}, i});
    table.insert(element_region_id("t", i), prompts.paragraph, "x", 100);
  }
  table.insert(layout_region_id("t"), prompts.layout, serialize_layout_sequence(layout));
  batch.backend = std::make_shared<MockBackend>(table);
  batch.elements = layout.elements;
  batch.page = blank_page(400, 1700);
  return batch;
}

void criterion_parallel_speedup() {
  TimedBatch batch = sixteen_slow_elements();
  PipelineConfig config;
  config.crop_dir = scratch_dir("speedup");

  config.concurrency = 8;
  {
    const Pipeline pipeline(batch.backend, config);
    const auto start = std::chrono::steady_clock::now();
    pipeline.run_stage2_elements(batch.page, "t", batch.elements);
    const double wall_ms = seconds_since(start) * 1000.0;
    ACHECK(wall_ms <= 400.0, "concurrency 8 wall %.0f ms exceeds the 400 ms bound", wall_ms);
  }
  config.concurrency = 1;
  {
    const Pipeline pipeline(batch.backend, config);
    const auto start = std::chrono::steady_clock::now();
    pipeline.run_stage2_elements(batch.page, "t", batch.elements);
    const double wall_ms = seconds_since(start) * 1000.0;
    ACHECK(wall_ms >= 1600.0, "concurrency 1 wall %.0f ms under the serial bound", wall_ms);
  }
}

// --------------------------------------------------------------------------

void criterion_determinism_under_concurrency() {
  const datagen::GeneratedPage page = datagen::gen_catalog(40, 2, 123, "det");
  auto backend = std::make_shared<MockBackend>(page.fixture);
  PipelineConfig config;
  config.concurrency = 8;
  config.crop_dir = scratch_dir("det");
  const Pipeline pipeline(backend, config);
  const cv::Mat raster = blank_page(page.spec.page_w, page.spec.page_h);

  const std::string first = assemble(pipeline.parse_document(raster, page.spec.id));
  ACHECK(!first.empty(), "empty markdown");
  for (int run = 1; run < 100; ++run) {
    const std::string md = assemble(pipeline.parse_document(raster, page.spec.id));
    ACHECK(md == first, "markdown diverged on run %d", run);
  }
}

// --------------------------------------------------------------------------

struct Corpus {
  fs::path gt;
  fs::path pred;
  std::vector<datagen::GeneratedPage> pages;
};

Corpus build_closed_loop_corpus() {
  Corpus corpus;
  corpus.gt = scratch_dir("loop_gt");
  corpus.pred = scratch_dir("loop_pred");
  char id[32];
  for (int i = 0; i < 20; ++i) {
    std::snprintf(id, sizeof id, "cat%02d", i);
    datagen::Rng rng(static_cast<uint64_t>(i));
    corpus.pages.push_back(
        datagen::gen_catalog(rng.uniform(10, 60), rng.uniform(1, 2), static_cast<uint64_t>(i), id));
  }
  for (int i = 0; i < 20; ++i) {
    std::snprintf(id, sizeof id, "code%02d", i);
    corpus.pages.push_back(datagen::gen_code_page(static_cast<datagen::CodeLanguage>(i % 4),
                                                  static_cast<uint64_t>(100 + i), id));
  }
  for (int i = 0; i < 10; ++i) {
    std::snprintf(id, sizeof id, "photo%02d", i);
    corpus.pages.push_back(datagen::gen_warped_page(static_cast<uint64_t>(200 + i), id));
  }
  return corpus;
}

void parse_corpus_into(const Corpus& corpus, bool classify, const fs::path& pred_dir) {
  for (const datagen::GeneratedPage& page : corpus.pages) {
    auto backend = std::make_shared<MockBackend>(page.fixture);
    PipelineConfig config;
    config.classify = classify;
    config.crop_dir = pred_dir / "crops";
    const Pipeline pipeline(backend, config);
    const DocumentOutput doc =
        pipeline.parse_document(blank_page(page.spec.page_w, page.spec.page_h), page.spec.id);
    write_json_file(pred_dir / (page.spec.id + ".json"), to_json(doc));
  }
}

void criterion_closed_loop() {
  const auto start = std::chrono::steady_clock::now();
  const Corpus corpus = build_closed_loop_corpus();
  for (const datagen::GeneratedPage& page : corpus.pages)
    write_json_file(corpus.gt / (page.spec.id + ".spec.json"), to_json(page.spec));
  parse_corpus_into(corpus, true, corpus.pred);

  const metrics::EvalReport report = metrics::evaluate_directories(corpus.pred, corpus.gt);
  ACHECK(report.per_document.size() == 50, "expected 50 documents, got %zu",
         report.per_document.size());
  for (const metrics::DocScores& doc : report.per_document) {
    ACHECK(doc.text_edit.has_value() && *doc.text_edit == 0.0, "%s text_edit=%f", doc.id.c_str(),
           doc.text_edit.value_or(-1));
    if (doc.order_edit)
      ACHECK(*doc.order_edit == 0.0, "%s order_edit=%f", doc.id.c_str(), *doc.order_edit);
    if (doc.formula_score)
      ACHECK(*doc.formula_score == 100.0, "%s formula=%f", doc.id.c_str(), *doc.formula_score);
    if (doc.table_teds)
      ACHECK(*doc.table_teds == 100.0, "%s teds=%f", doc.id.c_str(), *doc.table_teds);
  }
  ACHECK(report.overall.has_value() && *report.overall == 100.0, "overall=%f",
         report.overall.value_or(-1));

  // A hand-built page keeps the table and formula checks non-vacuous.
  datagen::PageSpec mixed;
  mixed.id = "mixed";
  mixed.page_w = 500;
  mixed.page_h = 700;
  mixed.elements = {
      {SemanticLabel::Sec0, {10, 10, 490, 50}, {}, 0},
      {SemanticLabel::Tab, {10, 70, 490, 200}, {}, 1},
      {SemanticLabel::Equ, {10, 220, 490, 260}, {}, 2},
      {SemanticLabel::Code, {10, 280, 490, 420}, {}, 3},
      {SemanticLabel::Fig, {10, 440, 490, 560}, {}, 4},
  };
  mixed.contents = {
      {0, "Mixed Elements"},
      {1, "<table><thead><tr><th>h</th></tr></thead><tbody><tr><td colspan=\"2\">v</td></tr></tbody></table>"},
      {2, "\\sum_{i=0}^{n} x_i"},
      {3, "def f(n):\n    if n > 0:\n        return n\n    return -n"},
  };
  write_json_file(corpus.gt / "mixed.spec.json", to_json(mixed));
  {
    auto backend = std::make_shared<MockBackend>(datagen::emit_fixture(mixed));
    PipelineConfig config;
    config.crop_dir = corpus.pred / "crops";
    const Pipeline pipeline(backend, config);
    const DocumentOutput doc =
        pipeline.parse_document(blank_page(mixed.page_w, mixed.page_h), mixed.id);
    write_json_file(corpus.pred / "mixed.json", to_json(doc));
  }
  const metrics::EvalReport full = metrics::evaluate_directories(corpus.pred, corpus.gt);
  bool saw_mixed = false;
  for (const metrics::DocScores& doc : full.per_document) {
    if (doc.id != "mixed") continue;
    saw_mixed = true;
    ACHECK(doc.table_teds && *doc.table_teds == 100.0, "mixed teds=%f",
           doc.table_teds.value_or(-1));
    ACHECK(doc.table_teds_s && *doc.table_teds_s == 100.0, "mixed teds_s=%f",
           doc.table_teds_s.value_or(-1));
    ACHECK(doc.formula_score && *doc.formula_score == 100.0, "mixed formula=%f",
           doc.formula_score.value_or(-1));
    ACHECK(doc.text_edit && *doc.text_edit == 0.0, "mixed text=%f", doc.text_edit.value_or(-1));
  }
  ACHECK(saw_mixed, "mixed page missing from the report");
  ACHECK(full.overall.has_value() && *full.overall == 100.0, "overall with mixed=%f",
         full.overall.value_or(-1));

  const double elapsed = seconds_since(start);
  ACHECK(elapsed < 30.0, "closed loop took %.1f s", elapsed);
}

// --------------------------------------------------------------------------

void criterion_code_indentation() {
  for (int i = 0; i < 20; ++i) {
    const auto language = static_cast<datagen::CodeLanguage>(i % 4);
    const datagen::GeneratedPage page =
        datagen::gen_code_page(language, static_cast<uint64_t>(100 + i), "ind" + std::to_string(i));

    std::string gt_code;
    for (const LayoutElement& el : page.spec.elements)
      if (el.label == SemanticLabel::Code) gt_code = page.spec.contents.at(el.order);
    ACHECK(!gt_code.empty(), "page %d has no code element", i);

    auto backend = std::make_shared<MockBackend>(page.fixture);
    PipelineConfig config;
    config.crop_dir = scratch_dir("indent");
    const Pipeline pipeline(backend, config);
    const std::string md = assemble(
        pipeline.parse_document(blank_page(page.spec.page_w, page.spec.page_h), page.spec.id));

    ACHECK(md.find("```\n" + gt_code + "\n```") != std::string::npos,
           "fenced block is not byte-identical on page %d", i);
    std::string_view view(gt_code);
    while (!view.empty()) {
      const size_t nl = view.find('\n');
      const std::string line(view.substr(0, nl));
      ACHECK(md.find("\n" + line + "\n") != std::string::npos,
             "line with leading whitespace missing: '%s'", line.c_str());
      if (nl == std::string_view::npos) break;
      view.remove_prefix(nl + 1);
    }
  }
}

// --------------------------------------------------------------------------

void criterion_prompt_table() {
  const PromptTable defaults = PromptTable::defaults();
  ACHECK(defaults.layout == "Parse the reading order of this document.", "layout prompt differs");
  ACHECK(defaults.holistic == "Read text in the image.", "holistic prompt differs");
  ACHECK(defaults.formula == "Read formula in the image.", "formula prompt differs");
  ACHECK(defaults.code == "Read code in the image.", "code prompt differs");
  ACHECK(defaults.table == "Parse the table in the image.", "table prompt differs");
  ACHECK(defaults.paragraph == "Read text in the image.", "paragraph prompt differs");
}

// --------------------------------------------------------------------------

void criterion_ablation_contrast() {
  Corpus corpus;
  corpus.gt = scratch_dir("abl_gt");
  corpus.pred = scratch_dir("abl_hybrid");
  const fs::path forced_dir = scratch_dir("abl_forced");
  for (int i = 0; i < 10; ++i) {
    corpus.pages.push_back(
        datagen::gen_warped_page(static_cast<uint64_t>(200 + i), "photo" + std::to_string(i)));
    write_json_file(corpus.gt / (corpus.pages.back().spec.id + ".spec.json"),
                    to_json(corpus.pages.back().spec));
  }
  parse_corpus_into(corpus, true, corpus.pred);
  parse_corpus_into(corpus, false, forced_dir);

  const metrics::EvalReport hybrid = metrics::evaluate_directories(corpus.pred, corpus.gt);
  const metrics::EvalReport forced = metrics::evaluate_directories(forced_dir, corpus.gt);
  ACHECK(hybrid.aggregate.text_edit && *hybrid.aggregate.text_edit == 0.0,
         "hybrid text_edit=%f", hybrid.aggregate.text_edit.value_or(-1));
  ACHECK(forced.aggregate.text_edit && *forced.aggregate.text_edit > 0.0,
         "forced text_edit=%f", forced.aggregate.text_edit.value_or(-1));
  for (const metrics::DocScores& doc : forced.per_document)
    ACHECK(doc.text_edit && *doc.text_edit > 0.0, "%s forced text_edit=%f", doc.id.c_str(),
           doc.text_edit.value_or(-1));
}

// --------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* name;
  std::function<void()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "grammar round-trip, 10k randomized results in < 5 s", criterion_grammar_round_trip},
      {2, "edit distance and tree edit match their oracles exhaustively", criterion_metric_oracles},
      {3, "known metric values", criterion_known_values},
      {4, "dispatch law over 200 randomized fixture pages", criterion_dispatch_law},
      {5, "parallel speedup bounds at concurrency 8 and 1", criterion_parallel_speedup},
      {6, "byte-identical markdown across 100 concurrent runs", criterion_determinism_under_concurrency},
      {7, "closed loop: 50 generated pages evaluate to a perfect report", criterion_closed_loop},
      {8, "code indentation preserved byte-for-byte in fenced blocks", criterion_code_indentation},
      {9, "default prompt table matches the published strings", criterion_prompt_table},
      {10, "forcing classification off scores strictly worse on photographed pages",
       criterion_ablation_contrast},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    try {
      criterion.check();
      std::printf("criterion %2d [PASS] %s\n", criterion.number, criterion.name);
    } catch (const CheckFailure& failure) {
      ++failures;
      std::printf("criterion %2d [FAIL] %s\n    %s\n", criterion.number, criterion.name,
                  failure.message.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("criterion %2d [FAIL] %s\n    unexpected exception: %s\n", criterion.number,
                  criterion.name, e.what());
    }
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
