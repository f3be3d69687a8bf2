#include <doctest.h>

#include <functional>
#include <random>

#include "anchordoc/layout.hpp"
#include "oracles.hpp"

using namespace anchordoc;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("parse: two-element digital sequence") {
  const auto parsed =
      parse_layout_sequence("digital document\n[sec_0] 100,40,800,90\n[para] 100,120,800,400",
                            896, 1280);
  const StageOneResult& r = parsed.result;
  CHECK(r.doc_type == DocumentType::Digital);
  REQUIRE(r.elements.size() == 2);
  CHECK(r.elements[0].label == SemanticLabel::Sec0);
  CHECK(r.elements[0].order == 0);
  CHECK(r.elements[0].bbox == BBox{100, 40, 800, 90});
  CHECK(r.elements[1].label == SemanticLabel::Para);
  CHECK(r.elements[1].order == 1);
  CHECK(parsed.warnings.empty());
}

TEST_CASE("parse: photographed terminates with no elements") {
  const auto parsed = parse_layout_sequence("photographed document", 896, 1280);
  CHECK(parsed.result.doc_type == DocumentType::Photographed);
  CHECK(parsed.result.elements.empty());
}

TEST_CASE("parse: attributes attach to elements") {
  const auto parsed =
      parse_layout_sequence("digital document\n[para]{author,meta_doi} 10,20,30,40", 100, 100);
  REQUIRE(parsed.result.elements.size() == 1);
  CHECK(parsed.result.elements[0].attrs ==
        std::vector<AttributeTag>{AttributeTag::Author, AttributeTag::MetaDoi});
}

TEST_CASE("parse: duplicate attributes collapse to a set") {
  const auto parsed =
      parse_layout_sequence("digital document\n[para]{author,author} 10,20,30,40", 100, 100);
  CHECK(parsed.result.elements[0].attrs == std::vector<AttributeTag>{AttributeTag::Author});
}

TEST_CASE("parse: typed errors") {
  CHECK(code_of([] { parse_layout_sequence("scanned document", 100, 100); }) ==
        Errc::UnknownDocType);
  CHECK(code_of([] { parse_layout_sequence("", 100, 100); }) == Errc::UnknownDocType);
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[figure] 1,2,3,4", 100, 100);
        }) == Errc::UnknownLabel);
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para]{writer} 1,2,3,4", 100, 100);
        }) == Errc::UnknownAttribute);
  // zero width box
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para] 100,400,100,500", 896, 1280);
        }) == Errc::MalformedBBox);
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para] 1,2,x,4", 100, 100);
        }) == Errc::MalformedBBox);
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para] 1,2,3", 100, 100);
        }) == Errc::MalformedBBox);
  CHECK(code_of([] {
          parse_layout_sequence("photographed document\n[para] 1,2,3,4", 100, 100);
        }) == Errc::InvalidResult);
}

TEST_CASE("parse: marginal overshoot clamps with a warning") {
  const auto parsed = parse_layout_sequence("digital document\n[para] 100,100,950,400", 896, 1280);
  CHECK(parsed.result.elements[0].bbox.x2 == 896);
  REQUIRE(parsed.warnings.size() == 1);
  CHECK(parsed.warnings[0].find("clamped") != std::string::npos);

  // More than one page dimension out of bounds is rejected.
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para] 100,100,1800,400", 896, 1280);
        }) == Errc::MalformedBBox);
  // Fully outside the page degenerates after clamping.
  CHECK(code_of([] {
          parse_layout_sequence("digital document\n[para] 900,100,1000,400", 896, 1280);
        }) == Errc::MalformedBBox);
}

TEST_CASE("parse: totality on arbitrary bytes") {
  std::mt19937 rng(99);
  for (int i = 0; i < 500; ++i) {
    std::string junk;
    const int len = static_cast<int>(rng() % 120);
    for (int k = 0; k < len; ++k) junk += static_cast<char>(rng() % 256);
    try {
      parse_layout_sequence(junk, 100, 100);
    } catch (const Error&) {
      // typed errors are the contract; anything else would fail the test
    }
  }
}

TEST_CASE("serialize: canonical forms") {
  StageOneResult photo;
  photo.doc_type = DocumentType::Photographed;
  photo.page_w = 100;
  photo.page_h = 100;
  CHECK(serialize_layout_sequence(photo) == "photographed document");

  StageOneResult digital;
  digital.page_w = 50;
  digital.page_h = 50;
  digital.elements.push_back({SemanticLabel::Para, {10, 20, 30, 40}, {AttributeTag::Author}, 0});
  CHECK(serialize_layout_sequence(digital) == "digital document\n[para]{author} 10,20,30,40");
}

TEST_CASE("serialize: invariant violations are rejected") {
  StageOneResult bad;
  bad.page_w = 100;
  bad.page_h = 100;
  bad.elements.push_back({SemanticLabel::Para, {1, 1, 5, 5}, {}, 1});
  bad.elements.push_back({SemanticLabel::Para, {6, 6, 9, 9}, {}, 1});
  CHECK(code_of([&] { serialize_layout_sequence(bad); }) == Errc::InvalidResult);
}

TEST_CASE("round-trip: random results survive serialize then parse") {
  std::mt19937 rng(4242);
  for (int i = 0; i < 300; ++i) {
    const StageOneResult r = oracles::random_stage_one(rng);
    const auto back = parse_layout_sequence(serialize_layout_sequence(r), r.page_w, r.page_h);
    CHECK(back.result == r);
    CHECK(back.warnings.empty());
  }
}

TEST_CASE("order preservation matches line order") {
  const auto parsed = parse_layout_sequence(
      "digital document\n[cap] 1,1,2,2\n[tab] 3,3,4,4\n[equ] 5,5,6,6", 10, 10);
  REQUIRE(parsed.result.elements.size() == 3);
  CHECK(parsed.result.elements[0].label == SemanticLabel::Cap);
  CHECK(parsed.result.elements[1].label == SemanticLabel::Tab);
  CHECK(parsed.result.elements[2].label == SemanticLabel::Equ);
  for (int i = 0; i < 3; ++i) CHECK(parsed.result.elements[static_cast<size_t>(i)].order == i);
}

TEST_CASE("label and attribute vocabularies are closed") {
  CHECK(parse_label("para").has_value());
  CHECK(parse_label("sec_5").has_value());
  CHECK(!parse_label("sec_6").has_value());
  CHECK(!parse_label("paragraph").has_value());
  CHECK(parse_attribute("page_num").has_value());
  CHECK(!parse_attribute("pagenum").has_value());
  // every name maps back to itself
  for (int i = 0; i < kSemanticLabelCount; ++i) {
    const auto label = static_cast<SemanticLabel>(i);
    CHECK(parse_label(to_string(label)) == label);
  }
  for (int i = 0; i < kAttributeTagCount; ++i) {
    const auto tag = static_cast<AttributeTag>(i);
    CHECK(parse_attribute(to_string(tag)) == tag);
  }
}

TEST_CASE("convert_normalized_bbox") {
  CHECK(convert_normalized_bbox(0.50, 0.50, 0.75, 0.75, 896, 896) == BBox{448, 448, 672, 672});
  CHECK(convert_normalized_bbox(0.0, 0.0, 1.0, 1.0, 640, 480) == BBox{0, 0, 640, 480});
  // one quantization step on width 896 lands 9 pixels away
  const BBox step = convert_normalized_bbox(0.0, 0.0, 0.01, 0.01, 896, 896);
  CHECK(step.x2 == 9);
  CHECK(code_of([] { convert_normalized_bbox(-0.1, 0, 1, 1, 100, 100); }) == Errc::OutOfRange);
  CHECK(code_of([] { convert_normalized_bbox(0, 0, 1.2, 1, 100, 100); }) == Errc::OutOfRange);
  CHECK(code_of([] { convert_normalized_bbox(0.5, 0.0, 0.5001, 1.0, 896, 896); }) ==
        Errc::MalformedBBox);
}

TEST_CASE("validate_layout reports every violation") {
  StageOneResult r;
  r.page_w = 100;
  r.page_h = 100;
  r.elements.push_back({SemanticLabel::Para, {0, 0, 10, 10}, {}, 0});
  r.elements.push_back({SemanticLabel::Para, {0, 20, 10, 30}, {}, 1});
  r.elements.push_back({SemanticLabel::Para, {0, 40, 10, 50}, {}, 2});
  CHECK(validate_layout(r).empty());

  SUBCASE("duplicate order") {
    r.elements[2].order = 1;
    const auto violations = validate_layout(r);
    bool found_duplicate = false;
    for (const auto& v : violations)
      if (v.kind == LayoutViolation::Kind::OrderDuplicate) found_duplicate = true;
    CHECK(found_duplicate);
  }
  SUBCASE("out of bounds") {
    r.elements[1].bbox = {60, 20, 150, 30};  // 50 px past the right edge
    const auto violations = validate_layout(r);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == LayoutViolation::Kind::OutOfBounds);
    CHECK(violations[0].element_index == 1);
  }
  SUBCASE("photographed with elements") {
    r.doc_type = DocumentType::Photographed;
    const auto violations = validate_layout(r);
    CHECK(!violations.empty());
    CHECK(violations[0].kind == LayoutViolation::Kind::PhotographedNonEmpty);
  }
  SUBCASE("non-canonical attrs") {
    r.elements[0].attrs = {AttributeTag::MetaDoi, AttributeTag::Author};
    const auto violations = validate_layout(r);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == LayoutViolation::Kind::AttrsNotCanonical);
  }
  SUBCASE("order gap") {
    r.elements[2].order = 5;
    bool found_gap = false;
    for (const auto& v : validate_layout(r))
      if (v.kind == LayoutViolation::Kind::OrderGap) found_gap = true;
    CHECK(found_gap);
  }
}
