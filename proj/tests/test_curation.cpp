#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "sialign/curation.hpp"
#include "sialign/error.hpp"

using namespace sialign;
using testing::TempDir;

namespace {

std::vector<AnnotationRecord> exported() {
  static const auto d1 = testing::doc({"a", "b", "c"}, {"x", "y", "z"}, "t1");
  static const auto d2 = testing::doc({"p", "q"}, {"u", "v"}, "t2");
  std::vector<AnnotationSource> src{
      {&d2, {{{1, 1}, {1, 1}, 0.1}}},
      {&d1, {{{2, 1}, {2, 1}, 0.1}, {{0, 1}, {0, 2}, 0.2}, {{1, 1}, {2, 1}, 0.3}}},
      {&d2, {{{0, 1}, {0, 1}, 0.1}}}};
  return export_annotations(src);
}

std::filesystem::path write_tsv(const TempDir& tmp, const std::vector<AnnotationRecord>& recs) {
  const auto p = tmp.path / "anno.tsv";
  write_file_atomic(p, annotations_tsv(recs));
  return p;
}

}  // namespace

TEST_CASE("export produces sorted unlabeled records") {
  const auto recs = exported();
  REQUIRE(recs.size() == 5);
  for (const auto& r : recs) {
    CHECK_FALSE(r.good_align.has_value());
    CHECK_FALSE(r.good_mt.has_value());
    CHECK_FALSE(r.edited_target.has_value());
  }
  CHECK(std::is_sorted(recs.begin(), recs.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return std::tie(a.talk_id, a.src, a.tgt) < std::tie(b.talk_id, b.src, b.tgt);
  }));
  CHECK(recs[0].target_text == "x y");
}

TEST_CASE("export then parse round-trips") {
  TempDir tmp("anno_rt");
  const auto recs = exported();
  const auto back = parse_annotations(write_tsv(tmp, recs));
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].talk_id == recs[i].talk_id);
    CHECK(back[i].src == recs[i].src);
    CHECK(back[i].tgt == recs[i].tgt);
    CHECK(back[i].target_text == recs[i].target_text);
  }
}

TEST_CASE("label combinations") {
  AnnotationRecord r{"t", {0, 1}, {0, 1}, "a", "b", {}, {}, {}};
  CHECK_NOTHROW(validate_record(r));
  r.good_mt = false;
  CHECK_THROWS_AS(validate_record(r), ValidationError);
  r.good_mt = true;
  CHECK_THROWS_AS(validate_record(r), ValidationError);
  r.good_align = false;
  CHECK_THROWS_AS(validate_record(r), ValidationError);
  r.good_mt = false;
  CHECK_NOTHROW(validate_record(r));
  r.good_align = true;
  r.edited_target = " \t";
  CHECK_THROWS_AS(validate_record(r), ValidationError);
}

TEST_CASE("import keeps only good/good and applies edits") {
  TempDir tmp("anno_import");
  auto recs = exported();
  recs[0].good_align = true, recs[0].good_mt = true;
  recs[1].good_align = true, recs[1].good_mt = false;
  recs[2].good_align = false, recs[2].good_mt = false;
  recs[3].good_align = true, recs[3].good_mt = true, recs[3].edited_target = "  fixed   text ";
  std::shuffle(recs.begin(), recs.end(), std::mt19937_64(5));
  const auto r = import_annotations(write_tsv(tmp, recs));
  REQUIRE(r.curated.size() == 2);
  CHECK(r.edited == 1);
  CHECK(r.label_counts.at("true/true") == 2);
  CHECK(r.label_counts.at("true/false") == 1);
  CHECK(r.label_counts.at("false/false") == 1);
  CHECK(r.label_counts.at("unset/unset") == 1);
  const auto edited = std::find_if(r.curated.begin(), r.curated.end(),
                                   [](const CuratedPair& c) { return c.target_text == "fixed text"; });
  CHECK(edited != r.curated.end());
}

TEST_CASE("import checks spans against documents") {
  TempDir tmp("anno_docs");
  std::map<std::string, DocumentPair> docs{{"t1", testing::doc({"a"}, {"x"}, "t1")}};
  std::vector<AnnotationRecord> recs{{"t1", {0, 1}, {0, 1}, "edited src", "edited tgt", true, true, {}}};
  const auto ok = import_annotations(write_tsv(tmp, recs), &docs);
  REQUIRE(ok.curated.size() == 1);
  CHECK(ok.curated[0].target_text == "x");
  recs[0].tgt = {0, 3};
  CHECK_THROWS_AS(import_annotations(write_tsv(tmp, recs), &docs), ValidationError);
  recs[0].talk_id = "other";
  CHECK_THROWS_AS(import_annotations(write_tsv(tmp, recs), &docs), ValidationError);
}

TEST_CASE("malformed annotation files name the line") {
  TempDir tmp("anno_bad");
  const std::string head = std::string(kAnnotationHeader) + "\n";
  const std::string good = "t\t0\t1\t0\t1\ta\tb\t\t\t\n";
  SUBCASE("column count") {
    write_file_atomic(tmp.path / "a.tsv", head + good + "t\t0\t1\n");
    try {
      parse_annotations(tmp.path / "a.tsv");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("bad label") {
    write_file_atomic(tmp.path / "a.tsv", head + "t\t0\t1\t0\t1\ta\tb\tyes\t\t\n");
    CHECK_THROWS_WITH_AS(parse_annotations(tmp.path / "a.tsv"), doctest::Contains(":2:"), ValidationError);
  }
  SUBCASE("good_mt without good_align") {
    write_file_atomic(tmp.path / "a.tsv", head + good + good + "t\t0\t1\t0\t1\ta\tb\t\ttrue\t\n");
    CHECK_THROWS_WITH_AS(parse_annotations(tmp.path / "a.tsv"), doctest::Contains(":4:"), ValidationError);
  }
  SUBCASE("header") {
    write_file_atomic(tmp.path / "a.tsv", good);
    CHECK_THROWS_AS(parse_annotations(tmp.path / "a.tsv"), ParseError);
  }
}
