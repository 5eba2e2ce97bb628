#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sialign/coarse_align.hpp"
#include "sialign/error.hpp"
#include "sialign/io.hpp"

using namespace sialign;
using testing::TempDir;

namespace {

EmbeddingTable basis_table(int m, int n, int max_window, const std::vector<int>& src_ids, const std::vector<int>& tgt_ids,
                           int dim = 16) {
  EmbeddingTable t(dim, max_window, m, n);
  for (Side side : {Side::Source, Side::Target}) {
    const auto& ids = side == Side::Source ? src_ids : tgt_ids;
    for (int w = 1; w <= max_window; ++w)
      for (int s = 0; s + w <= t.count(side); ++s) {
        std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
        for (int k = s; k < s + w; ++k) v[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] += 1.0;
        t.set({side, s, w}, v);
      }
  }
  return t;
}

DocumentPair sized_doc(int m, int n) {
  std::vector<std::string> s, t;
  for (int i = 0; i < m; ++i) s.push_back("s" + std::to_string(i));
  for (int i = 0; i < n; ++i) t.push_back("t" + std::to_string(i));
  return testing::doc(s, t);
}

AlignmentSet random_alignment(Rng& rng) {
  AlignmentSet a;
  a.talk_id = "r";
  int i = 0, j = 0;
  for (int k = rng.range(1, 12); k > 0; --k) {
    const int kind = rng.range(0, 3);
    const int sl = kind == 1 ? 0 : rng.range(1, 3);
    const int tl = kind == 2 ? 0 : rng.range(1, 3);
    a.links.push_back({{i, sl}, {j, tl}, rng.uniform() * 2.0});
    i += sl;
    j += tl;
    a.total_cost += a.links.back().cost;
  }
  return a;
}

}  // namespace

TEST_CASE("AlignParams validation") {
  AlignParams p;
  CHECK_NOTHROW(p.validate());
  p.max_src_span = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.prune_cost_threshold = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.skip_penalty = -0.1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.max_tgt_span = 5;
  const auto t = basis_table(2, 2, 4, {0, 1}, {0, 1});
  CHECK_THROWS_AS(p.validate_against(t), ValidationError);
}

TEST_CASE("span scaling names round-trip") {
  CHECK(parse_span_scaling("product") == SpanScaling::Product);
  CHECK(parse_span_scaling("mean") == SpanScaling::Mean);
  CHECK_FALSE(parse_span_scaling("sum").has_value());
}

TEST_CASE("normalization_denominator edge values") {
  SUBCASE("identical embeddings hit the floor") {
    const auto t = basis_table(3, 4, 1, {0, 0, 0}, {0, 0, 0, 0});
    CHECK(normalization_denominator(t, 100, 1) == 1e-6);
  }
  SUBCASE("orthogonal basis gives one") {
    const auto t = basis_table(3, 4, 1, {0, 1, 2}, {3, 4, 5, 6});
    CHECK(std::abs(normalization_denominator(t, 100, 1) - 1.0) < 1e-9);
  }
  SUBCASE("seeded sampler replay") {
    Rng rng(4);
    const auto t = testing::random_table(rng, 32, 1, 7, 9);
    for (std::uint64_t seed : {0ULL, 17ULL, 12345ULL}) {
      CHECK(std::abs(normalization_denominator(t, 100, seed) - oracle::denominator(t, 100, seed)) < 1e-12);
    }
  }
}

TEST_CASE("link_cost definitions") {
  Rng rng(8);
  const auto t = testing::random_table(rng, 16, 3, 4, 5);
  const double denom = 0.8;
  SUBCASE("identical singleton texts cost zero") {
    const auto d = testing::doc({"same words"}, {"same words"});
    const auto ft = build_fallback_table(d, 1, {});
    CHECK(std::abs(link_cost({0, 1}, {0, 1}, ft, 1.0, 0.55)) < 1e-9);
  }
  SUBCASE("skips") {
    CHECK(link_cost({0, 0}, {2, 1}, t, denom, 0.6) == doctest::Approx(0.6));
    CHECK(link_cost({1, 1}, {2, 0}, t, denom, 0.6) == doctest::Approx(0.6));
  }
  SUBCASE("1-2 link under mean scaling pays 1.5") {
    const double c = cosine(t.at({Side::Source, 1, 1}), t.at({Side::Target, 2, 2}));
    const double hand = (1.0 - c) / denom * 1.5;
    CHECK(link_cost({1, 1}, {2, 2}, t, denom, 0.55, SpanScaling::Mean) == doctest::Approx(hand).epsilon(1e-12));
  }
  SUBCASE("1-2 link under product scaling pays 2") {
    const double c = cosine(t.at({Side::Source, 1, 1}), t.at({Side::Target, 2, 2}));
    CHECK(link_cost({1, 1}, {2, 2}, t, denom, 0.55) == doctest::Approx((1.0 - c) / denom * 2.0).epsilon(1e-12));
    CHECK(link_cost({0, 3}, {1, 2}, t, denom, 0.55) ==
          doctest::Approx(oracle::cost({0, 3}, {1, 2}, t, denom, 0.55, SpanScaling::Product)).epsilon(1e-12));
  }
  SUBCASE("span beyond the table") { CHECK_THROWS_AS(link_cost({0, 4}, {0, 1}, t, denom, 0.55), ValidationError); }
}

TEST_CASE("dp_align on perfectly matching documents gives 1-1 links") {
  const int m = 6;
  std::vector<int> ids{0, 1, 2, 3, 4, 5};
  const auto t = basis_table(m, m, 4, ids, ids);
  const auto a = dp_align(sized_doc(m, m), t, {});
  REQUIRE(a.links.size() == static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    CHECK(a.links[static_cast<std::size_t>(i)].src == Span{i, 1});
    CHECK(a.links[static_cast<std::size_t>(i)].tgt == Span{i, 1});
  }
  CHECK(a.total_cost == doctest::Approx(0.0));
}

TEST_CASE("dp_align with an empty target side deletes every source unit") {
  DocumentPair d = sized_doc(3, 1);
  d.target_units.clear();
  EmbeddingTable t(16, 2, 3, 0);
  for (int w = 1; w <= 2; ++w)
    for (int s = 0; s + w <= 3; ++s) {
      std::vector<double> v(16, 0.0);
      v[static_cast<std::size_t>(s)] = 1.0;
      t.set({Side::Source, s, w}, v);
    }
  AlignParams p;
  p.max_src_span = p.max_tgt_span = 2;
  const auto a = dp_align(d, t, p);
  REQUIRE(a.links.size() == 3);
  for (const auto& l : a.links) CHECK(l.tgt.empty());
  CHECK(a.total_cost == doctest::Approx(3 * p.skip_penalty));
}

TEST_CASE("dp_align names a missing window") {
  const auto d = sized_doc(2, 2);
  EmbeddingTable t(16, 2, 2, 2);
  t.set({Side::Source, 0, 1}, std::vector<double>(16, 1.0));
  CHECK_THROWS_WITH_AS(dp_align(d, t, AlignParams{2, 2}), doctest::Contains("(source, 1, 1)"), ValidationError);
}

TEST_CASE("dp_align matches exhaustive enumeration on small instances") {
  Rng rng(2024);
  int unique = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = rng.range(1, 4), n = rng.range(1, 5);
    AlignParams p;
    p.max_src_span = p.max_tgt_span = 3;
    p.norm_sample_size = 50;
    p.span_scaling = trial % 2 ? SpanScaling::Mean : SpanScaling::Product;
    const auto t = testing::random_table(rng, 8, 3, m, n);
    const double denom = oracle::denominator(t, p.norm_sample_size, p.rng_seed);
    const auto segs = oracle::all_segmentations(m, n, t, p, denom);
    double best = 1e300;
    for (const auto& s : segs) best = std::min(best, s.cost);
    const auto a = dp_align(sized_doc(m, n), t, p);
    CHECK(std::abs(a.total_cost - best) < 1e-9);
    int ties = 0;
    const oracle::Segmentation* winner = nullptr;
    for (const auto& s : segs)
      if (s.cost <= best + 1e-9) {
        ++ties;
        winner = &s;
      }
    if (ties == 1) {
      ++unique;
      REQUIRE(winner->links.size() == a.links.size());
      for (std::size_t k = 0; k < a.links.size(); ++k) {
        CHECK(a.links[k].src == winner->links[k].first);
        CHECK(a.links[k].tgt == winner->links[k].second);
      }
    }
  }
  CHECK(unique > 30);
}

TEST_CASE("ties prefer the smaller source span, then the smaller target span") {
  // All windows identical: every non-skip link costs 0, so the cheapest path
  // is chosen by the tie-break alone.
  const auto t = basis_table(2, 2, 2, {0, 0}, {0, 0});
  AlignParams p;
  p.max_src_span = p.max_tgt_span = 2;
  const auto a = dp_align(sized_doc(2, 2), t, p);
  REQUIRE(a.links.size() == 2);
  CHECK(a.links[0].src == Span{0, 1});
  CHECK(a.links[0].tgt == Span{0, 1});
}

TEST_CASE("dp_align output invariants on random inputs") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = rng.range(1, 12), n = rng.range(1, 15);
    const auto t = testing::random_table(rng, 8, 4, m, n);
    AlignParams p;
    const auto a = dp_align(sized_doc(m, n), t, p);
    CHECK_NOTHROW(validate_alignment(a, m, n));
    CHECK(a.total_cost <= (m + n) * p.skip_penalty + 1e-9);
    double sum = 0;
    for (const auto& l : a.links) sum += l.cost;
    CHECK(std::abs(sum - a.total_cost) < 1e-9);
  }
}

TEST_CASE("validate_alignment catches broken sets") {
  AlignmentSet a;
  a.links = {{{0, 1}, {0, 1}, 0.1}, {{1, 1}, {2, 1}, 0.2}};
  a.total_cost = 0.3;
  CHECK_THROWS_AS(validate_alignment(a, 2, 3), ValidationError);  // target 1 uncovered
  a.links = {{{0, 1}, {0, 1}, 0.1}, {{1, 1}, {1, 2}, 0.2}};
  CHECK_NOTHROW(validate_alignment(a, 2, 3));
  a.total_cost = 0.5;
  CHECK_THROWS_AS(validate_alignment(a, 2, 3), ValidationError);
  a.total_cost = 0.3;
  a.links.push_back({{2, 0}, {3, 0}, 0.0});
  CHECK_THROWS_AS(validate_alignment(a, 2, 3), ValidationError);
}

TEST_CASE("parallel wavefront equals the serial reference") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = rng.range(20, 60), n = rng.range(20, 80);
    const auto t = testing::random_table(rng, 8, 4, m, n);
    const auto d = sized_doc(m, n);
    const auto a = dp_align(d, t, {});
    const auto b = dp_align_serial(d, t, {});
    CHECK(a.links == b.links);
    CHECK(a.total_cost == b.total_cost);
  }
}

TEST_CASE("dp_align is byte-identical across runs") {
  Rng rng(5);
  const auto t = testing::random_table(rng, 8, 4, 25, 30);
  const auto d = sized_doc(25, 30);
  const auto a = alignment_jsonl("x", unpruned_records(dp_align(d, t, {})));
  const auto b = alignment_jsonl("x", unpruned_records(dp_align(d, t, {})));
  CHECK(a == b);
}

TEST_CASE("prune drops costly and empty links with reasons") {
  AlignmentSet a;
  a.talk_id = "p";
  a.links = {{{0, 1}, {0, 1}, 0.3}, {{1, 1}, {1, 1}, 1.2}, {{2, 1}, {2, 0}, 0.55}, {{3, 1}, {2, 1}, 1.0}};
  const auto r = prune(a, 1.0);
  REQUIRE(r.kept.links.size() == 2);
  CHECK(r.kept.links[0] == a.links[0]);
  CHECK(r.kept.links[1] == a.links[3]);
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[1].drop_reason == "cost");
  CHECK(r.records[2].drop_reason == "empty");
  CHECK_FALSE(r.records[3].dropped);
}

TEST_CASE("prune identity, idempotence, monotonicity and oracle agreement") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_alignment(rng);
    const double t1 = rng.uniform() * 2.0, t2 = t1 + rng.uniform();
    const auto p1 = prune(a, t1).kept, p2 = prune(a, t2).kept;
    std::vector<AlignedPair> expected;
    for (const auto& l : a.links)
      if (!l.src.empty() && !l.tgt.empty() && !(l.cost > t1)) expected.push_back(l);
    CHECK(p1.links == expected);
    CHECK(prune(p1, t1).kept.links == p1.links);
    std::set<std::pair<Span, Span>> s2;
    for (const auto& l : p2.links) s2.insert({l.src, l.tgt});
    for (const auto& l : p1.links) CHECK(s2.count({l.src, l.tgt}) == 1);
  }
  AlignmentSet clean;
  clean.links = {{{0, 1}, {0, 2}, 0.2}, {{1, 2}, {2, 1}, 0.9}};
  CHECK(prune(clean, 1.0).kept.links == clean.links);
}

TEST_CASE("alignment JSON Lines round-trip") {
  TempDir tmp("align_io");
  Rng rng(12);
  const auto a = random_alignment(rng);
  const auto pr = prune(a, 1.0);
  write_file_atomic(tmp.path / "a.jsonl", alignment_jsonl("talkA", pr.records));
  const auto f = read_alignment_jsonl(tmp.path / "a.jsonl");
  CHECK(f.talk_id == "talkA");
  REQUIRE(f.records.size() == pr.records.size());
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    CHECK(f.records[i].link == pr.records[i].link);
    CHECK(f.records[i].dropped == pr.records[i].dropped);
    CHECK(f.records[i].drop_reason == pr.records[i].drop_reason);
  }
  CHECK(f.surviving().links == pr.kept.links);
}
