// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "../helpers.hpp"
#include "../oracles.hpp"
#include "sialign/app.hpp"
#include "sialign/coarse_align.hpp"
#include "sialign/curation.hpp"
#include "sialign/embedding.hpp"
#include "sialign/error.hpp"
#include "sialign/filter_inter.hpp"
#include "sialign/filter_intra.hpp"
#include "sialign/recovery.hpp"
#include "sialign/synth.hpp"

using namespace sialign;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int number, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " (over time limit " + std::to_string(static_cast<int>(limit_s)) + " s)";
  }
  failures += !o.pass;
  std::printf("%s  %d. %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", number, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Minimum over all monotone segmentations, streamed so large instances do
// not materialize every path.
struct Exhaustive {
  double best = 1e300;
  int ties = 0;
  std::vector<std::pair<Span, Span>> argmin;
};

Exhaustive enumerate(int m, int n, const EmbeddingTable& t, const AlignParams& p, double denom) {
  Exhaustive ex;
  std::vector<std::pair<Span, Span>> cur;
  std::function<void(int, int, double)> rec = [&](int i, int j, double acc) {
    if (i == m && j == n) {
      if (acc < ex.best - 1e-9) {
        ex.best = acc;
        ex.ties = 1;
        ex.argmin = cur;
      } else if (acc <= ex.best + 1e-9) {
        ++ex.ties;
        ex.best = std::min(ex.best, acc);
      }
      return;
    }
    for (int a = 0; a <= p.max_src_span && i + a <= m; ++a)
      for (int b = 0; b <= p.max_tgt_span && j + b <= n; ++b) {
        if ((a == 0 && b != 1) || (b == 0 && a != 1)) continue;
        const Span s{i, a}, g{j, b};
        cur.push_back({s, g});
        rec(i + a, j + b, acc + oracle::cost(s, g, t, denom, p.skip_penalty, p.span_scaling));
        cur.pop_back();
      }
  };
  rec(0, 0, 0.0);
  return ex;
}

Outcome dp_optimality() {
  Rng rng(1);
  int unique = 0, mismatched_cost = 0, mismatched_links = 0;
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = rng.range(1, 5), n = rng.range(1, 7);
    std::vector<std::string> src, tgt;
    for (int i = 0; i < m; ++i) src.push_back(testing::sentence(rng, "abcdefgh", rng.range(1, 3)));
    for (int i = 0; i < n; ++i) tgt.push_back(testing::sentence(rng, "abcdefgh", rng.range(1, 2)));
    const auto doc = testing::doc(src, tgt, "dp");
    AlignParams p;
    p.max_src_span = p.max_tgt_span = 3;
    p.norm_sample_size = 200;
    const auto table = build_fallback_table(doc, 3, {});
    const double denom = oracle::denominator(table, p.norm_sample_size, p.rng_seed);
    const auto ex = enumerate(m, n, table, p, denom);
    const auto a = dp_align(doc, table, p);
    const double gap = std::abs(a.total_cost - ex.best);
    worst = std::max(worst, gap);
    if (gap >= 1e-9) ++mismatched_cost;
    if (ex.ties == 1) {
      ++unique;
      bool same = a.links.size() == ex.argmin.size();
      for (std::size_t k = 0; same && k < a.links.size(); ++k)
        same = a.links[k].src == ex.argmin[k].first && a.links[k].tgt == ex.argmin[k].second;
      if (!same) ++mismatched_links;
    }
  }
  return {mismatched_cost == 0 && mismatched_links == 0,
          "200 instances, max |cost gap| " + fmt("%.2e", worst) + ", unique optima " + std::to_string(unique) +
              ", link mismatches " + std::to_string(mismatched_links)};
}

Outcome lcs_oracle() {
  Rng rng(2);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::u32string a, b;
    for (int k = rng.range(0, 40); k > 0; --k) a.push_back(U'a' + static_cast<char32_t>(rng.index(4)));
    for (int k = rng.range(0, 40); k > 0; --k) b.push_back(U'a' + static_cast<char32_t>(rng.index(4)));
    bad += lcs_substring_len(a, b) != oracle::lcs_quadratic(a, b);
  }
  return {bad == 0, "1000 pairs, disagreements " + std::to_string(bad)};
}

NoiseParams clean_shape() {
  NoiseParams n;
  n.split_rate = 0.2;
  n.filler_rate = 0.2;
  return n;
}

struct SynthRun {
  std::vector<SynthTalk> corpus;
  std::vector<AlignmentSet> predicted;
  double f1 = 0;
};

SynthRun synth_run(int talks, const NoiseParams& noise) {
  SynthRun r;
  BenchConfig cfg;
  r.corpus = generate_corpus(cfg.seed, talks, 40, noise, cfg.vocab_size, cfg.max_window);
  r.predicted.resize(r.corpus.size());
  std::vector<AlignmentSet> gold(r.corpus.size());
  const long count = static_cast<long>(r.corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto table = build_fallback_table(r.corpus[i].doc, cfg.max_window, cfg.embed);
    r.predicted[i] = prune(dp_align(r.corpus[i].doc, table, cfg.align), cfg.align.prune_cost_threshold).kept;
  }
  for (std::size_t i = 0; i < r.corpus.size(); ++i) gold[i] = r.corpus[i].gold;
  r.f1 = score_talks({"run", noise}, r.predicted, gold).mean.f1;
  return r;
}

std::vector<SynthRun> all_runs;

Outcome clean_recovery() {
  all_runs.push_back(synth_run(50, clean_shape()));
  const double f1 = all_runs.back().f1;
  return {f1 >= 0.90, "50 talks, mean F1 " + fmt("%.4f", f1) + " (target >= 0.90)"};
}

Outcome noisy_recovery() {
  auto noisy = clean_shape();
  noisy.omission_rate = 0.1;
  noisy.mistranslation_rate = 0.1;
  all_runs.push_back(synth_run(50, noisy));
  const double clean = all_runs.front().f1, f1 = all_runs.back().f1;
  const double drop = clean - f1;
  std::string detail = "50 talks, F1 " + fmt("%.4f", f1) + ", drop " + fmt("%.4f", drop) + "; sweep";
  bool monotone = true;
  double prev = 2.0;
  for (double om : {0.0, 0.1, 0.2, 0.3}) {
    auto n = clean_shape();
    n.omission_rate = om;
    all_runs.push_back(synth_run(20, n));
    const double f = all_runs.back().f1;
    detail += " " + fmt("%.4f", f);
    monotone = monotone && f <= prev;
    prev = f;
  }
  return {drop < 0.25 && monotone, detail};
}

Outcome eps_monotonicity() {
  std::vector<double> eps;
  for (int k = 0; k <= 20; ++k) eps.push_back(k / 20.0);
  long curves = 0, violations = 0;
  for (const auto& r : all_runs)
    for (std::size_t i = 0; i < r.corpus.size(); ++i) {
      const auto rep = recovery_accuracy(r.predicted[i], r.corpus[i].gold, r.corpus[i].doc, eps);
      ++curves;
      for (std::size_t k = 1; k < rep.accuracy_at.size(); ++k)
        violations += rep.accuracy_at[k].second > rep.accuracy_at[k - 1].second;
    }
  return {curves > 0 && violations == 0,
          std::to_string(curves) + " curves over 21 thresholds, violations " + std::to_string(violations)};
}

DocumentPair chunk_doc(Rng& rng) {
  DocumentPair d;
  d.talk_id = "chunks";
  d.source_units.push_back(testing::unit(0, "source"));
  for (int k = 0, n = rng.range(1, 8); k < n; ++k) {
    if (rng.bernoulli(0.5))
      d.target_units.push_back(testing::unit(k, "政府 は", {Pos::Noun, Pos::Other}));
    else
      d.target_units.push_back(testing::unit(k, "じゃあ", {Pos::Other}));
  }
  return d;
}

Outcome filter_properties() {
  Rng rng(6);
  IntraFilterParams unlimited;
  unlimited.max_trims_per_side = 1000;
  const IntraFilterParams defaults;
  int idem_unlimited = 0, idem_default = 0, guarantee = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto d = chunk_doc(rng);
    const AlignedPair whole{{0, 1}, {0, d.n()}, 0.1};
    const auto u = trim_boundaries(whole, d, unlimited).pair;
    idem_unlimited += trim_boundaries(u, d, unlimited).pair == u;
    const auto once = trim_boundaries(whole, d, defaults);
    idem_default += trim_boundaries(once.pair, d, defaults).pair == once.pair;
    int front = 0, back = 0;
    for (const auto& a : once.trims) (a.end == TrimEnd::Front ? front : back)++;
    const Span t = once.pair.tgt;
    const auto content = [&](int idx) {
      return has_content_word(d.target_units[static_cast<std::size_t>(idx)], defaults.content_pos);
    };
    guarantee += (t.len == 1 || ((content(t.start) || front == 1) && (content(t.end() - 1) || back == 1)));
  }

  // Nested thresholds on the noisy synthetic run.
  const InterFilterParams loose{0.2, 0.2, 3.0, 0.1}, mid{0.5, 0.4, 2.0, 0.3}, strict{0.8, 0.6, 1.5, 0.5};
  const auto& noisy = all_runs.at(1);
  long subset_violations = 0, kept_counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < noisy.corpus.size(); ++i) {
    const auto& t = noisy.corpus[i];
    const auto trims = apply_intra_filter(noisy.predicted[i].links, t.doc, defaults);
    std::set<std::pair<Span, Span>> prev;
    int level = 0;
    for (const auto* p : {&loose, &mid, &strict}) {
      std::set<std::pair<Span, Span>> kept;
      for (const auto& k : apply_inter_filter(trims, t.doc, t.reference, *p, SemanticScorer::builtin()).kept)
        kept.insert({k.src, k.tgt});
      if (level > 0)
        for (const auto& k : kept) subset_violations += prev.count(k) == 0;
      kept_counts[level++] += static_cast<long>(kept.size());
      prev = std::move(kept);
    }
  }
  const bool pass = idem_unlimited == 1000 && guarantee == 1000 && subset_violations == 0;
  return {pass, "idempotent " + std::to_string(idem_unlimited) + "/1000 (unbounded budget; " +
                    std::to_string(idem_default) + "/1000 at budget 1), boundary guarantee " +
                    std::to_string(guarantee) + "/1000, nested kept " + std::to_string(kept_counts[0]) + " >= " +
                    std::to_string(kept_counts[1]) + " >= " + std::to_string(kept_counts[2]) + ", violations " +
                    std::to_string(subset_violations)};
}

Outcome attrition() {
  long violations = 0, coarse = 0, intra = 0, inter = 0;
  for (const auto& r : all_runs)
    for (std::size_t i = 0; i < r.corpus.size(); ++i) {
      const auto& t = r.corpus[i];
      const auto trims = apply_intra_filter(r.predicted[i].links, t.doc, {});
      const auto kept = apply_inter_filter(trims, t.doc, t.reference, {}, SemanticScorer::builtin()).kept;
      const long c = static_cast<long>(r.predicted[i].links.size());
      const long a = static_cast<long>(trims.size()), e = static_cast<long>(kept.size());
      violations += !(e <= a && a <= c);
      coarse += c, intra += a, inter += e;
    }
  return {violations == 0, "coarse " + std::to_string(coarse) + ", intra " + std::to_string(intra) + ", inter " +
                               std::to_string(inter) + ", per-talk violations " + std::to_string(violations)};
}

Outcome curation_roundtrip() {
  testing::TempDir tmp("acceptance_curation");
  const auto& run = all_runs.at(0);
  std::vector<AnnotationSource> sources;
  std::set<std::tuple<std::string, Span, Span>> expected;
  for (std::size_t i = 0; i < 5; ++i) {
    sources.push_back({&run.corpus[i].doc, run.predicted[i].links});
    for (const auto& l : run.predicted[i].links) expected.insert({run.corpus[i].doc.talk_id, l.src, l.tgt});
  }
  auto records = export_annotations(sources);
  for (auto& r : records) r.good_align = r.good_mt = true;
  write_file_atomic(tmp.path / "anno.tsv", annotations_tsv(records));
  const auto imported = import_annotations(tmp.path / "anno.tsv");
  std::set<std::tuple<std::string, Span, Span>> got;
  for (const auto& c : imported.curated) got.insert({c.talk_id, c.src, c.tgt});

  int rejected = 0;
  AnnotationRecord bad{"t", {0, 1}, {0, 1}, "a", "b", {}, {}, {}};
  const std::pair<std::optional<bool>, std::optional<bool>> invalid[] = {
      {std::nullopt, true}, {std::nullopt, false}, {false, true}};
  for (const auto& [ga, gm] : invalid) {
    bad.good_align = ga;
    bad.good_mt = gm;
    try {
      validate_record(bad);
    } catch (const ValidationError&) {
      ++rejected;
    }
  }
  const bool same = got == expected && imported.curated.size() == expected.size();
  return {same && rejected == 3, std::to_string(imported.curated.size()) + " pairs " +
                                     (same ? "reproduced" : "differ") + ", invalid combos rejected " +
                                     std::to_string(rejected) + "/3"};
}

Outcome determinism() {
  testing::TempDir tmp("acceptance_pipeline");
  const auto out = (tmp.path / "out").string();
  if (run_cli({"synth", "--out-dir", out, "--talks", "10", "--sentences", "20"}) != 0) return {false, "synth failed"};
  std::vector<nlohmann::json> artifacts;
  for (const char* jobs : {"4", "1"}) {
    if (run_cli({"pipeline", "--out-dir", out, "--sample-dev-test", "--jobs", jobs}) != 0)
      return {false, "pipeline failed"};
    artifacts.push_back(nlohmann::json::parse(read_file(tmp.path / "out" / "runs" / "pipeline.json"))["artifacts"]);
  }
  return {artifacts[0] == artifacts[1] && !artifacts[0].empty(),
          std::to_string(artifacts[0].size()) + " artifacts, checksums " +
              (artifacts[0] == artifacts[1] ? "identical" : "differ")};
}

}  // namespace

int main() {
  run(1, "DP optimality vs exhaustive enumeration", 30, dp_optimality);
  run(2, "LCS vs quadratic oracle", 5, lcs_oracle);
  run(3, "synthetic recovery, clean", 60, clean_recovery);
  run(4, "synthetic recovery, noisy", 0, noisy_recovery);
  run(5, "recovery accuracy non-increasing in epsilon", 0, eps_monotonicity);
  run(6, "filter properties", 0, filter_properties);
  run(7, "attrition ordering", 0, attrition);
  run(8, "curation round-trip", 0, curation_roundtrip);
  run(9, "pipeline determinism", 0, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
