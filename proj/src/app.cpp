#include "sialign/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "sialign/coarse_align.hpp"
#include "sialign/config.hpp"
#include "sialign/corpus.hpp"
#include "sialign/curation.hpp"
#include "sialign/embedding.hpp"
#include "sialign/error.hpp"
#include "sialign/filter_inter.hpp"
#include "sialign/filter_intra.hpp"
#include "sialign/io.hpp"
#include "sialign/log.hpp"
#include "sialign/recovery.hpp"
#include "sialign/splitter.hpp"
#include "sialign/synth.hpp"
#include "sialign/text.hpp"

namespace sialign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, n) across threads; rethrows the error of the
// lowest failing index so failures do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  return fs::path(p).lexically_normal().lexically_relative(fs::path(base).lexically_normal()).generic_string();
}

// Single writer for all artifacts of a run; remembers checksums for the run
// manifest.
class Recorder {
 public:
  explicit Recorder(fs::path out_dir) : out_dir_(std::move(out_dir)) {}

  const fs::path& out_dir() const { return out_dir_; }

  void write(const fs::path& path, const std::string& content) {
    write_file_atomic(path, content);
    artifacts_[relative_to(path, out_dir_)] = sha256_hex(content);
  }

  void input(const fs::path& path) {
    if (fs::exists(path)) inputs_[fs::absolute(path).lexically_normal().generic_string()] = sha256_file(path);
  }

  void write_manifest(const std::string& subcommand, const PipelineConfig& cfg) {
    json j;
    j["subcommand"] = subcommand;
    const auto params = cfg.params_json();
    j["params_sha256"] = sha256_hex(params);
    j["params"] = json::parse(params);
    j["inputs"] = json::array();
    for (const auto& [path, sum] : inputs_) j["inputs"].push_back({{"path", path}, {"sha256", sum}});
    j["artifacts"] = json::array();
    for (const auto& [path, sum] : artifacts_) j["artifacts"].push_back({{"path", path}, {"sha256", sum}});
    write_file_atomic(out_dir_ / "runs" / (subcommand + ".json"), j.dump(2) + "\n");
  }

 private:
  fs::path out_dir_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> artifacts_;
};

struct Talk {
  fs::path dir;
  fs::path manifest;
  DocumentPair doc;
};

// Every subdirectory of the corpus holding a manifest.json, sorted by name.
std::vector<fs::path> talk_manifests(const fs::path& corpus) {
  if (!fs::is_directory(corpus)) throw IoError("corpus directory not found: " + corpus.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    const auto m = entry.path() / "manifest.json";
    if (entry.is_directory() && fs::exists(m)) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ValidationError("no talks (subdirectories with manifest.json) in " + corpus.string());
  return out;
}

std::vector<Talk> load_corpus(const PipelineConfig& cfg, Recorder& rec) {
  const auto manifests = talk_manifests(cfg.corpus());
  std::vector<Talk> talks(manifests.size());
  parallel_for(manifests.size(), [&](std::size_t i) {
    talks[i].manifest = manifests[i];
    talks[i].dir = manifests[i].parent_path();
    talks[i].doc = load_talk(manifests[i]);
  });
  std::map<std::string, fs::path> seen;
  for (const auto& t : talks) {
    auto [it, fresh] = seen.emplace(t.doc.talk_id, t.manifest);
    if (!fresh)
      throw ValidationError("talk_id " + t.doc.talk_id + " appears in " + it->second.string() + " and " +
                            t.manifest.string());
    rec.input(t.manifest);
    const auto m = TalkManifest::load(t.manifest);
    for (const auto& p : {m.source_units_path, m.target_units_path, m.source_tags_path, m.target_tags_path})
      rec.input(p.is_absolute() ? p : t.dir / p);
  }
  return talks;
}

fs::path align_path(const PipelineConfig& cfg, const std::string& id) { return cfg.out_dir / "align" / (id + ".jsonl"); }
fs::path intra_path(const PipelineConfig& cfg, const std::string& id) { return cfg.out_dir / "intra" / (id + ".jsonl"); }
fs::path inter_path(const PipelineConfig& cfg, const std::string& id) { return cfg.out_dir / "inter" / (id + ".jsonl"); }
fs::path split_path(const PipelineConfig& cfg) { return cfg.out_dir / "split.json"; }
fs::path embedding_path(const PipelineConfig& cfg, const std::string& id) { return cfg.embeddings_dir / (id + ".tsv"); }
fs::path gold_path(const Talk& t) { return t.dir / "gold.align.jsonl"; }

fs::path reference_path(const PipelineConfig& cfg, const Talk& t) {
  return cfg.references_dir.empty() ? t.dir / "reference.jsonl" : cfg.references_dir / (t.doc.talk_id + ".jsonl");
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw IoError(what + " not found: " + path.string());
}

void require_dir(const fs::path& path, const std::string& what) {
  if (!fs::is_directory(path)) throw IoError(what + " directory not found: " + path.string());
}

// ---- stages ------------------------------------------------------------

void stage_align(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  if (!cfg.embeddings_dir.empty()) {
    require_dir(cfg.embeddings_dir, "embeddings");
    for (const auto& t : talks) require_file(embedding_path(cfg, t.doc.talk_id), "embeddings file");
  }
  std::vector<std::string> out(talks.size());
  parallel_for(talks.size(), [&](std::size_t i) {
    const auto& doc = talks[i].doc;
    const auto params = cfg.align_for(doc.talk_id);
    const auto table = cfg.embeddings_dir.empty()
                           ? build_fallback_table(doc, cfg.max_window(), cfg.embed)
                           : load_precomputed(embedding_path(cfg, doc.talk_id), doc.m(), doc.n(), cfg.max_window());
    params.validate_against(table);
    const auto pruned = prune(dp_align(doc, table, params), params.prune_cost_threshold);
    out[i] = alignment_jsonl(doc.talk_id, pruned.records);
    log::info("align " + doc.talk_id + ": " + std::to_string(pruned.kept.links.size()) + " of " +
              std::to_string(pruned.records.size()) + " links kept");
  });
  for (std::size_t i = 0; i < talks.size(); ++i) {
    if (!cfg.embeddings_dir.empty()) rec.input(embedding_path(cfg, talks[i].doc.talk_id));
    rec.write(align_path(cfg, talks[i].doc.talk_id), out[i]);
  }
}

AlignmentFile read_talk_alignment(const PipelineConfig& cfg, const Talk& t) {
  const auto path = align_path(cfg, t.doc.talk_id);
  require_file(path, "alignment (run align first)");
  auto file = read_alignment_jsonl(path);
  if (!file.records.empty() && file.talk_id != t.doc.talk_id)
    throw ValidationError(path.string() + " holds talk " + file.talk_id + ", expected " + t.doc.talk_id);
  validate_alignment(file.all(), t.doc.m(), t.doc.n());
  return file;
}

void stage_validate(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < talks.size(); ++i)
    if (fs::exists(gold_path(talks[i]))) scored.push_back(i);
  if (scored.empty()) throw ValidationError("no talk has a gold.align.jsonl to validate against");
  std::vector<RecoveryReport> reports(scored.size());
  parallel_for(scored.size(), [&](std::size_t k) {
    const auto& t = talks[scored[k]];
    const auto automatic = read_talk_alignment(cfg, t).surviving();
    auto gold = read_alignment_jsonl(gold_path(t)).all();
    gold.talk_id = t.doc.talk_id;
    reports[k] = recovery_accuracy(automatic, gold, t.doc, cfg.epsilons);
  });
  std::string tsv;
  for (std::size_t k = 0; k < scored.size(); ++k) {
    const auto& t = talks[scored[k]];
    rec.input(gold_path(t));
    rec.write(cfg.out_dir / "validate" / (t.doc.talk_id + ".json"), reports[k].to_json() + "\n");
    tsv += reports[k].to_tsv(k == 0);
  }
  rec.write(cfg.out_dir / "validate" / "recovery.tsv", tsv);
}

void stage_intra(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  std::vector<std::string> out(talks.size());
  parallel_for(talks.size(), [&](std::size_t i) {
    const auto& doc = talks[i].doc;
    const auto kept = read_talk_alignment(cfg, talks[i]).surviving();
    out[i] = trim_records_jsonl(doc.talk_id, apply_intra_filter(kept.links, doc, cfg.intra));
  });
  for (std::size_t i = 0; i < talks.size(); ++i) rec.write(intra_path(cfg, talks[i].doc.talk_id), out[i]);
}

std::vector<TrimResult> read_talk_trims(const PipelineConfig& cfg, const Talk& t) {
  const auto path = intra_path(cfg, t.doc.talk_id);
  require_file(path, "intra-filter output (run filter-intra first)");
  std::string id;
  auto trims = read_trim_records(path, &id);
  if (!trims.empty() && id != t.doc.talk_id)
    throw ValidationError(path.string() + " holds talk " + id + ", expected " + t.doc.talk_id);
  return trims;
}

void stage_inter(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  for (const auto& t : talks) require_file(reference_path(cfg, t), "reference translation");
  const SemanticScorer scorer = cfg.scores_path.empty() ? SemanticScorer::builtin() : SemanticScorer::from_file(cfg.scores_path);
  if (!cfg.scores_path.empty()) rec.input(cfg.scores_path);
  std::vector<std::string> out(talks.size());
  std::vector<long> kept(talks.size());
  parallel_for(talks.size(), [&](std::size_t i) {
    const auto& doc = talks[i].doc;
    const auto trims = read_talk_trims(cfg, talks[i]);
    const auto ref = ReferenceTranslation::load(reference_path(cfg, talks[i]), doc.talk_id);
    const auto result = apply_inter_filter(trims, doc, ref, cfg.inter_for(doc.talk_id), scorer);
    kept[i] = static_cast<long>(result.kept.size());
    out[i] = decisions_jsonl(result.decisions);
  });
  for (std::size_t i = 0; i < talks.size(); ++i) {
    rec.input(reference_path(cfg, talks[i]));
    rec.write(inter_path(cfg, talks[i].doc.talk_id), out[i]);
  }
}

std::vector<std::string> talk_ids(const std::vector<Talk>& talks) {
  std::vector<std::string> ids;
  for (const auto& t : talks) ids.push_back(t.doc.talk_id);
  return ids;
}

void stage_split(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  const auto allow_path = cfg.allowlist();
  require_file(allow_path, "allowlist");
  const auto allowlist = load_allowlist(allow_path);
  rec.input(allow_path);
  const auto ids = talk_ids(talks);
  std::set<std::string> dev(cfg.dev_ids.begin(), cfg.dev_ids.end());
  std::set<std::string> test(cfg.test_ids.begin(), cfg.test_ids.end());
  if (cfg.sample_dev_test) {
    if (!dev.empty() || !test.empty()) throw ValidationError("explicit dev/test ids conflict with sampled selection");
    std::tie(dev, test) = select_dev_test(ids, allowlist, cfg.n_dev, cfg.n_test, cfg.seed);
  }
  const auto split = make_split(ids, allowlist, dev, test, allow_path.filename().string());
  rec.write(split_path(cfg), split.to_json() + "\n");
}

long count_kept_decisions(const fs::path& path) {
  long kept = 0;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      if (json::parse(lines[i]).at("verdict").get<std::string>() == "keep") ++kept;
    } catch (const json::exception& e) {
      throw ParseError(path, static_cast<long>(i + 1), e.what());
    }
  }
  return kept;
}

SplitManifest read_split(const PipelineConfig& cfg) {
  require_file(split_path(cfg), "split manifest (run split first)");
  try {
    return SplitManifest::from_json(read_file(split_path(cfg)));
  } catch (const json::exception& e) {
    throw ParseError(split_path(cfg), 0, e.what());
  }
}

void stage_stats(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  const auto split = read_split(cfg);
  std::vector<TalkCounts> counts(talks.size());
  parallel_for(talks.size(), [&](std::size_t i) {
    const auto& t = talks[i];
    const auto& id = t.doc.talk_id;
    require_file(inter_path(cfg, id), "inter-filter output (run filter-inter first)");
    counts[i] = {id, t.doc.rank, static_cast<long>(read_talk_alignment(cfg, t).surviving().links.size()),
                 static_cast<long>(read_talk_trims(cfg, t).size()), count_kept_decisions(inter_path(cfg, id))};
  });
  const auto table = corpus_stats(split, counts);
  rec.write(cfg.out_dir / "stats.tsv", table.to_tsv());
  rec.write(cfg.out_dir / "stats.txt", table.to_text());
}

void stage_export(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  const auto split = read_split(cfg);
  std::set<std::string> chosen = split.dev_ids;
  chosen.insert(split.test_ids.begin(), split.test_ids.end());
  if (chosen.empty()) {
    log::info("split has no dev/test talks; exporting every talk");
    for (const auto& t : talks) chosen.insert(t.doc.talk_id);
  }
  std::vector<AnnotationSource> sources;
  for (const auto& t : talks) {
    if (!chosen.count(t.doc.talk_id)) continue;
    AnnotationSource s;
    s.doc = &t.doc;
    for (const auto& r : read_talk_trims(cfg, t)) s.pairs.push_back(r.pair);
    sources.push_back(std::move(s));
  }
  rec.write(cfg.out_dir / "annotations.tsv", annotations_tsv(export_annotations(sources)));
}

void stage_import(const PipelineConfig& cfg, const std::vector<Talk>& talks, Recorder& rec) {
  const auto path = cfg.annotations_path.empty() ? cfg.out_dir / "annotations.tsv" : cfg.annotations_path;
  require_file(path, "annotation file");
  std::map<std::string, DocumentPair> docs;
  for (const auto& t : talks) docs.emplace(t.doc.talk_id, t.doc);
  const auto result = import_annotations(path, &docs);
  rec.input(path);
  rec.write(cfg.out_dir / "curated.jsonl", curated_jsonl(result.curated));
  rec.write(cfg.out_dir / "label_counts.tsv", label_counts_tsv(result));
}

std::string provenance_tsv(const SynthTalk& talk) {
  std::string out = "side\tindex\ttransform_or_provenance\n";
  for (std::size_t i = 0; i < talk.transforms.size(); ++i)
    out += "source\t" + std::to_string(i) + '\t' + std::string(transform_name(talk.transforms[i])) + '\n';
  for (std::size_t i = 0; i < talk.target_provenance.size(); ++i)
    out += "target\t" + std::to_string(i) + '\t' + std::string(provenance_name(talk.target_provenance[i])) + '\n';
  return out;
}

void stage_synth(const PipelineConfig& cfg, Recorder& rec) {
  if (cfg.synth.talks < 1) throw ValidationError("synth needs at least one talk");
  const auto corpus = generate_corpus(cfg.seed, cfg.synth.talks, cfg.synth.sentences, cfg.synth.noise,
                                      cfg.synth.vocab_size, cfg.max_window());
  const auto dir = cfg.corpus();
  // The last fifth of the talks stays off the allowlist so dev/test can be
  // drawn from it.
  const std::size_t held_out = corpus.size() / 5;
  std::string allowlist;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& talk = corpus[k];
    const auto tdir = dir / talk.doc.talk_id;
    TalkManifest m;
    m.talk_id = talk.doc.talk_id;
    m.rank = talk.doc.rank;
    m.source_units_path = "source.txt";
    m.target_units_path = "target.txt";
    m.source_tags_path = "source.tags.tsv";
    m.target_tags_path = "target.tags.tsv";
    rec.write(tdir / "source.txt", serialize_units(talk.doc.source_units));
    rec.write(tdir / "target.txt", serialize_units(talk.doc.target_units));
    rec.write(tdir / "source.tags.tsv", serialize_tags(talk.doc.source_units));
    rec.write(tdir / "target.tags.tsv", serialize_tags(talk.doc.target_units));
    rec.write(tdir / "manifest.json", m.to_json());
    rec.write(tdir / "gold.align.jsonl", alignment_jsonl(talk.doc.talk_id, unpruned_records(talk.gold)));
    rec.write(tdir / "reference.jsonl", talk.reference.to_jsonl());
    rec.write(tdir / "provenance.tsv", provenance_tsv(talk));
    if (k + held_out < corpus.size()) allowlist += talk.doc.talk_id + "\n";
  }
  rec.write(dir / "allowlist.txt", allowlist);
}

std::vector<BenchSetting> bench_settings() {
  NoiseParams clean;
  clean.split_rate = 0.2;
  clean.filler_rate = 0.2;
  std::vector<BenchSetting> out{{"clean", clean}};
  for (double om : {0.0, 0.1, 0.2, 0.3}) {
    NoiseParams n = clean;
    n.omission_rate = om;
    n.mistranslation_rate = 0.1;
    out.push_back({"noisy_omission_" + format_double(om), n});
  }
  return out;
}

void stage_bench(const PipelineConfig& cfg, Recorder& rec) {
  BenchConfig bc = cfg.bench;
  bc.seed = cfg.seed;
  bc.align = cfg.align;
  bc.embed = cfg.embed;
  bc.max_window = cfg.max_window();
  std::vector<BenchRow> rows;
  for (const auto& s : bench_settings()) rows.push_back(run_bench_setting(bc, s));

  // Alignments already produced for a corpus with gold links are scored too.
  if (fs::is_directory(cfg.corpus()) && fs::is_directory(cfg.out_dir / "align")) {
    std::vector<AlignmentSet> predicted, gold;
    for (const auto& m : talk_manifests(cfg.corpus())) {
      const auto dir = m.parent_path();
      const auto id = TalkManifest::load(m).talk_id;
      const auto a = align_path(cfg, id);
      if (!fs::exists(dir / "gold.align.jsonl") || !fs::exists(a)) continue;
      predicted.push_back(read_alignment_jsonl(a).surviving());
      gold.push_back(read_alignment_jsonl(dir / "gold.align.jsonl").all());
      rec.input(a);
      rec.input(dir / "gold.align.jsonl");
    }
    if (!predicted.empty()) rows.push_back(score_talks({"corpus", cfg.synth.noise}, predicted, gold));
  }
  rec.write(cfg.out_dir / "bench.tsv", bench_tsv(rows));
}

// ---- command line --------------------------------------------------------

struct Flags {
  std::string config;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, corpus, embeddings, references, scores, allowlist, annotations;
  std::optional<double> alpha_min, gamma_min, gamma_max, eta_min, prune_cost, skip_penalty;
  std::optional<int> max_src_span, max_tgt_span;
  std::optional<int> talks, sentences;
  std::optional<double> omission, mistranslation, split, merge, filler;
  std::vector<std::string> dev, test;
  bool sample_dev_test = false;
};

template <class T>
void override_with(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

PipelineConfig build_config(const Flags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  override_with(f.jobs, cfg.jobs);
  override_with(f.seed, cfg.seed);
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.corpus) cfg.corpus_dir = *f.corpus;
  if (f.embeddings) cfg.embeddings_dir = *f.embeddings;
  if (f.references) cfg.references_dir = *f.references;
  if (f.scores) cfg.scores_path = *f.scores;
  if (f.allowlist) cfg.allowlist_path = *f.allowlist;
  if (f.annotations) cfg.annotations_path = *f.annotations;
  override_with(f.alpha_min, cfg.inter.alpha_min);
  override_with(f.gamma_min, cfg.inter.gamma_min);
  override_with(f.gamma_max, cfg.inter.gamma_max);
  override_with(f.eta_min, cfg.inter.eta_min);
  override_with(f.prune_cost, cfg.align.prune_cost_threshold);
  override_with(f.skip_penalty, cfg.align.skip_penalty);
  override_with(f.max_src_span, cfg.align.max_src_span);
  override_with(f.max_tgt_span, cfg.align.max_tgt_span);
  override_with(f.talks, cfg.synth.talks);
  override_with(f.sentences, cfg.synth.sentences);
  override_with(f.omission, cfg.synth.noise.omission_rate);
  override_with(f.mistranslation, cfg.synth.noise.mistranslation_rate);
  override_with(f.split, cfg.synth.noise.split_rate);
  override_with(f.merge, cfg.synth.noise.merge_rate);
  override_with(f.filler, cfg.synth.noise.filler_rate);
  if (!f.dev.empty()) cfg.dev_ids = f.dev;
  if (!f.test.empty()) cfg.test_ids = f.test;
  if (f.sample_dev_test) cfg.sample_dev_test = true;
  cfg.validate();
  if (!cfg.scores_path.empty()) require_file(cfg.scores_path, "scores file");
  if (!cfg.references_dir.empty()) require_dir(cfg.references_dir, "references");
  if (!cfg.embeddings_dir.empty()) require_dir(cfg.embeddings_dir, "embeddings");
  return cfg;
}

using Stage = void (*)(const PipelineConfig&, const std::vector<Talk>&, Recorder&);

int execute(const std::string& name, const Flags& flags) {
  const PipelineConfig cfg = build_config(flags);
  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
  Recorder rec(cfg.out_dir);
  if (!flags.config.empty()) rec.input(flags.config);

  if (name == "synth") {
    stage_synth(cfg, rec);
  } else if (name == "bench") {
    stage_bench(cfg, rec);
  } else {
    static const std::map<std::string, std::vector<Stage>> stages{
        {"align", {stage_align}},
        {"validate", {stage_validate}},
        {"filter-intra", {stage_intra}},
        {"filter-inter", {stage_inter}},
        {"split", {stage_split}},
        {"stats", {stage_stats}},
        {"export-anno", {stage_export}},
        {"import-anno", {stage_import}},
        {"pipeline", {stage_align, stage_intra, stage_inter, stage_split, stage_stats}},
    };
    if (name == "split" || name == "pipeline") require_file(cfg.allowlist(), "allowlist");
    const auto talks = load_corpus(cfg, rec);
    for (Stage s : stages.at(name)) s(cfg, talks, rec);
  }
  rec.write_manifest(name, cfg);
  return 0;
}

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON config file; flags win over it");
  sub.add_option("--jobs", f.jobs, "worker threads (0: all cores)");
  sub.add_option("--seed", f.seed, "seed for synth, bench and sampled splits");
  sub.add_option("--out-dir", f.out_dir, "workspace for all artifacts");
  sub.add_option("--corpus", f.corpus, "directory of talk subdirectories (default <out-dir>/corpus)");
  sub.add_option("--embeddings", f.embeddings, "directory of <talk_id>.tsv vector files (default: fallback embedder)");
  sub.add_option("--references", f.references, "directory of <talk_id>.jsonl reference translations");
  sub.add_option("--scores", f.scores, "external semantic scores TSV");
  sub.add_option("--allowlist", f.allowlist, "train allowlist (default <corpus>/allowlist.txt)");
  sub.add_option("--annotations", f.annotations, "annotation TSV to import");
  sub.add_option("--alpha-min", f.alpha_min);
  sub.add_option("--gamma-min", f.gamma_min);
  sub.add_option("--gamma-max", f.gamma_max);
  sub.add_option("--eta-min", f.eta_min);
  sub.add_option("--prune-cost", f.prune_cost);
  sub.add_option("--max-src-span", f.max_src_span);
  sub.add_option("--max-tgt-span", f.max_tgt_span);
  sub.add_option("--skip-penalty", f.skip_penalty);
  sub.add_option("--talks", f.talks, "synthetic talks to generate");
  sub.add_option("--sentences", f.sentences, "source sentences per synthetic talk");
  sub.add_option("--omission-rate", f.omission);
  sub.add_option("--mistranslation-rate", f.mistranslation);
  sub.add_option("--split-rate", f.split);
  sub.add_option("--merge-rate", f.merge);
  sub.add_option("--filler-rate", f.filler);
  sub.add_option("--dev", f.dev, "dev talk ids")->delimiter(',');
  sub.add_option("--test", f.test, "test talk ids")->delimiter(',');
  sub.add_flag("--sample-dev-test", f.sample_dev_test, "draw dev/test from talks off the allowlist");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app("Alignment and filtering pipeline for simultaneous interpretation corpora", "si_align");
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"align", "coarse DP alignment with pruning"},
      {"validate", "recovery accuracy against gold alignments"},
      {"filter-intra", "trim content-free boundary chunks"},
      {"filter-inter", "drop pairs by coverage, length ratio and similarity"},
      {"split", "train/dev/test split with contamination guard"},
      {"stats", "dataset statistics table"},
      {"export-anno", "annotation TSV for dev/test pairs"},
      {"import-anno", "curated pairs from a labeled annotation TSV"},
      {"synth", "generate a synthetic corpus with gold alignments"},
      {"bench", "aligner precision/recall/F1 on synthetic corpora"},
      {"pipeline", "align, filter-intra, filter-inter, split, stats"},
  };
  for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), flags);

  if (!args.empty() && !args.front().empty() && args.front().front() != '-' &&
      std::none_of(std::begin(commands), std::end(commands), [&](const auto& c) { return args.front() == c.first; })) {
    std::cerr << "si_align: unknown subcommand '" << args.front() << "'\n" << app.help();
    return 1;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code == 0 ? 0 : 1;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return execute(name, flags);
  } catch (const ValidationError& e) {
    std::cerr << "si_align " << name << ": error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "si_align " << name << ": error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "si_align " << name << ": internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace sialign
