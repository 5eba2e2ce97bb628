#include "sialign/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "sialign/error.hpp"
#include "sialign/io.hpp"

namespace sialign {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_path(const json& obj, const char* key, const std::filesystem::path& base, std::filesystem::path& out) {
  if (!obj.contains(key)) return;
  std::filesystem::path p = obj.at(key).get<std::string>();
  out = p.is_absolute() ? p : base / p;
}

PosSet read_pos(const json& obj, const char* key, PosSet fallback) {
  if (!obj.contains(key)) return fallback;
  return PosSet::from_names(obj.at(key).get<std::vector<std::string>>());
}

void apply(const TalkOverride& o, AlignParams& a) {
  if (o.prune_cost) a.prune_cost_threshold = *o.prune_cost;
  if (o.skip_penalty) a.skip_penalty = *o.skip_penalty;
}

void apply(const TalkOverride& o, InterFilterParams& p) {
  if (o.alpha_min) p.alpha_min = *o.alpha_min;
  if (o.gamma_min) p.gamma_min = *o.gamma_min;
  if (o.gamma_max) p.gamma_max = *o.gamma_max;
  if (o.eta_min) p.eta_min = *o.eta_min;
}

json pos_json(const PosSet& s) { return s.names(); }

}  // namespace

std::filesystem::path PipelineConfig::corpus() const { return corpus_dir.empty() ? out_dir / "corpus" : corpus_dir; }

std::filesystem::path PipelineConfig::allowlist() const {
  return allowlist_path.empty() ? corpus() / "allowlist.txt" : allowlist_path;
}

AlignParams PipelineConfig::align_for(const std::string& talk_id) const {
  AlignParams a = align;
  if (auto it = overrides.find(talk_id); it != overrides.end()) apply(it->second, a);
  return a;
}

InterFilterParams PipelineConfig::inter_for(const std::string& talk_id) const {
  InterFilterParams p = inter;
  if (auto it = overrides.find(talk_id); it != overrides.end()) apply(it->second, p);
  return p;
}

void PipelineConfig::validate() const {
  if (jobs < 0) throw ValidationError("jobs must be >= 0");
  align.validate();
  embed.validate();
  intra.validate();
  inter.validate();
  for (const auto& [talk, o] : overrides) {
    try {
      align_for(talk).validate();
      inter_for(talk).validate();
    } catch (const ValidationError& e) {
      throw ValidationError("override for talk " + talk + ": " + e.what());
    }
  }
  if (n_dev < 0 || n_test < 0) throw ValidationError("n_dev and n_test must be >= 0");
  for (double e : epsilons)
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("epsilons must lie in [0, 1]");
  if (synth.talks < 0) throw ValidationError("synth.talks must be >= 0");
  if (synth.sentences < 1) throw ValidationError("synth.sentences must be >= 1");
  if (synth.vocab_size < 50) throw ValidationError("synth.vocab_size must be >= 50");
  synth.noise.validate();
  if (bench.talks < 1 || bench.sentences < 1) throw ValidationError("bench talks and sentences must be >= 1");
  if (bench.vocab_size < 50) throw ValidationError("bench.vocab_size must be >= 50");
}

std::string PipelineConfig::params_json() const {
  json j;
  j["seed"] = seed;
  j["align"] = {{"max_src_span", align.max_src_span},
                {"max_tgt_span", align.max_tgt_span},
                {"skip_penalty", align.skip_penalty},
                {"prune_cost", align.prune_cost_threshold},
                {"norm_sample_size", align.norm_sample_size},
                {"rng_seed", align.rng_seed},
                {"span_scaling", span_scaling_name(align.span_scaling)}};
  j["embed"] = {{"dim", embed.dim}, {"orders", embed.orders}, {"seed", embed.seed}};
  j["embeddings"] = embeddings_dir.empty() ? "fallback" : "precomputed";
  j["intra"] = {{"content_pos", pos_json(intra.content_pos)}, {"max_trims_per_side", intra.max_trims_per_side}};
  j["inter"] = {{"alpha_min", inter.alpha_min},
                {"gamma_min", inter.gamma_min},
                {"gamma_max", inter.gamma_max},
                {"eta_min", inter.eta_min},
                {"coverage_pos", pos_json(inter.coverage_pos)}};
  json ov = json::object();
  for (const auto& [talk, o] : overrides) {
    json t = json::object();
    if (o.prune_cost) t["prune_cost"] = *o.prune_cost;
    if (o.skip_penalty) t["skip_penalty"] = *o.skip_penalty;
    if (o.alpha_min) t["alpha_min"] = *o.alpha_min;
    if (o.gamma_min) t["gamma_min"] = *o.gamma_min;
    if (o.gamma_max) t["gamma_max"] = *o.gamma_max;
    if (o.eta_min) t["eta_min"] = *o.eta_min;
    ov[talk] = t;
  }
  j["overrides"] = ov;
  j["split"] = {{"dev", dev_ids}, {"test", test_ids}, {"sample", sample_dev_test}, {"n_dev", n_dev}, {"n_test", n_test}};
  j["epsilons"] = epsilons;
  const auto& n = synth.noise;
  j["synth"] = {{"talks", synth.talks},
                {"sentences", synth.sentences},
                {"vocab_size", synth.vocab_size},
                {"omission_rate", n.omission_rate},
                {"mistranslation_rate", n.mistranslation_rate},
                {"split_rate", n.split_rate},
                {"merge_rate", n.merge_rate},
                {"filler_rate", n.filler_rate},
                {"rng_seed", n.rng_seed}};
  j["bench"] = {{"talks", bench.talks}, {"sentences", bench.sentences}, {"vocab_size", bench.vocab_size}};
  return j.dump();
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  const auto base = path.parent_path();
  PipelineConfig c;
  try {
    check_keys(j,
               {"out_dir", "corpus", "embeddings", "references", "scores", "allowlist", "annotations", "jobs", "seed",
                "align", "embed", "intra", "inter", "overrides", "split", "epsilons", "synth", "bench"},
               "config");
    read_path(j, "out_dir", base, c.out_dir);
    read_path(j, "corpus", base, c.corpus_dir);
    read_path(j, "embeddings", base, c.embeddings_dir);
    read_path(j, "references", base, c.references_dir);
    read_path(j, "scores", base, c.scores_path);
    read_path(j, "allowlist", base, c.allowlist_path);
    read_path(j, "annotations", base, c.annotations_path);
    read(j, "jobs", c.jobs);
    read(j, "seed", c.seed);
    if (j.contains("align")) {
      const auto& a = j["align"];
      check_keys(a, {"max_src_span", "max_tgt_span", "skip_penalty", "prune_cost", "norm_sample_size", "rng_seed",
                     "span_scaling"},
                 "align");
      read(a, "max_src_span", c.align.max_src_span);
      read(a, "max_tgt_span", c.align.max_tgt_span);
      read(a, "skip_penalty", c.align.skip_penalty);
      read(a, "prune_cost", c.align.prune_cost_threshold);
      read(a, "norm_sample_size", c.align.norm_sample_size);
      read(a, "rng_seed", c.align.rng_seed);
      if (a.contains("span_scaling")) {
        const auto name = a["span_scaling"].get<std::string>();
        auto s = parse_span_scaling(name);
        if (!s) throw ValidationError("config: span_scaling must be 'product' or 'mean', got '" + name + "'");
        c.align.span_scaling = *s;
      }
    }
    if (j.contains("embed")) {
      const auto& e = j["embed"];
      check_keys(e, {"dim", "orders", "seed"}, "embed");
      read(e, "dim", c.embed.dim);
      read(e, "orders", c.embed.orders);
      read(e, "seed", c.embed.seed);
    }
    if (j.contains("intra")) {
      const auto& e = j["intra"];
      check_keys(e, {"content_pos", "max_trims_per_side"}, "intra");
      c.intra.content_pos = read_pos(e, "content_pos", c.intra.content_pos);
      read(e, "max_trims_per_side", c.intra.max_trims_per_side);
    }
    if (j.contains("inter")) {
      const auto& e = j["inter"];
      check_keys(e, {"alpha_min", "gamma_min", "gamma_max", "eta_min", "coverage_pos"}, "inter");
      read(e, "alpha_min", c.inter.alpha_min);
      read(e, "gamma_min", c.inter.gamma_min);
      read(e, "gamma_max", c.inter.gamma_max);
      read(e, "eta_min", c.inter.eta_min);
      c.inter.coverage_pos = read_pos(e, "coverage_pos", c.inter.coverage_pos);
    }
    if (j.contains("overrides")) {
      const auto& o = j["overrides"];
      if (!o.is_object()) throw ValidationError("config: overrides must map talk ids to objects");
      for (auto it = o.begin(); it != o.end(); ++it) {
        const auto& v = it.value();
        check_keys(v, {"prune_cost", "skip_penalty", "alpha_min", "gamma_min", "gamma_max", "eta_min"},
                   "overrides." + it.key());
        TalkOverride t;
        read(v, "prune_cost", t.prune_cost);
        read(v, "skip_penalty", t.skip_penalty);
        read(v, "alpha_min", t.alpha_min);
        read(v, "gamma_min", t.gamma_min);
        read(v, "gamma_max", t.gamma_max);
        read(v, "eta_min", t.eta_min);
        c.overrides[it.key()] = t;
      }
    }
    if (j.contains("split")) {
      const auto& s = j["split"];
      check_keys(s, {"dev", "test", "sample", "n_dev", "n_test"}, "split");
      read(s, "sample", c.sample_dev_test);
      read(s, "dev", c.dev_ids);
      read(s, "test", c.test_ids);
      read(s, "n_dev", c.n_dev);
      read(s, "n_test", c.n_test);
    }
    read(j, "epsilons", c.epsilons);
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      check_keys(s, {"talks", "sentences", "vocab_size", "omission_rate", "mistranslation_rate", "split_rate",
                     "merge_rate", "filler_rate", "rng_seed"},
                 "synth");
      read(s, "talks", c.synth.talks);
      read(s, "sentences", c.synth.sentences);
      read(s, "vocab_size", c.synth.vocab_size);
      read(s, "omission_rate", c.synth.noise.omission_rate);
      read(s, "mistranslation_rate", c.synth.noise.mistranslation_rate);
      read(s, "split_rate", c.synth.noise.split_rate);
      read(s, "merge_rate", c.synth.noise.merge_rate);
      read(s, "filler_rate", c.synth.noise.filler_rate);
      read(s, "rng_seed", c.synth.noise.rng_seed);
    }
    if (j.contains("bench")) {
      const auto& b = j["bench"];
      check_keys(b, {"talks", "sentences", "vocab_size"}, "bench");
      read(b, "talks", c.bench.talks);
      read(b, "sentences", c.bench.sentences);
      read(b, "vocab_size", c.bench.vocab_size);
    }
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return c;
}

}  // namespace sialign
