#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sialign/coarse_align.hpp"
#include "sialign/embedding.hpp"
#include "sialign/filter_inter.hpp"
#include "sialign/filter_intra.hpp"
#include "sialign/synth.hpp"

namespace sialign {

// Threshold values that replace the global ones for a single talk.
struct TalkOverride {
  std::optional<double> prune_cost;
  std::optional<double> skip_penalty;
  std::optional<double> alpha_min;
  std::optional<double> gamma_min;
  std::optional<double> gamma_max;
  std::optional<double> eta_min;
};

struct SynthConfig {
  int talks = 20;
  int sentences = 40;
  int vocab_size = 200;
  NoiseParams noise;
};

struct PipelineConfig {
  // Empty paths mean "use the default under out_dir".
  std::filesystem::path out_dir = "si_align_out";
  std::filesystem::path corpus_dir;
  std::filesystem::path embeddings_dir;  // empty: fallback embedder
  std::filesystem::path references_dir;  // empty: <talk dir>/reference.jsonl
  std::filesystem::path scores_path;     // empty: built-in chrF
  std::filesystem::path allowlist_path;  // empty: <corpus>/allowlist.txt
  std::filesystem::path annotations_path;

  int jobs = 0;  // 0: OpenMP default
  std::uint64_t seed = 7;

  AlignParams align;
  FallbackParams embed;
  IntraFilterParams intra;
  InterFilterParams inter;
  std::map<std::string, TalkOverride> overrides;

  std::vector<std::string> dev_ids;
  std::vector<std::string> test_ids;
  // Dev/test ids are input; the seeded selector runs only when asked for.
  bool sample_dev_test = false;
  int n_dev = 1;
  int n_test = 1;

  std::vector<double> epsilons{0.5, 0.6, 0.7, 0.8, 0.9};

  SynthConfig synth;
  BenchConfig bench;

  std::filesystem::path corpus() const;
  std::filesystem::path allowlist() const;
  int max_window() const { return std::max(align.max_src_span, align.max_tgt_span); }

  AlignParams align_for(const std::string& talk_id) const;
  InterFilterParams inter_for(const std::string& talk_id) const;

  // Parameter invariants of every module, including per-talk overrides.
  void validate() const;  // throws ValidationError

  // Canonical JSON of every parameter (paths excluded).
  std::string params_json() const;
};

// Reads a JSON config; unknown keys are rejected. Relative paths resolve
// against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace sialign
