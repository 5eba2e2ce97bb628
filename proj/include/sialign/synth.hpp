#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sialign/coarse_align.hpp"
#include "sialign/corpus.hpp"
#include "sialign/embedding.hpp"
#include "sialign/filter_inter.hpp"

namespace sialign {

struct NoiseParams {
  double omission_rate = 0.0;
  double mistranslation_rate = 0.0;
  double split_rate = 0.0;
  double merge_rate = 0.0;
  double filler_rate = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// The one transformation applied to a source sentence's rendering.
enum class Transform { Clean, Omission, Mistranslation, Split, Merge, Filler };
inline constexpr std::size_t kTransformCount = 6;

enum class Provenance { Clean, Omitted, Mistranslated, SplitPart, Merged, Filler };

std::string_view transform_name(Transform t);
std::string_view provenance_name(Provenance p);

// Maps one uniform draw in [0,1) to a transformation. Rates are laid out
// cumulatively in the order omission, mistranslation, split, merge, filler,
// scaled down proportionally when they sum above 1; the rest is Clean.
Transform sample_transform(double u, const NoiseParams& noise);

struct SynthTalk {
  DocumentPair doc;
  AlignmentSet gold;
  // Per source sentence. The second sentence of a merge is recorded as Merge
  // and consumes no draw of its own.
  std::vector<Transform> transforms;
  std::vector<Provenance> source_provenance;
  std::vector<Provenance> target_provenance;
  // Clean rendering of every source window up to the reference window size.
  ReferenceTranslation reference;
};

// Seeded synthetic talk.
//   talk seed     = derive_seed(seed, noise.rng_seed)
//   vocabulary    : Rng(derive_seed(talk seed, 1))
//   transform draw: Rng(derive_seed(talk seed, 2)), one uniform() per sampled sentence
//   content       : Rng(derive_seed(talk seed, 3))
// Target tokens are a fixed transliteration of the source tokens;
// mistranslations and fillers come from disjoint character blocks.
SynthTalk generate_talk(std::uint64_t seed, int m, const NoiseParams& noise, int vocab_size, int reference_max_window = 4);

// Talk k uses seed derive_seed(seed, k), id "synth_<k>" (zero-padded) and
// rank S for even k, A for odd k.
std::vector<SynthTalk> generate_corpus(std::uint64_t seed, int talks, int m, const NoiseParams& noise, int vocab_size,
                                       int reference_max_window = 4);

struct LinkScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact-span matching over links with both spans non-empty.
LinkScore score_alignment(const AlignmentSet& predicted, const AlignmentSet& gold);

struct BenchConfig {
  int talks = 20;
  int sentences = 40;
  int vocab_size = 200;
  std::uint64_t seed = 7;
  int max_window = 4;
  AlignParams align;
  FallbackParams embed;
};

struct BenchSetting {
  std::string label;
  NoiseParams noise;
};

struct BenchRow {
  BenchSetting setting;
  int talks = 0;
  LinkScore mean;
  std::vector<LinkScore> per_talk;
};

// Generate, align with fallback embeddings, prune, and score; talks run in
// parallel.
BenchRow run_bench_setting(const BenchConfig& config, const BenchSetting& setting);
BenchRow score_talks(const BenchSetting& setting, const std::vector<AlignmentSet>& predicted,
                     const std::vector<AlignmentSet>& gold);

std::string bench_tsv(const std::vector<BenchRow>& rows);

}  // namespace sialign
