#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"
#include "sialign/embedding.hpp"

namespace sialign {

// How a link's (1 - cos) / denom is scaled by its span sizes.
//   Product: |src| * |tgt|
//   Mean:    (|src| + |tgt|) / 2
// Mean makes an n-to-n merge of matching units cost about the same as n
// separate 1-1 links, so the DP merges freely; Product penalizes merges.
enum class SpanScaling { Product, Mean };

std::string_view span_scaling_name(SpanScaling s);
std::optional<SpanScaling> parse_span_scaling(std::string_view name);

struct AlignParams {
  int max_src_span = 4;
  int max_tgt_span = 4;
  double skip_penalty = 0.55;
  double prune_cost_threshold = 1.0;
  int norm_sample_size = 1000;
  std::uint64_t rng_seed = 17;
  SpanScaling span_scaling = SpanScaling::Product;

  void validate() const;                                   // throws ValidationError
  void validate_against(const EmbeddingTable& table) const;  // spans fit the table

  bool operator==(const AlignParams&) const = default;
};

struct AlignmentSet {
  std::string talk_id;
  std::vector<AlignedPair> links;
  AlignParams params_used;
  double total_cost = 0.0;
};

// Coverage, monotonicity, span bounds and cost sum. Throws ValidationError.
void validate_alignment(const AlignmentSet& set, int source_count, int target_count);

// Mean of (1 - cos) over `sample_size` draws of (source singleton i, target
// singleton j); each draw takes i then j from Rng(seed).index(). Floored at 1e-6.
double normalization_denominator(const EmbeddingTable& table, int sample_size, std::uint64_t seed);

// Two non-empty spans: (1 - cos) / denom scaled per SpanScaling.
// One empty span: skip_penalty * size of the other.
double link_cost(Span src, Span tgt, const EmbeddingTable& table, double denom, double skip_penalty,
                 SpanScaling scaling = SpanScaling::Product);

// Minimum-cost monotone segmentation of [0,M) x [0,N) into links with
// 1 <= |src| <= max_src_span and 1 <= |tgt| <= max_tgt_span, plus
// single-unit deletions (1,0) and insertions (0,1). Ties prefer the smaller
// source span, then the smaller target span.
//
// Anti-diagonal wavefront, OpenMP-parallel across cells of a diagonal.
AlignmentSet dp_align(const DocumentPair& doc, const EmbeddingTable& table, const AlignParams& params);
// Row-major single-threaded reference; identical output.
AlignmentSet dp_align_serial(const DocumentPair& doc, const EmbeddingTable& table, const AlignParams& params);

struct LinkRecord {
  AlignedPair link;
  bool dropped = false;
  std::string drop_reason;  // "empty" or "cost"
};

struct PruneResult {
  AlignmentSet kept;
  std::vector<LinkRecord> records;  // every input link, input order
};

// Drops links with an empty span ("empty") and links with cost > threshold
// ("cost").
PruneResult prune(const AlignmentSet& alignment, double threshold);

std::vector<LinkRecord> unpruned_records(const AlignmentSet& alignment);

// One JSON object per link:
// {talk_id, src_start, src_len, tgt_start, tgt_len, cost, dropped, drop_reason}
std::string alignment_jsonl(std::string_view talk_id, std::span<const LinkRecord> records);

struct AlignmentFile {
  std::string talk_id;
  std::vector<LinkRecord> records;

  // Links not marked dropped, as an AlignmentSet.
  AlignmentSet surviving() const;
  AlignmentSet all() const;
};

AlignmentFile read_alignment_jsonl(const std::filesystem::path& path);

}  // namespace sialign
