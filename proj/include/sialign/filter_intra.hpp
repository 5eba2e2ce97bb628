#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"

namespace sialign {

struct IntraFilterParams {
  PosSet content_pos{Pos::Noun, Pos::Propn, Pos::Pron, Pos::Verb, Pos::Num};
  int max_trims_per_side = 1;

  void validate() const;
};

bool has_content_word(const TextUnit& unit, const PosSet& content_pos);

enum class TrimEnd { Front, Back };

struct TrimAction {
  TrimEnd end = TrimEnd::Front;
  int chunk_index = 0;

  bool operator==(const TrimAction&) const = default;
};

struct TrimResult {
  AlignedPair original;
  AlignedPair pair;  // target span after trimming; source span unchanged
  std::vector<TrimAction> trims;
  bool guard_hit = false;  // a trim was skipped because it would empty the span
};

// Strips content-free chunks from the front, then from the back of the
// target span, at most max_trims_per_side per end. Never removes the last
// remaining chunk.
TrimResult trim_boundaries(const AlignedPair& pair, const DocumentPair& doc, const IntraFilterParams& params);

// trim_boundaries over every pair; OpenMP-parallel.
std::vector<TrimResult> apply_intra_filter(std::span<const AlignedPair> pairs, const DocumentPair& doc,
                                           const IntraFilterParams& params);

std::string_view trim_end_name(TrimEnd end);

// JSON Lines: {talk_id, src_start, src_len, tgt_start, tgt_len, orig_tgt_start,
// orig_tgt_len, cost, trims: [{end, chunk}], guard}
std::string trim_records_jsonl(std::string_view talk_id, std::span<const TrimResult> results);
std::vector<TrimResult> read_trim_records(const std::filesystem::path& path, std::string* talk_id = nullptr);

}  // namespace sialign
