#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"

namespace sialign {

struct AnnotationRecord {
  std::string talk_id;
  Span src;
  Span tgt;
  std::string source_text;
  std::string target_text;
  std::optional<bool> good_align;
  std::optional<bool> good_mt;
  std::optional<std::string> edited_target;
};

// good_mt set requires good_align set, and good_mt true requires good_align
// true; edited_target must be non-empty after normalization. Throws
// ValidationError.
void validate_record(const AnnotationRecord& record);

struct AnnotationSource {
  const DocumentPair* doc = nullptr;
  std::vector<AlignedPair> pairs;
};

// One unlabeled record per pair, ordered by (talk_id, src_start, tgt_start).
std::vector<AnnotationRecord> export_annotations(std::span<const AnnotationSource> sources);

inline constexpr const char* kAnnotationHeader =
    "talk_id\tsrc_start\tsrc_len\ttgt_start\ttgt_len\tsource_text\ttarget_text\tgood_align\tgood_mt\tedited_target";

std::string annotations_tsv(std::span<const AnnotationRecord> records);
// Parses and validates every row; errors carry the line number.
std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path);

struct CuratedPair {
  std::string talk_id;
  Span src;
  Span tgt;
  std::string source_text;
  std::string target_text;

  bool operator==(const CuratedPair&) const = default;
};

struct ImportResult {
  std::vector<CuratedPair> curated;
  // "good_align/good_mt" -> count, values "true", "false" or "unset".
  std::map<std::string, long> label_counts;
  long edited = 0;
};

// Keeps records labeled good_align = good_mt = true; edited_target replaces
// the target text. With `docs`, span edits are checked against document
// bounds and unedited target text is re-read from the document.
ImportResult import_annotations(const std::filesystem::path& path,
                                const std::map<std::string, DocumentPair>* docs = nullptr);

std::string curated_jsonl(std::span<const CuratedPair> pairs);
std::string label_counts_tsv(const ImportResult& result);

}  // namespace sialign
