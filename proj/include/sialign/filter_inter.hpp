#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "sialign/corpus.hpp"
#include "sialign/filter_intra.hpp"

namespace sialign {

struct InterFilterParams {
  double alpha_min = 0.5;
  double gamma_min = 0.4;
  double gamma_max = 1.6;
  double eta_min = 0.35;
  PosSet coverage_pos{Pos::Noun, Pos::Propn, Pos::Num};

  void validate() const;
};

// Offline translation T of a merged source span.
struct ReferenceEntry {
  Span src;
  std::string text;
  std::vector<Token> tokens;
};

class ReferenceTranslation {
 public:
  ReferenceTranslation() = default;
  explicit ReferenceTranslation(std::string talk_id) : talk_id_(std::move(talk_id)) {}

  const std::string& talk_id() const { return talk_id_; }
  void add(ReferenceEntry entry);
  bool contains(Span src) const { return entries_.count(src) != 0; }
  // Throws ValidationError naming the span.
  const ReferenceEntry& at(Span src) const;
  std::size_t size() const { return entries_.size(); }

  // JSON Lines {talk_id, src_start, src_len, text, tokens: [[surface, pos], ...]}.
  // Rows for other talks are skipped when talk_id is non-empty.
  static ReferenceTranslation load(const std::filesystem::path& path, const std::string& talk_id);
  std::string to_jsonl() const;

 private:
  std::string talk_id_;
  std::map<Span, ReferenceEntry> entries_;
};

// Fraction of T's coverage-tagged tokens whose surface occurs in F's
// normalized text; 1 when T has none.
double content_coverage(std::string_view f_text, const ReferenceEntry& reference, const PosSet& coverage_pos);

// char_length(F) / char_length(T). Throws ValidationError on empty T.
double length_ratio(std::string_view f_text, std::string_view t_text);

// Character n-gram F-score, orders 1..6, beta 2, whitespace removed.
// Precision and recall are averaged uniformly over the orders for which both
// texts have at least one n-gram; no such order gives 0.
double chrf(std::string_view hypothesis, std::string_view reference);

// Built-in chrF, or a lookup into an external scores file
// (`talk_id\tsrc_start\tsrc_len\tscore`).
class SemanticScorer {
 public:
  static SemanticScorer builtin() { return SemanticScorer(); }
  static SemanticScorer from_file(const std::filesystem::path& path);

  bool is_external() const { return external_.has_value(); }
  double score(const std::string& talk_id, Span src, std::string_view f_text, std::string_view t_text) const;

 private:
  using Key = std::tuple<std::string, int, int>;
  std::optional<std::map<Key, double>> external_;
};

enum class DropReason { Alpha, GammaLow, GammaHigh, Eta };
std::string_view drop_reason_name(DropReason r);

struct FilterDecision {
  std::string talk_id;
  AlignedPair pair;
  double alpha = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  std::vector<TrimAction> trims;
  bool keep = true;
  std::vector<DropReason> reasons;
};

// Reasons a pair with these scores is dropped; empty means keep.
std::vector<DropReason> inter_reasons(double alpha, double gamma, double eta, const InterFilterParams& params);

struct InterResult {
  std::vector<AlignedPair> kept;
  std::vector<FilterDecision> decisions;  // one per input pair, input order
};

// OpenMP-parallel over pairs.
InterResult apply_inter_filter(std::span<const TrimResult> pairs, const DocumentPair& doc, const ReferenceTranslation& ref,
                               const InterFilterParams& params, const SemanticScorer& scorer);
InterResult apply_inter_filter_serial(std::span<const TrimResult> pairs, const DocumentPair& doc,
                                      const ReferenceTranslation& ref, const InterFilterParams& params,
                                      const SemanticScorer& scorer);

std::string decisions_jsonl(std::span<const FilterDecision> decisions);

}  // namespace sialign
