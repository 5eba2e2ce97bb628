#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sialign/coarse_align.hpp"
#include "sialign/corpus.hpp"

namespace sialign {

// Longest common contiguous substring, in code points.
std::size_t lcs_substring_len(std::u32string_view a, std::u32string_view b);
std::size_t lcs_substring_len(std::string_view a, std::string_view b);

// lcs(auto, manual) / |manual| over normalized text with whitespace removed.
// Throws ValidationError when the manual text is empty.
double similarity(std::string_view f_auto, std::string_view f_manual);

struct SentenceRecovery {
  int source_index = 0;  // first source unit of the gold link
  int source_len = 1;
  double similarity = 0.0;
};

struct RecoveryReport {
  std::string talk_id;
  std::vector<SentenceRecovery> per_sentence;
  std::vector<std::pair<double, double>> accuracy_at;  // (epsilon, accuracy), epsilon ascending

  std::string to_json() const;
  // Rows of talk_id, epsilon, accuracy, n_sentences.
  std::string to_tsv(bool header = true) const;
};

// Gold links with both spans non-empty are scored against the automatic link
// with the identical source span (none: similarity 0). Accuracy at epsilon is
// the fraction with similarity strictly above epsilon.
RecoveryReport recovery_accuracy(const AlignmentSet& automatic, const AlignmentSet& gold, const DocumentPair& doc,
                                 std::vector<double> epsilons);

}  // namespace sialign
