#include "sialign/recovery.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <unordered_map>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/text.hpp"

namespace sialign {

namespace {

// Suffix automaton over `a`; b is streamed through it to find the longest
// substring of b that occurs in a. Linear in |a| + |b|.
class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(std::u32string_view text) {
    states_.reserve(2 * text.size() + 1);
    states_.push_back({});
    for (char32_t c : text) extend(c);
  }

  std::size_t longest_common(std::u32string_view other) const {
    std::size_t state = 0, len = 0, best = 0;
    for (char32_t c : other) {
      while (state != 0 && !states_[state].next.count(c)) {
        state = static_cast<std::size_t>(states_[state].link);
        len = states_[state].len;
      }
      auto it = states_[state].next.find(c);
      if (it != states_[state].next.end()) {
        state = it->second;
        ++len;
      } else {
        len = 0;
      }
      best = std::max(best, len);
    }
    return best;
  }

 private:
  struct State {
    std::size_t len = 0;
    long link = -1;
    std::unordered_map<char32_t, std::size_t> next;
  };

  void extend(char32_t c) {
    const std::size_t cur = states_.size();
    states_.push_back({states_[last_].len + 1, -1, {}});
    long p = static_cast<long>(last_);
    while (p != -1 && !states_[static_cast<std::size_t>(p)].next.count(c)) {
      states_[static_cast<std::size_t>(p)].next[c] = cur;
      p = states_[static_cast<std::size_t>(p)].link;
    }
    if (p == -1) {
      states_[cur].link = 0;
    } else {
      const std::size_t q = states_[static_cast<std::size_t>(p)].next[c];
      if (states_[static_cast<std::size_t>(p)].len + 1 == states_[q].len) {
        states_[cur].link = static_cast<long>(q);
      } else {
        const std::size_t clone = states_.size();
        State copy = states_[q];
        copy.len = states_[static_cast<std::size_t>(p)].len + 1;
        states_.push_back(std::move(copy));
        while (p != -1) {
          auto& next = states_[static_cast<std::size_t>(p)].next;
          auto it = next.find(c);
          if (it == next.end() || it->second != q) break;
          it->second = clone;
          p = states_[static_cast<std::size_t>(p)].link;
        }
        states_[q].link = static_cast<long>(clone);
        states_[cur].link = static_cast<long>(clone);
      }
    }
    last_ = cur;
  }

  std::vector<State> states_;
  std::size_t last_ = 0;
};

}  // namespace

std::size_t lcs_substring_len(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  return SuffixAutomaton(a).longest_common(b);
}

std::size_t lcs_substring_len(std::string_view a, std::string_view b) { return lcs_substring_len(to_u32(a), to_u32(b)); }

double similarity(std::string_view f_auto, std::string_view f_manual) {
  const std::u32string manual = without_whitespace(normalize_text(f_manual));
  if (manual.empty()) throw ValidationError("similarity: manual alignment text is empty");
  const std::u32string automatic = without_whitespace(normalize_text(f_auto));
  return static_cast<double>(lcs_substring_len(automatic, manual)) / static_cast<double>(manual.size());
}

RecoveryReport recovery_accuracy(const AlignmentSet& automatic, const AlignmentSet& gold, const DocumentPair& doc,
                                 std::vector<double> epsilons) {
  if (automatic.talk_id != gold.talk_id || gold.talk_id != doc.talk_id)
    throw ValidationError("recovery_accuracy: talk_id mismatch ('" + automatic.talk_id + "', '" + gold.talk_id + "', '" +
                          doc.talk_id + "')");
  std::map<Span, Span> auto_by_src;
  for (const auto& l : automatic.links)
    if (!l.src.empty()) auto_by_src.emplace(l.src, l.tgt);

  RecoveryReport report;
  report.talk_id = gold.talk_id;
  for (const auto& g : gold.links) {
    if (g.src.empty() || g.tgt.empty()) continue;
    double s = 0.0;
    auto it = auto_by_src.find(g.src);
    if (it != auto_by_src.end() && !it->second.empty())
      s = similarity(span_text(doc.target_units, it->second), span_text(doc.target_units, g.tgt));
    report.per_sentence.push_back({g.src.start, g.src.len, s});
  }
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  for (double eps : epsilons) {
    std::size_t hits = 0;
    for (const auto& r : report.per_sentence)
      if (r.similarity > eps) ++hits;
    const double acc = report.per_sentence.empty() ? 0.0 : static_cast<double>(hits) / report.per_sentence.size();
    report.accuracy_at.emplace_back(eps, acc);
  }
  return report;
}

std::string RecoveryReport::to_json() const {
  nlohmann::ordered_json j;
  j["talk_id"] = talk_id;
  j["per_sentence"] = nlohmann::ordered_json::array();
  for (const auto& r : per_sentence)
    j["per_sentence"].push_back({{"source_index", r.source_index}, {"source_len", r.source_len}, {"s", r.similarity}});
  j["accuracy_at"] = nlohmann::ordered_json::object();
  for (const auto& [eps, acc] : accuracy_at) j["accuracy_at"][format_double(eps)] = acc;
  return j.dump(2) + "\n";
}

std::string RecoveryReport::to_tsv(bool header) const {
  std::string out = header ? "talk_id\tepsilon\taccuracy\tn_sentences\n" : "";
  for (const auto& [eps, acc] : accuracy_at)
    out += talk_id + '\t' + format_double(eps) + '\t' + format_double(acc) + '\t' + std::to_string(per_sentence.size()) + '\n';
  return out;
}

}  // namespace sialign
