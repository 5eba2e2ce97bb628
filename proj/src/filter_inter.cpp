#include "sialign/filter_inter.hpp"

#include <json.hpp>

#include <unordered_map>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/text.hpp"

namespace sialign {

using nlohmann::json;

void InterFilterParams::validate() const {
  if (!(alpha_min >= 0.0 && alpha_min <= 1.0)) throw ValidationError("alpha_min must lie in [0, 1]");
  if (!(gamma_min > 0.0)) throw ValidationError("gamma_min must be > 0");
  if (!(gamma_min < gamma_max)) throw ValidationError("gamma_min must be < gamma_max");
  if (!(eta_min >= 0.0 && eta_min <= 1.0)) throw ValidationError("eta_min must lie in [0, 1]");
  if (coverage_pos.empty()) throw ValidationError("coverage_pos must be non-empty");
}

void ReferenceTranslation::add(ReferenceEntry entry) {
  const Span key = entry.src;
  entries_.insert_or_assign(key, std::move(entry));
}

const ReferenceEntry& ReferenceTranslation::at(Span src) const {
  auto it = entries_.find(src);
  if (it == entries_.end())
    throw ValidationError("talk " + talk_id_ + ": no reference translation for source span [" + std::to_string(src.start) +
                          ", " + std::to_string(src.end()) + ")");
  return it->second;
}

ReferenceTranslation ReferenceTranslation::load(const std::filesystem::path& path, const std::string& talk_id) {
  ReferenceTranslation ref(talk_id);
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const long lineno = static_cast<long>(i) + 1;
    try {
      json j = json::parse(lines[i]);
      const std::string talk = j.at("talk_id").get<std::string>();
      if (!talk_id.empty() && talk != talk_id) continue;
      if (ref.talk_id_.empty()) ref.talk_id_ = talk;
      ReferenceEntry e;
      e.src = {j.at("src_start").get<int>(), j.at("src_len").get<int>()};
      e.text = normalize_text(j.at("text").get<std::string>());
      for (const auto& t : j.at("tokens")) {
        if (!t.is_array() || t.size() != 2) throw ParseError(path, lineno, "token must be [surface, pos]");
        const std::string tag = t[1].get<std::string>();
        auto pos = parse_pos(tag);
        if (!pos) throw ParseError(path, lineno, "POS tag '" + tag + "' is not in the tag set");
        std::string surface = normalize_text(t[0].get<std::string>());
        if (surface.empty()) throw ParseError(path, lineno, "empty token surface");
        e.tokens.push_back({std::move(surface), *pos});
      }
      ref.add(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return ref;
}

std::string ReferenceTranslation::to_jsonl() const {
  std::string out;
  for (const auto& [span, e] : entries_) {
    nlohmann::ordered_json j;
    j["talk_id"] = talk_id_;
    j["src_start"] = span.start;
    j["src_len"] = span.len;
    j["text"] = e.text;
    j["tokens"] = nlohmann::ordered_json::array();
    for (const auto& t : e.tokens) j["tokens"].push_back({t.surface, std::string(pos_name(t.pos))});
    out += j.dump();
    out += '\n';
  }
  return out;
}

double content_coverage(std::string_view f_text, const ReferenceEntry& reference, const PosSet& coverage_pos) {
  const std::string f = normalize_text(f_text);
  std::size_t total = 0, covered = 0;
  for (const auto& t : reference.tokens) {
    if (!coverage_pos.contains(t.pos)) continue;
    ++total;
    if (!f.empty() && f.find(t.surface) != std::string::npos) ++covered;
  }
  return total == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(total);
}

double length_ratio(std::string_view f_text, std::string_view t_text) {
  const std::size_t t_len = char_length(normalize_text(t_text));
  if (t_len == 0) throw ValidationError("length_ratio: empty reference translation");
  return static_cast<double>(char_length(normalize_text(f_text))) / static_cast<double>(t_len);
}

namespace {

constexpr int kChrfMaxOrder = 6;
constexpr double kChrfBeta = 2.0;

std::unordered_map<std::u32string, int> ngram_counts(const std::u32string& s, std::size_t n) {
  std::unordered_map<std::u32string, int> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

double chrf(std::string_view hypothesis, std::string_view reference) {
  const std::u32string hyp = without_whitespace(normalize_text(hypothesis));
  const std::u32string ref = without_whitespace(normalize_text(reference));
  double p_sum = 0, r_sum = 0;
  int orders = 0;
  for (std::size_t n = 1; n <= kChrfMaxOrder; ++n) {
    if (hyp.size() < n || ref.size() < n) break;
    const auto hc = ngram_counts(hyp, n);
    const auto rc = ngram_counts(ref, n);
    long matched = 0;
    for (const auto& [g, c] : hc) {
      auto it = rc.find(g);
      if (it != rc.end()) matched += std::min(c, it->second);
    }
    p_sum += static_cast<double>(matched) / static_cast<double>(hyp.size() - n + 1);
    r_sum += static_cast<double>(matched) / static_cast<double>(ref.size() - n + 1);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double p = p_sum / orders, r = r_sum / orders;
  if (p == 0.0 && r == 0.0) return 0.0;
  const double b2 = kChrfBeta * kChrfBeta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

SemanticScorer SemanticScorer::from_file(const std::filesystem::path& path) {
  SemanticScorer s;
  s.external_.emplace();
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const long lineno = static_cast<long>(i) + 1;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 4) throw ParseError(path, lineno, "expected talk_id, src_start, src_len, score");
    try {
      Key key{cols[0], static_cast<int>(parse_long(cols[1])), static_cast<int>(parse_long(cols[2]))};
      (*s.external_)[key] = parse_double(cols[3]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return s;
}

double SemanticScorer::score(const std::string& talk_id, Span src, std::string_view f_text, std::string_view t_text) const {
  if (!external_) return chrf(f_text, t_text);
  auto it = external_->find(Key{talk_id, src.start, src.len});
  if (it == external_->end())
    throw ValidationError("semantic scores file has no entry for " + talk_id + " [" + std::to_string(src.start) + ", " +
                          std::to_string(src.end()) + ")");
  return it->second;
}

std::string_view drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::Alpha: return "alpha";
    case DropReason::GammaLow: return "gamma_low";
    case DropReason::GammaHigh: return "gamma_high";
    case DropReason::Eta: return "eta";
  }
  return "alpha";
}

std::vector<DropReason> inter_reasons(double alpha, double gamma, double eta, const InterFilterParams& params) {
  std::vector<DropReason> out;
  if (!(alpha >= params.alpha_min)) out.push_back(DropReason::Alpha);
  if (!(gamma >= params.gamma_min)) out.push_back(DropReason::GammaLow);
  if (!(gamma <= params.gamma_max)) out.push_back(DropReason::GammaHigh);
  if (!(eta >= params.eta_min)) out.push_back(DropReason::Eta);
  return out;
}

namespace {

FilterDecision decide(const TrimResult& trimmed, const DocumentPair& doc, const ReferenceTranslation& ref,
                      const InterFilterParams& params, const SemanticScorer& scorer) {
  const AlignedPair& p = trimmed.pair;
  const ReferenceEntry& t = ref.at(p.src);
  const std::string f = span_text(doc.target_units, p.tgt);
  FilterDecision d;
  d.talk_id = doc.talk_id;
  d.pair = p;
  d.trims = trimmed.trims;
  d.alpha = content_coverage(f, t, params.coverage_pos);
  d.gamma = length_ratio(f, t.text);
  d.eta = scorer.score(doc.talk_id, p.src, f, t.text);
  d.reasons = inter_reasons(d.alpha, d.gamma, d.eta, params);
  d.keep = d.reasons.empty();
  return d;
}

InterResult collect(std::vector<FilterDecision> decisions) {
  InterResult out;
  for (const auto& d : decisions)
    if (d.keep) out.kept.push_back(d.pair);
  out.decisions = std::move(decisions);
  return out;
}

}  // namespace

InterResult apply_inter_filter(std::span<const TrimResult> pairs, const DocumentPair& doc, const ReferenceTranslation& ref,
                               const InterFilterParams& params, const SemanticScorer& scorer) {
  params.validate();
  std::vector<FilterDecision> decisions(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  const long count = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      decisions[k] = decide(pairs[k], doc, ref, params, scorer);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return collect(std::move(decisions));
}

InterResult apply_inter_filter_serial(std::span<const TrimResult> pairs, const DocumentPair& doc,
                                      const ReferenceTranslation& ref, const InterFilterParams& params,
                                      const SemanticScorer& scorer) {
  params.validate();
  std::vector<FilterDecision> decisions;
  for (const auto& p : pairs) decisions.push_back(decide(p, doc, ref, params, scorer));
  return collect(std::move(decisions));
}

std::string decisions_jsonl(std::span<const FilterDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    nlohmann::ordered_json j;
    j["talk_id"] = d.talk_id;
    j["src_start"] = d.pair.src.start;
    j["src_len"] = d.pair.src.len;
    j["tgt_start"] = d.pair.tgt.start;
    j["tgt_len"] = d.pair.tgt.len;
    j["cost"] = d.pair.cost;
    j["alpha"] = d.alpha;
    j["gamma"] = d.gamma;
    j["eta"] = d.eta;
    j["trims"] = nlohmann::ordered_json::array();
    for (const auto& t : d.trims) j["trims"].push_back({{"end", trim_end_name(t.end)}, {"chunk", t.chunk_index}});
    j["verdict"] = d.keep ? "keep" : "drop";
    j["reasons"] = nlohmann::ordered_json::array();
    for (auto r : d.reasons) j["reasons"].push_back(drop_reason_name(r));
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sialign
