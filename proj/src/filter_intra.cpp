#include "sialign/filter_intra.hpp"

#include <json.hpp>

#include "sialign/error.hpp"
#include "sialign/io.hpp"

namespace sialign {

using nlohmann::json;

void IntraFilterParams::validate() const {
  if (content_pos.empty()) throw ValidationError("intra filter content_pos must be non-empty");
  if (max_trims_per_side < 0) throw ValidationError("max_trims_per_side must be >= 0");
}

bool has_content_word(const TextUnit& unit, const PosSet& content_pos) {
  for (const auto& t : unit.tokens)
    if (content_pos.contains(t.pos)) return true;
  return false;
}

TrimResult trim_boundaries(const AlignedPair& pair, const DocumentPair& doc, const IntraFilterParams& params) {
  params.validate();
  if (pair.tgt.empty() || pair.tgt.start < 0 || pair.tgt.end() > doc.n())
    throw ValidationError("trim_boundaries: target span must be non-empty and inside the document");
  TrimResult out{pair, pair, {}, false};
  Span& tgt = out.pair.tgt;
  auto content = [&](int idx) { return has_content_word(doc.target_units[static_cast<std::size_t>(idx)], params.content_pos); };

  for (int k = 0; k < params.max_trims_per_side && !content(tgt.start); ++k) {
    if (tgt.len == 1) {
      out.guard_hit = true;
      break;
    }
    out.trims.push_back({TrimEnd::Front, tgt.start});
    ++tgt.start;
    --tgt.len;
  }
  for (int k = 0; k < params.max_trims_per_side && !content(tgt.end() - 1); ++k) {
    if (tgt.len == 1) {
      out.guard_hit = true;
      break;
    }
    out.trims.push_back({TrimEnd::Back, tgt.end() - 1});
    --tgt.len;
  }
  return out;
}

std::vector<TrimResult> apply_intra_filter(std::span<const AlignedPair> pairs, const DocumentPair& doc,
                                           const IntraFilterParams& params) {
  params.validate();
  std::vector<TrimResult> out(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  const long count = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = trim_boundaries(pairs[k], doc, params);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string_view trim_end_name(TrimEnd end) { return end == TrimEnd::Front ? "front" : "back"; }

std::string trim_records_jsonl(std::string_view talk_id, std::span<const TrimResult> results) {
  std::string out;
  for (const auto& r : results) {
    json j;
    j["talk_id"] = talk_id;
    j["src_start"] = r.pair.src.start;
    j["src_len"] = r.pair.src.len;
    j["tgt_start"] = r.pair.tgt.start;
    j["tgt_len"] = r.pair.tgt.len;
    j["orig_tgt_start"] = r.original.tgt.start;
    j["orig_tgt_len"] = r.original.tgt.len;
    j["cost"] = r.pair.cost;
    j["trims"] = json::array();
    for (const auto& t : r.trims) j["trims"].push_back({{"end", trim_end_name(t.end)}, {"chunk", t.chunk_index}});
    j["guard"] = r.guard_hit;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrimResult> read_trim_records(const std::filesystem::path& path, std::string* talk_id) {
  std::vector<TrimResult> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const long lineno = static_cast<long>(i) + 1;
    try {
      json j = json::parse(lines[i]);
      if (talk_id) *talk_id = j.at("talk_id").get<std::string>();
      TrimResult r;
      r.pair.src = {j.at("src_start").get<int>(), j.at("src_len").get<int>()};
      r.pair.tgt = {j.at("tgt_start").get<int>(), j.at("tgt_len").get<int>()};
      r.pair.cost = j.at("cost").get<double>();
      r.original = r.pair;
      r.original.tgt = {j.at("orig_tgt_start").get<int>(), j.at("orig_tgt_len").get<int>()};
      for (const auto& t : j.at("trims")) {
        std::string end = t.at("end").get<std::string>();
        if (end != "front" && end != "back") throw ParseError(path, lineno, "bad trim end '" + end + "'");
        r.trims.push_back({end == "front" ? TrimEnd::Front : TrimEnd::Back, t.at("chunk").get<int>()});
      }
      r.guard_hit = j.value("guard", false);
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

}  // namespace sialign
