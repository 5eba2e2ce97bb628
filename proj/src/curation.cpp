#include "sialign/curation.hpp"

#include <json.hpp>

#include <algorithm>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/text.hpp"

namespace sialign {

namespace {

std::string tri(const std::optional<bool>& v) {
  if (!v) return "";
  return *v ? "true" : "false";
}

std::string tri_name(const std::optional<bool>& v) { return v ? tri(v) : "unset"; }

std::optional<bool> parse_tri(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError("label must be 'true', 'false' or empty, got '" + s + "'");
}

std::string clean_field(const std::string& s) {
  // Normalized text has no tabs or newlines; collapse anyway for hand-written input.
  return normalize_text(s);
}

}  // namespace

void validate_record(const AnnotationRecord& r) {
  if (r.good_mt && !r.good_align) throw ValidationError("good_mt is set but good_align is unset");
  if (r.good_mt && *r.good_mt && !*r.good_align) throw ValidationError("good_mt is true but good_align is false");
  if (r.edited_target && normalize_text(*r.edited_target).empty())
    throw ValidationError("edited_target is set but empty after normalization");
  if (r.src.len < 1 || r.tgt.len < 1 || r.src.start < 0 || r.tgt.start < 0)
    throw ValidationError("spans must be non-empty with non-negative starts");
}

std::vector<AnnotationRecord> export_annotations(std::span<const AnnotationSource> sources) {
  std::vector<AnnotationRecord> out;
  for (const auto& s : sources) {
    for (const auto& p : s.pairs) {
      AnnotationRecord r;
      r.talk_id = s.doc->talk_id;
      r.src = p.src;
      r.tgt = p.tgt;
      r.source_text = span_text(s.doc->source_units, p.src);
      r.target_text = span_text(s.doc->target_units, p.tgt);
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return std::tie(a.talk_id, a.src, a.tgt) < std::tie(b.talk_id, b.src, b.tgt);
  });
  return out;
}

std::string annotations_tsv(std::span<const AnnotationRecord> records) {
  std::string out = std::string(kAnnotationHeader) + "\n";
  for (const auto& r : records) {
    out += clean_field(r.talk_id) + '\t' + std::to_string(r.src.start) + '\t' + std::to_string(r.src.len) + '\t' +
           std::to_string(r.tgt.start) + '\t' + std::to_string(r.tgt.len) + '\t' + clean_field(r.source_text) + '\t' +
           clean_field(r.target_text) + '\t' + tri(r.good_align) + '\t' + tri(r.good_mt) + '\t' +
           (r.edited_target ? clean_field(*r.edited_target) : std::string()) + '\n';
  }
  return out;
}

std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kAnnotationHeader) throw ParseError(path, 1, "missing or unexpected header");
  std::vector<AnnotationRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i) + 1;
    if (lines[i].empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 10) throw ParseError(path, lineno, "expected 10 columns, got " + std::to_string(cols.size()));
    AnnotationRecord r;
    try {
      r.talk_id = cols[0];
      r.src = {static_cast<int>(parse_long(cols[1])), static_cast<int>(parse_long(cols[2]))};
      r.tgt = {static_cast<int>(parse_long(cols[3])), static_cast<int>(parse_long(cols[4]))};
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    }
    r.source_text = cols[5];
    r.target_text = cols[6];
    try {
      r.good_align = parse_tri(cols[7]);
      r.good_mt = parse_tri(cols[8]);
      if (!cols[9].empty()) r.edited_target = cols[9];
      validate_record(r);
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

ImportResult import_annotations(const std::filesystem::path& path, const std::map<std::string, DocumentPair>* docs) {
  ImportResult result;
  for (const auto& r : parse_annotations(path)) {
    ++result.label_counts[tri_name(r.good_align) + "/" + tri_name(r.good_mt)];
    const DocumentPair* doc = nullptr;
    if (docs) {
      auto it = docs->find(r.talk_id);
      if (it == docs->end()) throw ValidationError(path.string() + ": unknown talk_id '" + r.talk_id + "'");
      doc = &it->second;
      if (r.src.end() > doc->m() || r.tgt.end() > doc->n())
        throw ValidationError(path.string() + ": talk " + r.talk_id + ": span outside document bounds");
    }
    if (!(r.good_align.value_or(false) && r.good_mt.value_or(false))) continue;
    CuratedPair c{r.talk_id, r.src, r.tgt, normalize_text(r.source_text), normalize_text(r.target_text)};
    if (doc) {
      c.source_text = span_text(doc->source_units, r.src);
      c.target_text = span_text(doc->target_units, r.tgt);
    }
    if (r.edited_target) {
      c.target_text = normalize_text(*r.edited_target);
      ++result.edited;
    }
    result.curated.push_back(std::move(c));
  }
  return result;
}

std::string curated_jsonl(std::span<const CuratedPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["talk_id"] = p.talk_id;
    j["src_start"] = p.src.start;
    j["src_len"] = p.src.len;
    j["tgt_start"] = p.tgt.start;
    j["tgt_len"] = p.tgt.len;
    j["source_text"] = p.source_text;
    j["target_text"] = p.target_text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string label_counts_tsv(const ImportResult& result) {
  std::string out = "good_align\tgood_mt\tcount\n";
  for (const auto& [key, count] : result.label_counts) {
    auto slash = key.find('/');
    out += key.substr(0, slash) + '\t' + key.substr(slash + 1) + '\t' + std::to_string(count) + '\n';
  }
  out += "edited\t\t" + std::to_string(result.edited) + '\n';
  return out;
}

}  // namespace sialign
