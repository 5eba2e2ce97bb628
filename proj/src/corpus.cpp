#include "sialign/corpus.hpp"

#include <json.hpp>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/text.hpp"

namespace sialign {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view pos_name(Pos pos) {
  switch (pos) {
    case Pos::Noun: return "NOUN";
    case Pos::Propn: return "PROPN";
    case Pos::Pron: return "PRON";
    case Pos::Verb: return "VERB";
    case Pos::Num: return "NUM";
    case Pos::Other: return "OTHER";
  }
  return "OTHER";
}

std::optional<Pos> parse_pos(std::string_view name) {
  for (Pos p : kAllPos)
    if (pos_name(p) == name) return p;
  return std::nullopt;
}

std::vector<std::string> PosSet::names() const {
  std::vector<std::string> out;
  for (Pos p : kAllPos)
    if (contains(p)) out.emplace_back(pos_name(p));
  return out;
}

PosSet PosSet::from_names(const std::vector<std::string>& names) {
  PosSet set;
  for (const auto& n : names) {
    auto p = parse_pos(n);
    if (!p) throw ValidationError("unknown POS tag '" + n + "'");
    set.insert(*p);
  }
  return set;
}

std::string_view rank_name(InterpreterRank rank) {
  switch (rank) {
    case InterpreterRank::S: return "S";
    case InterpreterRank::A: return "A";
    case InterpreterRank::B: return "B";
    case InterpreterRank::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<InterpreterRank> parse_rank(std::string_view name) {
  for (auto r : {InterpreterRank::S, InterpreterRank::A, InterpreterRank::B, InterpreterRank::Unknown})
    if (rank_name(r) == name) return r;
  return std::nullopt;
}

std::string_view side_name(Side side) { return side == Side::Source ? "source" : "target"; }

std::optional<Side> parse_side(std::string_view name) {
  if (name == "source") return Side::Source;
  if (name == "target") return Side::Target;
  return std::nullopt;
}

std::string span_text(const std::vector<TextUnit>& units, Span span) {
  std::string out;
  for (int i = span.start; i < span.end(); ++i) {
    if (i > span.start) out += ' ';
    out += units.at(static_cast<std::size_t>(i)).text;
  }
  return out;
}

TextUnit make_unit(int index, std::string_view text, std::vector<Token> tokens) {
  TextUnit unit;
  unit.index = index;
  unit.text = normalize_text(text);
  if (tokens.empty()) throw ValidationError("unit " + std::to_string(index) + " has no tokens");
  std::u32string joined;
  for (auto& tok : tokens) {
    tok.surface = normalize_text(tok.surface);
    if (tok.surface.empty()) throw ValidationError("unit " + std::to_string(index) + " has an empty token surface");
    joined += without_whitespace(tok.surface);
  }
  if (joined != without_whitespace(unit.text))
    throw ValidationError("unit " + std::to_string(index) + ": token surfaces do not re-concatenate to the text");
  unit.tokens = std::move(tokens);
  return unit;
}

void validate_document(const DocumentPair& doc) {
  if (doc.source_units.empty() || doc.target_units.empty())
    throw ValidationError("talk " + doc.talk_id + ": both sides need at least one unit");
  for (Side side : {Side::Source, Side::Target}) {
    const auto& units = doc.units(side);
    for (std::size_t i = 0; i < units.size(); ++i) {
      const TextUnit& u = units[i];
      if (u.index != static_cast<int>(i))
        throw ValidationError("talk " + doc.talk_id + ": " + std::string(side_name(side)) + " unit indices not contiguous");
      make_unit(u.index, u.text, u.tokens);
    }
  }
}

TalkManifest TalkManifest::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path, 1, e.what());
  }
  TalkManifest m;
  try {
    m.talk_id = j.at("talk_id").get<std::string>();
    std::string rank = j.value("interpreter_rank", std::string("UNKNOWN"));
    auto r = parse_rank(rank);
    if (!r) throw ParseError(path, 1, "unknown interpreter_rank '" + rank + "'");
    m.rank = *r;
    m.source_units_path = j.at("source_units_path").get<std::string>();
    m.target_units_path = j.at("target_units_path").get<std::string>();
    m.source_tags_path = j.at("source_tags_path").get<std::string>();
    m.target_tags_path = j.at("target_tags_path").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(path, 1, e.what());
  }
  if (m.talk_id.empty()) throw ParseError(path, 1, "empty talk_id");
  return m;
}

std::string TalkManifest::to_json() const {
  json j;
  j["talk_id"] = talk_id;
  j["interpreter_rank"] = std::string(rank_name(rank));
  j["source_units_path"] = source_units_path.generic_string();
  j["target_units_path"] = target_units_path.generic_string();
  j["source_tags_path"] = source_tags_path.generic_string();
  j["target_tags_path"] = target_tags_path.generic_string();
  return j.dump(2) + "\n";
}

namespace {

bool is_blank(const std::string& line) {
  for (char c : line)
    if (c != ' ' && c != '\t') return false;
  return true;
}

struct TaggedBlock {
  long first_line = 0;
  std::vector<Token> tokens;
};

std::vector<TaggedBlock> read_tagged_blocks(const fs::path& path) {
  std::vector<TaggedBlock> blocks;
  auto lines = read_lines(path);
  bool open = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i) + 1;
    if (is_blank(lines[i])) {
      open = false;
      continue;
    }
    auto cols = split(lines[i], '\t');
    if (cols.size() != 2) throw ParseError(path, lineno, "expected 2 tab-separated columns, got " + std::to_string(cols.size()));
    std::string surface = normalize_text(cols[0]);
    if (surface.empty()) throw ParseError(path, lineno, "empty token surface");
    auto pos = parse_pos(cols[1]);
    if (!pos) throw ParseError(path, lineno, "POS tag '" + cols[1] + "' is not in the tag set");
    if (!open) {
      blocks.push_back({lineno, {}});
      open = true;
    }
    blocks.back().tokens.push_back({std::move(surface), *pos});
  }
  return blocks;
}

std::vector<TextUnit> load_side(const fs::path& units_path, const fs::path& tags_path) {
  auto lines = read_lines(units_path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  auto blocks = read_tagged_blocks(tags_path);
  if (blocks.size() != lines.size())
    throw ParseError(tags_path, 0, std::to_string(blocks.size()) + " token blocks for " + std::to_string(lines.size()) +
                                       " lines in " + units_path.string());
  std::vector<TextUnit> units;
  units.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i) + 1;
    if (normalize_text(lines[i]).empty()) throw ParseError(units_path, lineno, "empty unit");
    try {
      units.push_back(make_unit(static_cast<int>(i), lines[i], std::move(blocks[i].tokens)));
    } catch (const ValidationError& e) {
      throw ParseError(units_path, lineno, e.what());
    }
  }
  return units;
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

}  // namespace

std::vector<std::vector<Token>> read_tagged_units(const fs::path& path) {
  std::vector<std::vector<Token>> out;
  for (auto& b : read_tagged_blocks(path)) out.push_back(std::move(b.tokens));
  return out;
}

DocumentPair load_document_pair(const TalkManifest& manifest, const fs::path& base_dir) {
  DocumentPair doc;
  doc.talk_id = manifest.talk_id;
  doc.rank = manifest.rank;
  doc.source_units = load_side(resolve(base_dir, manifest.source_units_path), resolve(base_dir, manifest.source_tags_path));
  doc.target_units = load_side(resolve(base_dir, manifest.target_units_path), resolve(base_dir, manifest.target_tags_path));
  if (doc.source_units.empty()) throw ParseError(resolve(base_dir, manifest.source_units_path), 0, "no units");
  if (doc.target_units.empty()) throw ParseError(resolve(base_dir, manifest.target_units_path), 0, "no units");
  return doc;
}

DocumentPair load_talk(const fs::path& manifest_path) {
  return load_document_pair(TalkManifest::load(manifest_path), manifest_path.parent_path());
}

std::string serialize_units(const std::vector<TextUnit>& units) {
  std::string out;
  for (const auto& u : units) {
    out += u.text;
    out += '\n';
  }
  return out;
}

std::string serialize_tags(const std::vector<TextUnit>& units) {
  std::string out;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (i) out += '\n';
    for (const auto& t : units[i].tokens) {
      out += t.surface;
      out += '\t';
      out += pos_name(t.pos);
      out += '\n';
    }
  }
  return out;
}

fs::path write_document_pair(const DocumentPair& doc, const fs::path& dir) {
  TalkManifest m;
  m.talk_id = doc.talk_id;
  m.rank = doc.rank;
  m.source_units_path = "source.txt";
  m.target_units_path = "target.txt";
  m.source_tags_path = "source.tags.tsv";
  m.target_tags_path = "target.tags.tsv";
  write_file_atomic(dir / m.source_units_path, serialize_units(doc.source_units));
  write_file_atomic(dir / m.target_units_path, serialize_units(doc.target_units));
  write_file_atomic(dir / m.source_tags_path, serialize_tags(doc.source_units));
  write_file_atomic(dir / m.target_tags_path, serialize_tags(doc.target_units));
  const fs::path manifest_path = dir / "manifest.json";
  write_file_atomic(manifest_path, m.to_json());
  return manifest_path;
}

}  // namespace sialign
