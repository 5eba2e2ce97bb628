#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sialign {

enum class Pos : std::uint8_t { Noun, Propn, Pron, Verb, Num, Other };

inline constexpr Pos kAllPos[] = {Pos::Noun, Pos::Propn, Pos::Pron,
                                  Pos::Verb, Pos::Num,   Pos::Other};

std::string_view pos_name(Pos pos);
std::optional<Pos> parse_pos(std::string_view name);

// Small set of POS tags.
class PosSet {
 public:
  constexpr PosSet() = default;
  constexpr PosSet(std::initializer_list<Pos> tags) {
    for (Pos p : tags) insert(p);
  }

  constexpr void insert(Pos p) { bits_ |= bit(p); }
  constexpr bool contains(Pos p) const { return (bits_ & bit(p)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const PosSet&) const = default;

  std::vector<std::string> names() const;
  static PosSet from_names(const std::vector<std::string>& names);  // throws ValidationError

 private:
  static constexpr std::uint8_t bit(Pos p) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(p)); }
  std::uint8_t bits_ = 0;
};

struct Token {
  std::string surface;
  Pos pos = Pos::Other;

  bool operator==(const Token&) const = default;
};

struct TextUnit {
  int index = 0;
  std::string text;
  std::vector<Token> tokens;

  bool operator==(const TextUnit&) const = default;
};

enum class InterpreterRank { S, A, B, Unknown };

std::string_view rank_name(InterpreterRank rank);
std::optional<InterpreterRank> parse_rank(std::string_view name);

enum class Side { Source, Target };

std::string_view side_name(Side side);
std::optional<Side> parse_side(std::string_view name);

// Half-open range [start, start + len) of unit indices.
struct Span {
  int start = 0;
  int len = 0;

  int end() const { return start + len; }
  bool empty() const { return len == 0; }

  auto operator<=>(const Span&) const = default;
};

struct AlignedPair {
  Span src;
  Span tgt;
  double cost = 0.0;

  bool operator==(const AlignedPair&) const = default;
};

struct DocumentPair {
  std::string talk_id;
  InterpreterRank rank = InterpreterRank::Unknown;
  std::vector<TextUnit> source_units;
  std::vector<TextUnit> target_units;

  int m() const { return static_cast<int>(source_units.size()); }
  int n() const { return static_cast<int>(target_units.size()); }
  const std::vector<TextUnit>& units(Side side) const {
    return side == Side::Source ? source_units : target_units;
  }

  bool operator==(const DocumentPair&) const = default;
};

// Unit texts joined with one space; empty span gives "".
std::string span_text(const std::vector<TextUnit>& units, Span span);

// Builds a unit from raw text and tokens, normalizing both and enforcing the
// surface re-concatenation invariant. Throws ValidationError.
TextUnit make_unit(int index, std::string_view text, std::vector<Token> tokens);

// Checks index contiguity, unit invariants, and M, N >= 1.
void validate_document(const DocumentPair& doc);

struct TalkManifest {
  std::string talk_id;
  InterpreterRank rank = InterpreterRank::Unknown;
  // Relative paths resolve against the manifest's directory.
  std::filesystem::path source_units_path;
  std::filesystem::path target_units_path;
  std::filesystem::path source_tags_path;
  std::filesystem::path target_tags_path;

  static TalkManifest load(const std::filesystem::path& path);
  std::string to_json() const;
};

// Parses one tagged-unit file: blank-line separated blocks of `surface\tpos`.
std::vector<std::vector<Token>> read_tagged_units(const std::filesystem::path& path);

// Reads the four files named by the manifest, resolving relative paths
// against base_dir.
DocumentPair load_document_pair(const TalkManifest& manifest,
                                const std::filesystem::path& base_dir);

// Loads a talk from its manifest file.
DocumentPair load_talk(const std::filesystem::path& manifest_path);

// Writes source.txt, target.txt, source.tags.tsv, target.tags.tsv and
// manifest.json into `dir`. Returns the manifest path.
std::filesystem::path write_document_pair(const DocumentPair& doc, const std::filesystem::path& dir);

std::string serialize_units(const std::vector<TextUnit>& units);
std::string serialize_tags(const std::vector<TextUnit>& units);

}  // namespace sialign
