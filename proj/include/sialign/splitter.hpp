#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"

namespace sialign {

struct SplitManifest {
  std::set<std::string> train_ids;
  std::set<std::string> dev_ids;
  std::set<std::string> test_ids;
  std::set<std::string> excluded_ids;  // not in dev/test and absent from the allowlist
  std::string allowlist_id_source;

  std::string to_json() const;
  static SplitManifest from_json(const std::string& text);
};

// Plain text, one talk_id per line; blank lines ignored.
std::set<std::string> load_allowlist(const std::filesystem::path& path);

// train = (talks \ (dev u test)) n allowlist. Dev/test talks on the
// allowlist are contamination: ValidationError listing them. Dev/test ids not
// among `talks`, or shared by dev and test, are errors too.
SplitManifest make_split(const std::vector<std::string>& talks, const std::set<std::string>& allowlist,
                         const std::set<std::string>& dev_ids, const std::set<std::string>& test_ids,
                         std::string allowlist_source = "");

// Seeded draw of n_dev + n_test talks from those not on the allowlist.
std::pair<std::set<std::string>, std::set<std::string>> select_dev_test(const std::vector<std::string>& talks,
                                                                        const std::set<std::string>& allowlist,
                                                                        int n_dev, int n_test, std::uint64_t seed);

struct TalkCounts {
  std::string talk_id;
  InterpreterRank rank = InterpreterRank::Unknown;
  long coarse = 0;
  long intra = 0;
  long inter = 0;
};

struct StatsRow {
  std::string data;
  std::string subset;
  long talks = 0;
  long pairs = 0;
};

struct StatsTable {
  std::vector<StatsRow> rows;

  const StatsRow& row(const std::string& data) const;
  std::string to_tsv() const;
  std::string to_text() const;
};

// Train rows for COARSE / INTRA / INTER over all talks and the S-rank subset,
// then AUTO-DEV and AUTO-TEST counted on INTRA pairs.
StatsTable corpus_stats(const SplitManifest& split, const std::vector<TalkCounts>& counts);

}  // namespace sialign
