#include "sialign/splitter.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/rng.hpp"
#include "sialign/text.hpp"

namespace sialign {

using nlohmann::ordered_json;

namespace {

std::string list_ids(const std::set<std::string>& ids) {
  return join(std::vector<std::string>(ids.begin(), ids.end()), ", ");
}

}  // namespace

std::set<std::string> load_allowlist(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (auto& line : read_lines(path)) {
    std::string id = normalize_text(line);
    if (!id.empty()) out.insert(std::move(id));
  }
  return out;
}

SplitManifest make_split(const std::vector<std::string>& talks, const std::set<std::string>& allowlist,
                         const std::set<std::string>& dev_ids, const std::set<std::string>& test_ids,
                         std::string allowlist_source) {
  const std::set<std::string> known(talks.begin(), talks.end());
  std::set<std::string> both, unknown, contaminated;
  for (const auto& id : dev_ids) {
    if (test_ids.count(id)) both.insert(id);
    if (!known.count(id)) unknown.insert(id);
    if (allowlist.count(id)) contaminated.insert(id);
  }
  for (const auto& id : test_ids) {
    if (!known.count(id)) unknown.insert(id);
    if (allowlist.count(id)) contaminated.insert(id);
  }
  if (!both.empty()) throw ValidationError("talks in both dev and test: " + list_ids(both));
  if (!unknown.empty()) throw ValidationError("unknown talk ids: " + list_ids(unknown));
  if (!contaminated.empty())
    throw ValidationError("contamination: dev/test talks present in the allowlist: " + list_ids(contaminated));

  SplitManifest m;
  m.dev_ids = dev_ids;
  m.test_ids = test_ids;
  m.allowlist_id_source = std::move(allowlist_source);
  for (const auto& id : known) {
    if (dev_ids.count(id) || test_ids.count(id)) continue;
    (allowlist.count(id) ? m.train_ids : m.excluded_ids).insert(id);
  }
  return m;
}

std::pair<std::set<std::string>, std::set<std::string>> select_dev_test(const std::vector<std::string>& talks,
                                                                        const std::set<std::string>& allowlist,
                                                                        int n_dev, int n_test, std::uint64_t seed) {
  std::set<std::string> unique(talks.begin(), talks.end());
  std::vector<std::string> pool;
  for (const auto& id : unique)
    if (!allowlist.count(id)) pool.push_back(id);
  if (n_dev < 0 || n_test < 0 || static_cast<std::size_t>(n_dev + n_test) > pool.size())
    throw ValidationError("not enough non-allowlisted talks for " + std::to_string(n_dev) + " dev + " +
                          std::to_string(n_test) + " test");
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_dev + n_test); ++i)
    std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
  std::set<std::string> dev(pool.begin(), pool.begin() + n_dev);
  std::set<std::string> test(pool.begin() + n_dev, pool.begin() + n_dev + n_test);
  return {dev, test};
}

std::string SplitManifest::to_json() const {
  ordered_json j;
  j["train_ids"] = train_ids;
  j["dev_ids"] = dev_ids;
  j["test_ids"] = test_ids;
  j["excluded_ids"] = excluded_ids;
  j["allowlist_id_source"] = allowlist_id_source;
  return j.dump(2) + "\n";
}

SplitManifest SplitManifest::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  SplitManifest m;
  m.train_ids = j.at("train_ids").get<std::set<std::string>>();
  m.dev_ids = j.at("dev_ids").get<std::set<std::string>>();
  m.test_ids = j.at("test_ids").get<std::set<std::string>>();
  m.excluded_ids = j.value("excluded_ids", std::set<std::string>{});
  m.allowlist_id_source = j.value("allowlist_id_source", std::string());
  return m;
}

const StatsRow& StatsTable::row(const std::string& data) const {
  for (const auto& r : rows)
    if (r.data == data) return r;
  throw ValidationError("no stats row '" + data + "'");
}

StatsTable corpus_stats(const SplitManifest& split, const std::vector<TalkCounts>& counts) {
  std::map<std::string, const TalkCounts*> by_id;
  for (const auto& c : counts) by_id[c.talk_id] = &c;

  auto tally = [&](const std::set<std::string>& ids, bool srank_only, long TalkCounts::*field) {
    long talks = 0, pairs = 0;
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) continue;
      if (srank_only && it->second->rank != InterpreterRank::S) continue;
      ++talks;
      pairs += it->second->*field;
    }
    return std::pair{talks, pairs};
  };

  StatsTable table;
  const std::pair<const char*, long TalkCounts::*> variants[] = {
      {"COARSE", &TalkCounts::coarse}, {"INTRA", &TalkCounts::intra}, {"INTER", &TalkCounts::inter}};
  for (const auto& [name, field] : variants) {
    for (bool srank : {false, true}) {
      auto [t, p] = tally(split.train_ids, srank, field);
      table.rows.push_back({std::string(name) + (srank ? "^Srank" : ""), "train", t, p});
    }
  }
  auto [dt, dp] = tally(split.dev_ids, false, &TalkCounts::intra);
  table.rows.push_back({"AUTO-DEV", "dev", dt, dp});
  auto [tt, tp] = tally(split.test_ids, false, &TalkCounts::intra);
  table.rows.push_back({"AUTO-TEST", "test", tt, tp});
  return table;
}

std::string StatsTable::to_tsv() const {
  std::string out = "data\tsubset\ttalks\tpairs\n";
  for (const auto& r : rows)
    out += r.data + '\t' + r.subset + '\t' + std::to_string(r.talks) + '\t' + std::to_string(r.pairs) + '\n';
  return out;
}

std::string StatsTable::to_text() const {
  std::size_t w = 4;
  for (const auto& r : rows) w = std::max(w, r.data.size());
  std::ostringstream ss;
  ss << std::left << std::setw(static_cast<int>(w)) << "Data" << "  " << std::setw(6) << "Subset" << std::right
     << std::setw(8) << "# Talks" << std::setw(10) << "# Pairs" << '\n';
  for (const auto& r : rows)
    ss << std::left << std::setw(static_cast<int>(w)) << r.data << "  " << std::setw(6) << r.subset << std::right
       << std::setw(8) << r.talks << std::setw(10) << r.pairs << '\n';
  return ss.str();
}

}  // namespace sialign
