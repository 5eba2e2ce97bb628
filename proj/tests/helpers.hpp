#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"
#include "sialign/embedding.hpp"
#include "sialign/io.hpp"
#include "sialign/rng.hpp"
#include "sialign/text.hpp"

#include <unistd.h>

namespace testing {

namespace fs = std::filesystem;

// Unit from space-separated words; `pos` gives one tag per word, or one tag
// for all of them.
inline sialign::TextUnit unit(int index, const std::string& text, std::vector<sialign::Pos> pos = {sialign::Pos::Noun}) {
  std::vector<sialign::Token> tokens;
  std::size_t k = 0;
  for (const auto& w : sialign::split(text, ' ')) {
    if (w.empty()) continue;
    tokens.push_back({w, pos.size() == 1 ? pos[0] : pos.at(k)});
    ++k;
  }
  return sialign::make_unit(index, text, tokens);
}

inline sialign::DocumentPair doc(const std::vector<std::string>& src, const std::vector<std::string>& tgt,
                                 std::string id = "t1") {
  sialign::DocumentPair d;
  d.talk_id = std::move(id);
  d.rank = sialign::InterpreterRank::S;
  for (std::size_t i = 0; i < src.size(); ++i) d.source_units.push_back(unit(static_cast<int>(i), src[i]));
  for (std::size_t i = 0; i < tgt.size(); ++i) d.target_units.push_back(unit(static_cast<int>(i), tgt[i]));
  return d;
}

// Random word over a small alphabet.
inline std::string word(sialign::Rng& rng, const std::string& alphabet, int min_len, int max_len) {
  std::string w;
  const int len = rng.range(min_len, max_len);
  for (int i = 0; i < len; ++i) w += alphabet[rng.index(alphabet.size())];
  return w;
}

inline std::string sentence(sialign::Rng& rng, const std::string& alphabet, int words) {
  std::string s;
  for (int i = 0; i < words; ++i) s += (i ? " " : "") + word(rng, alphabet, 2, 5);
  return s;
}

// Table whose every window gets an independent random unit vector.
inline sialign::EmbeddingTable random_table(sialign::Rng& rng, int dim, int max_window, int m, int n) {
  sialign::EmbeddingTable t(dim, max_window, m, n);
  for (sialign::Side side : {sialign::Side::Source, sialign::Side::Target}) {
    const int count = t.count(side);
    for (int w = 1; w <= max_window; ++w)
      for (int s = 0; s + w <= count; ++s) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (auto& x : v) x = rng.uniform() * 2.0 - 1.0;
        t.set({side, s, w}, v);
      }
  }
  return t;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sialign_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing
