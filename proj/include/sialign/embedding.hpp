#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sialign/corpus.hpp"

namespace sialign {

struct WindowKey {
  Side side = Side::Source;
  int start = 0;
  int len = 1;

  auto operator<=>(const WindowKey&) const = default;
};

// "(target, 0, 1)"
std::string to_string(const WindowKey& key);

struct Window {
  int start = 0;
  int len = 1;
  std::string text;  // unit texts joined by one space
};

// All windows of 1..max_window consecutive units, ordered by length then start.
std::vector<Window> enumerate_windows(const std::vector<TextUnit>& units, int max_window);

// Closed-form number of windows: sum over w of max(0, count - w + 1).
std::size_t window_count(int count, int max_window);

struct FallbackParams {
  int dim = 256;
  std::vector<int> orders{2, 3};
  std::uint64_t seed = 17;

  void validate() const;  // throws ValidationError
};

// Signed hashed bag of character n-grams (text padded with one boundary
// marker per side), L2-normalized. Text without any n-gram maps to basis
// vector 0.
std::vector<double> fallback_embed(std::string_view text, const FallbackParams& params);

// Throws ValidationError on dimension mismatch or a zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

// Unit-norm vectors for every window of both documents of one talk.
class EmbeddingTable {
 public:
  EmbeddingTable(int dim, int max_window, int source_count, int target_count);

  int dim() const { return dim_; }
  int max_window() const { return max_window_; }
  int count(Side side) const { return side == Side::Source ? source_count_ : target_count_; }

  bool in_range(const WindowKey& key) const;
  bool has(const WindowKey& key) const;

  // Throws ValidationError naming the key when absent.
  std::span<const double> at(const WindowKey& key) const;

  // Stores a copy scaled to unit norm; returns the norm it had.
  double set(const WindowKey& key, std::span<const double> values);

  // Every in-range window present. Throws ValidationError naming the first gap.
  void check_complete() const;

  std::vector<WindowKey> keys() const;

 private:
  std::size_t slot(const WindowKey& key) const;

  int dim_;
  int max_window_;
  int source_count_;
  int target_count_;
  std::vector<double> data_;
  std::vector<char> present_;
};

// Fallback table over all windows of both sides. OpenMP-parallel over windows.
EmbeddingTable build_fallback_table(const DocumentPair& doc, int max_window, const FallbackParams& params);
// Reference single-threaded build; bitwise-identical result.
EmbeddingTable build_fallback_table_serial(const DocumentPair& doc, int max_window, const FallbackParams& params);

// Reads `side\tstart\twindow_len\tv1,v2,...`. Rows must cover exactly the
// windows of a talk with the given unit counts. Vectors whose norm is off by
// more than 1e-3 are renormalized with a warning.
EmbeddingTable load_precomputed(const std::filesystem::path& path, int source_count, int target_count, int max_window);

std::string serialize_table(const EmbeddingTable& table);

}  // namespace sialign
