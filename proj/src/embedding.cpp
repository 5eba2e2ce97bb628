#include "sialign/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/log.hpp"
#include "sialign/rng.hpp"
#include "sialign/text.hpp"

namespace sialign {

namespace {

constexpr char32_t kBoundary = 0x2;

// FNV-1a over the code points of one n-gram, keyed by seed and order.
std::uint64_t hash_gram(std::u32string_view gram, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ derive_seed(seed, gram.size());
  for (char32_t c : gram) {
    for (int b = 0; b < 4; ++b) {
      h ^= (static_cast<std::uint32_t>(c) >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

std::string to_string(const WindowKey& key) {
  return "(" + std::string(side_name(key.side)) + ", " + std::to_string(key.start) + ", " + std::to_string(key.len) + ")";
}

std::vector<Window> enumerate_windows(const std::vector<TextUnit>& units, int max_window) {
  if (max_window < 1) throw ValidationError("max_window must be >= 1");
  std::vector<Window> out;
  const int count = static_cast<int>(units.size());
  for (int w = 1; w <= max_window; ++w)
    for (int s = 0; s + w <= count; ++s) out.push_back({s, w, span_text(units, {s, w})});
  return out;
}

std::size_t window_count(int count, int max_window) {
  std::size_t total = 0;
  for (int w = 1; w <= max_window; ++w) total += static_cast<std::size_t>(std::max(0, count - w + 1));
  return total;
}

void FallbackParams::validate() const {
  if (dim < 64) throw ValidationError("fallback embedding dim must be >= 64");
  if (orders.empty()) throw ValidationError("fallback n-gram orders must be non-empty");
  for (int o : orders)
    if (o < 1 || o > 5) throw ValidationError("fallback n-gram orders must lie in 1..5");
}

std::vector<double> fallback_embed(std::string_view text, const FallbackParams& params) {
  params.validate();
  std::vector<double> v(static_cast<std::size_t>(params.dim), 0.0);
  std::u32string cps = to_u32(normalize_text(text));
  if (!cps.empty()) {
    std::u32string padded;
    padded.reserve(cps.size() + 2);
    padded.push_back(kBoundary);
    padded += cps;
    padded.push_back(kBoundary);
    for (int order : params.orders) {
      const auto n = static_cast<std::size_t>(order);
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        std::uint64_t h = hash_gram(std::u32string_view(padded).substr(i, n), params.seed);
        std::size_t bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(params.dim));
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
      }
    }
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw ValidationError("cosine: dimension mismatch " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

EmbeddingTable::EmbeddingTable(int dim, int max_window, int source_count, int target_count)
    : dim_(dim), max_window_(max_window), source_count_(source_count), target_count_(target_count) {
  if (dim < 1) throw ValidationError("embedding dim must be positive");
  if (max_window < 1) throw ValidationError("max_window must be >= 1");
  if (source_count < 0 || target_count < 0) throw ValidationError("negative unit count");
  const std::size_t slots = static_cast<std::size_t>(max_window) * static_cast<std::size_t>(source_count + target_count);
  data_.assign(slots * static_cast<std::size_t>(dim), 0.0);
  present_.assign(slots, 0);
}

bool EmbeddingTable::in_range(const WindowKey& key) const {
  return key.len >= 1 && key.len <= max_window_ && key.start >= 0 && key.start + key.len <= count(key.side);
}

std::size_t EmbeddingTable::slot(const WindowKey& key) const {
  const std::size_t base = key.side == Side::Source ? 0 : static_cast<std::size_t>(max_window_) * static_cast<std::size_t>(source_count_);
  return base + static_cast<std::size_t>(key.len - 1) * static_cast<std::size_t>(count(key.side)) +
         static_cast<std::size_t>(key.start);
}

bool EmbeddingTable::has(const WindowKey& key) const { return in_range(key) && present_[slot(key)]; }

std::span<const double> EmbeddingTable::at(const WindowKey& key) const {
  if (!has(key)) throw ValidationError("missing window embedding " + to_string(key));
  return {data_.data() + slot(key) * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

double EmbeddingTable::set(const WindowKey& key, std::span<const double> values) {
  if (!in_range(key)) throw ValidationError("window " + to_string(key) + " out of range");
  if (values.size() != static_cast<std::size_t>(dim_))
    throw ValidationError("window " + to_string(key) + ": dimension " + std::to_string(values.size()) + ", expected " +
                          std::to_string(dim_));
  double norm = 0;
  for (double x : values) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("window " + to_string(key) + ": zero or non-finite vector");
  const std::size_t s = slot(key);
  double* dst = data_.data() + s * static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i < values.size(); ++i) dst[i] = values[i] / norm;
  present_[s] = 1;
  return norm;
}

std::vector<WindowKey> EmbeddingTable::keys() const {
  std::vector<WindowKey> out;
  for (Side side : {Side::Source, Side::Target})
    for (int w = 1; w <= max_window_; ++w)
      for (int s = 0; s + w <= count(side); ++s) out.push_back({side, s, w});
  return out;
}

void EmbeddingTable::check_complete() const {
  for (const auto& k : keys())
    if (!present_[slot(k)]) throw ValidationError("missing window embedding " + to_string(k));
}

namespace {

struct PendingWindow {
  WindowKey key;
  std::string text;
};

std::vector<PendingWindow> all_windows(const DocumentPair& doc, int max_window) {
  std::vector<PendingWindow> out;
  for (Side side : {Side::Source, Side::Target})
    for (auto& w : enumerate_windows(doc.units(side), max_window)) out.push_back({{side, w.start, w.len}, std::move(w.text)});
  return out;
}

}  // namespace

EmbeddingTable build_fallback_table(const DocumentPair& doc, int max_window, const FallbackParams& params) {
  params.validate();
  EmbeddingTable table(params.dim, max_window, doc.m(), doc.n());
  const auto windows = all_windows(doc, max_window);
  const long count = static_cast<long>(windows.size());
  // Each iteration writes a distinct slot.
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < count; ++i) {
    const auto& w = windows[static_cast<std::size_t>(i)];
    table.set(w.key, fallback_embed(w.text, params));
  }
  return table;
}

EmbeddingTable build_fallback_table_serial(const DocumentPair& doc, int max_window, const FallbackParams& params) {
  params.validate();
  EmbeddingTable table(params.dim, max_window, doc.m(), doc.n());
  for (const auto& w : all_windows(doc, max_window)) table.set(w.key, fallback_embed(w.text, params));
  return table;
}

EmbeddingTable load_precomputed(const std::filesystem::path& path, int source_count, int target_count, int max_window) {
  const auto lines = read_lines(path);
  std::optional<EmbeddingTable> table;
  int dim = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i) + 1;
    if (lines[i].empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 4) throw ParseError(path, lineno, "expected 4 tab-separated columns");
    auto side = parse_side(cols[0]);
    if (!side) throw ParseError(path, lineno, "side must be 'source' or 'target'");
    WindowKey key{*side, 0, 0};
    std::vector<double> values;
    try {
      key.start = static_cast<int>(parse_long(cols[1]));
      key.len = static_cast<int>(parse_long(cols[2]));
      for (const auto& v : split(cols[3], ',')) values.push_back(parse_double(v));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    }
    if (dim < 0) {
      dim = static_cast<int>(values.size());
      table.emplace(dim, max_window, source_count, target_count);
    } else if (static_cast<int>(values.size()) != dim) {
      throw ParseError(path, lineno, "dimension " + std::to_string(values.size()) + " differs from " + std::to_string(dim));
    }
    if (!table->in_range(key)) throw ParseError(path, lineno, "unexpected window " + to_string(key));
    if (table->has(key)) throw ParseError(path, lineno, "duplicate window " + to_string(key));
    double norm;
    try {
      norm = table->set(key, values);
    } catch (const ValidationError& e) {
      throw ParseError(path, lineno, e.what());
    }
    if (std::abs(norm - 1.0) > 1e-3)
      log::warn(path.string() + ":" + std::to_string(lineno) + ": renormalized " + to_string(key) + " (norm " +
                format_double(norm) + ")");
  }
  if (!table) {
    if (source_count == 0 && target_count == 0) return EmbeddingTable(1, max_window, 0, 0);
    throw ParseError(path, 0, "no embedding rows; missing window " + to_string(WindowKey{source_count ? Side::Source : Side::Target, 0, 1}));
  }
  try {
    table->check_complete();
  } catch (const ValidationError& e) {
    throw ParseError(path, 0, e.what());
  }
  return std::move(*table);
}

std::string serialize_table(const EmbeddingTable& table) {
  std::string out;
  for (const auto& k : table.keys()) {
    if (!table.has(k)) continue;
    out += side_name(k.side);
    out += '\t' + std::to_string(k.start) + '\t' + std::to_string(k.len) + '\t';
    auto v = table.at(k);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_double(v[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sialign
