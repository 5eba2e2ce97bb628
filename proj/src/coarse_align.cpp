#include "sialign/coarse_align.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/rng.hpp"

namespace sialign {

using nlohmann::json;

void AlignParams::validate() const {
  if (max_src_span < 1 || max_tgt_span < 1) throw ValidationError("max spans must be >= 1");
  if (!(skip_penalty >= 0.0)) throw ValidationError("skip_penalty must be non-negative");
  if (!(prune_cost_threshold > 0.0)) throw ValidationError("prune_cost_threshold must be > 0");
  if (norm_sample_size < 1) throw ValidationError("norm_sample_size must be >= 1");
}

void AlignParams::validate_against(const EmbeddingTable& table) const {
  validate();
  if (max_src_span > table.max_window() || max_tgt_span > table.max_window())
    throw ValidationError("max spans (" + std::to_string(max_src_span) + ", " + std::to_string(max_tgt_span) +
                          ") exceed the embedding table's max_window " + std::to_string(table.max_window()));
}

void validate_alignment(const AlignmentSet& set, int source_count, int target_count) {
  int next_src = 0, next_tgt = 0;
  double sum = 0;
  for (std::size_t k = 0; k < set.links.size(); ++k) {
    const auto& l = set.links[k];
    const std::string where = "link " + std::to_string(k) + ": ";
    if (l.src.len < 0 || l.tgt.len < 0) throw ValidationError(where + "negative span length");
    if (l.src.empty() && l.tgt.empty()) throw ValidationError(where + "both spans empty");
    if (l.src.start != next_src || l.tgt.start != next_tgt)
      throw ValidationError(where + "not contiguous with the previous link");
    if (!(l.cost >= 0.0)) throw ValidationError(where + "negative cost");
    next_src = l.src.end();
    next_tgt = l.tgt.end();
    sum += l.cost;
  }
  if (next_src != source_count || next_tgt != target_count) throw ValidationError("links do not cover both documents");
  if (std::abs(sum - set.total_cost) > 1e-9) throw ValidationError("total_cost differs from the sum of link costs");
}

double normalization_denominator(const EmbeddingTable& table, int sample_size, std::uint64_t seed) {
  const int m = table.count(Side::Source), n = table.count(Side::Target);
  if (m < 1 || n < 1) throw ValidationError("normalization needs at least one source and one target unit");
  if (sample_size < 1) throw ValidationError("sample_size must be >= 1");
  Rng rng(seed);
  double total = 0;
  for (int s = 0; s < sample_size; ++s) {
    const int i = static_cast<int>(rng.index(static_cast<std::size_t>(m)));
    const int j = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    total += 1.0 - cosine(table.at({Side::Source, i, 1}), table.at({Side::Target, j, 1}));
  }
  return std::max(total / sample_size, 1e-6);
}

std::string_view span_scaling_name(SpanScaling s) { return s == SpanScaling::Product ? "product" : "mean"; }

std::optional<SpanScaling> parse_span_scaling(std::string_view name) {
  if (name == "product") return SpanScaling::Product;
  if (name == "mean") return SpanScaling::Mean;
  return std::nullopt;
}

double link_cost(Span src, Span tgt, const EmbeddingTable& table, double denom, double skip_penalty,
                 SpanScaling scaling) {
  if (src.empty() && tgt.empty()) throw ValidationError("link_cost: both spans empty");
  if (src.empty()) return skip_penalty * tgt.len;
  if (tgt.empty()) return skip_penalty * src.len;
  const double c = cosine(table.at({Side::Source, src.start, src.len}), table.at({Side::Target, tgt.start, tgt.len}));
  const double scale = scaling == SpanScaling::Product ? static_cast<double>(src.len) * tgt.len
                                                       : (src.len + tgt.len) / 2.0;
  return (1.0 - c) / denom * scale;
}

namespace {

// DP state over the (M+1) x (N+1) grid. Cell (i, j) holds the best cost of
// aligning the first i source and first j target units.
class AlignmentLattice {
 public:
  AlignmentLattice(const DocumentPair& doc, const EmbeddingTable& table, const AlignParams& params)
      : table_(table), params_(params), m_(doc.m()), n_(doc.n()) {
    params.validate();
    if (table.count(Side::Source) != m_ || table.count(Side::Target) != n_)
      throw ValidationError("embedding table covers " + std::to_string(table.count(Side::Source)) + "x" +
                            std::to_string(table.count(Side::Target)) + " units, talk " + doc.talk_id + " has " +
                            std::to_string(m_) + "x" + std::to_string(n_));
    // Name the first window the DP would need but the table lacks.
    for (Side side : {Side::Source, Side::Target}) {
      const int max_len = side == Side::Source ? params.max_src_span : params.max_tgt_span;
      for (int len = 1; len <= max_len; ++len)
        for (int s = 0; s + len <= table.count(side); ++s) table.at({side, s, len});
    }
    denom_ = (m_ > 0 && n_ > 0) ? normalization_denominator(table, params.norm_sample_size, params.rng_seed) : 1.0;
    const std::size_t cells = static_cast<std::size_t>(m_ + 1) * static_cast<std::size_t>(n_ + 1);
    cost_.assign(cells, std::numeric_limits<double>::infinity());
    back_src_.assign(cells, 0);
    back_tgt_.assign(cells, 0);
    cost_[0] = 0.0;
  }

  int m() const { return m_; }
  int n() const { return n_; }

  // Reads only cells with a smaller i + j.
  void relax(int i, int j) {
    if (i == 0 && j == 0) return;
    double best = std::numeric_limits<double>::infinity();
    int best_a = 0, best_b = 0;
    const int max_a = std::min(params_.max_src_span, i);
    const int max_b = std::min(params_.max_tgt_span, j);
    for (int a = 0; a <= max_a; ++a) {
      for (int b = 0; b <= max_b; ++b) {
        if (a == 0 && b == 0) continue;
        if ((a == 0 || b == 0) && a + b != 1) continue;
        const double c = cost_[idx(i - a, j - b)] +
                         link_cost({i - a, a}, {j - b, b}, table_, denom_, params_.skip_penalty, params_.span_scaling);
        if (c < best) {
          best = c;
          best_a = a;
          best_b = b;
        }
      }
    }
    const std::size_t k = idx(i, j);
    cost_[k] = best;
    back_src_[k] = static_cast<unsigned char>(best_a);
    back_tgt_[k] = static_cast<unsigned char>(best_b);
  }

  AlignmentSet trace(const std::string& talk_id) const {
    AlignmentSet out;
    out.talk_id = talk_id;
    out.params_used = params_;
    int i = m_, j = n_;
    while (i > 0 || j > 0) {
      const std::size_t k = idx(i, j);
      const int a = back_src_[k], b = back_tgt_[k];
      const Span src{i - a, a}, tgt{j - b, b};
      out.links.push_back({src, tgt, link_cost(src, tgt, table_, denom_, params_.skip_penalty, params_.span_scaling)});
      i -= a;
      j -= b;
    }
    std::reverse(out.links.begin(), out.links.end());
    for (const auto& l : out.links) out.total_cost += l.cost;
    return out;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j);
  }

  const EmbeddingTable& table_;
  AlignParams params_;
  int m_, n_;
  double denom_ = 1.0;
  std::vector<double> cost_;
  std::vector<unsigned char> back_src_, back_tgt_;
};

}  // namespace

AlignmentSet dp_align(const DocumentPair& doc, const EmbeddingTable& table, const AlignParams& params) {
  AlignmentLattice lattice(doc, table, params);
  const int m = lattice.m(), n = lattice.n();
  for (int d = 1; d <= m + n; ++d) {
    const int lo = std::max(0, d - n), hi = std::min(d, m);
#pragma omp parallel for schedule(static) if (hi - lo >= 8)
    for (int i = lo; i <= hi; ++i) lattice.relax(i, d - i);
  }
  return lattice.trace(doc.talk_id);
}

AlignmentSet dp_align_serial(const DocumentPair& doc, const EmbeddingTable& table, const AlignParams& params) {
  AlignmentLattice lattice(doc, table, params);
  for (int i = 0; i <= lattice.m(); ++i)
    for (int j = 0; j <= lattice.n(); ++j) lattice.relax(i, j);
  return lattice.trace(doc.talk_id);
}

PruneResult prune(const AlignmentSet& alignment, double threshold) {
  PruneResult out;
  out.kept.talk_id = alignment.talk_id;
  out.kept.params_used = alignment.params_used;
  for (const auto& l : alignment.links) {
    LinkRecord rec{l, false, ""};
    if (l.src.empty() || l.tgt.empty()) {
      rec.dropped = true;
      rec.drop_reason = "empty";
    } else if (l.cost > threshold) {
      rec.dropped = true;
      rec.drop_reason = "cost";
    } else {
      out.kept.links.push_back(l);
      out.kept.total_cost += l.cost;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<LinkRecord> unpruned_records(const AlignmentSet& alignment) {
  std::vector<LinkRecord> out;
  for (const auto& l : alignment.links) out.push_back({l, false, ""});
  return out;
}

std::string alignment_jsonl(std::string_view talk_id, std::span<const LinkRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["talk_id"] = talk_id;
    j["src_start"] = r.link.src.start;
    j["src_len"] = r.link.src.len;
    j["tgt_start"] = r.link.tgt.start;
    j["tgt_len"] = r.link.tgt.len;
    j["cost"] = r.link.cost;
    j["dropped"] = r.dropped;
    j["drop_reason"] = r.dropped ? json(r.drop_reason) : json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

AlignmentSet AlignmentFile::surviving() const {
  AlignmentSet set;
  set.talk_id = talk_id;
  for (const auto& r : records) {
    if (r.dropped) continue;
    set.links.push_back(r.link);
    set.total_cost += r.link.cost;
  }
  return set;
}

AlignmentSet AlignmentFile::all() const {
  AlignmentSet set;
  set.talk_id = talk_id;
  for (const auto& r : records) {
    set.links.push_back(r.link);
    set.total_cost += r.link.cost;
  }
  return set;
}

AlignmentFile read_alignment_jsonl(const std::filesystem::path& path) {
  AlignmentFile file;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i) + 1;
    if (lines[i].empty()) continue;
    try {
      json j = json::parse(lines[i]);
      std::string talk = j.at("talk_id").get<std::string>();
      if (file.talk_id.empty()) file.talk_id = talk;
      else if (talk != file.talk_id) throw ParseError(path, lineno, "mixed talk_ids '" + file.talk_id + "' and '" + talk + "'");
      LinkRecord r;
      r.link.src = {j.at("src_start").get<int>(), j.at("src_len").get<int>()};
      r.link.tgt = {j.at("tgt_start").get<int>(), j.at("tgt_len").get<int>()};
      r.link.cost = j.at("cost").get<double>();
      r.dropped = j.value("dropped", false);
      if (j.contains("drop_reason") && j["drop_reason"].is_string()) r.drop_reason = j["drop_reason"].get<std::string>();
      file.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return file;
}

}  // namespace sialign
