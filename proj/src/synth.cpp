#include "sialign/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "sialign/error.hpp"
#include "sialign/io.hpp"
#include "sialign/rng.hpp"
#include "sialign/text.hpp"

namespace sialign {

void NoiseParams::validate() const {
  for (double r : {omission_rate, mistranslation_rate, split_rate, merge_rate, filler_rate})
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("noise rates must lie in [0, 1]");
  if (split_rate + merge_rate > 1.0) throw ValidationError("split_rate + merge_rate must be <= 1");
}

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::Clean: return "clean";
    case Transform::Omission: return "omission";
    case Transform::Mistranslation: return "mistranslation";
    case Transform::Split: return "split";
    case Transform::Merge: return "merge";
    case Transform::Filler: return "filler";
  }
  return "clean";
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Clean: return "clean";
    case Provenance::Omitted: return "omitted";
    case Provenance::Mistranslated: return "mistranslated";
    case Provenance::SplitPart: return "split_part";
    case Provenance::Merged: return "merged";
    case Provenance::Filler: return "filler";
  }
  return "clean";
}

Transform sample_transform(double u, const NoiseParams& noise) {
  const std::array<std::pair<double, Transform>, 5> rates{{{noise.omission_rate, Transform::Omission},
                                                            {noise.mistranslation_rate, Transform::Mistranslation},
                                                            {noise.split_rate, Transform::Split},
                                                            {noise.merge_rate, Transform::Merge},
                                                            {noise.filler_rate, Transform::Filler}}};
  double total = 0;
  for (const auto& r : rates) total += r.first;
  const double scale = total > 1.0 ? 1.0 / total : 1.0;
  double acc = 0;
  for (const auto& [rate, t] : rates) {
    acc += rate * scale;
    if (u < acc) return t;
  }
  return Transform::Clean;
}

namespace {

// Source tokens use Latin letters, mistranslations Cyrillic, fillers are
// hiragana discourse markers; the three blocks share no characters.
const std::vector<std::string> kSourceLetters = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m",
                                                 "n", "o", "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z"};
const std::vector<std::string> kNoiseLetters = {"а", "б", "в", "г", "д", "е", "ж", "з", "и", "к", "л", "м", "н",
                                                "о", "п", "р", "с", "т", "у", "ф", "х", "ц", "ч", "ш", "ы", "я"};
const std::vector<std::string> kFillers = {"じゃあ", "えーと", "あの", "まあ", "その"};

// Katakana-style rendering: l -> r, v -> b, and a 'u' after a final d, g, k,
// p or t.
std::string transliterate(const std::string& token) {
  std::string out;
  for (char c : token) out.push_back(c == 'l' ? 'r' : c == 'v' ? 'b' : c);
  if (std::string_view("dgkpt").find(out.back()) != std::string_view::npos) out.push_back('u');
  return out;
}

Pos sample_pos(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.35) return Pos::Noun;
  if (u < 0.55) return Pos::Verb;
  if (u < 0.65) return Pos::Propn;
  if (u < 0.70) return Pos::Num;
  if (u < 0.75) return Pos::Pron;
  return Pos::Other;
}

std::vector<Token> make_vocabulary(Rng& rng, int size, const std::vector<std::string>& letters) {
  std::set<std::string> seen;
  std::vector<Token> vocab;
  while (static_cast<int>(vocab.size()) < size) {
    std::string word;
    const int len = rng.range(3, 7);
    for (int i = 0; i < len; ++i) word += letters[rng.index(letters.size())];
    if (!seen.insert(word).second) continue;
    vocab.push_back({word, sample_pos(rng)});
  }
  return vocab;
}

std::vector<Token> render(const std::vector<Token>& source) {
  std::vector<Token> out;
  for (const auto& t : source) out.push_back({transliterate(t.surface), t.pos});
  return out;
}

std::string surface_text(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

class TalkBuilder {
 public:
  explicit TalkBuilder(SynthTalk& talk) : talk_(talk) {}

  void add_target(const std::vector<Token>& tokens, Provenance prov) {
    const int idx = talk_.doc.n();
    talk_.doc.target_units.push_back(make_unit(idx, surface_text(tokens), tokens));
    talk_.target_provenance.push_back(prov);
  }

  void link(int src_start, int src_len, int tgt_start) {
    talk_.gold.links.push_back({{src_start, src_len}, {tgt_start, talk_.doc.n() - tgt_start}, 0.0});
  }

 private:
  SynthTalk& talk_;
};

}  // namespace

SynthTalk generate_talk(std::uint64_t seed, int m, const NoiseParams& noise, int vocab_size, int reference_max_window) {
  if (m < 1) throw ValidationError("synthetic talk needs m >= 1");
  if (vocab_size < 50) throw ValidationError("vocab_size must be >= 50");
  if (reference_max_window < 1) throw ValidationError("reference window must be >= 1");
  noise.validate();

  const std::uint64_t talk_seed = derive_seed(seed, noise.rng_seed);
  Rng vocab_rng(derive_seed(talk_seed, 1));
  Rng transform_rng(derive_seed(talk_seed, 2));
  Rng content(derive_seed(talk_seed, 3));

  const auto vocab = make_vocabulary(vocab_rng, vocab_size, kSourceLetters);
  const auto noise_vocab = make_vocabulary(vocab_rng, vocab_size, kNoiseLetters);

  SynthTalk talk;
  char id[48];
  std::snprintf(id, sizeof id, "synth_%016llx", static_cast<unsigned long long>(talk_seed));
  talk.doc.talk_id = id;
  talk.gold.talk_id = id;
  talk.reference = ReferenceTranslation(id);

  std::vector<std::vector<Token>> sentences(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto& s = sentences[static_cast<std::size_t>(i)];
    const int len = content.range(5, 12);
    for (int k = 0; k < len; ++k) s.push_back(vocab[content.index(vocab.size())]);
    talk.doc.source_units.push_back(make_unit(i, surface_text(s), s));
  }

  TalkBuilder b(talk);
  talk.transforms.assign(static_cast<std::size_t>(m), Transform::Clean);
  talk.source_provenance.assign(static_cast<std::size_t>(m), Provenance::Clean);
  for (int i = 0; i < m; ++i) {
    const auto& s = sentences[static_cast<std::size_t>(i)];
    Transform t = sample_transform(transform_rng.uniform(), noise);
    if (t == Transform::Merge && i + 1 >= m) t = Transform::Clean;
    talk.transforms[static_cast<std::size_t>(i)] = t;
    const int tgt_start = talk.doc.n();
    switch (t) {
      case Transform::Clean:
        b.add_target(render(s), Provenance::Clean);
        b.link(i, 1, tgt_start);
        break;
      case Transform::Omission:
        talk.source_provenance[static_cast<std::size_t>(i)] = Provenance::Omitted;
        b.link(i, 1, tgt_start);
        break;
      case Transform::Mistranslation: {
        std::vector<Token> wrong;
        for (std::size_t k = 0; k < s.size(); ++k) wrong.push_back(noise_vocab[content.index(noise_vocab.size())]);
        talk.source_provenance[static_cast<std::size_t>(i)] = Provenance::Mistranslated;
        b.add_target(wrong, Provenance::Mistranslated);
        b.link(i, 1, tgt_start);
        break;
      }
      case Transform::Split: {
        const auto rendered = render(s);
        const int len = static_cast<int>(rendered.size());
        const int parts = std::min(content.range(2, 3), len);
        std::vector<int> cuts;
        while (static_cast<int>(cuts.size()) < parts - 1) {
          const int c = content.range(1, len - 1);
          if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(len);
        int begin = 0;
        for (int c : cuts) {
          b.add_target({rendered.begin() + begin, rendered.begin() + c}, Provenance::SplitPart);
          begin = c;
        }
        talk.source_provenance[static_cast<std::size_t>(i)] = Provenance::SplitPart;
        b.link(i, 1, tgt_start);
        break;
      }
      case Transform::Merge: {
        auto rendered = render(s);
        const auto next = render(sentences[static_cast<std::size_t>(i + 1)]);
        rendered.insert(rendered.end(), next.begin(), next.end());
        b.add_target(rendered, Provenance::Merged);
        talk.transforms[static_cast<std::size_t>(i + 1)] = Transform::Merge;
        talk.source_provenance[static_cast<std::size_t>(i)] = Provenance::Merged;
        talk.source_provenance[static_cast<std::size_t>(i + 1)] = Provenance::Merged;
        b.link(i, 2, tgt_start);
        ++i;
        break;
      }
      case Transform::Filler: {
        std::vector<Token> filler;
        const int words = content.range(1, 2);
        for (int k = 0; k < words; ++k)
          filler.push_back({kFillers[content.index(kFillers.size())], Pos::Other});
        const bool front = content.bernoulli(0.5);
        if (front) b.add_target(filler, Provenance::Filler);
        b.add_target(render(s), Provenance::Clean);
        if (!front) b.add_target(filler, Provenance::Filler);
        b.link(i, 1, tgt_start);
        break;
      }
    }
  }

  for (int w = 1; w <= reference_max_window; ++w) {
    for (int start = 0; start + w <= m; ++start) {
      std::vector<Token> tokens;
      for (int k = start; k < start + w; ++k) {
        auto r = render(sentences[static_cast<std::size_t>(k)]);
        tokens.insert(tokens.end(), r.begin(), r.end());
      }
      talk.reference.add({{start, w}, surface_text(tokens), tokens});
    }
  }
  return talk;
}

std::vector<SynthTalk> generate_corpus(std::uint64_t seed, int talks, int m, const NoiseParams& noise, int vocab_size,
                                       int reference_max_window) {
  if (talks < 0) throw ValidationError("talk count must be >= 0");
  std::vector<SynthTalk> out(static_cast<std::size_t>(talks));
  std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < talks; ++k) {
    try {
      SynthTalk t = generate_talk(derive_seed(seed, static_cast<std::uint64_t>(k)), m, noise, vocab_size, reference_max_window);
      char id[32];
      std::snprintf(id, sizeof id, "synth_%04d", k);
      t.doc.talk_id = id;
      t.gold.talk_id = id;
      ReferenceTranslation ref(id);
      for (int w = 1; w <= reference_max_window; ++w)
        for (int s = 0; s + w <= m; ++s) ref.add(t.reference.at({s, w}));
      t.reference = std::move(ref);
      t.doc.rank = (k % 2 == 0) ? InterpreterRank::S : InterpreterRank::A;
      out[static_cast<std::size_t>(k)] = std::move(t);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

LinkScore score_alignment(const AlignmentSet& predicted, const AlignmentSet& gold) {
  if (predicted.talk_id != gold.talk_id)
    throw ValidationError("score_alignment: talk mismatch '" + predicted.talk_id + "' vs '" + gold.talk_id + "'");
  std::set<std::pair<Span, Span>> gold_links, pred_links;
  for (const auto& l : gold.links)
    if (!l.src.empty() && !l.tgt.empty()) gold_links.insert({l.src, l.tgt});
  for (const auto& l : predicted.links)
    if (!l.src.empty() && !l.tgt.empty()) pred_links.insert({l.src, l.tgt});
  std::size_t matched = 0;
  for (const auto& l : pred_links) matched += gold_links.count(l);
  LinkScore s;
  s.precision = pred_links.empty() ? 0.0 : static_cast<double>(matched) / pred_links.size();
  s.recall = gold_links.empty() ? 0.0 : static_cast<double>(matched) / gold_links.size();
  s.f1 = (s.precision + s.recall) > 0.0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

BenchRow score_talks(const BenchSetting& setting, const std::vector<AlignmentSet>& predicted,
                     const std::vector<AlignmentSet>& gold) {
  if (predicted.size() != gold.size()) throw ValidationError("score_talks: predicted/gold count mismatch");
  BenchRow row;
  row.setting = setting;
  row.talks = static_cast<int>(gold.size());
  for (std::size_t k = 0; k < gold.size(); ++k) {
    row.per_talk.push_back(score_alignment(predicted[k], gold[k]));
    row.mean.precision += row.per_talk.back().precision;
    row.mean.recall += row.per_talk.back().recall;
    row.mean.f1 += row.per_talk.back().f1;
  }
  if (row.talks > 0) {
    row.mean.precision /= row.talks;
    row.mean.recall /= row.talks;
    row.mean.f1 /= row.talks;
  }
  return row;
}

BenchRow run_bench_setting(const BenchConfig& config, const BenchSetting& setting) {
  config.align.validate();
  const auto corpus = generate_corpus(config.seed, config.talks, config.sentences, setting.noise, config.vocab_size, 1);
  std::vector<AlignmentSet> predicted(corpus.size()), gold(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  const long count = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const auto& talk = corpus[i];
      const auto table = build_fallback_table(talk.doc, config.max_window, config.embed);
      predicted[i] = prune(dp_align(talk.doc, table, config.align), config.align.prune_cost_threshold).kept;
      gold[i] = talk.gold;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return score_talks(setting, predicted, gold);
}

std::string bench_tsv(const std::vector<BenchRow>& rows) {
  std::string out =
      "setting\tomission_rate\tmistranslation_rate\tsplit_rate\tmerge_rate\tfiller_rate\ttalks\tprecision\trecall\tf1\n";
  for (const auto& r : rows) {
    const auto& n = r.setting.noise;
    out += r.setting.label + '\t' + format_double(n.omission_rate) + '\t' + format_double(n.mistranslation_rate) + '\t' +
           format_double(n.split_rate) + '\t' + format_double(n.merge_rate) + '\t' + format_double(n.filler_rate) + '\t' +
           std::to_string(r.talks) + '\t' + format_double(r.mean.precision) + '\t' + format_double(r.mean.recall) + '\t' +
           format_double(r.mean.f1) + '\n';
  }
  return out;
}

}  // namespace sialign
