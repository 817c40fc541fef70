#include "mtkit/tda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mtkit/errors.hpp"
#include "mtkit/parallel.hpp"
#include "mtkit/rng.hpp"

namespace mtkit {

RareWordList select_rare_vocab(const Vocabulary& vocab, std::uint64_t threshold) {
  if (threshold < 1) throw Error("rare-word threshold must be >= 1");
  RareWordList rare;
  rare.threshold = threshold;
  for (const auto& entry : vocab.entries()) {
    if (entry.count < threshold) rare.words.insert(entry.surface);
  }
  return rare;
}

std::vector<SubstitutionCandidate> substitution_candidates(const NGramModel& fwd,
                                                           const NGramModel& bwd,
                                                           const RareWordList& rare,
                                                           const Sentence& sentence,
                                                           std::size_t position,
                                                           std::size_t top_k) {
  if (position >= sentence.size()) throw Error("substitution position out of range");
  if (rare.words.empty()) return {};

  std::span<const std::string> prefix(sentence.tokens.data(), position);
  std::span<const std::string> suffix(sentence.tokens.data() + position + 1,
                                      sentence.size() - position - 1);
  auto fwd_top = fwd.topk(prefix, top_k);
  auto bwd_top = bwd.topk(suffix, top_k);

  std::unordered_map<std::string, double> bwd_probs;
  bwd_probs.reserve(bwd_top.size());
  for (const auto& t : bwd_top) bwd_probs.emplace(t.surface, t.prob);

  std::vector<SubstitutionCandidate> out;
  for (const auto& t : fwd_top) {
    if (rare.words.count(t.surface) == 0) continue;
    auto it = bwd_probs.find(t.surface);
    if (it == bwd_probs.end()) continue;
    SubstitutionCandidate cand;
    cand.word = t.surface;
    cand.fwd_prob = t.prob;
    cand.bwd_prob = it->second;
    cand.score = t.prob * it->second;
    out.push_back(std::move(cand));
  }
  std::sort(out.begin(), out.end(), [](const SubstitutionCandidate& a, const SubstitutionCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.word < b.word;
  });
  return out;
}

std::optional<TranslationChoice> select_translation(const LexTable& table,
                                                    const NGramModel& fwd_tgt,
                                                    const NGramModel& bwd_tgt, const Sentence& tgt,
                                                    std::size_t tgt_position,
                                                    const std::string& new_src, double log_floor) {
  if (tgt_position >= tgt.size()) return std::nullopt;
  auto candidates = table.trans_candidates(new_src);
  if (candidates.empty()) return std::nullopt;

  std::span<const std::string> prefix(tgt.tokens.data(), tgt_position);
  std::span<const std::string> suffix(tgt.tokens.data() + tgt_position + 1,
                                      tgt.size() - tgt_position - 1);

  std::optional<TranslationChoice> best;
  for (const auto& cand : candidates) {
    double fwd = fwd_tgt.cond_prob(prefix, cand.tgt).prob;
    double bwd = bwd_tgt.cond_prob(suffix, cand.tgt).prob;
    double product = cand.p_inverse * cand.p_direct * fwd * bwd;
    if (product <= 0.0) continue;
    double log_score = std::log(product);
    if (!best || log_score > best->log_score ||
        (log_score == best->log_score && cand.tgt < best->word)) {
      best = TranslationChoice{cand.tgt, log_score};
    }
  }
  if (!best || best->log_score <= log_floor) return std::nullopt;
  return best;
}

namespace {

struct PositionProposal {
  std::size_t src_pos = 0;
  std::vector<SubstitutionCandidate> candidates;
};

struct SentenceProposal {
  std::vector<PositionProposal> positions;  // in sampled order
};

std::string pair_fingerprint(const Sentence& src, const Sentence& tgt) {
  std::string key = src.text();
  key += '\x1f';
  key += tgt.text();
  return key;
}

// Lowest-index target link of a source position; ambiguity is reported.
std::optional<std::pair<std::size_t, bool>> aligned_target(const SentencePair& pair,
                                                           std::size_t src_pos) {
  if (!pair.alignment) return std::nullopt;
  std::optional<std::size_t> lowest;
  bool ambiguous = false;
  for (const auto& [s, t] : *pair.alignment) {
    if (s != src_pos) continue;
    if (!lowest) {
      lowest = t;
    } else {
      ambiguous = true;
      if (t < *lowest) lowest = t;
    }
  }
  if (!lowest) return std::nullopt;
  return std::make_pair(*lowest, ambiguous);
}

}  // namespace

std::vector<AugmentationRecord> augment_corpus(const std::vector<SentencePair>& bitext,
                                               const AugmentDeps& deps,
                                               const AugmentConfig& config) {
  if (deps.fwd_src == nullptr || deps.bwd_src == nullptr || deps.fwd_tgt == nullptr ||
      deps.bwd_tgt == nullptr || deps.lex == nullptr || deps.rare == nullptr) {
    throw Error("augment_corpus is missing a dependency");
  }
  if (config.per_word_cap < 1) throw Error("per-word augmentation cap must be >= 1");

  std::vector<AugmentationRecord> records;
  std::unordered_map<std::string, std::size_t> word_uses;  // rare word -> emitted count
  std::unordered_set<std::string> emitted;                 // augmented pair fingerprints
  for (const auto& pair : bitext) emitted.insert(pair_fingerprint(pair.src, pair.tgt));

  for (std::size_t pass = 0;; ++pass) {
    if (config.max_passes > 0 && pass >= config.max_passes) break;

    // Parallel stage: sample positions and collect ranked rare-word
    // candidates. Pure per-sentence work keyed by (seed, sentence, pass).
    auto proposals = parallel_map(bitext.size(), config.workers, [&](std::size_t i) {
      SentenceProposal proposal;
      const Sentence& src = bitext[i].src;
      if (src.empty() || !bitext[i].alignment) return proposal;
      // Positions are visited in a fresh seeded order every pass; single mode
      // accepts at most one of them per pass.
      Rng rng(derive_seed(config.seed, "tda-positions", i, pass));
      std::vector<std::size_t> positions = rng.permutation(src.size());
      for (std::size_t pos : positions) {
        auto candidates =
            substitution_candidates(*deps.fwd_src, *deps.bwd_src, *deps.rare, src, pos, config.top_k);
        if (candidates.empty()) continue;
        proposal.positions.push_back({pos, std::move(candidates)});
      }
      return proposal;
    });

    // Sequential stage: caps, spacing, translation selection, deduplication.
    std::size_t new_records = 0;
    for (std::size_t i = 0; i < bitext.size(); ++i) {
      const SentencePair& original = bitext[i];
      std::vector<Substitution> staged;
      std::vector<std::size_t> used_positions;
      std::unordered_map<std::string, std::size_t> staged_uses;

      for (const auto& position : proposals[i].positions) {
        if (config.mode == AugmentMode::kMulti) {
          bool too_close = std::any_of(used_positions.begin(), used_positions.end(),
                                       [&](std::size_t p) {
                                         std::size_t d = p > position.src_pos ? p - position.src_pos
                                                                              : position.src_pos - p;
                                         return d < config.min_distance;
                                       });
          if (too_close) continue;
        }
        auto target = aligned_target(original, position.src_pos);
        if (!target) continue;  // unaligned source position: discard
        for (const auto& candidate : position.candidates) {
          std::size_t used = word_uses[candidate.word] + staged_uses[candidate.word];
          if (used >= config.per_word_cap) continue;  // cap reached for this rare word
          auto translation = select_translation(*deps.lex, *deps.fwd_tgt, *deps.bwd_tgt,
                                                original.tgt, target->first, candidate.word,
                                                config.log_floor);
          if (!translation) continue;
          Substitution sub;
          sub.src_pos = position.src_pos;
          sub.old_src = original.src.tokens[position.src_pos];
          sub.new_src = candidate.word;
          sub.tgt_pos = target->first;
          sub.old_tgt = original.tgt.tokens[target->first];
          sub.new_tgt = translation->word;
          sub.ambiguous_alignment = target->second;
          staged.push_back(std::move(sub));
          ++staged_uses[candidate.word];
          used_positions.push_back(position.src_pos);
          break;  // one substitution per sampled position
        }
        if (config.mode == AugmentMode::kSingle && !staged.empty()) break;
      }
      if (staged.empty()) continue;

      AugmentationRecord record;
      record.pair_index = i;
      record.pass = pass;
      record.augmented.src = original.src;
      record.augmented.tgt = original.tgt;
      record.augmented.alignment = original.alignment;
      for (const auto& sub : staged) {
        record.augmented.src.tokens[sub.src_pos] = sub.new_src;
        record.augmented.tgt.tokens[sub.tgt_pos] = sub.new_tgt;
      }
      std::string fingerprint = pair_fingerprint(record.augmented.src, record.augmented.tgt);
      if (emitted.count(fingerprint)) continue;  // duplicate pair: discard, no cap charge
      emitted.insert(std::move(fingerprint));
      for (const auto& [word, uses] : staged_uses) word_uses[word] += uses;
      record.substitutions = std::move(staged);
      records.push_back(std::move(record));
      ++new_records;
    }

    if (new_records == 0) break;  // a pass that generates nothing ends the loop
  }
  return records;
}

SynonymResource SynonymResource::load(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open synonym resource: " + path);
  SynonymResource resource;
  resource.name_ = name.empty() ? path : std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 3) {
      throw FormatError(path, line_no, 1, "expected 'word<TAB>synonym<TAB>score'");
    }
    double score = 0.0;
    try {
      score = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 3, "bad score '" + fields[2] + "'");
    }
    resource.add(fields[0], fields[1], score);
  }
  for (auto& [word, synonyms] : resource.table_) {
    std::stable_sort(synonyms.begin(), synonyms.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
  }
  return resource;
}

void SynonymResource::add(std::string_view word, std::string_view synonym, double score) {
  if (word == synonym) return;  // synonyms must differ from the key
  table_[std::string(word)].emplace_back(std::string(synonym), score);
}

const std::vector<std::pair<std::string, double>>* SynonymResource::synonyms(
    std::string_view word) const {
  auto it = table_.find(std::string(word));
  return it == table_.end() ? nullptr : &it->second;
}

ParaphraseResult paraphrase_substitute(const Sentence& sentence, const Vocabulary& vocab,
                                       const SynonymResource& resource, ParaphraseTargets targets,
                                       std::uint64_t rare_threshold) {
  ParaphraseResult result;
  result.sentence = sentence;
  for (auto& token : result.sentence.tokens) {
    bool oov = !vocab.contains(token);
    bool rare = targets == ParaphraseTargets::kOovAndRare && !oov &&
                vocab.count(token) < rare_threshold;
    if (!oov && !rare) continue;
    ++result.n_targets;
    const auto* synonyms = resource.synonyms(token);
    if (synonyms == nullptr) continue;
    for (const auto& [synonym, score] : *synonyms) {
      if (!vocab.contains(synonym)) continue;  // must already be translatable
      token = synonym;
      ++result.n_substituted;
      break;
    }
  }
  return result;
}

}  // namespace mtkit
