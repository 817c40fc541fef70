#ifndef MTKIT_TDA_HPP
#define MTKIT_TDA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtkit/corpus.hpp"
#include "mtkit/lex_table.hpp"
#include "mtkit/ngram.hpp"

namespace mtkit {

struct RareWordList {
  std::unordered_set<std::string> words;
  std::uint64_t threshold = 100;  // R
};

// Vocabulary entries with fewer than `threshold` occurrences.
RareWordList select_rare_vocab(const Vocabulary& vocab, std::uint64_t threshold = 100);

struct SubstitutionCandidate {
  std::string word;
  double fwd_prob = 0.0;
  double bwd_prob = 0.0;
  double score = 0.0;  // fwd_prob * bwd_prob
};

// Rare words present in both the forward top-K (given the prefix) and the
// backward top-K (given the suffix), ranked by the probability product.
std::vector<SubstitutionCandidate> substitution_candidates(const NGramModel& fwd,
                                                           const NGramModel& bwd,
                                                           const RareWordList& rare,
                                                           const Sentence& sentence,
                                                           std::size_t position,
                                                           std::size_t top_k = 1000);

struct TranslationChoice {
  std::string word;
  double log_score = 0.0;
};

// argmax over trans(new_src) of P(s|t) P(t|s) P_fwd(t | prefix) P_bwd(t | suffix).
// Returns nullopt when there is no candidate or the best log score does not
// clear `log_floor` (the augmented sentence is then discarded).
std::optional<TranslationChoice> select_translation(const LexTable& table,
                                                    const NGramModel& fwd_tgt,
                                                    const NGramModel& bwd_tgt, const Sentence& tgt,
                                                    std::size_t tgt_position,
                                                    const std::string& new_src, double log_floor);

enum class AugmentMode { kSingle, kMulti };  // one substitution per pair vs several

struct Substitution {
  std::size_t src_pos = 0;
  std::string old_src;
  std::string new_src;
  std::size_t tgt_pos = 0;
  std::string old_tgt;
  std::string new_tgt;
  bool ambiguous_alignment = false;  // several target links; the lowest was used
};

struct AugmentationRecord {
  std::size_t pair_index = 0;  // index into the input bitext
  std::size_t pass = 0;
  SentencePair augmented;
  std::vector<Substitution> substitutions;
};

struct AugmentDeps {
  const NGramModel* fwd_src = nullptr;
  const NGramModel* bwd_src = nullptr;
  const NGramModel* fwd_tgt = nullptr;
  const NGramModel* bwd_tgt = nullptr;
  const LexTable* lex = nullptr;
  const RareWordList* rare = nullptr;
};

struct AugmentConfig {
  AugmentMode mode = AugmentMode::kSingle;
  std::size_t per_word_cap = 1;  // N: augmentations per rare word
  std::size_t top_k = 1000;      // K
  double log_floor = -12.0;      // natural-log floor on the target-side product
  std::size_t min_distance = 5;  // multi mode: pairwise source-position gap
  std::size_t max_passes = 0;    // 0 = run until a pass adds nothing
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// Repeated seeded passes over the bitext, sampling substitution positions per
// sentence; stops after a pass that generates nothing new. Candidate search
// runs in parallel per sentence; acceptance (caps, duplicate suppression,
// position spacing) is sequential in corpus order, so results do not depend
// on the worker count.
std::vector<AugmentationRecord> augment_corpus(const std::vector<SentencePair>& bitext,
                                               const AugmentDeps& deps,
                                               const AugmentConfig& config);

class SynonymResource {
 public:
  // TSV "word<TAB>synonym<TAB>score"; self-synonyms are rejected.
  static SynonymResource load(const std::string& path, std::string name = "");

  void add(std::string_view word, std::string_view synonym, double score);
  // Ranked by score desc, then input order.
  const std::vector<std::pair<std::string, double>>* synonyms(std::string_view word) const;
  const std::string& name() const { return name_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::string name_;
  std::unordered_map<std::string, std::vector<std::pair<std::string, double>>> table_;
};

enum class ParaphraseTargets { kOovOnly, kOovAndRare };

struct ParaphraseResult {
  Sentence sentence;
  std::size_t n_targets = 0;      // OOV / rare tokens seen
  std::size_t n_substituted = 0;  // tokens actually replaced
};

// Replaces each OOV token (and rare token when requested) by its
// highest-ranked in-vocabulary synonym; tokens without one stay unchanged.
ParaphraseResult paraphrase_substitute(const Sentence& sentence, const Vocabulary& vocab,
                                       const SynonymResource& resource, ParaphraseTargets targets,
                                       std::uint64_t rare_threshold = 100);

}  // namespace mtkit

#endif  // MTKIT_TDA_HPP
