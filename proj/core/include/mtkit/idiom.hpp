#ifndef MTKIT_IDIOM_HPP
#define MTKIT_IDIOM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtkit/corpus.hpp"

namespace mtkit {

struct IdiomEntry {
  std::string id;
  std::vector<std::string> source_lemmas;  // length >= 2
  std::vector<std::string> target_equivalent;
};

// TSV "id<TAB>source_phrase<TAB>target_equivalent"; phrase words are
// lemmatized through `dict` on load.
std::vector<IdiomEntry> load_idiom_dictionary(const std::string& path, const LemmaDict& dict);

struct IdiomMatch {
  std::string idiom_id;
  std::vector<std::size_t> positions;  // strictly increasing
  std::size_t gap_count = 0;           // window length - idiom length
  bool reordered = false;
};

// Finds the idiom's lemmas (any order) within one window containing at most
// max_gap intervening non-idiom tokens. Returns the leftmost-starting, then
// shortest, window.
std::optional<IdiomMatch> match_idiom(const Sentence& sentence, const IdiomEntry& entry,
                                      const LemmaDict& dict, std::size_t max_gap);

inline constexpr std::size_t kDefaultMaxGap = 4;

struct AnnotatedCorpus {
  std::vector<SentencePair> pairs;               // labels carry matching idiom ids
  std::vector<std::vector<IdiomMatch>> matches;  // parallel to pairs
};

AnnotatedCorpus annotate_corpus(std::vector<SentencePair> pairs,
                                const std::vector<IdiomEntry>& entries, const LemmaDict& dict,
                                std::size_t max_gap = kDefaultMaxGap, unsigned workers = 1);

struct SplitPlan {
  std::vector<std::size_t> test_ids;
  std::vector<std::size_t> train_ids;
  std::map<std::string, std::size_t> test_counts;   // per idiom
  std::map<std::string, std::size_t> train_counts;  // per idiom
};

// Samples test pairs from idiomatic pairs only, never leaving an idiom
// without a training occurrence. Throws InfeasibleSplit when the requested
// size cannot be met.
SplitPlan build_split(const AnnotatedCorpus& corpus, std::size_t test_size, std::uint64_t seed);

inline constexpr const char* kIdiomFlag = "<idm>";

// Prepends the <idm> source flag; idempotent. Throws EmptyInput.
Sentence prepend_flag(const Sentence& sentence);

// Clipped unigram precision of the candidate against the per-word maximum
// count over all references. Throws EmptyCandidate.
double uni_prec(const std::vector<std::string>& candidate,
                const std::vector<std::vector<std::string>>& references);

// (H - I) / N; negative when insertions exceed hits. Throws UndefinedMetric
// for N == 0.
double word_acc(std::size_t hits, std::size_t insertions, std::size_t n_gold);

// Target tokens aligned to any matched source position, in target order, one
// per target position. Throws EmptyProjection when nothing is aligned.
std::vector<std::string> extract_idiom_translation(const SentencePair& pair,
                                                   const IdiomMatch& match);

struct HitCounts {
  std::size_t hits = 0;        // projected tokens covered by the gold multiset
  std::size_t insertions = 0;  // projected tokens beyond gold counts
};

HitCounts count_hits(const std::vector<std::string>& projected,
                     const std::vector<std::string>& gold);

}  // namespace mtkit

#endif  // MTKIT_IDIOM_HPP
