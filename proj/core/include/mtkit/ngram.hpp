#ifndef MTKIT_NGRAM_HPP
#define MTKIT_NGRAM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mtkit/corpus.hpp"
#include "mtkit/token_index.hpp"

namespace mtkit {

enum class LmDirection { kForward, kBackward };

struct ScoredToken {
  std::string surface;
  double prob = 0.0;
};

struct CondProb {
  double prob = 0.0;
  bool unseen_context = false;
};

// Count-based n-gram model over raw relative frequencies (no smoothing): an
// unseen event yields probability zero rather than an invented candidate.
//
// Context arguments are always given in sentence order. A forward model reads
// the tokens preceding a position (it keeps the most recent order-1 of them);
// a backward model reads the tokens following a position (it keeps the
// nearest order-1 and handles reversal internally).
class NGramModel {
 public:
  static constexpr const char* kBegin = "<s>";
  static constexpr const char* kEnd = "</s>";

  // Throws EmptyInput on an empty corpus; order must be >= 2.
  static NGramModel train(const std::vector<Sentence>& corpus, int order, LmDirection direction);

  CondProb cond_prob(std::span<const std::string> context, std::string_view token) const;

  // Continuations of `context` sorted by probability desc, surface asc.
  // `filter`, when given, restricts the already-computed top-K list.
  std::vector<ScoredToken> topk(std::span<const std::string> context, std::size_t k,
                                const std::unordered_set<std::string>* filter = nullptr) const;

  // All continuations with probabilities; test/diagnostic surface.
  std::vector<ScoredToken> continuations(std::span<const std::string> context) const;

  int order() const { return order_; }
  LmDirection direction() const { return direction_; }

  void save(const std::string& path) const;
  static NGramModel load(const std::string& path);

 private:
  struct ContextEntry {
    std::uint64_t total = 0;
    std::unordered_map<std::uint32_t, std::uint64_t> continuations;
  };

  NGramModel(int order, LmDirection direction) : order_(order), direction_(direction) {}

  // Normalizes a sentence-order context into the internal key, padding with
  // begin markers when shorter than order-1.
  std::optional<std::vector<std::uint32_t>> context_key(std::span<const std::string> context) const;
  const ContextEntry* find_context(std::span<const std::string> context) const;
  void add_ngram(const std::vector<std::uint32_t>& context, std::uint32_t token);

  int order_;
  LmDirection direction_;
  TokenIndex vocab_;
  std::uint32_t begin_id_ = 0;
  std::uint32_t end_id_ = 0;
  std::unordered_map<std::vector<std::uint32_t>, ContextEntry, IdSeqHash> contexts_;
};

struct InsertProb {
  double prob = 0.0;
  bool no_support = false;
};

// Counts 5-token windows and answers the probability of the middle token
// given the two tokens on each side: C(w1 w2 w3 w4 w5) / sum_j C(w1 w2 wj w4 w5).
class GapNGramModel {
 public:
  static constexpr int kOrder = 5;

  static GapNGramModel train(const std::vector<Sentence>& corpus);

  InsertProb insert_prob(std::string_view w1, std::string_view w2, std::string_view w4,
                         std::string_view w5, std::string_view middle) const;

  // Highest-probability filler for the gap, ties by surface asc.
  std::optional<ScoredToken> best_filler(std::string_view w1, std::string_view w2,
                                         std::string_view w4, std::string_view w5) const;

  std::size_t n_windows() const { return n_windows_; }

 private:
  struct GapEntry {
    std::uint64_t total = 0;
    std::unordered_map<std::uint32_t, std::uint64_t> fillers;
  };

  std::optional<std::vector<std::uint32_t>> gap_key(std::string_view w1, std::string_view w2,
                                                    std::string_view w4, std::string_view w5) const;

  TokenIndex vocab_;
  std::unordered_map<std::vector<std::uint32_t>, GapEntry, IdSeqHash> gaps_;
  std::size_t n_windows_ = 0;
};

}  // namespace mtkit

#endif  // MTKIT_NGRAM_HPP
