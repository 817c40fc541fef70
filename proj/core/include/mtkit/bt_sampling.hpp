#ifndef MTKIT_BT_SAMPLING_HPP
#define MTKIT_BT_SAMPLING_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtkit/corpus.hpp"
#include "mtkit/word_vectors.hpp"

namespace mtkit {

// One target-token prediction-loss observation, as produced by an external
// NMT trainer in a single pass with the final model.
struct TokenLossRecord {
  std::uint64_t sentence_id = 0;
  std::uint32_t position = 0;
  std::string token;
  double loss = 0.0;
};

struct TokenLossStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population: single observation has stddev 0
};

class TokenLossTable {
 public:
  // TSV "sentence_id<TAB>position<TAB>token<TAB>loss". Throws FormatError on
  // malformed rows (with location) and NegativeLoss on negative losses.
  static TokenLossTable load(const std::string& path);
  static TokenLossTable from_records(std::vector<TokenLossRecord> records);

  const std::vector<TokenLossRecord>& records() const { return records_; }
  const std::unordered_map<std::string, TokenLossStats>& aggregates() const { return stats_; }
  std::optional<TokenLossStats> stats(std::string_view token) const;

  // Mean loss by target position; diagnostic.
  std::vector<double> per_position_mean_loss() const;

 private:
  std::vector<TokenLossRecord> records_;
  std::unordered_map<std::string, TokenLossStats> stats_;
};

enum class DifficultyCriterion { kFreq, kMpl, kMplSpl, kPplr };

std::string difficulty_criterion_name(DifficultyCriterion c);

struct DifficultContext {
  std::string token;
  std::uint64_t sentence_id = 0;
  Sentence sentence;  // resolved from the bitext target side
};

struct DifficultyThresholds {
  std::uint64_t eta = 5000;  // frequency ceiling
  double mu = 5.0;           // mean-loss floor
  double rho = 10.0;         // loss-stddev floor
};

struct DifficultySet {
  DifficultyCriterion criterion = DifficultyCriterion::kFreq;
  std::set<std::string> tokens;
  std::vector<DifficultContext> contexts;  // populated when a corpus is given
  DifficultyThresholds thresholds;
};

// Membership predicates: Freq: freq(y) < eta over the vocabulary. MPL: mean
// loss > mu. MPL+sPL: mean > mu and stddev > rho. PPLR: any single occurrence
// with loss > mu; its (token, sentence) pairs become the contexts. For the
// other criteria the contexts are every recorded occurrence of a member
// token, which is what context-aware sampling consumes.
DifficultySet difficulty_set(const TokenLossTable& table, const Vocabulary& vocab,
                             DifficultyCriterion criterion, DifficultyThresholds thresholds = {},
                             const std::vector<Sentence>* corpus = nullptr);

struct SampleResult {
  std::vector<Sentence> sentences;
  std::vector<std::size_t> picked;  // indices into the monolingual stream
  bool exhausted = false;           // stream ran out before reaching N
};

// Algorithm "sampling for difficult words": seeded permutation scan keeping
// sentences that contain at least one difficult token, until N are kept.
SampleResult diff_sampling(const DifficultySet& difficulty, const std::vector<Sentence>& mono,
                           std::size_t n_samples, std::uint64_t seed);

// Ratio-preserving sampling: per-token quota H(y) = N * |contexts of y| /
// |contexts|. Each accepted sentence is credited to its first below-quota
// difficult token; sentences whose difficult tokens are all at quota are
// rejected.
SampleResult pplr_sampling(const DifficultySet& difficulty, const std::vector<Sentence>& mono,
                           std::size_t n_samples, std::uint64_t seed,
                           std::unordered_map<std::string, std::size_t>* final_counts = nullptr);

enum class ContextKind { kNeighbor, kSibling, kSentence };
enum class SimilarityKind { kExact, kSemantic };

struct ContextSpec {
  ContextKind kind = ContextKind::kNeighbor;
  std::size_t window = 4;  // neighbor only
  SimilarityKind similarity = SimilarityKind::kExact;
  double threshold = 0.75;
};

// Local context of position i. Neighbor: up to `window` tokens on each side.
// Sibling: subword units of the same surface word, excluding i. Sentence:
// everything but i.
std::vector<std::string> context_of(const ContextSpec& spec, const Sentence& sentence,
                                    std::size_t position);

// Exact: positionwise match fraction, shorter context padded with a
// non-matching sentinel. Semantic: cosine of mean word vectors; context
// tokens without vectors are skipped and counted in *skipped.
double context_similarity(const ContextSpec& spec, const std::vector<std::string>& context_a,
                          const std::vector<std::string>& context_b,
                          const WordVectors* vectors = nullptr, std::size_t* skipped = nullptr);

struct ContextSampleLog {
  std::size_t mono_index = 0;
  std::string token;
  double similarity = 0.0;  // best similarity that cleared the threshold
};

// Algorithm "sampling with context": keeps a sampled sentence iff it contains
// a difficult token whose context is similar (>s) to at least one recorded
// difficult context of that token. Every occurrence is tested. Context tokens
// without word vectors are skipped; the skip total lands in *skipped_tokens.
SampleResult context_sampling(const DifficultySet& difficulty, const ContextSpec& spec,
                              const std::vector<Sentence>& mono, std::size_t n_samples,
                              std::uint64_t seed, const WordVectors* vectors = nullptr,
                              std::vector<ContextSampleLog>* log = nullptr,
                              std::size_t* skipped_tokens = nullptr);

}  // namespace mtkit

#endif  // MTKIT_BT_SAMPLING_HPP
