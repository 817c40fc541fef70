#ifndef MTKIT_EMBEDDINGS_HPP
#define MTKIT_EMBEDDINGS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtkit/corpus.hpp"
#include "mtkit/token_index.hpp"
#include "mtkit/word_vectors.hpp"

namespace mtkit {

enum class EmbeddingVariant { kSge, kHtle, kHtleAdd, kStle };

std::string embedding_variant_name(EmbeddingVariant variant);
std::optional<EmbeddingVariant> embedding_variant_from(std::string_view name);

// Topic side-information for a corpus: per-document distributions, per-token
// hard labels (parallel to the corpus), per-(word, topic) frequencies.
struct TopicAssignments {
  int n_topics = 0;
  std::vector<std::vector<double>> doc_topics;
  std::vector<std::vector<int>> token_topics;
  std::unordered_map<std::string, std::vector<std::uint64_t>> word_topic_freq;

  // Checks distribution sums (1e-9) and label ranges.
  void validate() const;

  void save_doc_topics(const std::string& path) const;
  void save_token_topics(const std::string& path) const;
  static std::vector<std::vector<double>> load_doc_topics(const std::string& path, int n_topics);
  static std::vector<std::vector<int>> load_token_topics(const std::string& path, int n_topics);
};

struct TrainConfig {
  std::size_t dim = 100;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.05;
  std::uint64_t min_count = 100;
  std::uint64_t seed = 1;
  bool reproducible = true;  // off permits lock-free sharded updates
  unsigned workers = 1;
};

// Word-topic input rows plus plain-word output rows. SGE is stored as a
// single-topic table. Row storage is dense: every (word, topic) slot exists,
// but only slots seen in training count as active.
class TopicEmbeddings {
 public:
  TopicEmbeddings() = default;

  // Seeded uniform init of input rows; output rows start at zero.
  static TopicEmbeddings init(EmbeddingVariant variant, const std::vector<std::string>& vocab,
                              int n_topics, std::size_t dim, std::uint64_t seed);

  EmbeddingVariant variant() const { return variant_; }
  int n_topics() const { return n_topics_; }
  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return words_.size(); }
  const TokenIndex& words() const { return words_; }

  std::optional<std::uint32_t> word_id(std::string_view word) const { return words_.lookup(word); }

  // Raw stored rows.
  std::span<double> topic_row(std::uint32_t word, int topic);
  std::span<const double> topic_row(std::uint32_t word, int topic) const;
  std::span<double> generic_row(std::uint32_t word);              // HTLEadd only
  std::span<const double> generic_row(std::uint32_t word) const;  // HTLEadd only
  std::span<double> output_row(std::uint32_t word);
  std::span<const double> output_row(std::uint32_t word) const;
  bool has_generic_rows() const { return !generic_rows_.empty(); }

  // Variant representation with a hard topic: HTLE returns the stored row,
  // HTLEadd adds the generic row, STLE returns the stored topic row, SGE
  // ignores the topic. Throws UnknownWord / UnknownTopic.
  std::vector<double> repr(std::string_view word, int topic) const;

  // Distribution-weighted representation (the STLE mixture).
  std::vector<double> repr(std::string_view word, std::span<const double> topic_dist) const;

  // (word, topic) slots touched during training; basis for similarity
  // strategies and for which rows serialize.
  std::uint64_t active_count(std::uint32_t word, int topic) const;
  void mark_active(std::uint32_t word, int topic, std::uint64_t n = 1);
  std::vector<int> active_topics(std::uint32_t word) const;

  // Mean of active topic rows per word (generic row for SGE-like tables).
  WordVectors to_word_vectors() const;

  // prefix.in.emb / prefix.out.emb ("word#topic v1..vd", generic topic -1)
  // plus prefix.counts.tsv with the active-slot frequencies.
  void save(const std::string& prefix) const;
  static TopicEmbeddings load(const std::string& prefix);

 private:
  std::size_t slot(std::uint32_t word, int topic) const;

  EmbeddingVariant variant_ = EmbeddingVariant::kSge;
  int n_topics_ = 1;
  std::size_t dim_ = 0;
  TokenIndex words_;
  std::vector<double> topic_rows_;    // words x n_topics x dim
  std::vector<double> generic_rows_;  // words x dim (HTLEadd)
  std::vector<double> output_rows_;   // words x dim
  std::vector<std::uint64_t> active_;
};

// One skipgram negative-sampling step: target representation against one
// positive context word and `negatives` noise words.
struct TrainingEvent {
  std::uint32_t target = 0;
  int target_topic = 0;                          // hard-label variants
  const std::vector<double>* doc_dist = nullptr;  // STLE
  std::uint32_t context = 0;
  std::vector<std::uint32_t> negatives;
};

double event_loss(const TopicEmbeddings& emb, const TrainingEvent& event);
void event_update(TopicEmbeddings& emb, const TrainingEvent& event, double learning_rate);

// Trains a variant on the corpus. Topic variants require assignments: hard
// labels for HTLE/HTLEadd (sampled from doc distributions when absent),
// document distributions for STLE. Throws MissingTopics.
TopicEmbeddings train_embeddings(const std::vector<Sentence>& corpus,
                                 const TopicAssignments* topics, const TrainConfig& config,
                                 EmbeddingVariant variant);

enum class LexsubMethod { kSampled, kExpected };

struct LexsubQuery {
  std::string target;
  int target_topic = 0;
  std::string substitute;
  int substitute_topic = 0;
  std::vector<std::string> context;
  std::vector<double> topic_dist;  // Expected method
};

// Sampled: cos(h(sub^t), h(tgt^t')) + mean_c cos(h(sub^t), o(c)).
// Expected: topic-pair expectation of the first term plus the
// topic-weighted context term. Context words without output rows are
// skipped; `used_context`, when given, receives the count kept.
double lexsub_score(const TopicEmbeddings& emb, const LexsubQuery& query, LexsubMethod method,
                    std::size_t* used_context = nullptr);

// Candidates sorted by lexsub score desc, ties by surface asc. Candidates
// missing from the vocabulary rank last (score -inf) in input order.
std::vector<std::pair<std::string, double>> lexsub_rank(const TopicEmbeddings& emb,
                                                        const LexsubQuery& query,
                                                        const std::vector<std::string>& candidates,
                                                        LexsubMethod method);

// Generalized average precision of a ranking against graded gold weights.
double gap_score(const std::vector<std::string>& ranked,
                 const std::map<std::string, double>& gold_weights);

enum class WordSimStrategy { kMax, kMean, kWeightedMean };

std::string wordsim_strategy_name(WordSimStrategy strategy);

struct WordSimPair {
  std::string w1;
  std::string w2;
  double human_score = 0.0;
};

struct WordSimResult {
  double rho = 0.0;
  std::size_t used_pairs = 0;
  std::size_t skipped_pairs = 0;  // a word missing or without active rows
};

// Max: best cosine over active topic-row pairs. Mean: cosine of mean active
// rows. wMean: cosine of frequency-weighted mean rows. Spearman's rho against
// the human scores; throws TooFewPairs when fewer than 3 pairs survive.
WordSimResult wordsim_eval(const TopicEmbeddings& emb, const std::vector<WordSimPair>& pairs,
                           WordSimStrategy strategy);

// cos(h(w1^t1), h(w2^t2)); throws UnknownWord.
double context_similarity_pair(const TopicEmbeddings& emb, std::string_view w1, int topic1,
                               std::string_view w2, int topic2);

}  // namespace mtkit

#endif  // MTKIT_EMBEDDINGS_HPP
