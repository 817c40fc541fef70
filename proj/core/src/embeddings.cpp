#include "mtkit/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "mtkit/errors.hpp"
#include "mtkit/metrics.hpp"
#include "mtkit/rng.hpp"

namespace mtkit {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int parse_topic_suffix(const std::string& key, std::string& word) {
  auto pos = key.rfind('#');
  if (pos == std::string::npos || pos + 1 >= key.size()) {
    throw Error("embedding row key without '#topic' suffix: " + key);
  }
  word = key.substr(0, pos);
  return std::stoi(key.substr(pos + 1));
}

}  // namespace

std::string embedding_variant_name(EmbeddingVariant variant) {
  switch (variant) {
    case EmbeddingVariant::kSge: return "sge";
    case EmbeddingVariant::kHtle: return "htle";
    case EmbeddingVariant::kHtleAdd: return "htleadd";
    case EmbeddingVariant::kStle: return "stle";
  }
  return "?";
}

std::optional<EmbeddingVariant> embedding_variant_from(std::string_view name) {
  if (name == "sge") return EmbeddingVariant::kSge;
  if (name == "htle") return EmbeddingVariant::kHtle;
  if (name == "htleadd") return EmbeddingVariant::kHtleAdd;
  if (name == "stle") return EmbeddingVariant::kStle;
  return std::nullopt;
}

void TopicAssignments::validate() const {
  for (std::size_t d = 0; d < doc_topics.size(); ++d) {
    const auto& dist = doc_topics[d];
    if (static_cast<int>(dist.size()) != n_topics) {
      throw Error("document " + std::to_string(d) + " has wrong topic distribution size");
    }
    double sum = 0.0;
    for (double p : dist) {
      if (p < 0.0) throw Error("negative topic probability in document " + std::to_string(d));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error("topic distribution of document " + std::to_string(d) + " sums to " +
                  std::to_string(sum));
    }
  }
  for (const auto& labels : token_topics) {
    for (int label : labels) {
      if (label < 0 || label >= n_topics) throw UnknownTopic(label);
    }
  }
}

void TopicAssignments::save_doc_topics(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write document topics: " + path);
  out.precision(12);
  for (const auto& dist : doc_topics) {
    for (std::size_t k = 0; k < dist.size(); ++k) {
      if (k) out << '\t';
      out << dist[k];
    }
    out << '\n';
  }
}

void TopicAssignments::save_token_topics(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write token topics: " + path);
  for (const auto& labels : token_topics) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out << ' ';
      out << labels[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<double>> TopicAssignments::load_doc_topics(const std::string& path,
                                                                   int n_topics) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open document topics: " + path);
  std::vector<std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (static_cast<int>(fields.size()) != n_topics) {
      throw FormatError(path, line_no, 1, "expected " + std::to_string(n_topics) + " probabilities");
    }
    std::vector<double> dist;
    dist.reserve(fields.size());
    for (const auto& f : fields) dist.push_back(std::stod(f));
    out.push_back(std::move(dist));
  }
  return out;
}

std::vector<std::vector<int>> TopicAssignments::load_token_topics(const std::string& path,
                                                                  int n_topics) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open token topics: " + path);
  std::vector<std::vector<int>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<int> labels;
    for (const auto& f : split_ws(line)) {
      int label = std::stoi(f);
      if (label < 0 || label >= n_topics) {
        throw FormatError(path, line_no, 1, "topic label out of range: " + f);
      }
      labels.push_back(label);
    }
    out.push_back(std::move(labels));
  }
  return out;
}

TopicEmbeddings TopicEmbeddings::init(EmbeddingVariant variant,
                                      const std::vector<std::string>& vocab, int n_topics,
                                      std::size_t dim, std::uint64_t seed) {
  if (variant == EmbeddingVariant::kSge) n_topics = 1;
  if (n_topics < 1) throw Error("embedding table needs at least one topic");
  TopicEmbeddings emb;
  emb.variant_ = variant;
  emb.n_topics_ = n_topics;
  emb.dim_ = dim;
  for (const auto& word : vocab) emb.words_.intern(word);

  const std::size_t n_words = emb.words_.size();
  emb.topic_rows_.resize(n_words * static_cast<std::size_t>(n_topics) * dim);
  emb.output_rows_.assign(n_words * dim, 0.0);
  emb.active_.assign(n_words * static_cast<std::size_t>(n_topics), 0);
  if (variant == EmbeddingVariant::kHtleAdd) emb.generic_rows_.resize(n_words * dim);

  Rng rng(derive_seed(seed, "emb-init"));
  auto fill = [&](std::vector<double>& rows) {
    for (auto& v : rows) v = (rng.uniform() - 0.5) / static_cast<double>(dim);
  };
  fill(emb.topic_rows_);
  if (!emb.generic_rows_.empty()) fill(emb.generic_rows_);
  return emb;
}

std::size_t TopicEmbeddings::slot(std::uint32_t word, int topic) const {
  if (topic < 0 || topic >= n_topics_) throw UnknownTopic(topic);
  return (static_cast<std::size_t>(word) * static_cast<std::size_t>(n_topics_) +
          static_cast<std::size_t>(topic));
}

std::span<double> TopicEmbeddings::topic_row(std::uint32_t word, int topic) {
  return {topic_rows_.data() + slot(word, topic) * dim_, dim_};
}
std::span<const double> TopicEmbeddings::topic_row(std::uint32_t word, int topic) const {
  return {topic_rows_.data() + slot(word, topic) * dim_, dim_};
}
std::span<double> TopicEmbeddings::generic_row(std::uint32_t word) {
  if (generic_rows_.empty()) throw Error("this variant has no generic rows");
  return {generic_rows_.data() + static_cast<std::size_t>(word) * dim_, dim_};
}
std::span<const double> TopicEmbeddings::generic_row(std::uint32_t word) const {
  if (generic_rows_.empty()) throw Error("this variant has no generic rows");
  return {generic_rows_.data() + static_cast<std::size_t>(word) * dim_, dim_};
}
std::span<double> TopicEmbeddings::output_row(std::uint32_t word) {
  return {output_rows_.data() + static_cast<std::size_t>(word) * dim_, dim_};
}
std::span<const double> TopicEmbeddings::output_row(std::uint32_t word) const {
  return {output_rows_.data() + static_cast<std::size_t>(word) * dim_, dim_};
}

std::vector<double> TopicEmbeddings::repr(std::string_view word, int topic) const {
  auto id = words_.lookup(word);
  if (!id) throw UnknownWord(std::string(word));
  if (variant_ == EmbeddingVariant::kSge) topic = 0;
  auto row = topic_row(*id, topic);
  std::vector<double> h(row.begin(), row.end());
  if (variant_ == EmbeddingVariant::kHtleAdd) {
    auto r0 = generic_row(*id);
    for (std::size_t i = 0; i < dim_; ++i) h[i] += r0[i];
  }
  return h;
}

std::vector<double> TopicEmbeddings::repr(std::string_view word,
                                          std::span<const double> topic_dist) const {
  auto id = words_.lookup(word);
  if (!id) throw UnknownWord(std::string(word));
  if (static_cast<int>(topic_dist.size()) != n_topics_) {
    throw Error("topic distribution size does not match table");
  }
  std::vector<double> h(dim_, 0.0);
  for (int k = 0; k < n_topics_; ++k) {
    if (topic_dist[static_cast<std::size_t>(k)] == 0.0) continue;
    auto row = topic_row(*id, k);
    for (std::size_t i = 0; i < dim_; ++i) {
      h[i] += topic_dist[static_cast<std::size_t>(k)] * row[i];
    }
  }
  if (variant_ == EmbeddingVariant::kHtleAdd) {
    auto r0 = generic_row(*id);
    for (std::size_t i = 0; i < dim_; ++i) h[i] += r0[i];
  }
  return h;
}

std::uint64_t TopicEmbeddings::active_count(std::uint32_t word, int topic) const {
  return active_[slot(word, topic)];
}
void TopicEmbeddings::mark_active(std::uint32_t word, int topic, std::uint64_t n) {
  active_[slot(word, topic)] += n;
}
std::vector<int> TopicEmbeddings::active_topics(std::uint32_t word) const {
  std::vector<int> out;
  for (int k = 0; k < n_topics_; ++k) {
    if (active_count(word, k) > 0) out.push_back(k);
  }
  return out;
}

WordVectors TopicEmbeddings::to_word_vectors() const {
  WordVectors vectors(dim_);
  for (std::uint32_t w = 0; w < words_.size(); ++w) {
    auto topics = active_topics(w);
    if (topics.empty()) continue;
    std::vector<float> mean(dim_, 0.0f);
    for (int k : topics) {
      auto row = topic_row(w, k);
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += static_cast<float>(row[i]);
    }
    for (auto& v : mean) v /= static_cast<float>(topics.size());
    if (variant_ == EmbeddingVariant::kHtleAdd) {
      auto r0 = generic_row(w);
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += static_cast<float>(r0[i]);
    }
    vectors.set(words_.surface(w), std::move(mean));
  }
  return vectors;
}

void TopicEmbeddings::save(const std::string& prefix) const {
  // SGE rows are plain word rows and serialize with topic -1, like all
  // generic rows.
  const bool plain = variant_ == EmbeddingVariant::kSge;
  std::size_t n_rows = 0;
  for (std::uint32_t w = 0; w < words_.size(); ++w) n_rows += active_topics(w).size();
  if (variant_ == EmbeddingVariant::kHtleAdd) n_rows += words_.size();

  std::ofstream in_file(prefix + ".in.emb");
  if (!in_file) throw Error("cannot write embeddings: " + prefix + ".in.emb");
  in_file.precision(12);
  in_file << n_rows << ' ' << dim_ << '\n';
  auto write_row = [&](std::ofstream& out, const std::string& word, int topic,
                       std::span<const double> row) {
    out << word << '#' << topic;
    for (double v : row) out << ' ' << v;
    out << '\n';
  };
  for (std::uint32_t w = 0; w < words_.size(); ++w) {
    for (int k : active_topics(w)) {
      write_row(in_file, words_.surface(w), plain ? -1 : k, topic_row(w, k));
    }
    if (variant_ == EmbeddingVariant::kHtleAdd) {
      write_row(in_file, words_.surface(w), -1, generic_row(w));
    }
  }

  std::ofstream out_file(prefix + ".out.emb");
  if (!out_file) throw Error("cannot write embeddings: " + prefix + ".out.emb");
  out_file.precision(12);
  out_file << words_.size() << ' ' << dim_ << '\n';
  for (std::uint32_t w = 0; w < words_.size(); ++w) {
    write_row(out_file, words_.surface(w), -1, output_row(w));
  }

  std::ofstream counts(prefix + ".counts.tsv");
  if (!counts) throw Error("cannot write embeddings: " + prefix + ".counts.tsv");
  counts << "#variant " << embedding_variant_name(variant_) << " topics " << n_topics_ << '\n';
  for (std::uint32_t w = 0; w < words_.size(); ++w) {
    for (int k : active_topics(w)) {
      counts << words_.surface(w) << '#' << k << '\t' << active_count(w, k) << '\n';
    }
  }
}

TopicEmbeddings TopicEmbeddings::load(const std::string& prefix) {
  const std::string counts_path = prefix + ".counts.tsv";
  std::ifstream counts(counts_path);
  if (!counts) throw Error("cannot open embeddings: " + counts_path);
  std::string line;
  if (!std::getline(counts, line) || line.rfind("#variant ", 0) != 0) {
    throw FormatError(counts_path, 1, 1, "expected '#variant NAME topics T' header");
  }
  auto header = split_ws(line);
  if (header.size() != 4) throw FormatError(counts_path, 1, 1, "bad header");
  auto variant = embedding_variant_from(header[1]);
  if (!variant) throw FormatError(counts_path, 1, 1, "unknown variant " + header[1]);
  int n_topics = std::stoi(header[3]);

  // First pass over the input rows to recover the vocabulary.
  const std::string in_path = prefix + ".in.emb";
  std::ifstream in_file(in_path);
  if (!in_file) throw Error("cannot open embeddings: " + in_path);
  if (!std::getline(in_file, line)) throw FormatError(in_path, 1, 1, "missing header");
  auto in_header = split_ws(line);
  if (in_header.size() != 2) throw FormatError(in_path, 1, 1, "expected 'vocab_size dim'");
  std::size_t dim = std::stoull(in_header[1]);

  std::vector<std::string> vocab;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::size_t line_no = 1;
  std::unordered_map<std::string, bool> seen;
  while (std::getline(in_file, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() != dim + 1) throw FormatError(in_path, line_no, 1, "wrong field count");
    std::vector<double> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) vec[i] = std::stod(fields[i + 1]);
    std::string word;
    parse_topic_suffix(fields[0], word);
    if (!seen[word]) {
      seen[word] = true;
      vocab.push_back(word);
    }
    rows.emplace_back(fields[0], std::move(vec));
  }

  TopicEmbeddings emb = init(*variant, vocab, n_topics, dim, /*seed=*/0);
  // Dense init filled everything with noise; overwrite with the stored rows
  // and zero the untouched slots so inactive rows stay inert.
  std::fill(emb.topic_rows_.begin(), emb.topic_rows_.end(), 0.0);
  if (!emb.generic_rows_.empty()) std::fill(emb.generic_rows_.begin(), emb.generic_rows_.end(), 0.0);
  for (auto& [key, vec] : rows) {
    std::string word;
    int topic = parse_topic_suffix(key, word);
    auto id = emb.words_.lookup(word);
    if (topic < 0) {
      if (*variant == EmbeddingVariant::kHtleAdd) {
        auto row = emb.generic_row(*id);
        std::copy(vec.begin(), vec.end(), row.begin());
      } else {
        auto row = emb.topic_row(*id, 0);
        std::copy(vec.begin(), vec.end(), row.begin());
        emb.active_[emb.slot(*id, 0)] = 1;
      }
    } else {
      auto row = emb.topic_row(*id, topic);
      std::copy(vec.begin(), vec.end(), row.begin());
    }
  }

  const std::string out_path = prefix + ".out.emb";
  std::ifstream out_file(out_path);
  if (!out_file) throw Error("cannot open embeddings: " + out_path);
  if (!std::getline(out_file, line)) throw FormatError(out_path, 1, 1, "missing header");
  line_no = 1;
  while (std::getline(out_file, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() != dim + 1) throw FormatError(out_path, line_no, 1, "wrong field count");
    std::string word;
    parse_topic_suffix(fields[0], word);
    auto id = emb.words_.lookup(word);
    if (!id) continue;
    auto row = emb.output_row(*id);
    for (std::size_t i = 0; i < dim; ++i) row[i] = std::stod(fields[i + 1]);
  }

  line_no = 1;
  while (std::getline(counts, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() != 2) throw FormatError(counts_path, line_no, 1, "expected 'word#topic<TAB>count'");
    std::string word;
    int topic = parse_topic_suffix(fields[0], word);
    auto id = emb.words_.lookup(word);
    if (!id || topic < 0) continue;
    emb.active_[emb.slot(*id, topic)] = std::stoull(fields[1]);
  }
  return emb;
}

double event_loss(const TopicEmbeddings& emb, const TrainingEvent& event) {
  const auto& words = emb.words();
  std::vector<double> h;
  if (event.doc_dist != nullptr) {
    h = emb.repr(words.surface(event.target), std::span<const double>(*event.doc_dist));
  } else {
    h = emb.repr(words.surface(event.target), event.target_topic);
  }
  auto dot = [&](std::span<const double> o) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * o[i];
    return s;
  };
  double loss = -std::log(std::max(sigmoid(dot(emb.output_row(event.context))), 1e-300));
  for (std::uint32_t neg : event.negatives) {
    loss += -std::log(std::max(sigmoid(-dot(emb.output_row(neg))), 1e-300));
  }
  return loss;
}

void event_update(TopicEmbeddings& emb, const TrainingEvent& event, double learning_rate) {
  const std::size_t dim = emb.dim();
  std::vector<double> h;
  if (event.doc_dist != nullptr) {
    h = emb.repr(emb.words().surface(event.target), std::span<const double>(*event.doc_dist));
  } else {
    h = emb.repr(emb.words().surface(event.target), event.target_topic);
  }

  std::vector<double> h_grad(dim, 0.0);
  auto push_output = [&](std::uint32_t word, bool positive) {
    auto o = emb.output_row(word);
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += h[i] * o[i];
    double g = sigmoid(s) - (positive ? 1.0 : 0.0);  // dL/ds
    for (std::size_t i = 0; i < dim; ++i) {
      h_grad[i] += g * o[i];
      o[i] -= learning_rate * g * h[i];
    }
  };
  push_output(event.context, true);
  for (std::uint32_t neg : event.negatives) push_output(neg, false);

  if (event.doc_dist != nullptr) {
    // STLE: every topic row with nonzero probability receives its share.
    for (int k = 0; k < emb.n_topics(); ++k) {
      double p = (*event.doc_dist)[static_cast<std::size_t>(k)];
      if (p == 0.0) continue;
      auto row = emb.topic_row(event.target, k);
      for (std::size_t i = 0; i < dim; ++i) row[i] -= learning_rate * p * h_grad[i];
    }
    if (emb.has_generic_rows()) {
      auto r0 = emb.generic_row(event.target);
      for (std::size_t i = 0; i < dim; ++i) r0[i] -= learning_rate * h_grad[i];
    }
    return;
  }

  int topic = emb.variant() == EmbeddingVariant::kSge ? 0 : event.target_topic;
  auto row = emb.topic_row(event.target, topic);
  for (std::size_t i = 0; i < dim; ++i) row[i] -= learning_rate * h_grad[i];
  if (emb.variant() == EmbeddingVariant::kHtleAdd) {
    auto r0 = emb.generic_row(event.target);
    for (std::size_t i = 0; i < dim; ++i) r0[i] -= learning_rate * h_grad[i];
  }
}

namespace {

// Cumulative unigram^0.75 noise distribution.
class NoiseSampler {
 public:
  NoiseSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double sum = 0.0;
    for (auto c : counts) {
      sum += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(sum);
    }
  }

  std::uint32_t sample(Rng& rng) const {
    double u = rng.uniform() * cumulative_.back();
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

struct PreparedCorpus {
  std::vector<std::vector<std::uint32_t>> sentences;  // in-vocab token ids
  std::vector<std::vector<int>> labels;               // hard topics, parallel
  std::vector<std::int64_t> doc_ids;
  std::vector<std::uint64_t> counts;  // per word id
  std::vector<std::string> vocab;
};

PreparedCorpus prepare_corpus(const std::vector<Sentence>& corpus, const TopicAssignments* topics,
                              const TrainConfig& config, EmbeddingVariant variant) {
  if (corpus.empty()) throw EmptyInput("embedding training corpus");
  const bool needs_hard = variant == EmbeddingVariant::kHtle || variant == EmbeddingVariant::kHtleAdd;
  const bool needs_soft = variant == EmbeddingVariant::kStle;
  if ((needs_hard || needs_soft) && topics == nullptr) {
    throw MissingTopics("variant " + embedding_variant_name(variant) + " requires topics");
  }
  if (needs_soft && topics->doc_topics.empty()) {
    throw MissingTopics("STLE requires document topic distributions");
  }
  if (needs_hard && topics->token_topics.empty() && topics->doc_topics.empty()) {
    throw MissingTopics("hard-label variants require token labels or document distributions");
  }

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence.tokens) ++counts[token];
  }
  std::vector<std::string> vocab;
  for (const auto& [word, count] : counts) {
    if (count >= config.min_count) vocab.push_back(word);
  }
  std::sort(vocab.begin(), vocab.end());
  if (vocab.empty()) throw EmptyInput("no word reaches min_count");
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = i;

  PreparedCorpus prep;
  prep.vocab = vocab;
  prep.counts.assign(vocab.size(), 0);
  prep.sentences.resize(corpus.size());
  prep.labels.resize(corpus.size());
  prep.doc_ids.resize(corpus.size());

  const bool have_token_labels = topics != nullptr && !topics->token_topics.empty();
  if (have_token_labels && topics->token_topics.size() != corpus.size()) {
    throw Error("token label file does not match corpus length");
  }

  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& sentence = corpus[s];
    prep.doc_ids[s] = sentence.doc_id;
    for (std::size_t t = 0; t < sentence.tokens.size(); ++t) {
      auto it = index.find(sentence.tokens[t]);
      if (it == index.end()) continue;  // drops sub-min_count tokens
      prep.sentences[s].push_back(it->second);
      ++prep.counts[it->second];
      if (needs_hard) {
        int label = 0;
        if (have_token_labels) {
          if (t >= topics->token_topics[s].size()) {
            throw Error("token labels shorter than sentence " + std::to_string(s));
          }
          label = topics->token_topics[s][t];
        } else {
          // Sample a hard label from the document distribution, seeded.
          std::int64_t doc = sentence.doc_id;
          if (doc < 0 || doc >= static_cast<std::int64_t>(topics->doc_topics.size())) {
            throw MissingTopics("sentence " + std::to_string(s) + " has no document distribution");
          }
          Rng rng(derive_seed(config.seed, "hard-label", s, t));
          double u = rng.uniform();
          double acc = 0.0;
          const auto& dist = topics->doc_topics[static_cast<std::size_t>(doc)];
          for (std::size_t k = 0; k < dist.size(); ++k) {
            acc += dist[k];
            if (u < acc) {
              label = static_cast<int>(k);
              break;
            }
            label = static_cast<int>(dist.size()) - 1;
          }
        }
        prep.labels[s].push_back(label);
      }
    }
  }
  return prep;
}

}  // namespace

TopicEmbeddings train_embeddings(const std::vector<Sentence>& corpus,
                                 const TopicAssignments* topics, const TrainConfig& config,
                                 EmbeddingVariant variant) {
  PreparedCorpus prep = prepare_corpus(corpus, topics, config, variant);
  int n_topics = topics != nullptr && topics->n_topics > 0 ? topics->n_topics : 1;
  TopicEmbeddings emb = TopicEmbeddings::init(variant, prep.vocab, n_topics, config.dim, config.seed);
  NoiseSampler noise(prep.counts);
  const bool soft = variant == EmbeddingVariant::kStle;

  // Active-slot counts mirror the corpus (word, topic) frequencies; they feed
  // the wMean similarity weights and decide which rows serialize.
  for (std::size_t s = 0; s < prep.sentences.size(); ++s) {
    for (std::size_t t = 0; t < prep.sentences[s].size(); ++t) {
      if (soft) {
        std::int64_t doc = prep.doc_ids[s];
        if (doc < 0 || doc >= static_cast<std::int64_t>(topics->doc_topics.size())) {
          throw MissingTopics("sentence " + std::to_string(s) + " has no document distribution");
        }
        const auto& dist = topics->doc_topics[static_cast<std::size_t>(doc)];
        for (std::size_t k = 0; k < dist.size(); ++k) {
          if (dist[k] > 0.0) emb.mark_active(prep.sentences[s][t], static_cast<int>(k));
        }
      } else {
        int label = prep.labels[s].empty() ? 0 : prep.labels[s][t];
        emb.mark_active(prep.sentences[s][t], label);
      }
    }
  }

  auto train_sentence = [&](std::size_t s, int epoch) {
    const auto& ids = prep.sentences[s];
    if (ids.empty()) return;
    const std::vector<double>* dist = nullptr;
    if (soft) {
      std::int64_t doc = prep.doc_ids[s];
      if (doc < 0 || doc >= static_cast<std::int64_t>(topics->doc_topics.size())) {
        throw MissingTopics("sentence " + std::to_string(s) + " has no document distribution");
      }
      dist = &topics->doc_topics[static_cast<std::size_t>(doc)];
    }
    Rng rng(derive_seed(config.seed, "emb-train", s, static_cast<std::uint64_t>(epoch)));
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      for (int j = -config.window; j <= config.window; ++j) {
        if (j == 0) continue;
        int c = i + j;
        if (c < 0 || c >= n) continue;
        TrainingEvent event;
        event.target = ids[static_cast<std::size_t>(i)];
        event.target_topic = prep.labels[s].empty() ? 0 : prep.labels[s][static_cast<std::size_t>(i)];
        event.doc_dist = dist;
        event.context = ids[static_cast<std::size_t>(c)];
        event.negatives.reserve(static_cast<std::size_t>(config.negatives));
        for (int k = 0; k < config.negatives; ++k) event.negatives.push_back(noise.sample(rng));
        event_update(emb, event, config.learning_rate);
      }
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.reproducible || config.workers <= 1) {
      for (std::size_t s = 0; s < prep.sentences.size(); ++s) train_sentence(s, epoch);
    } else {
      // Lock-free sharded updates; only allowed when reproducibility is off.
      std::vector<std::thread> pool;
      const std::size_t n = prep.sentences.size();
      const std::size_t shard = (n + config.workers - 1) / config.workers;
      for (unsigned w = 0; w < config.workers; ++w) {
        std::size_t lo = w * shard;
        std::size_t hi = std::min(n, lo + shard);
        pool.emplace_back([&, lo, hi, epoch] {
          for (std::size_t s = lo; s < hi; ++s) train_sentence(s, epoch);
        });
      }
      for (auto& t : pool) t.join();
    }
  }
  return emb;
}

double lexsub_score(const TopicEmbeddings& emb, const LexsubQuery& query, LexsubMethod method,
                    std::size_t* used_context) {
  if (query.context.empty()) throw EmptyContext();
  auto sub_id = emb.word_id(query.substitute);
  auto tgt_id = emb.word_id(query.target);
  if (!sub_id) throw UnknownWord(query.substitute);
  if (!tgt_id) throw UnknownWord(query.target);

  std::vector<std::uint32_t> context_ids;
  for (const auto& word : query.context) {
    if (auto id = emb.word_id(word)) context_ids.push_back(*id);
  }
  if (used_context != nullptr) *used_context = context_ids.size();

  auto cos_vs = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return cosine(std::span<const double>(a), std::span<const double>(b));
  };

  if (method == LexsubMethod::kSampled) {
    auto h_sub = emb.repr(query.substitute, query.substitute_topic);
    auto h_tgt = emb.repr(query.target, query.target_topic);
    double score = cos_vs(h_sub, h_tgt);
    if (!context_ids.empty()) {
      double ctx = 0.0;
      for (auto c : context_ids) {
        auto o = emb.output_row(c);
        ctx += cosine(std::span<const double>(h_sub), o);
      }
      score += ctx / static_cast<double>(context_ids.size());
    }
    return score;
  }

  if (query.topic_dist.empty()) {
    throw MissingTopics("Expected lexsub inference needs a topic distribution");
  }
  if (static_cast<int>(query.topic_dist.size()) != emb.n_topics()) {
    throw Error("topic distribution size does not match embedding table");
  }
  const auto& p = query.topic_dist;
  double pair_term = 0.0;
  for (int t = 0; t < emb.n_topics(); ++t) {
    if (p[static_cast<std::size_t>(t)] == 0.0) continue;
    auto h_sub = emb.repr(query.substitute, t);
    for (int u = 0; u < emb.n_topics(); ++u) {
      if (p[static_cast<std::size_t>(u)] == 0.0) continue;
      auto h_tgt = emb.repr(query.target, u);
      pair_term += p[static_cast<std::size_t>(t)] * p[static_cast<std::size_t>(u)] * cos_vs(h_sub, h_tgt);
    }
  }
  double ctx_term = 0.0;
  if (!context_ids.empty()) {
    for (int t = 0; t < emb.n_topics(); ++t) {
      if (p[static_cast<std::size_t>(t)] == 0.0) continue;
      auto h_sub = emb.repr(query.substitute, t);
      for (auto c : context_ids) {
        ctx_term += p[static_cast<std::size_t>(t)] *
                    cosine(std::span<const double>(h_sub), emb.output_row(c));
      }
    }
    ctx_term /= static_cast<double>(context_ids.size());
  }
  return pair_term + ctx_term;
}

std::vector<std::pair<std::string, double>> lexsub_rank(const TopicEmbeddings& emb,
                                                        const LexsubQuery& query,
                                                        const std::vector<std::string>& candidates,
                                                        LexsubMethod method) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    LexsubQuery q = query;
    q.substitute = candidate;
    double score = -std::numeric_limits<double>::infinity();
    try {
      score = lexsub_score(emb, q, method);
    } catch (const UnknownWord&) {
      // unknown candidates rank last
    }
    scored.emplace_back(candidate, score);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return scored;
}

double gap_score(const std::vector<std::string>& ranked,
                 const std::map<std::string, double>& gold_weights) {
  if (gold_weights.empty()) throw EmptyGold();
  double cumulative = 0.0;
  double numerator = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto it = gold_weights.find(ranked[i]);
    double x = it == gold_weights.end() ? 0.0 : it->second;
    cumulative += x;
    if (x > 0.0) numerator += cumulative / static_cast<double>(i + 1);
  }
  std::vector<double> gold;
  gold.reserve(gold_weights.size());
  for (const auto& [word, weight] : gold_weights) gold.push_back(weight);
  std::sort(gold.begin(), gold.end(), std::greater<>());
  double ideal = 0.0;
  double running = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    running += gold[i];
    if (gold[i] > 0.0) ideal += running / static_cast<double>(i + 1);
  }
  if (ideal == 0.0) throw EmptyGold();
  return numerator / ideal;
}

std::string wordsim_strategy_name(WordSimStrategy strategy) {
  switch (strategy) {
    case WordSimStrategy::kMax: return "max";
    case WordSimStrategy::kMean: return "mean";
    case WordSimStrategy::kWeightedMean: return "wmean";
  }
  return "?";
}

namespace {

std::optional<double> strategy_similarity(const TopicEmbeddings& emb, WordSimStrategy strategy,
                                          std::uint32_t w1, std::uint32_t w2) {
  auto topics1 = emb.active_topics(w1);
  auto topics2 = emb.active_topics(w2);
  if (topics1.empty() || topics2.empty()) return std::nullopt;

  auto row_of = [&](std::uint32_t w, int k) {
    auto row = emb.topic_row(w, k);
    std::vector<double> v(row.begin(), row.end());
    if (emb.variant() == EmbeddingVariant::kHtleAdd) {
      auto r0 = emb.generic_row(w);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += r0[i];
    }
    return v;
  };

  switch (strategy) {
    case WordSimStrategy::kMax: {
      double best = -2.0;
      for (int a : topics1) {
        auto va = row_of(w1, a);
        for (int b : topics2) {
          auto vb = row_of(w2, b);
          best = std::max(best, cosine(std::span<const double>(va), std::span<const double>(vb)));
        }
      }
      return best;
    }
    case WordSimStrategy::kMean:
    case WordSimStrategy::kWeightedMean: {
      auto mean_of = [&](std::uint32_t w, const std::vector<int>& topics) {
        std::vector<double> mean(emb.dim(), 0.0);
        double total = 0.0;
        for (int k : topics) {
          double weight = strategy == WordSimStrategy::kWeightedMean
                              ? static_cast<double>(emb.active_count(w, k))
                              : 1.0;
          auto v = row_of(w, k);
          for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += weight * v[i];
          total += weight;
        }
        if (total > 0.0) {
          for (auto& m : mean) m /= total;
        }
        return mean;
      };
      auto m1 = mean_of(w1, topics1);
      auto m2 = mean_of(w2, topics2);
      return cosine(std::span<const double>(m1), std::span<const double>(m2));
    }
  }
  return std::nullopt;
}

}  // namespace

WordSimResult wordsim_eval(const TopicEmbeddings& emb, const std::vector<WordSimPair>& pairs,
                           WordSimStrategy strategy) {
  std::vector<double> model_scores;
  std::vector<double> human_scores;
  WordSimResult result;
  for (const auto& pair : pairs) {
    auto id1 = emb.word_id(pair.w1);
    auto id2 = emb.word_id(pair.w2);
    if (!id1 || !id2) {
      ++result.skipped_pairs;
      continue;
    }
    auto sim = strategy_similarity(emb, strategy, *id1, *id2);
    if (!sim) {
      ++result.skipped_pairs;
      continue;
    }
    model_scores.push_back(*sim);
    human_scores.push_back(pair.human_score);
  }
  if (model_scores.size() < 3) throw TooFewPairs(model_scores.size(), 3);
  result.used_pairs = model_scores.size();
  result.rho = spearman_rho(model_scores, human_scores);
  return result;
}

double context_similarity_pair(const TopicEmbeddings& emb, std::string_view w1, int topic1,
                               std::string_view w2, int topic2) {
  auto h1 = emb.repr(w1, topic1);
  auto h2 = emb.repr(w2, topic2);
  return cosine(std::span<const double>(h1), std::span<const double>(h2));
}

}  // namespace mtkit
