#include "mtkit/lda.hpp"

#include <algorithm>

#include "mtkit/errors.hpp"
#include "mtkit/rng.hpp"
#include "mtkit/token_index.hpp"

namespace mtkit {

TopicAssignments lda_topics(const std::vector<Sentence>& corpus, const LdaConfig& config) {
  if (config.n_topics < 2) throw Error("LDA needs at least 2 topics");
  if (corpus.empty()) throw EmptyInput("LDA corpus");
  const int T = config.n_topics;

  bool any_doc_id = std::any_of(corpus.begin(), corpus.end(),
                                [](const Sentence& s) { return s.doc_id >= 0; });
  std::vector<std::size_t> doc_of(corpus.size());
  std::size_t n_docs = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    doc_of[s] = any_doc_id ? static_cast<std::size_t>(std::max<std::int64_t>(corpus[s].doc_id, 0))
                           : s;
    n_docs = std::max(n_docs, doc_of[s] + 1);
  }

  TokenIndex vocab;
  std::vector<std::vector<std::uint32_t>> token_ids(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    token_ids[s].reserve(corpus[s].size());
    for (const auto& token : corpus[s].tokens) token_ids[s].push_back(vocab.intern(token));
  }
  const std::size_t V = vocab.size();
  if (V == 0) throw EmptyInput("LDA corpus has no tokens");

  std::vector<std::vector<int>> z(corpus.size());
  std::vector<std::uint64_t> n_dk(n_docs * static_cast<std::size_t>(T), 0);
  std::vector<std::uint64_t> n_kw(static_cast<std::size_t>(T) * V, 0);
  std::vector<std::uint64_t> n_k(static_cast<std::size_t>(T), 0);
  std::vector<std::uint64_t> n_d(n_docs, 0);

  Rng rng(derive_seed(config.seed, "lda"));
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    z[s].resize(token_ids[s].size());
    for (std::size_t t = 0; t < token_ids[s].size(); ++t) {
      int topic = static_cast<int>(rng.below(static_cast<std::uint64_t>(T)));
      z[s][t] = topic;
      ++n_dk[doc_of[s] * T + static_cast<std::size_t>(topic)];
      ++n_kw[static_cast<std::size_t>(topic) * V + token_ids[s][t]];
      ++n_k[static_cast<std::size_t>(topic)];
      ++n_d[doc_of[s]];
    }
  }

  std::vector<double> weights(static_cast<std::size_t>(T));
  const double beta_v = config.beta * static_cast<double>(V);
  for (int iter = 0; iter < config.iterations; ++iter) {
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      const std::size_t d = doc_of[s];
      for (std::size_t t = 0; t < token_ids[s].size(); ++t) {
        const std::uint32_t w = token_ids[s][t];
        const int old_topic = z[s][t];
        --n_dk[d * T + static_cast<std::size_t>(old_topic)];
        --n_kw[static_cast<std::size_t>(old_topic) * V + w];
        --n_k[static_cast<std::size_t>(old_topic)];

        double total = 0.0;
        for (int k = 0; k < T; ++k) {
          double weight = (static_cast<double>(n_dk[d * T + static_cast<std::size_t>(k)]) + config.alpha) *
                          (static_cast<double>(n_kw[static_cast<std::size_t>(k) * V + w]) + config.beta) /
                          (static_cast<double>(n_k[static_cast<std::size_t>(k)]) + beta_v);
          weights[static_cast<std::size_t>(k)] = weight;
          total += weight;
        }
        double u = rng.uniform() * total;
        int new_topic = T - 1;
        double acc = 0.0;
        for (int k = 0; k < T; ++k) {
          acc += weights[static_cast<std::size_t>(k)];
          if (u < acc) {
            new_topic = k;
            break;
          }
        }
        z[s][t] = new_topic;
        ++n_dk[d * T + static_cast<std::size_t>(new_topic)];
        ++n_kw[static_cast<std::size_t>(new_topic) * V + w];
        ++n_k[static_cast<std::size_t>(new_topic)];
      }
    }
  }

  TopicAssignments assignments;
  assignments.n_topics = T;
  assignments.doc_topics.resize(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    assignments.doc_topics[d].resize(static_cast<std::size_t>(T));
    const double denom = static_cast<double>(n_d[d]) + config.alpha * static_cast<double>(T);
    for (int k = 0; k < T; ++k) {
      assignments.doc_topics[d][static_cast<std::size_t>(k)] =
          (static_cast<double>(n_dk[d * T + static_cast<std::size_t>(k)]) + config.alpha) / denom;
    }
  }
  assignments.token_topics = std::move(z);
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (std::size_t t = 0; t < token_ids[s].size(); ++t) {
      auto& freq = assignments.word_topic_freq[vocab.surface(token_ids[s][t])];
      if (freq.empty()) freq.assign(static_cast<std::size_t>(T), 0);
      ++freq[static_cast<std::size_t>(assignments.token_topics[s][t])];
    }
  }
  return assignments;
}

}  // namespace mtkit
