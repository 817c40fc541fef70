#ifndef MTKIT_LDA_HPP
#define MTKIT_LDA_HPP

#include <cstdint>

#include "mtkit/corpus.hpp"
#include "mtkit/embeddings.hpp"

namespace mtkit {

struct LdaConfig {
  int n_topics = 2;
  int iterations = 200;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 1;
};

// Seeded collapsed-Gibbs LDA. Documents come from sentence doc_ids; when no
// sentence carries one, each sentence is its own document. Emits document
// distributions, final-sweep hard labels, and per-(word, topic) frequencies.
TopicAssignments lda_topics(const std::vector<Sentence>& corpus, const LdaConfig& config);

}  // namespace mtkit

#endif  // MTKIT_LDA_HPP
