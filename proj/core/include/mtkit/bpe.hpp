#ifndef MTKIT_BPE_HPP
#define MTKIT_BPE_HPP

#include <string>
#include <utility>
#include <vector>

#include "mtkit/corpus.hpp"

namespace mtkit {

// Byte pair encoding over UTF-8 code points. Non-final pieces of a word carry
// the "@@" continuation marker; there is no end-of-word symbol.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;
  explicit BpeModel(std::vector<Merge> merges) : merges_(std::move(merges)) {}

  // Greedy most-frequent-pair learning; ties break by (left asc, right asc).
  static BpeModel learn(const std::vector<Sentence>& corpus, std::size_t n_merges);

  // Splits one word into subword pieces (without markers).
  std::vector<std::string> segment_word(std::string_view word) const;

  // Splits every word of the sentence; non-final pieces get the "@@" marker.
  Sentence apply(const Sentence& sentence) const;

  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t n_merges() const { return merges_.size(); }

  void save(const std::string& path) const;
  static BpeModel load(const std::string& path);

 private:
  std::vector<Merge> merges_;
};

// Strips continuation markers and joins pieces back into words.
Sentence bpe_detokenize(const Sentence& sentence);

}  // namespace mtkit

#endif  // MTKIT_BPE_HPP
