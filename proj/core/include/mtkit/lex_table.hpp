#ifndef MTKIT_LEX_TABLE_HPP
#define MTKIT_LEX_TABLE_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "mtkit/corpus.hpp"

namespace mtkit {

struct LexEntry {
  std::string tgt;
  double p_direct = 0.0;   // P(tgt | src)
  double p_inverse = 0.0;  // P(src | tgt)
};

// Bidirectional lexical translation probabilities estimated from alignment
// links. A token aligned to two targets contributes two events.
class LexTable {
 public:
  // min_count drops (src, tgt) link pairs seen fewer times before normalizing;
  // the default keeps everything. Throws EmptyInput when no pair has links.
  static LexTable estimate(const std::vector<SentencePair>& pairs, std::uint64_t min_count = 1);

  double p_direct(std::string_view src, std::string_view tgt) const;
  double p_inverse(std::string_view src, std::string_view tgt) const;

  // All targets with p_direct(src, t) > threshold, sorted by p_direct desc
  // then surface asc.
  std::vector<LexEntry> trans_candidates(std::string_view src, double threshold = 0.0) const;

  std::size_t n_source_words() const { return direct_.size(); }

  void save(const std::string& path) const;
  static LexTable load(const std::string& path);

 private:
  // src -> (tgt -> entry index in flat storage)
  std::unordered_map<std::string, std::vector<LexEntry>> direct_;
};

}  // namespace mtkit

#endif  // MTKIT_LEX_TABLE_HPP
