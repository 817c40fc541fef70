#ifndef MTKIT_CORPUS_HPP
#define MTKIT_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtkit/text.hpp"

namespace mtkit {

// A tokenized sentence. Tokens are non-empty, whitespace-free UTF-8 surfaces;
// positions are 0-based. doc_id < 0 means "no document".
struct Sentence {
  std::vector<std::string> tokens;
  std::int64_t doc_id = -1;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::string text() const { return join(tokens); }
};

using AlignmentLink = std::pair<std::uint32_t, std::uint32_t>;  // (src_pos, tgt_pos)
using Alignment = std::set<AlignmentLink>;

struct SentencePair {
  Sentence src;
  Sentence tgt;
  std::optional<Alignment> alignment;
  std::vector<std::string> labels;
};

// Frequency vocabulary with dense ids assigned by (count desc, surface asc).
class Vocabulary {
 public:
  struct Entry {
    std::string surface;
    std::uint64_t count = 0;
  };

  Vocabulary() = default;

  // Throws EmptyInput when no tokens are seen.
  static Vocabulary build(const std::vector<Sentence>& corpus,
                          std::optional<std::size_t> size_limit = std::nullopt);

  bool contains(std::string_view surface) const { return index_.count(std::string(surface)) > 0; }
  std::optional<std::uint32_t> id(std::string_view surface) const;
  std::uint64_t count(std::string_view surface) const;
  const Entry& entry(std::uint32_t id) const { return entries_[id]; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Appends an entry; exposed for loaders. Keeps ids dense in append order.
  void push(std::string surface, std::uint64_t count);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// fast_align-convention "i-j" pairs. Throws FormatError with line/column info;
// `file` and `line_no` only label the error message.
Alignment parse_alignment(std::string_view line, const std::string& file = "<string>",
                          std::size_t line_no = 1);
std::string format_alignment(const Alignment& alignment);

// Surface-form -> lemma lookup; misses fall back to the lowercased surface.
class LemmaDict {
 public:
  LemmaDict() = default;

  static LemmaDict load(const std::string& path);

  void add(std::string_view surface, std::string_view lemma);
  std::string lemma(std::string_view surface) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
};

// Plain-text corpus: one sentence per line, single-space separated tokens.
// Lines are validated as UTF-8 (inputs are expected to be NFC already).
std::vector<Sentence> read_corpus(const std::string& path);
void write_corpus(const std::vector<Sentence>& corpus, const std::string& path);
std::vector<Alignment> read_alignments(const std::string& path);

// Zips parallel files (plus optional alignments) into sentence pairs.
std::vector<SentencePair> zip_bitext(std::vector<Sentence> src, std::vector<Sentence> tgt,
                                     std::vector<Alignment> alignments = {});

}  // namespace mtkit

#endif  // MTKIT_CORPUS_HPP
