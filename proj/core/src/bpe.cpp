#include "mtkit/bpe.hpp"

#include <fstream>
#include <map>
#include <unordered_map>

#include "mtkit/errors.hpp"

namespace mtkit {

namespace {

std::vector<std::string> utf8_codepoints(std::string_view word) {
  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < word.size()) {
    unsigned char c = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    if (i + len > word.size()) len = 1;
    pieces.emplace_back(word.substr(i, len));
    i += len;
  }
  return pieces;
}

void merge_in_place(std::vector<std::string>& pieces, const BpeModel::Merge& merge) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < pieces.size(); ++r) {
    if (w > 0 && pieces[w - 1] == merge.first && pieces[r] == merge.second) {
      pieces[w - 1] += pieces[r];
    } else {
      if (w != r) pieces[w] = std::move(pieces[r]);
      ++w;
    }
  }
  pieces.resize(w);
}

}  // namespace

BpeModel BpeModel::learn(const std::vector<Sentence>& corpus, std::size_t n_merges) {
  // Word-type frequency table; learning never needs the sentences themselves.
  std::unordered_map<std::string, std::uint64_t> word_counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence.tokens) ++word_counts[token];
  }

  std::vector<std::vector<std::string>> words;
  std::vector<std::uint64_t> counts;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    words.push_back(utf8_codepoints(word));
    counts.push_back(count);
  }

  std::vector<Merge> merges;
  merges.reserve(n_merges);
  for (std::size_t step = 0; step < n_merges; ++step) {
    // std::map keeps pair keys ordered, which gives the (left, right) tie-break.
    std::map<Merge, std::uint64_t> pair_counts;
    for (std::size_t w = 0; w < words.size(); ++w) {
      const auto& pieces = words[w];
      for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        pair_counts[{pieces[i], pieces[i + 1]}] += counts[w];
      }
    }
    if (pair_counts.empty()) break;
    auto best = pair_counts.begin();
    for (auto it = std::next(pair_counts.begin()); it != pair_counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    merges.push_back(best->first);
    for (auto& pieces : words) merge_in_place(pieces, merges.back());
  }
  return BpeModel(std::move(merges));
}

std::vector<std::string> BpeModel::segment_word(std::string_view word) const {
  std::vector<std::string> pieces = utf8_codepoints(word);
  for (const auto& merge : merges_) {
    if (pieces.size() < 2) break;
    merge_in_place(pieces, merge);
  }
  return pieces;
}

Sentence BpeModel::apply(const Sentence& sentence) const {
  Sentence out;
  out.doc_id = sentence.doc_id;
  for (const auto& word : sentence.tokens) {
    auto pieces = segment_word(word);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (i + 1 < pieces.size()) pieces[i] += kSubwordMarker;
      out.tokens.push_back(std::move(pieces[i]));
    }
  }
  return out;
}

void BpeModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write BPE model: " + path);
  out << "#merges: " << merges_.size() << '\n';
  for (const auto& [left, right] : merges_) out << left << ' ' << right << '\n';
}

BpeModel BpeModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open BPE model: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#merges:", 0) != 0) {
    throw FormatError(path, 1, 1, "expected '#merges: N' header");
  }
  std::size_t declared = std::stoull(line.substr(8));
  std::vector<Merge> merges;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() != 2) throw FormatError(path, line_no, 1, "expected 'left right' merge pair");
    merges.emplace_back(fields[0], fields[1]);
  }
  if (merges.size() != declared) {
    throw FormatError(path, line_no, 1, "merge count does not match header");
  }
  return BpeModel(std::move(merges));
}

Sentence bpe_detokenize(const Sentence& sentence) {
  Sentence out;
  out.doc_id = sentence.doc_id;
  std::string word;
  for (const auto& token : sentence.tokens) {
    if (is_subword_continuation(token)) {
      word += strip_subword_marker(token);
    } else {
      word += token;
      out.tokens.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) out.tokens.push_back(std::move(word));  // dangling marker
  return out;
}

}  // namespace mtkit
