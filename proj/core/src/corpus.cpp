#include "mtkit/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "mtkit/errors.hpp"

namespace mtkit {

Vocabulary Vocabulary::build(const std::vector<Sentence>& corpus,
                             std::optional<std::size_t> size_limit) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence.tokens) ++counts[token];
  }
  if (counts.empty()) throw EmptyInput("vocabulary build on empty corpus");

  std::vector<Entry> entries;
  entries.reserve(counts.size());
  for (auto& [surface, count] : counts) entries.push_back(Entry{surface, count});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.surface < b.surface;
  });
  if (size_limit && entries.size() > *size_limit) entries.resize(*size_limit);

  Vocabulary vocab;
  for (auto& e : entries) vocab.push(std::move(e.surface), e.count);
  return vocab;
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::count(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  return it == index_.end() ? 0 : entries_[it->second].count;
}

void Vocabulary::push(std::string surface, std::uint64_t count) {
  index_.emplace(surface, static_cast<std::uint32_t>(entries_.size()));
  entries_.push_back(Entry{std::move(surface), count});
}

Alignment parse_alignment(std::string_view line, const std::string& file, std::size_t line_no) {
  Alignment out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  auto parse_number = [&](const char* what) -> std::uint32_t {
    std::size_t start = i;
    std::uint64_t value = 0;
    while (i < n && line[i] >= '0' && line[i] <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(line[i] - '0');
      if (value > 0xFFFFFFFFULL) throw FormatError(file, line_no, start + 1, "alignment index overflow");
      ++i;
    }
    if (i == start) {
      throw FormatError(file, line_no, i + 1, std::string("expected ") + what + " in alignment pair");
    }
    return static_cast<std::uint32_t>(value);
  };
  while (i < n) {
    while (i < n && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= n) break;
    std::uint32_t src = parse_number("source index");
    if (i >= n || line[i] != '-') throw FormatError(file, line_no, i + 1, "expected '-' in alignment pair");
    ++i;
    std::uint32_t tgt = parse_number("target index");
    if (i < n && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
      throw FormatError(file, line_no, i + 1, "unexpected character in alignment pair");
    }
    out.emplace(src, tgt);
  }
  return out;
}

std::string format_alignment(const Alignment& alignment) {
  std::string out;
  for (const auto& [s, t] : alignment) {
    if (!out.empty()) out += ' ';
    out += std::to_string(s);
    out += '-';
    out += std::to_string(t);
  }
  return out;
}

LemmaDict LemmaDict::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lemma dictionary: " + path);
  LemmaDict dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw FormatError(path, line_no, 1, "expected 'surface<TAB>lemma'");
    }
    dict.add(fields[0], fields[1]);
  }
  return dict;
}

void LemmaDict::add(std::string_view surface, std::string_view lemma) {
  table_[lowercase(surface)] = lowercase(lemma);
}

std::string LemmaDict::lemma(std::string_view surface) const {
  std::string key = lowercase(surface);
  auto it = table_.find(key);
  return it == table_.end() ? key : it->second;
}

std::vector<Sentence> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus: " + path);
  std::vector<Sentence> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!utf8_valid(line)) throw FormatError(path, line_no, 1, "invalid UTF-8");
    corpus.push_back(Sentence{split_ws(line)});
  }
  return corpus;
}

void write_corpus(const std::vector<Sentence>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus: " + path);
  for (const auto& sentence : corpus) out << sentence.text() << '\n';
}

std::vector<Alignment> read_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open alignment file: " + path);
  std::vector<Alignment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    out.push_back(parse_alignment(line, path, line_no));
  }
  return out;
}

std::vector<SentencePair> zip_bitext(std::vector<Sentence> src, std::vector<Sentence> tgt,
                                     std::vector<Alignment> alignments) {
  if (src.size() != tgt.size()) throw LengthMismatch(src.size(), tgt.size());
  if (!alignments.empty() && alignments.size() != src.size()) {
    throw LengthMismatch(alignments.size(), src.size());
  }
  std::vector<SentencePair> pairs(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs[i].src = std::move(src[i]);
    pairs[i].tgt = std::move(tgt[i]);
    if (!alignments.empty()) {
      for (const auto& [s, t] : alignments[i]) {
        if (s >= pairs[i].src.size() || t >= pairs[i].tgt.size()) {
          throw Error("alignment link " + std::to_string(s) + "-" + std::to_string(t) +
                      " out of bounds at pair " + std::to_string(i));
        }
      }
      pairs[i].alignment = std::move(alignments[i]);
    }
  }
  return pairs;
}

}  // namespace mtkit
