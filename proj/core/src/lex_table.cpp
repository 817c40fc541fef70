#include "mtkit/lex_table.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "mtkit/errors.hpp"

namespace mtkit {

LexTable LexTable::estimate(const std::vector<SentencePair>& pairs, std::uint64_t min_count) {
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> links;
  std::unordered_map<std::string, std::uint64_t> src_totals;
  std::unordered_map<std::string, std::uint64_t> tgt_totals;
  std::uint64_t n_links = 0;

  for (const auto& pair : pairs) {
    if (!pair.alignment) throw Error("lexical estimation requires aligned sentence pairs");
    for (const auto& [s, t] : *pair.alignment) {
      const std::string& src = pair.src.tokens.at(s);
      const std::string& tgt = pair.tgt.tokens.at(t);
      ++links[src][tgt];
      ++n_links;
    }
  }
  if (n_links == 0) throw EmptyInput("no alignment links in bitext");

  if (min_count > 1) {
    for (auto& [src, row] : links) {
      std::erase_if(row, [&](const auto& kv) { return kv.second < min_count; });
    }
    std::erase_if(links, [](const auto& kv) { return kv.second.empty(); });
    if (links.empty()) throw EmptyInput("min-count filter removed every alignment link");
  }

  for (const auto& [src, row] : links) {
    for (const auto& [tgt, count] : row) {
      src_totals[src] += count;
      tgt_totals[tgt] += count;
    }
  }

  LexTable table;
  for (const auto& [src, row] : links) {
    auto& entries = table.direct_[src];
    entries.reserve(row.size());
    for (const auto& [tgt, count] : row) {
      LexEntry e;
      e.tgt = tgt;
      e.p_direct = static_cast<double>(count) / static_cast<double>(src_totals[src]);
      e.p_inverse = static_cast<double>(count) / static_cast<double>(tgt_totals[tgt]);
      entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(), [](const LexEntry& a, const LexEntry& b) {
      if (a.p_direct != b.p_direct) return a.p_direct > b.p_direct;
      return a.tgt < b.tgt;
    });
  }
  return table;
}

double LexTable::p_direct(std::string_view src, std::string_view tgt) const {
  auto it = direct_.find(std::string(src));
  if (it == direct_.end()) return 0.0;
  for (const auto& e : it->second) {
    if (e.tgt == tgt) return e.p_direct;
  }
  return 0.0;
}

double LexTable::p_inverse(std::string_view src, std::string_view tgt) const {
  auto it = direct_.find(std::string(src));
  if (it == direct_.end()) return 0.0;
  for (const auto& e : it->second) {
    if (e.tgt == tgt) return e.p_inverse;
  }
  return 0.0;
}

std::vector<LexEntry> LexTable::trans_candidates(std::string_view src, double threshold) const {
  auto it = direct_.find(std::string(src));
  if (it == direct_.end()) return {};
  std::vector<LexEntry> out;
  for (const auto& e : it->second) {
    if (e.p_direct > threshold) out.push_back(e);
  }
  return out;
}

void LexTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write lexical table: " + path);
  std::map<std::string, const std::vector<LexEntry>*> sorted;
  for (const auto& [src, entries] : direct_) sorted.emplace(src, &entries);
  out.precision(17);
  for (const auto& [src, entries] : sorted) {
    for (const auto& e : *entries) {
      out << src << '\t' << e.tgt << '\t' << e.p_direct << '\t' << e.p_inverse << '\n';
    }
  }
}

LexTable LexTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexical table: " + path);
  LexTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() != 4) {
      throw FormatError(path, line_no, 1, "expected 'src<TAB>tgt<TAB>p_direct<TAB>p_inverse'");
    }
    LexEntry e;
    e.tgt = fields[1];
    try {
      e.p_direct = std::stod(fields[2]);
      e.p_inverse = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 1, "bad probability value");
    }
    if (e.p_direct <= 0.0 || e.p_direct > 1.0 || e.p_inverse <= 0.0 || e.p_inverse > 1.0) {
      throw FormatError(path, line_no, 1, "probability out of (0,1]");
    }
    table.direct_[fields[0]].push_back(std::move(e));
  }
  for (auto& [src, entries] : table.direct_) {
    std::sort(entries.begin(), entries.end(), [](const LexEntry& a, const LexEntry& b) {
      if (a.p_direct != b.p_direct) return a.p_direct > b.p_direct;
      return a.tgt < b.tgt;
    });
  }
  return table;
}

}  // namespace mtkit
