#include "mtkit/idiom.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "mtkit/errors.hpp"
#include "mtkit/parallel.hpp"
#include "mtkit/rng.hpp"

namespace mtkit {

std::vector<IdiomEntry> load_idiom_dictionary(const std::string& path, const LemmaDict& dict) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open idiom dictionary: " + path);
  std::vector<IdiomEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 3) {
      throw FormatError(path, line_no, 1, "expected 'id<TAB>source_phrase<TAB>target_equivalent'");
    }
    IdiomEntry entry;
    entry.id = fields[0];
    for (const auto& word : split_ws(fields[1])) entry.source_lemmas.push_back(dict.lemma(word));
    entry.target_equivalent = split_ws(fields[2]);
    if (entry.source_lemmas.size() < 2) {
      throw FormatError(path, line_no, 1, "idiom phrase must have at least 2 words");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::optional<IdiomMatch> match_idiom(const Sentence& sentence, const IdiomEntry& entry,
                                      const LemmaDict& dict, std::size_t max_gap) {
  const std::size_t n = sentence.size();
  const std::size_t idiom_len = entry.source_lemmas.size();
  if (n < idiom_len) return std::nullopt;

  std::vector<std::string> lemmas(n);
  for (std::size_t i = 0; i < n; ++i) lemmas[i] = dict.lemma(sentence.tokens[i]);

  std::unordered_map<std::string, std::size_t> wanted;
  for (const auto& lemma : entry.source_lemmas) ++wanted[lemma];

  for (std::size_t start = 0; start + idiom_len <= n; ++start) {
    auto it = wanted.find(lemmas[start]);
    if (it == wanted.end()) continue;
    // Greedy forward collection yields the shortest window starting here.
    auto need = wanted;
    std::size_t remaining = idiom_len;
    std::size_t gaps = 0;
    std::vector<std::size_t> positions;
    positions.reserve(idiom_len);
    for (std::size_t q = start; q < n; ++q) {
      auto nit = need.find(lemmas[q]);
      if (nit != need.end() && nit->second > 0) {
        --nit->second;
        --remaining;
        positions.push_back(q);
        if (remaining == 0) break;
      } else if (q > start) {
        if (++gaps > max_gap) break;
      }
    }
    if (remaining != 0) continue;
    IdiomMatch match;
    match.idiom_id = entry.id;
    match.positions = std::move(positions);
    match.gap_count = gaps;
    std::vector<std::string> found;
    found.reserve(idiom_len);
    for (std::size_t p : match.positions) found.push_back(lemmas[p]);
    match.reordered = found != entry.source_lemmas;
    return match;
  }
  return std::nullopt;
}

AnnotatedCorpus annotate_corpus(std::vector<SentencePair> pairs,
                                const std::vector<IdiomEntry>& entries, const LemmaDict& dict,
                                std::size_t max_gap, unsigned workers) {
  AnnotatedCorpus out;
  out.matches = parallel_map(pairs.size(), workers, [&](std::size_t i) {
    std::vector<IdiomMatch> found;
    for (const auto& entry : entries) {
      if (auto match = match_idiom(pairs[i].src, entry, dict, max_gap)) {
        found.push_back(std::move(*match));
      }
    }
    return found;
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (const auto& match : out.matches[i]) pairs[i].labels.push_back(match.idiom_id);
  }
  out.pairs = std::move(pairs);
  return out;
}

SplitPlan build_split(const AnnotatedCorpus& corpus, std::size_t test_size, std::uint64_t seed) {
  std::vector<std::size_t> idiomatic;
  std::map<std::string, std::size_t> occurrences;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    if (corpus.pairs[i].labels.empty()) continue;
    idiomatic.push_back(i);
    // A pair counts once per distinct idiom for split accounting.
    std::set<std::string> distinct(corpus.pairs[i].labels.begin(), corpus.pairs[i].labels.end());
    for (const auto& id : distinct) ++occurrences[id];
  }
  if (test_size > idiomatic.size()) {
    throw InfeasibleSplit("requested " + std::to_string(test_size) + " test pairs but only " +
                          std::to_string(idiomatic.size()) + " idiomatic pairs exist");
  }

  auto remaining = occurrences;  // occurrences still on the training side
  Rng rng(derive_seed(seed, "idiom-split"));
  rng.shuffle(idiomatic);

  SplitPlan plan;
  std::vector<bool> in_test(corpus.pairs.size(), false);
  for (std::size_t idx : idiomatic) {
    if (plan.test_ids.size() == test_size) break;
    std::set<std::string> distinct(corpus.pairs[idx].labels.begin(),
                                   corpus.pairs[idx].labels.end());
    bool feasible = true;
    for (const auto& id : distinct) {
      if (remaining[id] < 2) {  // taking it would leave no training occurrence
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    for (const auto& id : distinct) {
      --remaining[id];
      ++plan.test_counts[id];
    }
    in_test[idx] = true;
    plan.test_ids.push_back(idx);
  }
  if (plan.test_ids.size() < test_size) {
    throw InfeasibleSplit("only " + std::to_string(plan.test_ids.size()) +
                          " pairs satisfy the coverage constraint (requested " +
                          std::to_string(test_size) + ")");
  }
  std::sort(plan.test_ids.begin(), plan.test_ids.end());

  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    if (in_test[i]) continue;
    plan.train_ids.push_back(i);
    std::set<std::string> distinct(corpus.pairs[i].labels.begin(), corpus.pairs[i].labels.end());
    for (const auto& id : distinct) ++plan.train_counts[id];
  }
  return plan;
}

Sentence prepend_flag(const Sentence& sentence) {
  if (sentence.empty()) throw EmptyInput("cannot flag an empty sentence");
  if (sentence.tokens.front() == kIdiomFlag) return sentence;
  Sentence out;
  out.doc_id = sentence.doc_id;
  out.tokens.reserve(sentence.size() + 1);
  out.tokens.emplace_back(kIdiomFlag);
  out.tokens.insert(out.tokens.end(), sentence.tokens.begin(), sentence.tokens.end());
  return out;
}

double uni_prec(const std::vector<std::string>& candidate,
                const std::vector<std::vector<std::string>>& references) {
  if (candidate.empty()) throw EmptyCandidate();
  std::unordered_map<std::string, std::size_t> max_ref;
  for (const auto& ref : references) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& token : ref) ++counts[token];
    for (const auto& [token, count] : counts) {
      max_ref[token] = std::max(max_ref[token], count);
    }
  }
  std::unordered_map<std::string, std::size_t> cand_counts;
  for (const auto& token : candidate) ++cand_counts[token];
  std::size_t clipped = 0;
  for (const auto& [token, count] : cand_counts) {
    auto it = max_ref.find(token);
    if (it != max_ref.end()) clipped += std::min(count, it->second);
  }
  return static_cast<double>(clipped) / static_cast<double>(candidate.size());
}

double word_acc(std::size_t hits, std::size_t insertions, std::size_t n_gold) {
  if (n_gold == 0) throw UndefinedMetric("word accuracy with empty gold expression");
  if (hits > n_gold) throw Error("hits exceed gold length");
  return (static_cast<double>(hits) - static_cast<double>(insertions)) /
         static_cast<double>(n_gold);
}

std::vector<std::string> extract_idiom_translation(const SentencePair& pair,
                                                   const IdiomMatch& match) {
  if (!pair.alignment) throw Error("idiom projection requires an alignment");
  std::set<std::uint32_t> tgt_positions;
  std::set<std::size_t> src_positions(match.positions.begin(), match.positions.end());
  for (const auto& [s, t] : *pair.alignment) {
    if (src_positions.count(s)) tgt_positions.insert(t);
  }
  if (tgt_positions.empty()) throw EmptyProjection();
  std::vector<std::string> out;
  out.reserve(tgt_positions.size());
  for (std::uint32_t t : tgt_positions) out.push_back(pair.tgt.tokens.at(t));
  return out;
}

HitCounts count_hits(const std::vector<std::string>& projected,
                     const std::vector<std::string>& gold) {
  std::unordered_map<std::string, std::size_t> gold_counts;
  for (const auto& token : gold) ++gold_counts[token];
  HitCounts counts;
  for (const auto& token : projected) {
    auto it = gold_counts.find(token);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++counts.hits;
    } else {
      ++counts.insertions;
    }
  }
  return counts;
}

}  // namespace mtkit
