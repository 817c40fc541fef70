#include "mtkit/bt_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mtkit/errors.hpp"
#include "mtkit/rng.hpp"

namespace mtkit {

TokenLossTable TokenLossTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open token loss file: " + path);
  std::vector<TokenLossRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 4) {
      throw FormatError(path, line_no, 1, "expected 'sentence_id<TAB>position<TAB>token<TAB>loss'");
    }
    TokenLossRecord rec;
    try {
      rec.sentence_id = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 1, "bad sentence id '" + fields[0] + "'");
    }
    try {
      rec.position = static_cast<std::uint32_t>(std::stoul(fields[1]));
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 2, "bad position '" + fields[1] + "'");
    }
    if (fields[2].empty()) throw FormatError(path, line_no, 3, "empty token");
    rec.token = fields[2];
    try {
      rec.loss = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 4, "bad loss '" + fields[3] + "'");
    }
    if (rec.loss < 0.0) {
      throw NegativeLoss(path + ":" + std::to_string(line_no), rec.loss);
    }
    records.push_back(std::move(rec));
  }
  return from_records(std::move(records));
}

TokenLossTable TokenLossTable::from_records(std::vector<TokenLossRecord> records) {
  TokenLossTable table;
  table.records_ = std::move(records);
  std::unordered_map<std::string, std::pair<double, double>> sums;  // (sum, sum of squares)
  for (const auto& rec : table.records_) {
    if (rec.loss < 0.0) throw NegativeLoss("record", rec.loss);
    auto& stats = table.stats_[rec.token];
    ++stats.n;
    auto& [sum, sq] = sums[rec.token];
    sum += rec.loss;
    sq += rec.loss * rec.loss;
  }
  for (auto& [token, stats] : table.stats_) {
    const auto& [sum, sq] = sums[token];
    stats.mean = sum / static_cast<double>(stats.n);
    double var = sq / static_cast<double>(stats.n) - stats.mean * stats.mean;
    stats.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return table;
}

std::optional<TokenLossStats> TokenLossTable::stats(std::string_view token) const {
  auto it = stats_.find(std::string(token));
  if (it == stats_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> TokenLossTable::per_position_mean_loss() const {
  std::vector<double> sums;
  std::vector<std::uint64_t> counts;
  for (const auto& rec : records_) {
    if (rec.position >= sums.size()) {
      sums.resize(rec.position + 1, 0.0);
      counts.resize(rec.position + 1, 0);
    }
    sums[rec.position] += rec.loss;
    ++counts[rec.position];
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (counts[i] > 0) sums[i] /= static_cast<double>(counts[i]);
  }
  return sums;
}

std::string difficulty_criterion_name(DifficultyCriterion c) {
  switch (c) {
    case DifficultyCriterion::kFreq: return "freq";
    case DifficultyCriterion::kMpl: return "mpl";
    case DifficultyCriterion::kMplSpl: return "mpl-spl";
    case DifficultyCriterion::kPplr: return "pplr";
  }
  return "?";
}

DifficultySet difficulty_set(const TokenLossTable& table, const Vocabulary& vocab,
                             DifficultyCriterion criterion, DifficultyThresholds thresholds,
                             const std::vector<Sentence>* corpus) {
  DifficultySet set;
  set.criterion = criterion;
  set.thresholds = thresholds;

  switch (criterion) {
    case DifficultyCriterion::kFreq:
      for (const auto& entry : vocab.entries()) {
        if (entry.count < thresholds.eta) set.tokens.insert(entry.surface);
      }
      break;
    case DifficultyCriterion::kMpl:
      for (const auto& [token, stats] : table.aggregates()) {
        if (stats.mean > thresholds.mu) set.tokens.insert(token);
      }
      break;
    case DifficultyCriterion::kMplSpl:
      for (const auto& [token, stats] : table.aggregates()) {
        if (stats.mean > thresholds.mu && stats.stddev > thresholds.rho) set.tokens.insert(token);
      }
      break;
    case DifficultyCriterion::kPplr:
      for (const auto& rec : table.records()) {
        if (rec.loss > thresholds.mu) set.tokens.insert(rec.token);
      }
      break;
  }

  auto resolve = [&](std::uint64_t sentence_id) -> Sentence {
    if (corpus == nullptr || sentence_id >= corpus->size()) return Sentence{};
    return (*corpus)[sentence_id];
  };
  if (criterion == DifficultyCriterion::kPplr) {
    for (const auto& rec : table.records()) {
      if (rec.loss > thresholds.mu) {
        set.contexts.push_back({rec.token, rec.sentence_id, resolve(rec.sentence_id)});
      }
    }
  } else {
    for (const auto& rec : table.records()) {
      if (set.tokens.count(rec.token)) {
        set.contexts.push_back({rec.token, rec.sentence_id, resolve(rec.sentence_id)});
      }
    }
  }
  return set;
}

SampleResult diff_sampling(const DifficultySet& difficulty, const std::vector<Sentence>& mono,
                           std::size_t n_samples, std::uint64_t seed) {
  SampleResult result;
  if (difficulty.tokens.empty()) {
    result.exhausted = true;
    return result;
  }
  Rng rng(derive_seed(seed, "diff-sampling"));
  auto order = rng.permutation(mono.size());
  for (std::size_t idx : order) {
    if (result.sentences.size() == n_samples) break;
    const Sentence& sentence = mono[idx];
    bool hit = std::any_of(sentence.tokens.begin(), sentence.tokens.end(),
                           [&](const std::string& t) { return difficulty.tokens.count(t) > 0; });
    if (!hit) continue;
    result.picked.push_back(idx);
    result.sentences.push_back(sentence);
  }
  result.exhausted = result.sentences.size() < n_samples;
  return result;
}

SampleResult pplr_sampling(const DifficultySet& difficulty, const std::vector<Sentence>& mono,
                           std::size_t n_samples, std::uint64_t seed,
                           std::unordered_map<std::string, std::size_t>* final_counts) {
  if (difficulty.contexts.empty()) throw EmptyInput("ratio-preserving sampling without contexts");

  std::unordered_map<std::string, std::size_t> context_counts;
  for (const auto& ctx : difficulty.contexts) ++context_counts[ctx.token];
  const double total = static_cast<double>(difficulty.contexts.size());
  std::unordered_map<std::string, double> quota;
  for (const auto& [token, count] : context_counts) {
    quota[token] = static_cast<double>(n_samples) * static_cast<double>(count) / total;
  }

  SampleResult result;
  std::unordered_map<std::string, std::size_t> counts;
  Rng rng(derive_seed(seed, "pplr-sampling"));
  auto order = rng.permutation(mono.size());
  for (std::size_t idx : order) {
    if (result.sentences.size() == n_samples) break;
    const Sentence& sentence = mono[idx];
    const std::string* credit = nullptr;
    for (const auto& token : sentence.tokens) {
      auto it = quota.find(token);
      if (it == quota.end()) continue;
      if (static_cast<double>(counts[token]) < it->second) {
        credit = &token;
        break;
      }
    }
    if (credit == nullptr) continue;  // no difficult token below quota
    ++counts[*credit];
    result.picked.push_back(idx);
    result.sentences.push_back(sentence);
  }
  result.exhausted = result.sentences.size() < n_samples;
  if (final_counts != nullptr) *final_counts = std::move(counts);
  return result;
}

std::vector<std::string> context_of(const ContextSpec& spec, const Sentence& sentence,
                                    std::size_t position) {
  const auto& toks = sentence.tokens;
  if (position >= toks.size()) throw Error("context position out of range");
  std::vector<std::string> out;
  switch (spec.kind) {
    case ContextKind::kNeighbor: {
      std::size_t lo = position > spec.window ? position - spec.window : 0;
      for (std::size_t i = lo; i < position; ++i) out.push_back(toks[i]);
      for (std::size_t i = position + 1; i < toks.size() && i <= position + spec.window; ++i) {
        out.push_back(toks[i]);
      }
      break;
    }
    case ContextKind::kSibling: {
      // The surface word around `position`: a run of "@@" pieces plus the
      // final unmarked piece.
      std::size_t start = position;
      while (start > 0 && is_subword_continuation(toks[start - 1])) --start;
      std::size_t end = position;
      while (end + 1 < toks.size() && is_subword_continuation(toks[end])) ++end;
      for (std::size_t i = start; i <= end; ++i) {
        if (i != position) out.push_back(toks[i]);
      }
      break;
    }
    case ContextKind::kSentence: {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i != position) out.push_back(toks[i]);
      }
      break;
    }
  }
  return out;
}

double context_similarity(const ContextSpec& spec, const std::vector<std::string>& context_a,
                          const std::vector<std::string>& context_b, const WordVectors* vectors,
                          std::size_t* skipped) {
  if (spec.similarity == SimilarityKind::kExact) {
    const std::size_t len = std::max(context_a.size(), context_b.size());
    if (len == 0) return 0.0;
    std::size_t matches = 0;
    const std::size_t common = std::min(context_a.size(), context_b.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (context_a[i] == context_b[i]) ++matches;
    }
    // Positions past the shorter context compare against a sentinel: no match.
    return static_cast<double>(matches) / static_cast<double>(len);
  }

  if (vectors == nullptr) throw MissingEmbeddings("semantic context similarity needs word vectors");
  auto mean_vec = [&](const std::vector<std::string>& context) {
    std::vector<double> mean(vectors->dim(), 0.0);
    std::size_t used = 0;
    for (const auto& token : context) {
      const auto* vec = vectors->get(token);
      if (vec == nullptr) {
        if (skipped != nullptr) ++(*skipped);
        continue;
      }
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*vec)[i];
      ++used;
    }
    if (used > 0) {
      for (auto& v : mean) v /= static_cast<double>(used);
    }
    return std::make_pair(mean, used);
  };
  auto [mean_a, used_a] = mean_vec(context_a);
  auto [mean_b, used_b] = mean_vec(context_b);
  if (used_a == 0 || used_b == 0) return 0.0;
  return cosine(std::span<const double>(mean_a), std::span<const double>(mean_b));
}

SampleResult context_sampling(const DifficultySet& difficulty, const ContextSpec& spec,
                              const std::vector<Sentence>& mono, std::size_t n_samples,
                              std::uint64_t seed, const WordVectors* vectors,
                              std::vector<ContextSampleLog>* log, std::size_t* skipped_tokens) {
  if (difficulty.contexts.empty()) throw EmptyInput("context sampling without recorded contexts");

  // Pre-extract the recorded difficult contexts per token; every occurrence
  // of the token in its recorded sentence contributes one context.
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> recorded;
  for (const auto& ctx : difficulty.contexts) {
    if (ctx.sentence.empty()) continue;
    for (std::size_t i = 0; i < ctx.sentence.size(); ++i) {
      if (ctx.sentence.tokens[i] == ctx.token) {
        recorded[ctx.token].push_back(context_of(spec, ctx.sentence, i));
      }
    }
  }

  SampleResult result;
  Rng rng(derive_seed(seed, "context-sampling"));
  auto order = rng.permutation(mono.size());
  for (std::size_t idx : order) {
    if (result.sentences.size() == n_samples) break;
    const Sentence& sentence = mono[idx];
    bool keep = false;
    for (std::size_t i = 0; i < sentence.size() && !keep; ++i) {
      auto it = recorded.find(sentence.tokens[i]);
      if (it == recorded.end()) continue;
      auto candidate_context = context_of(spec, sentence, i);
      for (const auto& difficult_context : it->second) {
        double sim =
            context_similarity(spec, candidate_context, difficult_context, vectors, skipped_tokens);
        if (sim > spec.threshold) {
          keep = true;
          if (log != nullptr) log->push_back({idx, sentence.tokens[i], sim});
          break;
        }
      }
    }
    if (!keep) continue;
    result.picked.push_back(idx);
    result.sentences.push_back(sentence);
  }
  result.exhausted = result.sentences.size() < n_samples;
  return result;
}

}  // namespace mtkit
