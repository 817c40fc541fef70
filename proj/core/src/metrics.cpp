#include "mtkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mtkit/errors.hpp"

namespace mtkit {

namespace {

// n-gram -> count, keyed by the joined surface (tokens cannot contain spaces).
using NGramCounts = std::unordered_map<std::string, std::uint64_t>;

NGramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
  NGramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::vector<std::string> maybe_lower(const std::vector<std::string>& tokens, bool lower) {
  if (!lower) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lowercase(t));
  return out;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    matched[n] += other.matched[n];
    candidate[n] += other.candidate[n];
  }
  candidate_len += other.candidate_len;
  reference_len += other.reference_len;
  return *this;
}

BleuStats bleu_stats(const Sentence& candidate, const Sentence& reference, bool lowercase_input) {
  BleuStats stats;
  auto cand = maybe_lower(candidate.tokens, lowercase_input);
  auto ref = maybe_lower(reference.tokens, lowercase_input);
  stats.candidate_len = cand.size();
  stats.reference_len = ref.size();
  for (int n = 1; n <= kBleuMaxOrder; ++n) {
    auto cand_counts = ngram_counts(cand, n);
    auto ref_counts = ngram_counts(ref, n);
    std::uint64_t total = 0;
    std::uint64_t clipped = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    stats.candidate[n - 1] = total;
    stats.matched[n - 1] = clipped;
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    if (stats.candidate[n] == 0 || stats.matched[n] == 0) return 0.0;
    double p = static_cast<double>(stats.matched[n]) / static_cast<double>(stats.candidate[n]);
    log_sum += std::log(p) / kBleuMaxOrder;
  }
  double bp = 1.0;
  if (stats.candidate_len < stats.reference_len) {
    bp = std::exp(1.0 - static_cast<double>(stats.reference_len) /
                            static_cast<double>(stats.candidate_len));
  }
  return 100.0 * bp * std::exp(log_sum);
}

double bleu_corpus(const std::vector<Sentence>& candidates, const std::vector<Sentence>& references,
                   bool lowercase_input) {
  if (candidates.size() != references.size()) {
    throw LengthMismatch(candidates.size(), references.size());
  }
  BleuStats pooled;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pooled += bleu_stats(candidates[i], references[i], lowercase_input);
  }
  return bleu_from_stats(pooled);
}

double bleu_sentence(const Sentence& candidate, const Sentence& reference, bool lowercase_input) {
  BleuStats stats = bleu_stats(candidate, reference, lowercase_input);
  if (stats.candidate_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    std::uint64_t matched = stats.matched[n];
    std::uint64_t total = stats.candidate[n];
    if (n > 0) {  // add-one smoothing for n >= 2
      matched += 1;
      total += 1;
    }
    if (total == 0 || matched == 0) return 0.0;
    double p = static_cast<double>(matched) / static_cast<double>(total);
    log_sum += std::log(p) / kBleuMaxOrder;
  }
  double bp = 1.0;
  if (stats.candidate_len < stats.reference_len) {
    bp = std::exp(1.0 - static_cast<double>(stats.reference_len) /
                            static_cast<double>(stats.candidate_len));
  }
  return 100.0 * bp * std::exp(log_sum);
}

std::uint64_t count_unk(const std::vector<Sentence>& sentences, std::string_view unk_surface) {
  std::uint64_t total = 0;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence.tokens) {
      if (token == unk_surface) ++total;
    }
  }
  return total;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // ties share the mean of the ranks they occupy (1-based)
    double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw LengthMismatch(xs.size(), ys.size());
  if (xs.size() < 3) throw TooFewPairs(xs.size(), 3);
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mean = (n + 1.0) / 2.0;
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0) throw ZeroVariance();
  return cov / std::sqrt(var_x * var_y);
}

}  // namespace mtkit
