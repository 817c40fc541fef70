#ifndef MTKIT_METRICS_HPP
#define MTKIT_METRICS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtkit/corpus.hpp"

namespace mtkit {

inline constexpr int kBleuMaxOrder = 4;

// Pooled clipped/candidate n-gram counts plus candidate/reference lengths.
struct BleuStats {
  std::array<std::uint64_t, kBleuMaxOrder> matched{};    // clipped matches per n
  std::array<std::uint64_t, kBleuMaxOrder> candidate{};  // candidate n-grams per n
  std::uint64_t candidate_len = 0;
  std::uint64_t reference_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(const Sentence& candidate, const Sentence& reference, bool lowercase_input = false);

// Corpus BLEU in [0, 100]: BP * exp(sum w_n log p_n) over pooled statistics,
// any p_n == 0 gives 0. Throws LengthMismatch on unequal list sizes.
double bleu_corpus(const std::vector<Sentence>& candidates, const std::vector<Sentence>& references,
                   bool lowercase_input = false);

// Sentence BLEU with add-one smoothing on numerator and denominator for n >= 2.
double bleu_sentence(const Sentence& candidate, const Sentence& reference,
                     bool lowercase_input = false);

double bleu_from_stats(const BleuStats& stats);

std::uint64_t count_unk(const std::vector<Sentence>& sentences, std::string_view unk_surface = "unk");

// Spearman's rho with average-rank tie handling. Throws TooFewPairs for
// fewer than 3 points and ZeroVariance when either input has constant rank.
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace mtkit

#endif  // MTKIT_METRICS_HPP
