#ifndef MTKIT_VOLATILITY_HPP
#define MTKIT_VOLATILITY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtkit/corpus.hpp"
#include "mtkit/ngram.hpp"

namespace mtkit {

enum class VariationKind { kDelete, kInsert, kSubsNumber, kSubsGender };
enum class PairSide { kSrc, kTgt };
enum class EditOp { kDelete, kInsert, kSubstitute };

std::string variation_kind_name(VariationKind kind);
std::optional<VariationKind> variation_kind_from(std::string_view name);

// One token edit relative to the parent pair. Positions index the parent
// sentence (for insert: the insertion point). Generators emit at most one
// length-changing edit per side, which keeps edit lists order-independent.
struct TokenEdit {
  PairSide side = PairSide::kSrc;
  EditOp op = EditOp::kSubstitute;
  std::size_t pos = 0;
  std::string old_token;  // empty for insert
  std::string new_token;  // empty for delete
};

struct Variation {
  std::string parent_id;
  VariationKind kind = VariationKind::kDelete;
  std::vector<TokenEdit> edits;
  SentencePair modified;
};

SentencePair apply_edits(const SentencePair& parent, const std::vector<TokenEdit>& edits);
std::vector<TokenEdit> inverse_edits(const std::vector<TokenEdit>& edits);

// Removes the first occurrence of a known adverb and of its translation; one
// variation per adverb pair present on both sides.
std::vector<Variation> gen_delete(const SentencePair& pair, const std::string& parent_id,
                                  const std::vector<std::pair<std::string, std::string>>& adverb_pairs);

// Inserts the most probable gap filler into the source at every interior gap
// whose best filler clears the probability threshold; target unchanged.
std::vector<Variation> gen_insert(const SentencePair& pair, const std::string& parent_id,
                                  const GapNGramModel& model, double threshold);

// Replaces a number present on both sides with value+k for k=1..5, both sides.
// Digit tokens with leading zeros or more than 9 digits are skipped.
std::vector<Variation> gen_subs_number(const SentencePair& pair, const std::string& parent_id);

struct PronounMap {
  std::unordered_map<std::string, std::string> src;  // lowercase -> lowercase
  std::unordered_map<std::string, std::string> tgt;  // optional; empty = source only
};

// Swaps every mapped pronoun (case of the first letter preserved); at most one
// variation holding all swaps.
std::vector<Variation> gen_subs_gender(const SentencePair& pair, const std::string& parent_id,
                                       const PronounMap& pronouns);

// Unit-cost edit distance over tokens (BPE subword units in the pipelines).
std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

// max(len a, len b) - common_prefix - common_suffix(remainders); 0 when equal.
std::size_t span_of_change(const std::vector<std::string>& a, const std::vector<std::string>& b);

enum class ChangeClass { kMinor, kMajor, kMixed };

std::string change_class_name(ChangeClass cls);

// Both metrics > 10: major. Both < 10: minor. Everything else: mixed.
ChangeClass classify_change(std::size_t lev, std::size_t span);

double oscillation_range(const std::vector<double>& values);  // max - min

// 100 * len(candidate) / len(reference); throws EmptyReference.
double length_ratio(const std::vector<std::string>& candidate,
                    const std::vector<std::string>& reference);

// Word-level levenshtein / reference length; a TER stand-in without shifts.
double normalized_edit_rate(const std::vector<std::string>& candidate,
                            const std::vector<std::string>& reference);

struct VariationAssessment {
  std::string variation_id;
  std::string parent_id;
  VariationKind kind = VariationKind::kDelete;
  std::size_t lev = 0;
  std::size_t span = 0;
  ChangeClass cls = ChangeClass::kMinor;
  double bleu = 0.0;
  double len_ratio = 0.0;
  double edit_rate = 0.0;
};

struct ParentOscillation {
  std::string parent_id;
  std::size_t n_variations = 0;
  double bleu_range = 0.0;
  double len_ratio_range = 0.0;
  double edit_rate_range = 0.0;
};

struct VolatilityReport {
  std::vector<VariationAssessment> assessments;
  std::vector<ParentOscillation> oscillations;
  double minor_fraction = 0.0;
  double major_fraction = 0.0;
  double mixed_fraction = 0.0;
  double mean_bleu_oscillation = 0.0;
  double mean_len_ratio_oscillation = 0.0;
  double mean_edit_rate_oscillation = 0.0;
};

struct TranslatedVariation {
  std::string variation_id;
  std::string parent_id;
  VariationKind kind = VariationKind::kDelete;
  Sentence reference;    // modified target side
  Sentence translation;  // external system output for the modified source
};

// Levenshtein/span/class compare each variation's translation against the
// parent translation; sentence metrics score against the modified reference.
VolatilityReport assess_volatility(const std::vector<TranslatedVariation>& variations,
                                   const std::map<std::string, Sentence>& parent_translations);

}  // namespace mtkit

#endif  // MTKIT_VOLATILITY_HPP
