#include "mtkit/volatility.hpp"

#include <algorithm>
#include <cmath>

#include "mtkit/errors.hpp"
#include "mtkit/metrics.hpp"

namespace mtkit {

namespace {

bool is_plain_number(const std::string& token) {
  if (token.empty() || token.size() > 9) return false;
  for (char c : token) {
    if (c < '0' || c > '9') return false;
  }
  if (token.size() > 1 && token[0] == '0') return false;  // identifiers like 007
  return true;
}

bool has_initial_capital(const std::string& token) {
  return !token.empty() && token[0] >= 'A' && token[0] <= 'Z';
}

std::string match_case(const std::string& original, std::string replacement) {
  if (has_initial_capital(original) && !replacement.empty() && replacement[0] >= 'a' &&
      replacement[0] <= 'z') {
    replacement[0] = static_cast<char>(replacement[0] - 'a' + 'A');
  }
  return replacement;
}

std::optional<std::size_t> first_occurrence(const std::vector<std::string>& tokens,
                                            const std::string& needle) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == needle) return i;
  }
  return std::nullopt;
}

void apply_edits_to_side(std::vector<std::string>& tokens, std::vector<TokenEdit> edits) {
  // Descending position order keeps earlier indices valid across length edits.
  std::sort(edits.begin(), edits.end(),
            [](const TokenEdit& a, const TokenEdit& b) { return a.pos > b.pos; });
  for (const auto& edit : edits) {
    switch (edit.op) {
      case EditOp::kSubstitute:
        if (edit.pos >= tokens.size() || tokens[edit.pos] != edit.old_token) {
          throw Error("edit does not match parent at position " + std::to_string(edit.pos));
        }
        tokens[edit.pos] = edit.new_token;
        break;
      case EditOp::kDelete:
        if (edit.pos >= tokens.size() || tokens[edit.pos] != edit.old_token) {
          throw Error("delete edit does not match parent at position " + std::to_string(edit.pos));
        }
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(edit.pos));
        break;
      case EditOp::kInsert:
        if (edit.pos > tokens.size()) {
          throw Error("insert position out of range: " + std::to_string(edit.pos));
        }
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(edit.pos), edit.new_token);
        break;
    }
  }
}

}  // namespace

std::string variation_kind_name(VariationKind kind) {
  switch (kind) {
    case VariationKind::kDelete: return "delete";
    case VariationKind::kInsert: return "insert";
    case VariationKind::kSubsNumber: return "number";
    case VariationKind::kSubsGender: return "gender";
  }
  return "?";
}

std::optional<VariationKind> variation_kind_from(std::string_view name) {
  if (name == "delete") return VariationKind::kDelete;
  if (name == "insert") return VariationKind::kInsert;
  if (name == "number") return VariationKind::kSubsNumber;
  if (name == "gender") return VariationKind::kSubsGender;
  return std::nullopt;
}

SentencePair apply_edits(const SentencePair& parent, const std::vector<TokenEdit>& edits) {
  SentencePair out;
  out.src = parent.src;
  out.tgt = parent.tgt;
  out.labels = parent.labels;
  std::vector<TokenEdit> src_edits, tgt_edits;
  for (const auto& e : edits) (e.side == PairSide::kSrc ? src_edits : tgt_edits).push_back(e);
  apply_edits_to_side(out.src.tokens, std::move(src_edits));
  apply_edits_to_side(out.tgt.tokens, std::move(tgt_edits));
  return out;
}

std::vector<TokenEdit> inverse_edits(const std::vector<TokenEdit>& edits) {
  std::vector<TokenEdit> out;
  out.reserve(edits.size());
  for (const auto& e : edits) {
    TokenEdit inv = e;
    switch (e.op) {
      case EditOp::kSubstitute:
        std::swap(inv.old_token, inv.new_token);
        break;
      case EditOp::kDelete:
        inv.op = EditOp::kInsert;
        inv.new_token = e.old_token;
        inv.old_token.clear();
        break;
      case EditOp::kInsert:
        inv.op = EditOp::kDelete;
        inv.old_token = e.new_token;
        inv.new_token.clear();
        break;
    }
    out.push_back(std::move(inv));
  }
  return out;
}

std::vector<Variation> gen_delete(
    const SentencePair& pair, const std::string& parent_id,
    const std::vector<std::pair<std::string, std::string>>& adverb_pairs) {
  std::vector<Variation> out;
  for (const auto& [adv_src, adv_tgt] : adverb_pairs) {
    auto src_pos = first_occurrence(pair.src.tokens, adv_src);
    auto tgt_pos = first_occurrence(pair.tgt.tokens, adv_tgt);
    if (!src_pos || !tgt_pos) continue;  // both sides must carry the adverb
    Variation v;
    v.parent_id = parent_id;
    v.kind = VariationKind::kDelete;
    v.edits.push_back({PairSide::kSrc, EditOp::kDelete, *src_pos, adv_src, ""});
    v.edits.push_back({PairSide::kTgt, EditOp::kDelete, *tgt_pos, adv_tgt, ""});
    v.modified = apply_edits(pair, v.edits);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Variation> gen_insert(const SentencePair& pair, const std::string& parent_id,
                                  const GapNGramModel& model, double threshold) {
  std::vector<Variation> out;
  const auto& toks = pair.src.tokens;
  if (toks.size() < 4) return out;
  for (std::size_t gap = 2; gap + 1 < toks.size(); ++gap) {
    auto filler = model.best_filler(toks[gap - 2], toks[gap - 1], toks[gap], toks[gap + 1]);
    if (!filler || filler->prob <= threshold) continue;
    Variation v;
    v.parent_id = parent_id;
    v.kind = VariationKind::kInsert;
    v.edits.push_back({PairSide::kSrc, EditOp::kInsert, gap, "", filler->surface});
    v.modified = apply_edits(pair, v.edits);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Variation> gen_subs_number(const SentencePair& pair, const std::string& parent_id) {
  std::vector<Variation> out;
  std::vector<std::string> seen;
  for (const auto& token : pair.src.tokens) {
    if (!is_plain_number(token)) continue;
    if (std::find(seen.begin(), seen.end(), token) != seen.end()) continue;
    if (!first_occurrence(pair.tgt.tokens, token)) continue;  // equal value on both sides
    seen.push_back(token);
    std::uint64_t value = std::stoull(token);
    for (std::uint64_t k = 1; k <= 5; ++k) {
      std::string replacement = std::to_string(value + k);
      Variation v;
      v.parent_id = parent_id;
      v.kind = VariationKind::kSubsNumber;
      for (std::size_t i = 0; i < pair.src.tokens.size(); ++i) {
        if (pair.src.tokens[i] == token) {
          v.edits.push_back({PairSide::kSrc, EditOp::kSubstitute, i, token, replacement});
        }
      }
      for (std::size_t i = 0; i < pair.tgt.tokens.size(); ++i) {
        if (pair.tgt.tokens[i] == token) {
          v.edits.push_back({PairSide::kTgt, EditOp::kSubstitute, i, token, replacement});
        }
      }
      v.modified = apply_edits(pair, v.edits);
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Variation> gen_subs_gender(const SentencePair& pair, const std::string& parent_id,
                                       const PronounMap& pronouns) {
  Variation v;
  v.parent_id = parent_id;
  v.kind = VariationKind::kSubsGender;
  auto swap_side = [&](const std::vector<std::string>& tokens, PairSide side,
                       const std::unordered_map<std::string, std::string>& table) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = table.find(lowercase(tokens[i]));
      if (it == table.end()) continue;
      v.edits.push_back({side, EditOp::kSubstitute, i, tokens[i], match_case(tokens[i], it->second)});
    }
  };
  swap_side(pair.src.tokens, PairSide::kSrc, pronouns.src);
  if (!pronouns.tgt.empty()) swap_side(pair.tgt.tokens, PairSide::kTgt, pronouns.tgt);
  if (v.edits.empty()) return {};
  v.modified = apply_edits(pair, v.edits);
  std::vector<Variation> out;
  out.push_back(std::move(v));
  return out;
}

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::size_t span_of_change(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t min_len = std::min(a.size(), b.size());
  std::size_t prefix = 0;
  while (prefix < min_len && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < min_len - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  return std::max(a.size(), b.size()) - prefix - suffix;
}

std::string change_class_name(ChangeClass cls) {
  switch (cls) {
    case ChangeClass::kMinor: return "minor";
    case ChangeClass::kMajor: return "major";
    case ChangeClass::kMixed: return "mixed";
  }
  return "?";
}

ChangeClass classify_change(std::size_t lev, std::size_t span) {
  if (lev > 10 && span > 10) return ChangeClass::kMajor;
  if (lev < 10 && span < 10) return ChangeClass::kMinor;
  return ChangeClass::kMixed;
}

double oscillation_range(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("oscillation range of no values");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double length_ratio(const std::vector<std::string>& candidate,
                    const std::vector<std::string>& reference) {
  if (reference.empty()) throw EmptyReference();
  return 100.0 * static_cast<double>(candidate.size()) / static_cast<double>(reference.size());
}

double normalized_edit_rate(const std::vector<std::string>& candidate,
                            const std::vector<std::string>& reference) {
  if (reference.empty()) throw EmptyReference();
  return static_cast<double>(levenshtein(candidate, reference)) /
         static_cast<double>(reference.size());
}

VolatilityReport assess_volatility(const std::vector<TranslatedVariation>& variations,
                                   const std::map<std::string, Sentence>& parent_translations) {
  VolatilityReport report;
  std::map<std::string, std::vector<std::size_t>> by_parent;
  std::size_t n_minor = 0, n_major = 0, n_mixed = 0;

  for (const auto& var : variations) {
    auto parent_it = parent_translations.find(var.parent_id);
    if (parent_it == parent_translations.end()) {
      throw Error("no parent translation for id " + var.parent_id);
    }
    VariationAssessment a;
    a.variation_id = var.variation_id;
    a.parent_id = var.parent_id;
    a.kind = var.kind;
    a.lev = levenshtein(var.translation.tokens, parent_it->second.tokens);
    a.span = span_of_change(var.translation.tokens, parent_it->second.tokens);
    a.cls = classify_change(a.lev, a.span);
    a.bleu = bleu_sentence(var.translation, var.reference);
    a.len_ratio = length_ratio(var.translation.tokens, var.reference.tokens);
    a.edit_rate = normalized_edit_rate(var.translation.tokens, var.reference.tokens);
    switch (a.cls) {
      case ChangeClass::kMinor: ++n_minor; break;
      case ChangeClass::kMajor: ++n_major; break;
      case ChangeClass::kMixed: ++n_mixed; break;
    }
    by_parent[var.parent_id].push_back(report.assessments.size());
    report.assessments.push_back(std::move(a));
  }

  double bleu_sum = 0.0, ratio_sum = 0.0, edit_sum = 0.0;
  for (const auto& [parent_id, idxs] : by_parent) {
    std::vector<double> bleus, ratios, edits;
    for (std::size_t i : idxs) {
      bleus.push_back(report.assessments[i].bleu);
      ratios.push_back(report.assessments[i].len_ratio);
      edits.push_back(report.assessments[i].edit_rate);
    }
    ParentOscillation osc;
    osc.parent_id = parent_id;
    osc.n_variations = idxs.size();
    osc.bleu_range = oscillation_range(bleus);
    osc.len_ratio_range = oscillation_range(ratios);
    osc.edit_rate_range = oscillation_range(edits);
    bleu_sum += osc.bleu_range;
    ratio_sum += osc.len_ratio_range;
    edit_sum += osc.edit_rate_range;
    report.oscillations.push_back(std::move(osc));
  }

  const double n = static_cast<double>(report.assessments.size());
  if (n > 0) {
    report.minor_fraction = n_minor / n;
    report.major_fraction = n_major / n;
    report.mixed_fraction = n_mixed / n;
  }
  if (!report.oscillations.empty()) {
    const double p = static_cast<double>(report.oscillations.size());
    report.mean_bleu_oscillation = bleu_sum / p;
    report.mean_len_ratio_oscillation = ratio_sum / p;
    report.mean_edit_rate_oscillation = edit_sum / p;
  }
  return report;
}

}  // namespace mtkit
