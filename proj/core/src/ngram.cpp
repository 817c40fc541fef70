#include "mtkit/ngram.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "mtkit/errors.hpp"

namespace mtkit {

NGramModel NGramModel::train(const std::vector<Sentence>& corpus, int order,
                             LmDirection direction) {
  if (order < 2) throw Error("n-gram order must be >= 2");
  if (corpus.empty()) throw EmptyInput("n-gram training corpus");

  NGramModel model(order, direction);
  model.begin_id_ = model.vocab_.intern(kBegin);
  model.end_id_ = model.vocab_.intern(kEnd);

  const std::size_t ctx_len = static_cast<std::size_t>(order - 1);
  std::vector<std::uint32_t> padded;
  for (const auto& sentence : corpus) {
    padded.assign(ctx_len, model.begin_id_);
    if (direction == LmDirection::kForward) {
      for (const auto& token : sentence.tokens) padded.push_back(model.vocab_.intern(token));
    } else {
      for (auto it = sentence.tokens.rbegin(); it != sentence.tokens.rend(); ++it) {
        padded.push_back(model.vocab_.intern(*it));
      }
    }
    padded.push_back(model.end_id_);
    std::vector<std::uint32_t> context(ctx_len);
    for (std::size_t i = ctx_len; i < padded.size(); ++i) {
      context.assign(padded.begin() + static_cast<std::ptrdiff_t>(i - ctx_len),
                     padded.begin() + static_cast<std::ptrdiff_t>(i));
      model.add_ngram(context, padded[i]);
    }
  }
  return model;
}

void NGramModel::add_ngram(const std::vector<std::uint32_t>& context, std::uint32_t token) {
  auto& entry = contexts_[context];
  ++entry.total;
  ++entry.continuations[token];
}

std::optional<std::vector<std::uint32_t>> NGramModel::context_key(
    std::span<const std::string> context) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  // Keep the tokens nearest to the queried position.
  if (context.size() > ctx_len) {
    context = direction_ == LmDirection::kForward ? context.subspan(context.size() - ctx_len)
                                                  : context.subspan(0, ctx_len);
  }
  std::vector<std::uint32_t> key;
  key.reserve(ctx_len);
  for (std::size_t i = context.size(); i < ctx_len; ++i) key.push_back(begin_id_);
  if (direction_ == LmDirection::kForward) {
    for (const auto& token : context) {
      auto id = vocab_.lookup(token);
      if (!id) return std::nullopt;
      key.push_back(*id);
    }
  } else {
    for (auto it = context.rbegin(); it != context.rend(); ++it) {
      auto id = vocab_.lookup(*it);
      if (!id) return std::nullopt;
      key.push_back(*id);
    }
  }
  return key;
}

const NGramModel::ContextEntry* NGramModel::find_context(
    std::span<const std::string> context) const {
  auto key = context_key(context);
  if (!key) return nullptr;
  auto it = contexts_.find(*key);
  return it == contexts_.end() ? nullptr : &it->second;
}

CondProb NGramModel::cond_prob(std::span<const std::string> context,
                               std::string_view token) const {
  const ContextEntry* entry = find_context(context);
  if (entry == nullptr || entry->total == 0) return {0.0, true};
  auto id = vocab_.lookup(token);
  if (!id) return {0.0, false};
  auto it = entry->continuations.find(*id);
  if (it == entry->continuations.end()) return {0.0, false};
  return {static_cast<double>(it->second) / static_cast<double>(entry->total), false};
}

std::vector<ScoredToken> NGramModel::continuations(std::span<const std::string> context) const {
  std::vector<ScoredToken> out;
  const ContextEntry* entry = find_context(context);
  if (entry == nullptr || entry->total == 0) return out;
  out.reserve(entry->continuations.size());
  for (const auto& [id, count] : entry->continuations) {
    if (id == begin_id_ || id == end_id_) continue;  // padding never surfaces
    out.push_back({vocab_.surface(id), static_cast<double>(count) / static_cast<double>(entry->total)});
  }
  std::sort(out.begin(), out.end(), [](const ScoredToken& a, const ScoredToken& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.surface < b.surface;
  });
  return out;
}

std::vector<ScoredToken> NGramModel::topk(std::span<const std::string> context, std::size_t k,
                                          const std::unordered_set<std::string>* filter) const {
  std::vector<ScoredToken> ranked = continuations(context);
  if (ranked.size() > k) ranked.resize(k);
  if (filter != nullptr) {
    std::erase_if(ranked, [&](const ScoredToken& t) { return filter->count(t.surface) == 0; });
  }
  return ranked;
}

void NGramModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write n-gram model: " + path);
  out << "#ngram order=" << order_
      << " direction=" << (direction_ == LmDirection::kForward ? "forward" : "backward") << '\n';
  // Sorted text rows so that identical models serialize identically.
  std::map<std::string, std::map<std::string, std::uint64_t>> rows;
  for (const auto& [key, entry] : contexts_) {
    std::string ctx;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i) ctx += ' ';
      ctx += vocab_.surface(key[i]);
    }
    auto& row = rows[ctx];
    for (const auto& [id, count] : entry.continuations) row[vocab_.surface(id)] = count;
  }
  for (const auto& [ctx, row] : rows) {
    for (const auto& [token, count] : row) {
      out << ctx << '\t' << token << '\t' << count << '\n';
    }
  }
}

NGramModel NGramModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open n-gram model: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#ngram ", 0) != 0) {
    throw FormatError(path, 1, 1, "expected '#ngram order=N direction=D' header");
  }
  int order = 0;
  LmDirection direction = LmDirection::kForward;
  for (const auto& field : split_ws(line.substr(7))) {
    if (field.rfind("order=", 0) == 0) {
      order = std::stoi(field.substr(6));
    } else if (field.rfind("direction=", 0) == 0) {
      auto value = field.substr(10);
      if (value == "forward") direction = LmDirection::kForward;
      else if (value == "backward") direction = LmDirection::kBackward;
      else throw FormatError(path, 1, 1, "unknown direction '" + value + "'");
    }
  }
  if (order < 2) throw FormatError(path, 1, 1, "order must be >= 2");

  NGramModel model(order, direction);
  model.begin_id_ = model.vocab_.intern(kBegin);
  model.end_id_ = model.vocab_.intern(kEnd);
  const std::size_t ctx_len = static_cast<std::size_t>(order - 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() != 3) throw FormatError(path, line_no, 1, "expected 'context<TAB>token<TAB>count'");
    auto ctx_tokens = split_ws(fields[0]);
    if (ctx_tokens.size() != ctx_len) {
      throw FormatError(path, line_no, 1, "context length does not match order");
    }
    std::uint64_t count = 0;
    try {
      count = std::stoull(fields[2]);
    } catch (const std::exception&) {
      throw FormatError(path, line_no, 1, "bad count '" + fields[2] + "'");
    }
    if (count == 0) throw FormatError(path, line_no, 1, "zero count violates model invariant");
    std::vector<std::uint32_t> key;
    key.reserve(ctx_len);
    for (const auto& token : ctx_tokens) key.push_back(model.vocab_.intern(token));
    auto& entry = model.contexts_[key];
    entry.total += count;
    entry.continuations[model.vocab_.intern(fields[1])] += count;
  }
  return model;
}

GapNGramModel GapNGramModel::train(const std::vector<Sentence>& corpus) {
  GapNGramModel model;
  for (const auto& sentence : corpus) {
    const auto& toks = sentence.tokens;
    if (toks.size() < kOrder) continue;
    for (std::size_t mid = 2; mid + 2 < toks.size(); ++mid) {
      std::vector<std::uint32_t> key{
          model.vocab_.intern(toks[mid - 2]), model.vocab_.intern(toks[mid - 1]),
          model.vocab_.intern(toks[mid + 1]), model.vocab_.intern(toks[mid + 2])};
      auto& entry = model.gaps_[key];
      ++entry.total;
      ++entry.fillers[model.vocab_.intern(toks[mid])];
      ++model.n_windows_;
    }
  }
  return model;
}

std::optional<std::vector<std::uint32_t>> GapNGramModel::gap_key(std::string_view w1,
                                                                 std::string_view w2,
                                                                 std::string_view w4,
                                                                 std::string_view w5) const {
  std::vector<std::uint32_t> key;
  key.reserve(4);
  for (auto w : {w1, w2, w4, w5}) {
    auto id = vocab_.lookup(w);
    if (!id) return std::nullopt;
    key.push_back(*id);
  }
  return key;
}

InsertProb GapNGramModel::insert_prob(std::string_view w1, std::string_view w2,
                                      std::string_view w4, std::string_view w5,
                                      std::string_view middle) const {
  auto key = gap_key(w1, w2, w4, w5);
  if (!key) return {0.0, true};
  auto it = gaps_.find(*key);
  if (it == gaps_.end() || it->second.total == 0) return {0.0, true};
  auto id = vocab_.lookup(middle);
  if (!id) return {0.0, false};
  auto fit = it->second.fillers.find(*id);
  if (fit == it->second.fillers.end()) return {0.0, false};
  return {static_cast<double>(fit->second) / static_cast<double>(it->second.total), false};
}

std::optional<ScoredToken> GapNGramModel::best_filler(std::string_view w1, std::string_view w2,
                                                      std::string_view w4,
                                                      std::string_view w5) const {
  auto key = gap_key(w1, w2, w4, w5);
  if (!key) return std::nullopt;
  auto it = gaps_.find(*key);
  if (it == gaps_.end() || it->second.total == 0) return std::nullopt;
  const GapEntry& entry = it->second;
  std::optional<ScoredToken> best;
  for (const auto& [id, count] : entry.fillers) {
    ScoredToken cand{vocab_.surface(id),
                     static_cast<double>(count) / static_cast<double>(entry.total)};
    if (!best || cand.prob > best->prob || (cand.prob == best->prob && cand.surface < best->surface)) {
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace mtkit
