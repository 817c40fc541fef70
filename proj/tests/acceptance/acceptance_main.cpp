// Acceptance suite: one checked criterion per section, one PASS/FAIL line
// each. Oracles here are written out independently of the library code paths
// they check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtkit/bpe.hpp"
#include "mtkit/bt_sampling.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/embeddings.hpp"
#include "mtkit/idiom.hpp"
#include "mtkit/lex_table.hpp"
#include "mtkit/metrics.hpp"
#include "mtkit/ngram.hpp"
#include "mtkit/rng.hpp"
#include "mtkit/tda.hpp"
#include "mtkit/volatility.hpp"

using namespace mtkit;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok, double elapsed_s, double limit_s) {
  bool in_time = elapsed_s <= limit_s;
  std::printf("%s criterion %2d: %s (%.2fs, limit %.0fs)\n",
              ok && in_time ? "PASS" : "FAIL", criterion, what.c_str(), elapsed_s, limit_s);
  if (!ok || !in_time) ++failures;
}

template <typename Fn>
void run(int criterion, const std::string& what, double limit_s, Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = fn();
  } catch (const std::exception& e) {
    note = e.what();
    ok = false;
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(criterion, what + (note.empty() ? "" : " [" + note + "]"), ok, elapsed, limit_s);
}

Sentence sent(const std::string& text) { return Sentence{split_ws(text)}; }

// ---------------------------------------------------------------- criterion 2
bool pplr_quota_ratio() {
  DifficultySet difficulty;
  difficulty.criterion = DifficultyCriterion::kPplr;
  difficulty.tokens = {"y1", "y2"};
  for (int i = 0; i < 2; ++i) difficulty.contexts.push_back({"y1", 0, sent("y1 u")});
  for (int i = 0; i < 4; ++i) difficulty.contexts.push_back({"y2", 0, sent("y2 u")});

  std::vector<Sentence> mono;
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    std::uint64_t kind = rng.below(3);
    if (kind == 0) mono.push_back(sent("y1 line " + std::to_string(i)));
    else if (kind == 1) mono.push_back(sent("y2 line " + std::to_string(i)));
    else mono.push_back(sent("plain line " + std::to_string(i)));
  }
  const std::size_t n_samples = 300;  // divisible by 3
  std::unordered_map<std::string, std::size_t> counts;
  auto result = pplr_sampling(difficulty, mono, n_samples, 17, &counts);
  return result.sentences.size() == n_samples && counts["y2"] == 2 * counts["y1"] &&
         counts["y1"] == n_samples / 3;
}

// ---------------------------------------------------------------- criterion 3
bool rock_context_threshold() {
  const std::vector<double> sims{0.86, 0.81, 0.79, 0.42, 0.34, 0.29};
  WordVectors vectors(2);
  vectors.set("u0", {1.0f, 0.0f});
  std::vector<Sentence> mono;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    std::string word = "c" + std::to_string(i);
    vectors.set(word, {static_cast<float>(sims[i]),
                       static_cast<float>(std::sqrt(1.0 - sims[i] * sims[i]))});
    mono.push_back(sent("Rock " + word));
  }

  DifficultySet difficulty;
  difficulty.tokens = {"Rock"};
  difficulty.contexts.push_back({"Rock", 0, sent("Rock u0")});

  ContextSpec spec;
  spec.kind = ContextKind::kSentence;
  spec.similarity = SimilarityKind::kSemantic;
  spec.threshold = 0.75;

  auto result = context_sampling(difficulty, spec, mono, mono.size(), 23, &vectors);
  std::set<std::size_t> picked(result.picked.begin(), result.picked.end());
  return picked == std::set<std::size_t>{0, 1, 2};
}

// ---------------------------------------------------------------- criterion 4
bool idiom_fixtures() {
  LemmaDict dict;
  dict.add("steckt", "stecken");
  dict.add("kinderschuhen", "kinderschuh");
  dict.add("alles", "alle");

  auto entry = [&](const std::string& id, const std::string& phrase) {
    IdiomEntry e;
    e.id = id;
    for (const auto& word : split_ws(phrase)) e.source_lemmas.push_back(dict.lemma(word));
    return e;
  };
  auto kinderschuhe = entry("kinderschuhe", "in den kinderschuhen stecken");
  auto kamm = entry("kamm", "alles über einen kamm scheren");
  auto s1 = sent("Es steckt immer noch in den Kinderschuhen .");
  auto s2 = sent("Aber man kann eben nicht alle Inseln über einen Kamm scheren .");

  bool match_default = match_idiom(s1, kinderschuhe, dict, kDefaultMaxGap).has_value() &&
                       match_idiom(s2, kamm, dict, kDefaultMaxGap).has_value();
  bool reject_zero = !match_idiom(s1, kinderschuhe, dict, 0).has_value() &&
                     !match_idiom(s2, kamm, dict, 0).has_value();
  return match_default && reject_zero;
}

// ---------------------------------------------------------------- criterion 5
bool split_invariants() {
  LemmaDict dict;
  std::vector<IdiomEntry> entries;
  for (int i = 0; i < 50; ++i) {
    IdiomEntry e;
    e.id = "idm" + std::to_string(i);
    e.source_lemmas = {"p" + std::to_string(i), "q" + std::to_string(i)};
    entries.push_back(std::move(e));
  }

  std::vector<SentencePair> pairs;
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    SentencePair pair;
    if (i % 5 == 0) {  // 2000 idiomatic pairs over 50 idioms
      int idiom = static_cast<int>(rng.below(50));
      pair.src.tokens = {"w" + std::to_string(rng.below(40)), "p" + std::to_string(idiom),
                         "q" + std::to_string(idiom), "w" + std::to_string(rng.below(40))};
    } else {
      pair.src.tokens = {"w" + std::to_string(rng.below(40)), "w" + std::to_string(rng.below(40))};
    }
    pair.tgt.tokens = {"t"};
    pairs.push_back(std::move(pair));
  }
  auto annotated = annotate_corpus(std::move(pairs), entries, dict, 0);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto plan = build_split(annotated, 800, seed);
    if (plan.test_ids.size() != 800) return false;
    std::set<std::size_t> test_set(plan.test_ids.begin(), plan.test_ids.end());
    if (test_set.size() != 800) return false;
    for (std::size_t id : plan.train_ids) {
      if (test_set.count(id)) return false;  // overlap
    }
    if (plan.test_ids.size() + plan.train_ids.size() != annotated.pairs.size()) return false;
    for (const auto& [idiom, count] : plan.test_counts) {
      auto it = plan.train_counts.find(idiom);
      if (it == plan.train_counts.end() || it->second == 0) return false;  // uncovered idiom
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 6
struct TdaWorld {
  std::vector<SentencePair> bitext;
  NGramModel fwd, bwd, fwd_t, bwd_t;
  LexTable lex;
  RareWordList rare;
};

TdaWorld build_tda_world() {
  std::vector<std::string> commons{"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  std::vector<std::string> rares;
  for (int i = 0; i < 20; ++i) rares.push_back("rare" + std::to_string(i));

  auto make_line = [](const std::string& w0, const std::string& w1) {
    Sentence s;
    s.tokens = {"the", w0, "m1", "m2", "m3", "m4", w1, "end"};
    return s;
  };

  std::vector<Sentence> lm_corpus;
  for (const auto& a : commons) {
    for (const auto& b : commons) lm_corpus.push_back(make_line(a, b));
  }
  for (const auto& r : rares) {
    lm_corpus.push_back(make_line(r, commons[0]));
    lm_corpus.push_back(make_line(commons[0], r));
  }

  std::vector<SentencePair> lex_pairs;
  std::vector<Sentence> tgt_corpus;
  for (const auto& s : lm_corpus) {
    SentencePair pair;
    pair.src = s;
    Sentence t;
    Alignment alignment;
    for (std::uint32_t i = 0; i < s.size(); ++i) {
      t.tokens.push_back(s.tokens[i] + "T");
      alignment.emplace(i, i);
    }
    pair.tgt = t;
    pair.alignment = alignment;
    lex_pairs.push_back(pair);
    tgt_corpus.push_back(t);
  }

  TdaWorld world{
      {},
      NGramModel::train(lm_corpus, 3, LmDirection::kForward),
      NGramModel::train(lm_corpus, 3, LmDirection::kBackward),
      NGramModel::train(tgt_corpus, 3, LmDirection::kForward),
      NGramModel::train(tgt_corpus, 3, LmDirection::kBackward),
      LexTable::estimate(lex_pairs),
      {},
  };
  world.rare.words = {rares.begin(), rares.end()};

  Rng rng(2024);
  world.bitext.reserve(50000);
  for (int i = 0; i < 50000; ++i) {
    SentencePair pair;
    pair.src = make_line(commons[rng.below(commons.size())], commons[rng.below(commons.size())]);
    Sentence t;
    Alignment alignment;
    for (std::uint32_t k = 0; k < pair.src.size(); ++k) {
      t.tokens.push_back(pair.src.tokens[k] + "T");
      alignment.emplace(k, k);
    }
    pair.tgt = t;
    pair.alignment = alignment;
    world.bitext.push_back(std::move(pair));
  }
  return world;
}

std::string records_fingerprint(const std::vector<AugmentationRecord>& records) {
  std::ostringstream out;
  for (const auto& rec : records) {
    out << rec.pair_index << '|' << rec.pass << '|' << rec.augmented.src.text() << '|'
        << rec.augmented.tgt.text() << '\n';
  }
  return out.str();
}

bool tda_loop_invariants() {
  auto world = build_tda_world();
  AugmentDeps deps{&world.fwd, &world.bwd, &world.fwd_t, &world.bwd_t, &world.lex, &world.rare};

  for (AugmentMode mode : {AugmentMode::kSingle, AugmentMode::kMulti}) {
    AugmentConfig config;
    config.mode = mode;
    config.per_word_cap = 4;
    config.log_floor = -30.0;
    config.seed = 11;
    config.workers = 1;

    auto records = augment_corpus(world.bitext, deps, config);
    if (records.empty()) return false;

    std::map<std::string, std::size_t> uses;
    for (const auto& rec : records) {
      for (const auto& sub : rec.substitutions) {
        if (world.rare.words.count(sub.new_src) == 0) return false;
        ++uses[sub.new_src];
      }
      if (mode == AugmentMode::kMulti) {
        for (std::size_t a = 0; a < rec.substitutions.size(); ++a) {
          for (std::size_t b = a + 1; b < rec.substitutions.size(); ++b) {
            std::size_t pa = rec.substitutions[a].src_pos;
            std::size_t pb = rec.substitutions[b].src_pos;
            if ((pa > pb ? pa - pb : pb - pa) < 5) return false;
          }
        }
      }
    }
    for (const auto& [word, count] : uses) {
      if (count > config.per_word_cap) return false;
    }

    AugmentConfig wide = config;
    wide.workers = 8;
    auto rerun = augment_corpus(world.bitext, deps, config);
    auto parallel = augment_corpus(world.bitext, deps, wide);
    if (records_fingerprint(records) != records_fingerprint(rerun)) return false;
    if (records_fingerprint(records) != records_fingerprint(parallel)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 7
std::vector<std::string> random_tokens(Rng& rng, std::size_t max_len, char base = 'a',
                                       int alphabet = 3) {
  std::vector<std::string> out;
  std::size_t len = rng.below(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(std::string(1, static_cast<char>(base + rng.below(alphabet))));
  }
  return out;
}

std::size_t lev_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t best = std::min(d[i - 1][j], d[i][j - 1]) + 1;
      best = std::min(best, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1));
      d[i][j] = best;
    }
  }
  return d[a.size()][b.size()];
}

std::size_t span_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t max_f = 0;
  while (max_f < std::min(a.size(), b.size()) && a[max_f] == b[max_f]) ++max_f;
  std::size_t max_s = 0;
  while (max_s < std::min(a.size(), b.size()) - max_f &&
         a[a.size() - 1 - max_s] == b[b.size() - 1 - max_s]) {
    ++max_s;
  }
  return std::max(a.size(), b.size()) - max_f - max_s;
}

double gap_oracle(const std::vector<std::string>& ranked,
                  const std::map<std::string, double>& gold) {
  double cum = 0.0, numerator = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    double x = gold.count(ranked[i]) ? gold.at(ranked[i]) : 0.0;
    cum += x;
    if (x > 0) numerator += cum / static_cast<double>(i + 1);
  }
  std::vector<double> ys;
  for (const auto& [w, y] : gold) ys.push_back(y);
  std::sort(ys.rbegin(), ys.rend());
  double rcum = 0.0, ideal = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    rcum += ys[i];
    ideal += rcum / static_cast<double>(i + 1);
  }
  return numerator / ideal;
}

double uniprec_oracle(const std::vector<std::string>& cand,
                      const std::vector<std::vector<std::string>>& refs) {
  double clipped = 0.0;
  std::map<std::string, int> cand_counts;
  for (const auto& t : cand) ++cand_counts[t];
  for (const auto& [token, count] : cand_counts) {
    int best = 0;
    for (const auto& ref : refs) {
      int n = 0;
      for (const auto& t : ref) n += t == token;
      best = std::max(best, n);
    }
    clipped += std::min(count, best);
  }
  return clipped / static_cast<double>(cand.size());
}

double bleu_oracle(const std::vector<Sentence>& cands, const std::vector<Sentence>& refs) {
  double log_sum = 0.0;
  double c = 0, r = 0;
  for (int n = 1; n <= 4; ++n) {
    double matched = 0, total = 0;
    for (std::size_t s = 0; s < cands.size(); ++s) {
      std::map<std::vector<std::string>, int> cand_grams, ref_grams;
      const auto& ct = cands[s].tokens;
      const auto& rt = refs[s].tokens;
      for (std::size_t i = 0; i + n <= ct.size(); ++i) {
        ++cand_grams[std::vector<std::string>(ct.begin() + i, ct.begin() + i + n)];
      }
      for (std::size_t i = 0; i + n <= rt.size(); ++i) {
        ++ref_grams[std::vector<std::string>(rt.begin() + i, rt.begin() + i + n)];
      }
      for (const auto& [gram, count] : cand_grams) {
        total += count;
        auto it = ref_grams.find(gram);
        if (it != ref_grams.end()) matched += std::min(count, it->second);
      }
    }
    if (matched == 0 || total == 0) return 0.0;
    log_sum += 0.25 * std::log(matched / total);
  }
  for (std::size_t s = 0; s < cands.size(); ++s) {
    c += static_cast<double>(cands[s].size());
    r += static_cast<double>(refs[s].size());
  }
  double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * bp * std::exp(log_sum);
}

bool metric_oracles() {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    auto a = random_tokens(rng, 9);
    auto b = random_tokens(rng, 9);
    if (levenshtein(a, b) != lev_oracle(a, b)) return false;
    if (span_of_change(a, b) != span_oracle(a, b)) return false;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    std::map<std::string, double> gold;
    std::size_t n_gold = 1 + rng.below(4);
    for (std::size_t i = 0; i < n_gold; ++i) {
      gold["g" + std::to_string(i)] = 1.0 + static_cast<double>(rng.below(6));
    }
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n_gold; ++i) pool.push_back("g" + std::to_string(i));
    for (int i = 0; i < 4; ++i) pool.push_back("x" + std::to_string(i));
    rng.shuffle(pool);
    pool.resize(1 + rng.below(pool.size()));
    if (std::abs(gap_score(pool, gold) - gap_oracle(pool, gold)) > 1e-9) return false;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    auto cand = random_tokens(rng, 8);
    if (cand.empty()) cand.push_back("a");
    std::vector<std::vector<std::string>> refs{random_tokens(rng, 8), random_tokens(rng, 8)};
    if (std::abs(uni_prec(cand, refs) - uniprec_oracle(cand, refs)) > 1e-9) return false;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.below(4);
    std::vector<Sentence> cands, refs;
    for (std::size_t i = 0; i < n; ++i) {
      Sentence cs, rs;
      cs.tokens = random_tokens(rng, 8, 'a', 4);
      rs.tokens = random_tokens(rng, 8, 'a', 4);
      if (cs.tokens.empty()) cs.tokens.push_back("a");
      if (rs.tokens.empty()) rs.tokens.push_back("a");
      cands.push_back(std::move(cs));
      refs.push_back(std::move(rs));
    }
    if (std::abs(bleu_corpus(cands, refs) - bleu_oracle(cands, refs)) > 1e-9) return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 8
bool embedding_equations() {
  std::vector<std::string> vocab;
  for (int i = 0; i < 10; ++i) vocab.push_back("w" + std::to_string(i));

  // HTLEadd with zeroed generic rows equals HTLE (same seed, same rows).
  auto add = TopicEmbeddings::init(EmbeddingVariant::kHtleAdd, vocab, 2, 4, 3);
  auto plain = TopicEmbeddings::init(EmbeddingVariant::kHtle, vocab, 2, 4, 3);
  for (std::uint32_t w = 0; w < add.vocab_size(); ++w) {
    for (auto& v : add.generic_row(w)) v = 0.0;
    for (int k = 0; k < 2; ++k) {
      auto src = plain.topic_row(w, k);
      auto dst = add.topic_row(w, k);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  for (std::uint32_t w = 0; w < add.vocab_size(); ++w) {
    for (int k = 0; k < 2; ++k) {
      auto ha = add.repr(vocab[w], k);
      auto hp = plain.repr(vocab[w], k);
      for (std::size_t i = 0; i < ha.size(); ++i) {
        if (ha[i] != hp[i]) return false;
      }
    }
  }

  // One-hot STLE mixture equals the stored row.
  auto stle = TopicEmbeddings::init(EmbeddingVariant::kStle, vocab, 3, 5, 7);
  std::vector<double> one_hot{0.0, 0.0, 1.0};
  auto mixed = stle.repr("w3", std::span<const double>(one_hot));
  auto row = stle.topic_row(3, 2);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    if (std::abs(mixed[i] - row[i]) > 1e-12) return false;
  }

  // Exp equals Smp under a point-mass distribution.
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, vocab, 3, 6, 13);
  Rng rng(29);
  for (std::uint32_t w = 0; w < emb.vocab_size(); ++w) {
    for (int k = 0; k < emb.n_topics(); ++k) {
      for (auto& v : emb.topic_row(w, k)) v = rng.uniform() - 0.5;
    }
    for (auto& v : emb.output_row(w)) v = rng.uniform() - 0.5;
  }
  LexsubQuery query;
  query.target = "w1";
  query.substitute = "w2";
  query.context = {"w3", "w4"};
  query.target_topic = 1;
  query.substitute_topic = 1;
  query.topic_dist = {0.0, 1.0, 0.0};
  double smp = lexsub_score(emb, query, LexsubMethod::kSampled);
  double exp = lexsub_score(emb, query, LexsubMethod::kExpected);
  if (std::abs(smp - exp) > 1e-12) return false;

  // Gradients against central finite differences, all variants.
  for (EmbeddingVariant variant : {EmbeddingVariant::kSge, EmbeddingVariant::kHtle,
                                   EmbeddingVariant::kHtleAdd, EmbeddingVariant::kStle}) {
    auto table = TopicEmbeddings::init(variant, vocab, 2, 4, 11);
    Rng rows(17);
    for (std::uint32_t w = 0; w < table.vocab_size(); ++w) {
      for (int k = 0; k < table.n_topics(); ++k) {
        for (auto& v : table.topic_row(w, k)) v = rows.uniform() - 0.5;
      }
      for (auto& v : table.output_row(w)) v = rows.uniform() - 0.5;
      if (table.has_generic_rows()) {
        for (auto& v : table.generic_row(w)) v = rows.uniform() - 0.5;
      }
    }
    const int target_topic = variant == EmbeddingVariant::kSge ? 0 : 1;
    std::vector<double> dist{0.3, 0.7};
    TrainingEvent event;
    event.target = 2;
    event.target_topic = target_topic;
    if (variant == EmbeddingVariant::kStle) event.doc_dist = &dist;
    event.context = 5;
    event.negatives = {7, 9};

    TopicEmbeddings stepped = table;
    event_update(stepped, event, 1.0);

    auto check_span = [&](std::span<const double> before, std::span<const double> after) {
      for (std::size_t i = 0; i < before.size(); ++i) {
        double analytic = before[i] - after[i];
        double* coord = const_cast<double*>(before.data() + i);
        const double h = 1e-6;
        double saved = *coord;
        *coord = saved + h;
        double up = event_loss(table, event);
        *coord = saved - h;
        double down = event_loss(table, event);
        *coord = saved;
        double fd = (up - down) / (2.0 * h);
        double scale = std::max({std::abs(fd), std::abs(analytic), 1e-8});
        if (std::abs(fd - analytic) / scale > 1e-4) return false;
      }
      return true;
    };
    if (!check_span(table.topic_row(2, target_topic), stepped.topic_row(2, target_topic))) {
      return false;
    }
    if (!check_span(table.output_row(5), stepped.output_row(5))) return false;
    if (!check_span(table.output_row(7), stepped.output_row(7))) return false;
    if (variant == EmbeddingVariant::kHtleAdd &&
        !check_span(table.generic_row(2), stepped.generic_row(2))) {
      return false;
    }
    if (variant == EmbeddingVariant::kStle &&
        !check_span(table.topic_row(2, 0), stepped.topic_row(2, 0))) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 9
bool sense_separation() {
  const std::vector<std::string> money{"money", "loan", "cash", "credit", "finance"};
  const std::vector<std::string> river{"river", "water", "shore", "boat", "stream"};

  std::vector<Sentence> corpus;
  Rng gen(404);
  for (int d = 0; d < 40; ++d) {
    const auto& topic_vocab = d % 2 == 0 ? money : river;
    for (int line = 0; line < 4; ++line) {
      Sentence s;
      s.doc_id = d;
      for (int t = 0; t < 3; ++t) s.tokens.push_back(topic_vocab[gen.below(topic_vocab.size())]);
      s.tokens.push_back("bank");
      for (int t = 0; t < 2; ++t) s.tokens.push_back(topic_vocab[gen.below(topic_vocab.size())]);
      corpus.push_back(std::move(s));
    }
  }
  TopicAssignments topics;
  topics.n_topics = 2;
  topics.doc_topics.resize(40);
  topics.token_topics.resize(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    int label = corpus[s].doc_id % 2 == 0 ? 0 : 1;
    topics.token_topics[s].assign(corpus[s].size(), label);
  }
  for (int d = 0; d < 40; ++d) {
    topics.doc_topics[static_cast<std::size_t>(d)] =
        d % 2 == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
  }

  int successes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TrainConfig config;
    config.dim = 12;
    config.window = 2;
    config.negatives = 3;
    config.epochs = 4;
    config.learning_rate = 0.08;
    config.min_count = 1;
    config.seed = seed;

    auto emb = train_embeddings(corpus, &topics, config, EmbeddingVariant::kHtle);
    auto centroid = [&](const std::vector<std::string>& words) {
      std::vector<double> mean(emb.dim(), 0.0);
      for (const auto& word : words) {
        auto row = emb.output_row(*emb.word_id(word));
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
      }
      for (auto& v : mean) v /= static_cast<double>(words.size());
      return mean;
    };
    auto money_centroid = centroid(money);
    auto river_centroid = centroid(river);
    auto bank0 = emb.repr("bank", 0);
    auto bank1 = emb.repr("bank", 1);
    auto cos = [](const std::vector<double>& x, const std::vector<double>& y) {
      return cosine(std::span<const double>(x), std::span<const double>(y));
    };
    bool ok = cos(bank0, money_centroid) > cos(bank0, river_centroid) &&
              cos(bank1, river_centroid) > cos(bank1, money_centroid);
    successes += ok ? 1 : 0;
  }
  std::printf("  .. sense separation: %d/100 seeds\n", successes);
  return successes >= 95;
}

// --------------------------------------------------------------- criterion 10
bool variation_examples() {
  // Delete: "Rome [now\phi] has a Martin Luther Square."
  {
    SentencePair pair;
    pair.src = sent("Some 500 years after the Reformation , Rome now has a Martin Luther Square .");
    pair.tgt = sent("Rund 500 Jahre nach der Reformation hat Rom jetzt einen Martin-Luther-Platz .");
    auto vars = gen_delete(pair, "d0", {{"now", "jetzt"}});
    if (vars.size() != 1) return false;
    if (vars[0].modified.src.text() !=
        "Some 500 years after the Reformation , Rome has a Martin Luther Square .") {
      return false;
    }
    if (vars[0].modified.tgt.text() !=
        "Rund 500 Jahre nach der Reformation hat Rom einen Martin-Luther-Platz .") {
      return false;
    }
  }
  // Insert: "she is [phi\also] the only person"
  {
    std::vector<Sentence> gap_corpus{sent("she is also the only")};
    auto model = GapNGramModel::train(gap_corpus);
    SentencePair pair;
    pair.src = sent("I loved Amy and she is the only person who ever loved me .");
    pair.tgt = sent("Ich liebte Amy und sie ist die einzige Person , die mich je liebte .");
    auto vars = gen_insert(pair, "i0", model, 0.5);
    if (vars.size() != 1) return false;
    if (vars[0].modified.src.text() !=
        "I loved Amy and she is also the only person who ever loved me .") {
      return false;
    }
    if (vars[0].modified.tgt.text() != pair.tgt.text()) return false;
  }
  // Substitute number: 30 -> 31 (k=1).
  {
    SentencePair pair;
    pair.src = sent("this is where I landed 30 years ago .");
    pair.tgt = sent("hier bin ich vor 30 Jahren gelandet .");
    auto vars = gen_subs_number(pair, "n0");
    if (vars.size() != 5) return false;
    if (vars[0].modified.src.text() != "this is where I landed 31 years ago .") return false;
    if (vars[0].modified.tgt.text() != "hier bin ich vor 31 Jahren gelandet .") return false;
  }
  // Substitute gender: He -> She.
  {
    PronounMap pronouns;
    pronouns.src = {{"he", "she"}};
    SentencePair pair;
    pair.src = sent("He received considerable appreciation and praise for this .");
    pair.tgt = sent("Er erhielt dafür viel Anerkennung und Lob .");
    auto vars = gen_subs_gender(pair, "g0", pronouns);
    if (vars.size() != 1) return false;
    if (vars[0].modified.src.text() !=
        "She received considerable appreciation and praise for this .") {
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  run(1, "oscillation range of the worked example is 20.89 +/- 0.01", 1.0, [] {
    double range = oscillation_range({22.78, 43.67, 43.67});
    return std::abs(range - 20.89) <= 0.01;
  });
  run(2, "PPLR sampling doubles the count of the doubly-difficult token", 5.0, pplr_quota_ratio);
  run(3, "context sampling keeps exactly the three contexts above 0.75", 1.0,
      rock_context_threshold);
  run(4, "idiom matcher accepts both fixtures and rejects them at gap 0", 1.0, idiom_fixtures);
  run(5, "100 seeded splits keep test/train disjoint and idioms covered", 30.0, split_invariants);
  run(6, "augmentation caps, spacing and worker-count determinism", 120.0, tda_loop_invariants);
  run(7, "levenshtein/span/gap/uniprec/bleu agree with brute-force oracles", 60.0, metric_oracles);
  run(8, "embedding equations and finite-difference gradients", 60.0, embedding_equations);
  run(9, "HTLE separates the two senses of 'bank' for >= 95/100 seeds", 300.0, sense_separation);
  run(10, "variation generators reproduce all four worked examples", 5.0, variation_examples);

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
