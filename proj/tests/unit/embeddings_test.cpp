#include "mtkit/embeddings.hpp"

#include <cmath>
#include <filesystem>
#include <functional>

#include "doctest.h"
#include "mtkit/errors.hpp"
#include "mtkit/lda.hpp"
#include "mtkit/rng.hpp"

using namespace mtkit;

namespace {

std::vector<std::string> ten_words() {
  return {"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9"};
}

void randomize_rows(TopicEmbeddings& emb, std::uint64_t seed) {
  Rng rng(seed);
  for (std::uint32_t w = 0; w < emb.vocab_size(); ++w) {
    for (int k = 0; k < emb.n_topics(); ++k) {
      for (auto& v : emb.topic_row(w, k)) v = rng.uniform() - 0.5;
    }
    for (auto& v : emb.output_row(w)) v = rng.uniform() - 0.5;
    if (emb.has_generic_rows()) {
      for (auto& v : emb.generic_row(w)) v = rng.uniform() - 0.5;
    }
  }
}

// Central finite difference of event_loss wrt one stored coordinate.
double fd_gradient(TopicEmbeddings& emb, const TrainingEvent& event, double* coord) {
  const double h = 1e-6;
  const double saved = *coord;
  *coord = saved + h;
  double up = event_loss(emb, event);
  *coord = saved - h;
  double down = event_loss(emb, event);
  *coord = saved;
  return (up - down) / (2.0 * h);
}

// Analytic gradient recovered from one SGD step with lr=1 on a copy.
std::vector<double> analytic_gradient(const TopicEmbeddings& emb, const TrainingEvent& event,
                                      std::function<std::span<const double>(const TopicEmbeddings&)> row) {
  TopicEmbeddings stepped = emb;
  event_update(stepped, event, 1.0);
  auto before = row(emb);
  auto after = row(stepped);
  std::vector<double> grad(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) grad[i] = before[i] - after[i];
  return grad;
}

void check_gradients(EmbeddingVariant variant) {
  auto emb = TopicEmbeddings::init(variant, ten_words(), 2, 4, 11);
  randomize_rows(emb, 17);

  const int target_topic = variant == EmbeddingVariant::kSge ? 0 : 1;
  std::vector<double> dist{0.3, 0.7};
  TrainingEvent event;
  event.target = 2;
  event.target_topic = target_topic;
  if (variant == EmbeddingVariant::kStle) event.doc_dist = &dist;
  event.context = 5;
  event.negatives = {7, 9};

  auto check_row = [&](auto getter, const char* what) {
    auto grad = analytic_gradient(emb, event, getter);
    auto row_view = getter(emb);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      double* coord = const_cast<double*>(row_view.data() + i);
      double fd = fd_gradient(emb, event, coord);
      double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
      INFO(what << " coordinate " << i);
      CHECK(std::abs(fd - grad[i]) / scale < 1e-4);
    }
  };

  check_row([&](const TopicEmbeddings& e) { return e.topic_row(2, target_topic); },
            "target topic row");
  if (variant == EmbeddingVariant::kStle) {
    check_row([&](const TopicEmbeddings& e) { return e.topic_row(2, 0); }, "other topic row");
  }
  if (variant == EmbeddingVariant::kHtleAdd) {
    check_row([&](const TopicEmbeddings& e) { return e.generic_row(2); }, "generic row");
  }
  check_row([&](const TopicEmbeddings& e) { return e.output_row(5); }, "context output row");
  check_row([&](const TopicEmbeddings& e) { return e.output_row(7); }, "negative output row");
}

std::vector<Sentence> tiny_topic_corpus(int* n_docs) {
  std::vector<Sentence> corpus;
  for (int d = 0; d < 4; ++d) {
    Sentence s;
    s.doc_id = d;
    s.tokens = d % 2 == 0 ? split_ws("money bank loan money cash")
                          : split_ws("river bank water river shore");
    corpus.push_back(std::move(s));
  }
  *n_docs = 4;
  return corpus;
}

}  // namespace

TEST_CASE("training gradients match central finite differences") {
  check_gradients(EmbeddingVariant::kSge);
  check_gradients(EmbeddingVariant::kHtle);
  check_gradients(EmbeddingVariant::kHtleAdd);
  check_gradients(EmbeddingVariant::kStle);
}

TEST_CASE("HTLEadd with zero generic rows reproduces HTLE exactly") {
  auto add = TopicEmbeddings::init(EmbeddingVariant::kHtleAdd, ten_words(), 2, 4, 3);
  auto plain = TopicEmbeddings::init(EmbeddingVariant::kHtle, ten_words(), 2, 4, 3);
  // Same seed gives identical topic rows; zero the generic side.
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
      auto ha = add.repr(add.words().surface(w), k);
      auto hp = plain.repr(plain.words().surface(w), k);
      for (std::size_t i = 0; i < ha.size(); ++i) CHECK(ha[i] == hp[i]);
    }
  }
}

TEST_CASE("one-hot document distribution reduces STLE to a row lookup") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kStle, ten_words(), 3, 5, 21);
  randomize_rows(emb, 4);
  std::vector<double> one_hot{0.0, 1.0, 0.0};
  auto mixed = emb.repr("w4", std::span<const double>(one_hot));
  auto direct = emb.topic_row(*emb.word_id("w4"), 1);
  for (std::size_t i = 0; i < mixed.size(); ++i) CHECK(mixed[i] == direct[i]);

  std::vector<double> uniform{0.5, 0.5, 0.0};
  auto blend = emb.repr("w4", std::span<const double>(uniform));
  auto row0 = emb.topic_row(*emb.word_id("w4"), 0);
  for (std::size_t i = 0; i < blend.size(); ++i) {
    CHECK(blend[i] == doctest::Approx(0.5 * row0[i] + 0.5 * direct[i]).epsilon(1e-12));
  }
}

TEST_CASE("repr rejects unknown words and topics") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, ten_words(), 2, 4, 5);
  CHECK_THROWS_AS(emb.repr("missing", 0), UnknownWord);
  CHECK_THROWS_AS(emb.repr("w0", 5), UnknownTopic);
}

TEST_CASE("expected lexsub inference reduces to sampled under point mass") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, ten_words(), 3, 6, 13);
  randomize_rows(emb, 29);

  LexsubQuery query;
  query.target = "w1";
  query.substitute = "w2";
  query.context = {"w3", "w4", "w5"};
  query.target_topic = 2;
  query.substitute_topic = 2;
  query.topic_dist = {0.0, 0.0, 1.0};

  double smp = lexsub_score(emb, query, LexsubMethod::kSampled);
  double exp = lexsub_score(emb, query, LexsubMethod::kExpected);
  CHECK(std::abs(smp - exp) <= 1e-12);
}

TEST_CASE("sampled lexsub attains its upper bound on identical unit vectors") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, {"a", "b", "c"}, 1, 3, 1);
  for (std::uint32_t w = 0; w < 3; ++w) {
    auto row = emb.topic_row(w, 0);
    row[0] = 1.0;
    row[1] = 0.0;
    row[2] = 0.0;
    auto out = emb.output_row(w);
    out[0] = 1.0;
    out[1] = 0.0;
    out[2] = 0.0;
  }
  LexsubQuery query;
  query.target = "a";
  query.substitute = "b";
  query.context = {"c"};
  CHECK(lexsub_score(emb, query, LexsubMethod::kSampled) == doctest::Approx(2.0));
  query.context.clear();
  CHECK_THROWS_AS(lexsub_score(emb, query, LexsubMethod::kSampled), EmptyContext);
}

TEST_CASE("hand-built two-topic lexsub fixture matches a direct transcription") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, {"tgt", "sub", "c1", "c2"}, 2, 2, 2);
  auto set_row = [&](const char* word, int topic, double x, double y) {
    auto row = emb.topic_row(*emb.word_id(word), topic);
    row[0] = x;
    row[1] = y;
  };
  auto set_out = [&](const char* word, double x, double y) {
    auto row = emb.output_row(*emb.word_id(word));
    row[0] = x;
    row[1] = y;
  };
  set_row("tgt", 0, 1.0, 0.0);
  set_row("tgt", 1, 0.0, 1.0);
  set_row("sub", 0, 1.0, 1.0);
  set_row("sub", 1, -1.0, 0.0);
  set_row("c1", 0, 0.5, 0.5);
  set_row("c1", 1, 0.5, 0.5);
  set_row("c2", 0, 0.2, 0.8);
  set_row("c2", 1, 0.2, 0.8);
  set_out("c1", 0.0, 2.0);
  set_out("c2", 1.0, 0.0);

  LexsubQuery query;
  query.target = "tgt";
  query.substitute = "sub";
  query.target_topic = 0;
  query.substitute_topic = 0;
  query.context = {"c1", "c2"};
  query.topic_dist = {0.25, 0.75};

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // Smp: cos((1,1),(1,0)) + mean(cos((1,1),(0,2)), cos((1,1),(1,0)))
  double smp_expected = inv_sqrt2 + 0.5 * (inv_sqrt2 + inv_sqrt2);
  CHECK(lexsub_score(emb, query, LexsubMethod::kSampled) ==
        doctest::Approx(smp_expected).epsilon(1e-12));

  // Exp, written out term by term from the displayed equation.
  auto cosine2 = [](double ax, double ay, double bx, double by) {
    return (ax * bx + ay * by) / (std::sqrt(ax * ax + ay * ay) * std::sqrt(bx * bx + by * by));
  };
  double p0 = 0.25, p1 = 0.75;
  double pair_term = p0 * p0 * cosine2(1, 1, 1, 0) + p0 * p1 * cosine2(1, 1, 0, 1) +
                     p1 * p0 * cosine2(-1, 0, 1, 0) + p1 * p1 * cosine2(-1, 0, 0, 1);
  double ctx_term = (p0 * cosine2(1, 1, 0, 2) + p0 * cosine2(1, 1, 1, 0) +
                     p1 * cosine2(-1, 0, 0, 2) + p1 * cosine2(-1, 0, 1, 0)) /
                    2.0;
  CHECK(lexsub_score(emb, query, LexsubMethod::kExpected) ==
        doctest::Approx(pair_term + ctx_term).epsilon(1e-12));
}

TEST_CASE("lexsub ranking is invariant to uniform positive scaling") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, ten_words(), 2, 4, 41);
  randomize_rows(emb, 43);
  LexsubQuery query;
  query.target = "w0";
  query.target_topic = 0;
  query.substitute_topic = 0;
  query.context = {"w8", "w9"};
  std::vector<std::string> candidates{"w1", "w2", "w3", "w4", "w5"};
  auto before = lexsub_rank(emb, query, candidates, LexsubMethod::kSampled);

  for (std::uint32_t w = 0; w < emb.vocab_size(); ++w) {
    for (int k = 0; k < emb.n_topics(); ++k) {
      for (auto& v : emb.topic_row(w, k)) v *= 3.7;
    }
    for (auto& v : emb.output_row(w)) v *= 3.7;
  }
  auto after = lexsub_rank(emb, query, candidates, LexsubMethod::kSampled);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].first == after[i].first);
}

TEST_CASE("gap score matches the worked example and the brute-force oracle") {
  std::map<std::string, double> gold{{"good", 3.0}, {"nice", 1.0}};
  CHECK(gap_score({"good", "bad", "nice"}, gold) == doctest::Approx(13.0 / 15.0).epsilon(1e-12));
  CHECK(gap_score({"good", "nice"}, gold) == doctest::Approx(1.0));
  CHECK(gap_score({"bad", "worse"}, gold) == 0.0);
  CHECK_THROWS_AS(gap_score({"a"}, {}), EmptyGold);

  // Randomized agreement with an independently written transcription.
  Rng rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    std::map<std::string, double> weights;
    std::size_t n_gold = 1 + rng.below(4);
    for (std::size_t i = 0; i < n_gold; ++i) {
      weights["g" + std::to_string(i)] = 1.0 + static_cast<double>(rng.below(5));
    }
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n_gold; ++i) pool.push_back("g" + std::to_string(i));
    for (int i = 0; i < 4; ++i) pool.push_back("junk" + std::to_string(i));
    rng.shuffle(pool);
    std::size_t keep = 1 + rng.below(pool.size());
    pool.resize(keep);

    // Oracle: accumulate x values positionally, then the ideal ranking.
    double cum = 0.0, numerator = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      double x = weights.count(pool[i]) ? weights[pool[i]] : 0.0;
      cum += x;
      if (x > 0) numerator += cum / static_cast<double>(i + 1);
    }
    std::vector<double> ys;
    for (auto& [w, y] : weights) ys.push_back(y);
    std::sort(ys.rbegin(), ys.rend());
    double rcum = 0.0, rprime = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      rcum += ys[i];
      rprime += rcum / static_cast<double>(i + 1);
    }
    CHECK(gap_score(pool, weights) == doctest::Approx(numerator / rprime).epsilon(1e-9));
  }
}

TEST_CASE("word similarity strategies and evaluation") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, {"a", "b", "c", "d"}, 2, 2, 9);
  auto set_row = [&](const char* word, int topic, double x, double y, std::uint64_t freq) {
    auto row = emb.topic_row(*emb.word_id(word), topic);
    row[0] = x;
    row[1] = y;
    if (freq > 0) emb.mark_active(*emb.word_id(word), topic, freq);
  };
  set_row("a", 0, 1.0, 0.0, 10);
  set_row("a", 1, 0.0, 1.0, 0);  // inactive: ignored by strategies
  set_row("b", 0, 1.0, 0.0, 5);
  set_row("b", 1, 0.0, 1.0, 5);
  set_row("c", 0, 0.0, 1.0, 3);
  set_row("d", 0, -1.0, 0.0, 2);

  std::vector<WordSimPair> pairs{{"a", "b", 9.0}, {"a", "c", 5.0}, {"a", "d", 1.0}};
  auto max_result = wordsim_eval(emb, pairs, WordSimStrategy::kMax);
  CHECK(max_result.used_pairs == 3);
  CHECK(max_result.rho == doctest::Approx(1.0));  // max sims: 1.0, 0.0, -1.0

  auto mean_result = wordsim_eval(emb, pairs, WordSimStrategy::kMean);
  CHECK(mean_result.rho == doctest::Approx(1.0));

  std::vector<WordSimPair> with_unknown = pairs;
  with_unknown.push_back({"a", "zz", 3.0});
  auto skipped = wordsim_eval(emb, with_unknown, WordSimStrategy::kMax);
  CHECK(skipped.skipped_pairs == 1);

  CHECK_THROWS_AS(wordsim_eval(emb, {{"a", "b", 1.0}}, WordSimStrategy::kMax), TooFewPairs);
}

TEST_CASE("weighted mean uses active frequencies as weights") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, {"w", "q", "r"}, 2, 2, 9);
  auto wid = *emb.word_id("w");
  auto qid = *emb.word_id("q");
  auto rid = *emb.word_id("r");
  emb.topic_row(wid, 0)[0] = 1.0;
  emb.topic_row(wid, 0)[1] = 0.0;
  emb.topic_row(wid, 1)[0] = 0.0;
  emb.topic_row(wid, 1)[1] = 1.0;
  emb.mark_active(wid, 0, 3);
  emb.mark_active(wid, 1, 1);
  emb.topic_row(qid, 0)[0] = 3.0;
  emb.topic_row(qid, 0)[1] = 1.0;  // parallel to w's weighted mean (0.75, 0.25)
  emb.mark_active(qid, 0, 1);
  emb.topic_row(rid, 0)[0] = -1.0;
  emb.topic_row(rid, 0)[1] = 0.0;
  emb.mark_active(rid, 0, 1);

  std::vector<WordSimPair> pairs{{"w", "q", 3.0}, {"w", "r", 1.0}, {"q", "q", 2.0}};
  auto result = wordsim_eval(emb, pairs, WordSimStrategy::kWeightedMean);
  CHECK(result.used_pairs == 3);
  // Under uniform Mean the w/q pair would score cos((0.5,0.5),(3,1)) < 1;
  // the 3:1 weighting makes the means colinear and the score exactly 1.
  auto mean_result = wordsim_eval(emb, pairs, WordSimStrategy::kMean);
  CHECK(result.rho >= mean_result.rho - 1e-12);
}

TEST_CASE("contextual pair similarity endpoints") {
  auto emb = TopicEmbeddings::init(EmbeddingVariant::kHtle, {"u", "v"}, 2, 2, 9);
  auto uid = *emb.word_id("u");
  auto vid = *emb.word_id("v");
  emb.topic_row(uid, 0)[0] = 1.0;
  emb.topic_row(uid, 0)[1] = 0.0;
  emb.topic_row(vid, 0)[0] = 0.0;
  emb.topic_row(vid, 0)[1] = 1.0;
  emb.topic_row(vid, 1)[0] = -1.0;
  emb.topic_row(vid, 1)[1] = 0.0;

  CHECK(context_similarity_pair(emb, "u", 0, "u", 0) == doctest::Approx(1.0));
  CHECK(context_similarity_pair(emb, "u", 0, "v", 0) == doctest::Approx(0.0));
  CHECK(context_similarity_pair(emb, "u", 0, "v", 1) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(context_similarity_pair(emb, "u", 0, "zz", 0), UnknownWord);
}

TEST_CASE("training runs end to end and loss decreases") {
  int n_docs = 0;
  auto corpus = tiny_topic_corpus(&n_docs);
  TopicAssignments topics;
  topics.n_topics = 2;
  topics.doc_topics.assign(static_cast<std::size_t>(n_docs), {0.5, 0.5});
  for (int d = 0; d < n_docs; ++d) {
    topics.doc_topics[static_cast<std::size_t>(d)] = d % 2 == 0 ? std::vector<double>{1.0, 0.0}
                                                                : std::vector<double>{0.0, 1.0};
  }
  topics.token_topics.resize(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    topics.token_topics[s].assign(corpus[s].size(), corpus[s].doc_id % 2 == 0 ? 0 : 1);
  }

  TrainConfig config;
  config.dim = 8;
  config.window = 2;
  config.negatives = 3;
  config.epochs = 8;
  config.learning_rate = 0.1;
  config.min_count = 1;
  config.seed = 5;

  auto emb = train_embeddings(corpus, &topics, config, EmbeddingVariant::kHtle);
  CHECK(emb.vocab_size() == 7);
  CHECK(emb.active_count(*emb.word_id("bank"), 0) > 0);
  CHECK(emb.active_count(*emb.word_id("bank"), 1) > 0);
  CHECK(emb.active_count(*emb.word_id("money"), 1) == 0);

  // The training vocabulary is lexicographically sorted, so an init with the
  // same word list and seed reproduces the pre-training table exactly.
  std::vector<std::string> sorted_vocab{"bank", "cash", "loan", "money", "river", "shore", "water"};
  auto untrained = TopicEmbeddings::init(EmbeddingVariant::kHtle, sorted_vocab, 2, 8, 5);
  TrainingEvent event;
  event.target = *emb.word_id("bank");
  event.target_topic = 0;
  event.context = *emb.word_id("money");
  event.negatives = {*emb.word_id("river"), *emb.word_id("water")};
  CHECK(event_loss(emb, event) < event_loss(untrained, event));

  CHECK_THROWS_AS(train_embeddings(corpus, nullptr, config, EmbeddingVariant::kHtle),
                  MissingTopics);
}

TEST_CASE("embedding save/load round-trip") {
  int n_docs = 0;
  auto corpus = tiny_topic_corpus(&n_docs);
  TopicAssignments topics;
  topics.n_topics = 2;
  for (int d = 0; d < n_docs; ++d) {
    topics.doc_topics.push_back(d % 2 == 0 ? std::vector<double>{1.0, 0.0}
                                           : std::vector<double>{0.0, 1.0});
  }
  topics.token_topics.resize(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    topics.token_topics[s].assign(corpus[s].size(), corpus[s].doc_id % 2 == 0 ? 0 : 1);
  }
  TrainConfig config;
  config.dim = 4;
  config.window = 2;
  config.epochs = 1;
  config.min_count = 1;
  auto emb = train_embeddings(corpus, &topics, config, EmbeddingVariant::kHtle);

  auto dir = std::filesystem::temp_directory_path() / "mtkit_emb_test";
  std::filesystem::create_directories(dir);
  auto prefix = (dir / "model").string();
  emb.save(prefix);
  auto loaded = TopicEmbeddings::load(prefix);
  CHECK(loaded.variant() == EmbeddingVariant::kHtle);
  CHECK(loaded.vocab_size() == emb.vocab_size());
  auto original = emb.repr("bank", 0);
  auto restored = loaded.repr("bank", 0);
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(restored[i] == doctest::Approx(original[i]).epsilon(1e-9));
  }
  CHECK(loaded.active_count(*loaded.word_id("bank"), 0) ==
        emb.active_count(*emb.word_id("bank"), 0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("lda separates disjoint vocabularies and is seed deterministic") {
  std::vector<Sentence> corpus;
  for (int d = 0; d < 10; ++d) {
    Sentence s;
    s.doc_id = d;
    s.tokens = d % 2 == 0 ? split_ws("apple fruit juice apple sweet fruit")
                          : split_ws("engine motor fuel engine speed motor");
    corpus.push_back(std::move(s));
  }
  LdaConfig config;
  config.n_topics = 2;
  config.iterations = 200;
  config.seed = 123;
  auto topics = lda_topics(corpus, config);
  topics.validate();
  REQUIRE(topics.doc_topics.size() == 10);
  for (std::size_t d = 0; d < 10; ++d) {
    double top = *std::max_element(topics.doc_topics[d].begin(), topics.doc_topics[d].end());
    CHECK(top >= 0.9);
  }
  // Fruit docs and engine docs land on different dominant topics.
  auto argmax = [&](std::size_t d) {
    return std::distance(topics.doc_topics[d].begin(),
                         std::max_element(topics.doc_topics[d].begin(), topics.doc_topics[d].end()));
  };
  CHECK(argmax(0) != argmax(1));
  CHECK(argmax(0) == argmax(2));

  auto again = lda_topics(corpus, config);
  CHECK(again.token_topics == topics.token_topics);
  CHECK(again.doc_topics == topics.doc_topics);
}
