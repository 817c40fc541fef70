#include "mtkit/bt_sampling.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mtkit/errors.hpp"

using namespace mtkit;

namespace {

Sentence sent(const char* text) { return Sentence{split_ws(text)}; }

TokenLossTable table_from(std::initializer_list<TokenLossRecord> records) {
  return TokenLossTable::from_records(std::vector<TokenLossRecord>(records));
}

}  // namespace

TEST_CASE("loss aggregates match brute-force mean and std") {
  auto table = table_from({{0, 0, "y", 2.0}, {1, 3, "y", 4.0}, {0, 1, "z", 1.5}});
  auto y = table.stats("y");
  REQUIRE(y.has_value());
  CHECK(y->n == 2);
  CHECK(y->mean == doctest::Approx(3.0));
  CHECK(y->stddev == doctest::Approx(1.0));  // population std of {2,4}
  auto z = table.stats("z");
  CHECK(z->stddev == 0.0);
  CHECK_FALSE(table.stats("missing").has_value());
}

TEST_CASE("loss file parsing validates rows") {
  auto dir = std::filesystem::temp_directory_path() / "mtkit_loss_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "losses.tsv").string();
  {
    std::ofstream out(path);
    out << "0\t0\tcat\t2.5\n1\t4\tdog\t0.0\n";
  }
  auto table = TokenLossTable::load(path);
  CHECK(table.records().size() == 2);
  CHECK(table.stats("cat")->mean == doctest::Approx(2.5));

  {
    std::ofstream out(path);
    out << "0\t0\tcat\t-1\n";
  }
  CHECK_THROWS_AS(TokenLossTable::load(path), NegativeLoss);
  {
    std::ofstream out(path);
    out << "0\tzero\tcat\t1\n";
  }
  CHECK_THROWS_AS(TokenLossTable::load(path), FormatError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("per-position mean loss diagnostic") {
  auto table = table_from({{0, 0, "a", 1.0}, {1, 0, "b", 3.0}, {0, 1, "c", 5.0}});
  auto means = table.per_position_mean_loss();
  REQUIRE(means.size() == 2);
  CHECK(means[0] == doctest::Approx(2.0));
  CHECK(means[1] == doctest::Approx(5.0));
}

TEST_CASE("difficulty criteria predicates") {
  std::vector<Sentence> vocab_corpus;
  for (int i = 0; i < 120; ++i) vocab_corpus.push_back(sent("frequent"));
  vocab_corpus.push_back(sent("rare"));
  auto vocab = Vocabulary::build(vocab_corpus);

  auto table = table_from({
      {0, 0, "easy", 4.9},
      {1, 0, "hard", 6.1},
      {2, 0, "skewed", 0.0},
      {3, 0, "skewed", 12.0},
      {4, 0, "steady", 6.0},
      {5, 0, "steady", 6.0},
  });

  DifficultyThresholds thresholds;
  thresholds.eta = 100;
  thresholds.mu = 5.0;
  thresholds.rho = 5.0;

  auto freq = difficulty_set(table, vocab, DifficultyCriterion::kFreq, thresholds);
  CHECK(freq.tokens == std::set<std::string>{"rare"});

  auto mpl = difficulty_set(table, vocab, DifficultyCriterion::kMpl, thresholds);
  CHECK(mpl.tokens == std::set<std::string>{"hard", "skewed", "steady"});

  auto spl = difficulty_set(table, vocab, DifficultyCriterion::kMplSpl, thresholds);
  CHECK(spl.tokens == std::set<std::string>{"skewed"});  // mean 6, std 6 > rho

  auto pplr = difficulty_set(table, vocab, DifficultyCriterion::kPplr, thresholds);
  CHECK(pplr.tokens == std::set<std::string>{"hard", "skewed", "steady"});
  CHECK(pplr.contexts.size() == 4);  // occurrences with loss > mu
}

TEST_CASE("paper defaults for difficulty thresholds") {
  DifficultyThresholds defaults;
  CHECK(defaults.eta == 5000);
  CHECK(defaults.mu == 5.0);
  CHECK(defaults.rho == 10.0);
}

TEST_CASE("difficulty sampling keeps only matching sentences") {
  DifficultySet difficulty;
  difficulty.tokens = {"x"};
  std::vector<Sentence> mono{sent("x a"), sent("b"), sent("x")};
  auto result = diff_sampling(difficulty, mono, 2, 9);
  CHECK(result.sentences.size() == 2);
  CHECK_FALSE(result.exhausted);
  for (const auto& s : result.sentences) {
    CHECK(std::find(s.tokens.begin(), s.tokens.end(), "x") != s.tokens.end());
  }

  auto more = diff_sampling(difficulty, mono, 5, 9);
  CHECK(more.sentences.size() == 2);
  CHECK(more.exhausted);

  DifficultySet empty;
  auto none = diff_sampling(empty, mono, 3, 9);
  CHECK(none.sentences.empty());
  CHECK(none.exhausted);
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  DifficultySet difficulty;
  difficulty.tokens = {"x", "y"};
  std::vector<Sentence> mono;
  for (int i = 0; i < 200; ++i) {
    mono.push_back(i % 3 == 0 ? sent("x filler") : (i % 3 == 1 ? sent("y filler") : sent("z")));
  }
  auto a = diff_sampling(difficulty, mono, 20, 1234);
  auto b = diff_sampling(difficulty, mono, 20, 1234);
  CHECK(a.picked == b.picked);
  auto c = diff_sampling(difficulty, mono, 20, 4321);
  CHECK(a.picked != c.picked);
}

TEST_CASE("ratio-preserving quotas") {
  DifficultySet difficulty;
  difficulty.criterion = DifficultyCriterion::kPplr;
  difficulty.tokens = {"y1", "y2"};
  // y1 difficult in 2 contexts, y2 in 4.
  for (int i = 0; i < 2; ++i) difficulty.contexts.push_back({"y1", 0, sent("y1 ctx")});
  for (int i = 0; i < 4; ++i) difficulty.contexts.push_back({"y2", 1, sent("y2 ctx")});

  std::vector<Sentence> mono;
  for (int i = 0; i < 50; ++i) {
    mono.push_back(sent("y1 a"));
    mono.push_back(sent("y2 b"));
    mono.push_back(sent("c d"));
  }
  std::unordered_map<std::string, std::size_t> counts;
  auto result = pplr_sampling(difficulty, mono, 30, 7, &counts);
  CHECK(result.sentences.size() == 30);
  CHECK(counts["y1"] == 10);
  CHECK(counts["y2"] == 20);  // double the y1 count

  // A sentence whose difficult tokens are all at quota is rejected.
  std::vector<Sentence> only_y1(40, sent("y1 q"));
  std::unordered_map<std::string, std::size_t> capped;
  auto partial = pplr_sampling(difficulty, only_y1, 30, 7, &capped);
  CHECK(partial.exhausted);
  CHECK(capped["y1"] == 10);  // ceil(30 * 2/6) = 10, never exceeded

  DifficultySet no_contexts;
  CHECK_THROWS_AS(pplr_sampling(no_contexts, mono, 5, 7, nullptr), EmptyInput);

  // A single difficult token owns the whole quota N.
  DifficultySet single;
  single.tokens = {"y1"};
  single.contexts.push_back({"y1", 0, sent("y1 ctx")});
  std::unordered_map<std::string, std::size_t> solo_counts;
  auto solo = pplr_sampling(single, mono, 12, 7, &solo_counts);
  CHECK(solo.sentences.size() == 12);
  CHECK(solo_counts["y1"] == 12);
}

TEST_CASE("neighbor context clips at sentence edges") {
  // Paper fixture: window 2 around "colleague".
  auto sentence = sent("and a colleague at Stan@@ ford");
  ContextSpec spec;
  spec.kind = ContextKind::kNeighbor;
  spec.window = 2;
  CHECK(context_of(spec, sentence, 2) ==
        std::vector<std::string>{"and", "a", "at", "Stan@@"});
  CHECK(context_of(spec, sent("x y z"), 0) == std::vector<std::string>{"y", "z"});
}

TEST_CASE("sibling context collects subword units of the word") {
  ContextSpec spec;
  spec.kind = ContextKind::kSibling;
  CHECK(context_of(spec, sent("Stan@@ ford"), 0) == std::vector<std::string>{"ford"});
  CHECK(context_of(spec, sent("he at@@ ten@@ ded it"), 2) ==
        std::vector<std::string>{"at@@", "ded"});
  CHECK(context_of(spec, sent("plain words here"), 1).empty());
}

TEST_CASE("sentence context drops only the position itself") {
  ContextSpec spec;
  spec.kind = ContextKind::kSentence;
  CHECK(context_of(spec, sent("a b c"), 1) == std::vector<std::string>{"a", "c"});
}

TEST_CASE("exact context similarity") {
  ContextSpec spec;
  spec.similarity = SimilarityKind::kExact;
  CHECK(context_similarity(spec, split_ws("a b c d"), split_ws("a b x d")) == doctest::Approx(0.75));
  CHECK(context_similarity(spec, split_ws("a b"), split_ws("a b")) == doctest::Approx(1.0));
  CHECK(context_similarity(spec, split_ws("a b c"), split_ws("a b")) == doctest::Approx(2.0 / 3.0));
  CHECK(context_similarity(spec, {}, {}) == 0.0);
  // symmetry
  CHECK(context_similarity(spec, split_ws("a x"), split_ws("a b c")) ==
        context_similarity(spec, split_ws("a b c"), split_ws("a x")));
}

TEST_CASE("semantic context similarity with skipped unknowns") {
  WordVectors vectors(2);
  vectors.set("hot", {1.0f, 0.0f});
  vectors.set("cold", {-1.0f, 0.0f});
  vectors.set("warm", {1.0f, 0.0f});

  ContextSpec spec;
  spec.similarity = SimilarityKind::kSemantic;
  std::size_t skipped = 0;
  double same = context_similarity(spec, split_ws("hot"), split_ws("warm"), &vectors, &skipped);
  CHECK(same == doctest::Approx(1.0));
  CHECK(skipped == 0);
  double anti = context_similarity(spec, split_ws("hot"), split_ws("cold"), &vectors, nullptr);
  CHECK(anti == doctest::Approx(-1.0));

  skipped = 0;
  double with_oov = context_similarity(spec, split_ws("hot mystery"), split_ws("warm"), &vectors, &skipped);
  CHECK(with_oov == doctest::Approx(1.0));
  CHECK(skipped == 1);

  CHECK(context_similarity(spec, split_ws("mystery"), split_ws("warm"), &vectors, nullptr) == 0.0);
  CHECK_THROWS_AS(context_similarity(spec, split_ws("a"), split_ws("b"), nullptr, nullptr),
                  MissingEmbeddings);
}

TEST_CASE("context sampling keeps sentences whose context clears the threshold") {
  // Difficult token "rock" recorded in a music context.
  DifficultySet difficulty;
  difficulty.tokens = {"rock"};
  difficulty.contexts.push_back({"rock", 0, sent("rock music hall")});

  WordVectors vectors(2);
  vectors.set("music", {1.0f, 0.0f});
  vectors.set("hall", {1.0f, 0.0f});
  vectors.set("band", {0.9f, std::sqrt(1.0f - 0.81f)});  // cos vs music = 0.9
  vectors.set("stone", {0.0f, 1.0f});                    // cos vs music = 0.0

  ContextSpec spec;
  spec.kind = ContextKind::kSentence;
  spec.similarity = SimilarityKind::kSemantic;
  spec.threshold = 0.75;

  std::vector<Sentence> mono{
      sent("rock band"),        // sim 0.9: kept
      sent("rock stone"),       // sim 0.0: rejected
      sent("pebble and stone"), // no difficult token: rejected
  };
  std::vector<ContextSampleLog> log;
  auto result = context_sampling(difficulty, spec, mono, 5, 3, &vectors, &log);
  REQUIRE(result.sentences.size() == 1);
  CHECK(result.sentences[0].text() == "rock band");
  REQUIRE(log.size() == 1);
  CHECK(log[0].token == "rock");
  CHECK(log[0].similarity == doctest::Approx(0.9).epsilon(1e-6));
}
