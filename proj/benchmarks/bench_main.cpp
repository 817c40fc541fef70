#include <benchmark/benchmark.h>

#include "mtkit/bpe.hpp"
#include "mtkit/idiom.hpp"
#include "mtkit/metrics.hpp"
#include "mtkit/ngram.hpp"
#include "mtkit/rng.hpp"
#include "mtkit/volatility.hpp"

using namespace mtkit;

namespace {

std::vector<Sentence> synthetic_corpus(std::size_t n_sentences, std::size_t vocab,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sentence> corpus;
  corpus.reserve(n_sentences);
  for (std::size_t i = 0; i < n_sentences; ++i) {
    Sentence s;
    std::size_t len = 5 + rng.below(15);
    for (std::size_t k = 0; k < len; ++k) {
      s.tokens.push_back("w" + std::to_string(rng.below(vocab)));
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

void BM_BpeApply(benchmark::State& state) {
  auto corpus = synthetic_corpus(200, 80, 1);
  auto model = BpeModel::learn(corpus, 100);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.apply(corpus[i++ % corpus.size()]));
  }
}
BENCHMARK(BM_BpeApply);

void BM_NgramTopk(benchmark::State& state) {
  auto corpus = synthetic_corpus(2000, 50, 2);
  auto model = NGramModel::train(corpus, 3, LmDirection::kForward);
  std::vector<std::string> context{"w1", "w2"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.topk(context, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_NgramTopk)->Arg(10)->Arg(1000);

void BM_Levenshtein(benchmark::State& state) {
  Rng rng(3);
  auto make = [&] {
    std::vector<std::string> t;
    for (int i = 0; i < state.range(0); ++i) t.push_back("t" + std::to_string(rng.below(8)));
    return t;
  };
  auto a = make();
  auto b = make();
  for (auto _ : state) benchmark::DoNotOptimize(levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein)->Arg(20)->Arg(60);

void BM_BleuCorpus(benchmark::State& state) {
  auto cands = synthetic_corpus(500, 60, 4);
  auto refs = synthetic_corpus(500, 60, 5);
  for (auto _ : state) benchmark::DoNotOptimize(bleu_corpus(cands, refs));
}
BENCHMARK(BM_BleuCorpus);

void BM_IdiomMatch(benchmark::State& state) {
  LemmaDict dict;
  IdiomEntry entry;
  entry.id = "bench";
  entry.source_lemmas = {"w3", "w7", "w11"};
  auto corpus = synthetic_corpus(500, 30, 6);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_idiom(corpus[i++ % corpus.size()], entry, dict, 4));
  }
}
BENCHMARK(BM_IdiomMatch);

}  // namespace

BENCHMARK_MAIN();
