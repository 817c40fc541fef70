// Subcommand: bt-sample (targeted sampling for back-translation).

#include <cstdio>
#include <fstream>
#include <memory>

#include "common.hpp"
#include "mtkit/bt_sampling.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/errors.hpp"

namespace mtkit::tools {

namespace {

struct BtOpts {
  CommonOpts common;
  std::string mono;
  std::string losses;
  std::string vocab_corpus;
  std::string bitext_tgt;
  std::string embeddings;
  std::string output;
  std::string log_path;
  std::string position_report;
  std::string criterion = "mpl";
  std::string sim = "exct";
  std::string context = "neighbor";
  std::size_t n_samples = 0;
  std::uint64_t eta = 5000;
  double mu = 5.0;
  double rho = 10.0;
  std::size_t window = 4;
  double threshold = 0.75;
};

}  // namespace

void register_bt_commands(CLI::App& app) {
  auto opts = std::make_shared<BtOpts>();
  auto* cmd = app.add_subcommand(
      "bt-sample", "Sample monolingual sentences for back-translation by difficulty");
  cmd->add_option("--mono", opts->mono, "Monolingual corpus to sample from")->required();
  cmd->add_option("--losses", opts->losses,
                  "Token prediction losses TSV (sentence_id, position, token, loss)");
  cmd->add_option("--vocab-corpus", opts->vocab_corpus,
                  "Target training corpus (frequency criterion)");
  cmd->add_option("--bitext-tgt", opts->bitext_tgt,
                  "Target side of the bitext, indexed by loss sentence ids");
  cmd->add_option("--embeddings", opts->embeddings, "Word vectors for semantic similarity");
  cmd->add_option("--criterion", opts->criterion, "freq, mpl, mpl-spl, pplr or context")
      ->check(CLI::IsMember({"freq", "mpl", "mpl-spl", "pplr", "context"}));
  cmd->add_option("--n", opts->n_samples, "Number of sentences to sample")->required();
  cmd->add_option("--eta", opts->eta, "Frequency threshold");
  cmd->add_option("--mu", opts->mu, "Mean-loss threshold");
  cmd->add_option("--rho", opts->rho, "Loss-stddev threshold");
  cmd->add_option("--sim", opts->sim, "exct or sem")->check(CLI::IsMember({"exct", "sem"}));
  cmd->add_option("--context", opts->context, "neighbor, sibling or sentence")
      ->check(CLI::IsMember({"neighbor", "sibling", "sentence"}));
  cmd->add_option("--window", opts->window, "Neighbor window size");
  cmd->add_option("--threshold", opts->threshold, "Context similarity threshold");
  cmd->add_option("--output", opts->output, "Selected sentences")->required();
  cmd->add_option("--log", opts->log_path, "Justification log TSV");
  cmd->add_option("--position-report", opts->position_report,
                  "Per-position mean loss diagnostic TSV");
  add_common(cmd, opts->common, /*seed_required=*/true);

  cmd->callback([opts] {
    auto mono = read_corpus(opts->mono);

    TokenLossTable table;
    if (!opts->losses.empty()) {
      table = TokenLossTable::load(opts->losses);
    } else if (opts->criterion != "freq") {
      throw Error("criterion '" + opts->criterion + "' needs --losses");
    }
    if (!opts->position_report.empty()) {
      std::ofstream report(opts->position_report);
      if (!report) throw Error("cannot write position report");
      auto means = table.per_position_mean_loss();
      report << "position\tmean_loss\n";
      for (std::size_t i = 0; i < means.size(); ++i) report << i << '\t' << means[i] << '\n';
    }

    Vocabulary vocab;
    if (!opts->vocab_corpus.empty()) {
      vocab = Vocabulary::build(read_corpus(opts->vocab_corpus));
    } else if (opts->criterion == "freq") {
      throw Error("the frequency criterion needs --vocab-corpus");
    }

    std::vector<Sentence> bitext_tgt;
    const std::vector<Sentence>* corpus_ptr = nullptr;
    if (!opts->bitext_tgt.empty()) {
      bitext_tgt = read_corpus(opts->bitext_tgt);
      corpus_ptr = &bitext_tgt;
    }

    DifficultyThresholds thresholds{opts->eta, opts->mu, opts->rho};
    bool context_mode = opts->criterion == "context";
    auto criterion = DifficultyCriterion::kMpl;
    if (opts->criterion == "freq") criterion = DifficultyCriterion::kFreq;
    else if (opts->criterion == "mpl-spl") criterion = DifficultyCriterion::kMplSpl;
    else if (opts->criterion == "pplr") criterion = DifficultyCriterion::kPplr;
    auto difficulty = difficulty_set(table, vocab, criterion, thresholds, corpus_ptr);

    SampleResult result;
    std::vector<ContextSampleLog> context_log;
    std::unordered_map<std::string, std::size_t> pplr_counts;
    if (context_mode) {
      if (corpus_ptr == nullptr) throw Error("context sampling needs --bitext-tgt");
      ContextSpec spec;
      spec.window = opts->window;
      spec.threshold = opts->threshold;
      spec.kind = opts->context == "neighbor"
                      ? ContextKind::kNeighbor
                      : (opts->context == "sibling" ? ContextKind::kSibling : ContextKind::kSentence);
      spec.similarity = opts->sim == "exct" ? SimilarityKind::kExact : SimilarityKind::kSemantic;
      std::unique_ptr<WordVectors> vectors;
      if (spec.similarity == SimilarityKind::kSemantic) {
        if (opts->embeddings.empty()) throw Error("semantic similarity needs --embeddings");
        vectors = std::make_unique<WordVectors>(WordVectors::load(opts->embeddings));
      }
      std::size_t skipped_tokens = 0;
      result = context_sampling(difficulty, spec, mono, opts->n_samples, opts->common.seed,
                                vectors.get(), &context_log, &skipped_tokens);
      if (skipped_tokens > 0) {
        std::fprintf(stderr, "note: %zu context tokens had no word vector and were skipped\n",
                     skipped_tokens);
      }
    } else if (opts->criterion == "pplr") {
      result = pplr_sampling(difficulty, mono, opts->n_samples, opts->common.seed, &pplr_counts);
    } else {
      result = diff_sampling(difficulty, mono, opts->n_samples, opts->common.seed);
    }
    if (result.exhausted) {
      std::fprintf(stderr, "warning: stream exhausted at %zu of %zu requested sentences\n",
                   result.sentences.size(), opts->n_samples);
    }
    write_corpus(result.sentences, opts->output);

    if (!opts->log_path.empty()) {
      std::ofstream log(opts->log_path);
      if (!log) throw Error("cannot write justification log");
      log << "mono_index\ttoken\tvalue\n";
      if (context_mode) {
        for (const auto& entry : context_log) {
          log << entry.mono_index << '\t' << entry.token << '\t' << entry.similarity << '\n';
        }
      } else {
        for (std::size_t i = 0; i < result.picked.size(); ++i) {
          // first difficult token of the kept sentence and its criterion value
          for (const auto& token : result.sentences[i].tokens) {
            if (difficulty.tokens.count(token) == 0) continue;
            double value = 0.0;
            if (criterion == DifficultyCriterion::kFreq) {
              value = static_cast<double>(vocab.count(token));
            } else if (auto stats = table.stats(token)) {
              value = stats->mean;
            }
            log << result.picked[i] << '\t' << token << '\t' << value << '\n';
            break;
          }
        }
      }
    }

    Manifest manifest("bt-sample");
    manifest.seed(opts->common.seed);
    manifest.param("criterion", opts->criterion);
    manifest.param("n", static_cast<std::uint64_t>(opts->n_samples));
    manifest.param("eta", opts->eta);
    manifest.param("mu", opts->mu);
    manifest.param("rho", opts->rho);
    if (context_mode) {
      manifest.param("sim", opts->sim);
      manifest.param("context", opts->context);
      manifest.param("window", static_cast<std::uint64_t>(opts->window));
      manifest.param("threshold", opts->threshold);
    }
    manifest.input(opts->mono);
    if (!opts->losses.empty()) manifest.input(opts->losses);
    if (!opts->vocab_corpus.empty()) manifest.input(opts->vocab_corpus);
    if (!opts->bitext_tgt.empty()) manifest.input(opts->bitext_tgt);
    if (!opts->embeddings.empty()) manifest.input(opts->embeddings);
    manifest.output(opts->output);
    if (!opts->log_path.empty()) manifest.output(opts->log_path);
    finish_manifest(manifest, opts->common, opts->output);
  });
}

}  // namespace mtkit::tools
