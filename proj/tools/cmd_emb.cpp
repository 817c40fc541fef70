// Subcommands: emb-train, emb-lexsub, emb-wordsim, lda-train.

#include <cstdio>
#include <fstream>
#include <memory>

#include "common.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/embeddings.hpp"
#include "mtkit/errors.hpp"
#include "mtkit/lda.hpp"

namespace mtkit::tools {

namespace {

struct EmbTrainOpts {
  CommonOpts common;
  std::string input, doc_topics, token_topics, doc_ids, output;
  std::string variant = "sge";
  int topics = 0;
  std::size_t dim = 100;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.05;
  std::uint64_t min_count = 100;
  bool not_reproducible = false;
};

struct LexsubOpts {
  CommonOpts common;
  std::string embeddings, instances, gold, output;
  std::string method = "smp";
};

struct WordsimOpts {
  CommonOpts common;
  std::string embeddings, pairs;
  std::string strategy = "mean";
};

struct LdaOpts {
  CommonOpts common;
  std::string input, doc_ids, out_doc_topics, out_token_topics;
  int topics = 2;
  int iterations = 200;
  double alpha = 0.1;
  double beta = 0.01;
};

void apply_doc_ids(std::vector<Sentence>& corpus, const std::string& path) {
  if (path.empty()) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      corpus[i].doc_id = static_cast<std::int64_t>(i);
    }
    return;
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open document ids: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line_no >= corpus.size()) throw Error("more doc ids than corpus lines");
    try {
      corpus[line_no].doc_id = std::stoll(line);
    } catch (const std::exception&) {
      throw FormatError(path, line_no + 1, 1, "bad document id '" + line + "'");
    }
    ++line_no;
  }
  if (line_no != corpus.size()) throw LengthMismatch(line_no, corpus.size());
}

}  // namespace

void register_emb_commands(CLI::App& app) {
  {
    auto opts = std::make_shared<EmbTrainOpts>();
    auto* cmd = app.add_subcommand("emb-train", "Train skipgram or topic-sensitive embeddings");
    cmd->add_option("--input", opts->input, "Training corpus")->required();
    cmd->add_option("--variant", opts->variant, "sge, htle, htleadd or stle")
        ->check(CLI::IsMember({"sge", "htle", "htleadd", "stle"}));
    cmd->add_option("--topics", opts->topics, "Number of topics (topic variants)");
    cmd->add_option("--doc-topics", opts->doc_topics, "Per-document topic distribution TSV");
    cmd->add_option("--token-topics", opts->token_topics, "Per-token topic labels");
    cmd->add_option("--doc-ids", opts->doc_ids, "Document id per corpus line (default: line = doc)");
    cmd->add_option("--dim", opts->dim, "Embedding dimension");
    cmd->add_option("--window", opts->window, "Context window size");
    cmd->add_option("--negatives", opts->negatives, "Negative samples per update");
    cmd->add_option("--epochs", opts->epochs, "Training epochs");
    cmd->add_option("--lr", opts->learning_rate, "Learning rate");
    cmd->add_option("--min-count", opts->min_count, "Minimum word frequency");
    cmd->add_flag("--no-reproducible", opts->not_reproducible,
                  "Allow lock-free sharded updates across workers");
    cmd->add_option("--output", opts->output, "Output prefix (.in.emb/.out.emb/.counts.tsv)")
        ->required();
    add_common(cmd, opts->common, /*seed_required=*/true);
    cmd->callback([opts] {
      auto corpus = read_corpus(opts->input);
      apply_doc_ids(corpus, opts->doc_ids);
      auto variant = *embedding_variant_from(opts->variant);

      TopicAssignments topics;
      const TopicAssignments* topics_ptr = nullptr;
      if (variant != EmbeddingVariant::kSge) {
        if (opts->topics < 2) throw Error("topic variants need --topics >= 2");
        topics.n_topics = opts->topics;
        if (!opts->doc_topics.empty()) {
          topics.doc_topics = TopicAssignments::load_doc_topics(opts->doc_topics, opts->topics);
        }
        if (!opts->token_topics.empty()) {
          topics.token_topics =
              TopicAssignments::load_token_topics(opts->token_topics, opts->topics);
        }
        topics.validate();
        topics_ptr = &topics;
      }

      TrainConfig config;
      config.dim = opts->dim;
      config.window = opts->window;
      config.negatives = opts->negatives;
      config.epochs = opts->epochs;
      config.learning_rate = opts->learning_rate;
      config.min_count = opts->min_count;
      config.seed = opts->common.seed;
      config.reproducible = !opts->not_reproducible;
      config.workers = opts->common.workers;

      auto embeddings = train_embeddings(corpus, topics_ptr, config, variant);
      embeddings.save(opts->output);
      std::fprintf(stderr, "trained %zu words x %d topics, dim %zu\n", embeddings.vocab_size(),
                   embeddings.n_topics(), embeddings.dim());

      Manifest manifest("emb-train");
      manifest.seed(opts->common.seed);
      manifest.param("variant", opts->variant);
      manifest.param("dim", static_cast<std::uint64_t>(opts->dim));
      manifest.param("window", static_cast<std::uint64_t>(opts->window));
      manifest.param("negatives", static_cast<std::uint64_t>(opts->negatives));
      manifest.param("epochs", static_cast<std::uint64_t>(opts->epochs));
      manifest.param("lr", opts->learning_rate);
      manifest.param("min_count", opts->min_count);
      manifest.input(opts->input);
      if (!opts->doc_topics.empty()) manifest.input(opts->doc_topics);
      if (!opts->token_topics.empty()) manifest.input(opts->token_topics);
      for (const char* suffix : {".in.emb", ".out.emb", ".counts.tsv"}) {
        manifest.output(opts->output + suffix);
      }
      finish_manifest(manifest, opts->common, opts->output + ".in.emb");
    });
  }
  {
    auto opts = std::make_shared<LexsubOpts>();
    auto* cmd = app.add_subcommand("emb-lexsub", "Rank lexical substitution candidates");
    cmd->add_option("--embeddings", opts->embeddings, "Embedding prefix from emb-train")
        ->required();
    cmd->add_option("--instances", opts->instances,
                    "TSV: id, target, topic, context, candidates[, topic distribution]")
        ->required();
    cmd->add_option("--method", opts->method, "smp or exp")
        ->check(CLI::IsMember({"smp", "exp"}));
    cmd->add_option("--gold", opts->gold, "Gold TSV 'id<TAB>word=weight ...' for GAP scores");
    cmd->add_option("--output", opts->output, "Ranked candidates TSV")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto embeddings = TopicEmbeddings::load(opts->embeddings);
      auto method = opts->method == "smp" ? LexsubMethod::kSampled : LexsubMethod::kExpected;

      std::map<std::string, std::map<std::string, double>> gold;
      if (!opts->gold.empty()) {
        std::ifstream in(opts->gold);
        if (!in) throw Error("cannot open gold file: " + opts->gold);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
          ++line_no;
          if (line.empty()) continue;
          auto fields = split_char(line, '\t');
          if (fields.size() != 2) throw FormatError(opts->gold, line_no, 1, "expected 2 columns");
          for (const auto& item : split_ws(fields[1])) {
            auto eq = item.find('=');
            if (eq == std::string::npos) {
              throw FormatError(opts->gold, line_no, 2, "expected word=weight");
            }
            gold[fields[0]][item.substr(0, eq)] = std::stod(item.substr(eq + 1));
          }
        }
      }

      std::ifstream in(opts->instances);
      if (!in) throw Error("cannot open instances: " + opts->instances);
      std::ofstream out(opts->output);
      if (!out) throw Error("cannot write ranking: " + opts->output);
      std::string line;
      std::size_t line_no = 0;
      double gap_sum = 0.0;
      std::size_t gap_count = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_char(line, '\t');
        if (fields.size() < 5) {
          throw FormatError(opts->instances, line_no, 1,
                            "expected id, target, topic, context, candidates");
        }
        LexsubQuery query;
        query.target = fields[1];
        query.target_topic = std::stoi(fields[2]);
        query.substitute_topic = query.target_topic;
        query.context = split_ws(fields[3]);
        auto candidates = split_ws(fields[4]);
        if (fields.size() > 5) {
          for (const auto& p : split_ws(fields[5])) query.topic_dist.push_back(std::stod(p));
        }
        auto ranked = lexsub_rank(embeddings, query, candidates, method);
        out << fields[0];
        for (const auto& [word, score] : ranked) out << '\t' << word << '=' << score;
        out << '\n';
        auto git = gold.find(fields[0]);
        if (git != gold.end()) {
          std::vector<std::string> ranked_words;
          for (const auto& [word, score] : ranked) ranked_words.push_back(word);
          gap_sum += gap_score(ranked_words, git->second);
          ++gap_count;
        }
      }
      if (gap_count > 0) {
        std::printf("mean GAP = %.4f over %zu instances\n", gap_sum / gap_count, gap_count);
      }

      Manifest manifest("emb-lexsub");
      manifest.param("method", opts->method);
      manifest.input(opts->instances);
      if (!opts->gold.empty()) manifest.input(opts->gold);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<WordsimOpts>();
    auto* cmd = app.add_subcommand("emb-wordsim", "Word-similarity evaluation (Spearman's rho)");
    cmd->add_option("--embeddings", opts->embeddings, "Embedding prefix from emb-train")
        ->required();
    cmd->add_option("--pairs", opts->pairs, "TSV: word1, word2, human score")->required();
    cmd->add_option("--strategy", opts->strategy, "max, mean or wmean")
        ->check(CLI::IsMember({"max", "mean", "wmean"}));
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto embeddings = TopicEmbeddings::load(opts->embeddings);
      std::ifstream in(opts->pairs);
      if (!in) throw Error("cannot open pairs: " + opts->pairs);
      std::vector<WordSimPair> pairs;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_char(line, '\t');
        if (fields.size() != 3) {
          throw FormatError(opts->pairs, line_no, 1, "expected 'word1<TAB>word2<TAB>score'");
        }
        pairs.push_back({fields[0], fields[1], std::stod(fields[2])});
      }
      auto strategy = WordSimStrategy::kMean;
      if (opts->strategy == "max") strategy = WordSimStrategy::kMax;
      else if (opts->strategy == "wmean") strategy = WordSimStrategy::kWeightedMean;
      auto result = wordsim_eval(embeddings, pairs, strategy);
      std::printf("rho = %.4f over %zu pairs (%zu skipped)\n", result.rho, result.used_pairs,
                  result.skipped_pairs);
    });
  }
  {
    auto opts = std::make_shared<LdaOpts>();
    auto* cmd = app.add_subcommand("lda-train", "Collapsed-Gibbs LDA topic assignments");
    cmd->add_option("--input", opts->input, "Training corpus")->required();
    cmd->add_option("--doc-ids", opts->doc_ids, "Document id per corpus line (default: line = doc)");
    cmd->add_option("--topics", opts->topics, "Number of topics")->check(CLI::Range(2, 1000));
    cmd->add_option("--iterations", opts->iterations, "Gibbs sweeps");
    cmd->add_option("--alpha", opts->alpha, "Document-topic prior");
    cmd->add_option("--beta", opts->beta, "Topic-word prior");
    cmd->add_option("--out-doc-topics", opts->out_doc_topics, "Document distribution TSV")
        ->required();
    cmd->add_option("--out-token-topics", opts->out_token_topics, "Per-token label file")
        ->required();
    add_common(cmd, opts->common, /*seed_required=*/true);
    cmd->callback([opts] {
      auto corpus = read_corpus(opts->input);
      apply_doc_ids(corpus, opts->doc_ids);
      LdaConfig config;
      config.n_topics = opts->topics;
      config.iterations = opts->iterations;
      config.alpha = opts->alpha;
      config.beta = opts->beta;
      config.seed = opts->common.seed;
      auto assignments = lda_topics(corpus, config);
      assignments.save_doc_topics(opts->out_doc_topics);
      assignments.save_token_topics(opts->out_token_topics);

      Manifest manifest("lda-train");
      manifest.seed(opts->common.seed);
      manifest.param("topics", static_cast<std::uint64_t>(opts->topics));
      manifest.param("iterations", static_cast<std::uint64_t>(opts->iterations));
      manifest.param("alpha", opts->alpha);
      manifest.param("beta", opts->beta);
      manifest.input(opts->input);
      manifest.output(opts->out_doc_topics);
      manifest.output(opts->out_token_topics);
      finish_manifest(manifest, opts->common, opts->out_doc_topics);
    });
  }
}

}  // namespace mtkit::tools
