// Subcommands: bpe-learn, bpe-apply, lm-train, lex-est, bleu.

#include <cstdio>
#include <fstream>
#include <memory>

#include "common.hpp"
#include "mtkit/bpe.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/errors.hpp"
#include "mtkit/lex_table.hpp"
#include "mtkit/metrics.hpp"
#include "mtkit/ngram.hpp"

namespace mtkit::tools {

namespace {

struct BpeLearnOpts {
  CommonOpts common;
  std::string input;
  std::string output;
  std::size_t merges = 10000;
};

struct BpeApplyOpts {
  CommonOpts common;
  std::string model;
  std::string input;
  std::string output;
};

struct LmTrainOpts {
  CommonOpts common;
  std::string input;
  std::string output;
  int order = 5;
  std::string direction = "forward";
};

struct LexEstOpts {
  CommonOpts common;
  std::string src;
  std::string tgt;
  std::string align;
  std::string output;
  std::uint64_t min_count = 1;
};

struct BleuOpts {
  CommonOpts common;
  std::string candidate;
  std::string reference;
  bool sentence_level = false;
  bool lowercase_input = false;
};

}  // namespace

void register_corpus_commands(CLI::App& app) {
  {
    auto opts = std::make_shared<BpeLearnOpts>();
    auto* cmd = app.add_subcommand("bpe-learn", "Learn BPE merges from a tokenized corpus");
    cmd->add_option("--input", opts->input, "Corpus, one sentence per line")->required();
    cmd->add_option("--merges", opts->merges, "Number of merge operations");
    cmd->add_option("--output", opts->output, "Model file to write")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto corpus = read_corpus(opts->input);
      auto model = BpeModel::learn(corpus, opts->merges);
      model.save(opts->output);
      Manifest manifest("bpe-learn");
      manifest.param("merges", static_cast<std::uint64_t>(opts->merges));
      manifest.input(opts->input);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<BpeApplyOpts>();
    auto* cmd = app.add_subcommand("bpe-apply", "Segment a corpus with a learned BPE model");
    cmd->add_option("--model", opts->model, "BPE model file")->required();
    cmd->add_option("--input", opts->input, "Corpus to segment")->required();
    cmd->add_option("--output", opts->output, "Segmented corpus")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto model = BpeModel::load(opts->model);
      auto corpus = read_corpus(opts->input);
      std::vector<Sentence> segmented;
      segmented.reserve(corpus.size());
      for (const auto& sentence : corpus) segmented.push_back(model.apply(sentence));
      write_corpus(segmented, opts->output);
      Manifest manifest("bpe-apply");
      manifest.input(opts->model);
      manifest.input(opts->input);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<LmTrainOpts>();
    auto* cmd = app.add_subcommand("lm-train", "Train a count-based n-gram language model");
    cmd->add_option("--input", opts->input, "Training corpus")->required();
    cmd->add_option("--order", opts->order, "N-gram order (>= 2)")->check(CLI::Range(2, 9));
    cmd->add_option("--direction", opts->direction, "forward or backward")
        ->check(CLI::IsMember({"forward", "backward"}));
    cmd->add_option("--output", opts->output, "Model file to write")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto corpus = read_corpus(opts->input);
      auto direction =
          opts->direction == "forward" ? LmDirection::kForward : LmDirection::kBackward;
      auto model = NGramModel::train(corpus, opts->order, direction);
      model.save(opts->output);
      Manifest manifest("lm-train");
      manifest.param("order", static_cast<std::uint64_t>(opts->order));
      manifest.param("direction", opts->direction);
      manifest.input(opts->input);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<LexEstOpts>();
    auto* cmd =
        app.add_subcommand("lex-est", "Estimate lexical translation probabilities from alignments");
    cmd->add_option("--src", opts->src, "Source corpus")->required();
    cmd->add_option("--tgt", opts->tgt, "Target corpus")->required();
    cmd->add_option("--align", opts->align, "Alignment file, one 'i-j' line per pair")->required();
    cmd->add_option("--min-count", opts->min_count, "Drop link pairs seen fewer times");
    cmd->add_option("--output", opts->output, "Table TSV to write")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto pairs = zip_bitext(read_corpus(opts->src), read_corpus(opts->tgt),
                              read_alignments(opts->align));
      auto table = LexTable::estimate(pairs, opts->min_count);
      table.save(opts->output);
      Manifest manifest("lex-est");
      manifest.param("min_count", opts->min_count);
      manifest.input(opts->src);
      manifest.input(opts->tgt);
      manifest.input(opts->align);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<BleuOpts>();
    auto* cmd = app.add_subcommand("bleu", "BLEU score of a candidate file against a reference");
    cmd->add_option("--candidate", opts->candidate, "Candidate translations")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--reference", opts->reference, "Reference translations")
        ->required()
        ->check(CLI::ExistingFile);
    auto* sentence_flag =
        cmd->add_flag("--sentence", opts->sentence_level, "Per-line smoothed sentence BLEU");
    cmd->add_flag("--corpus", "Pooled corpus BLEU (default)")->excludes(sentence_flag);
    cmd->add_flag("--lc", opts->lowercase_input, "Lowercase before scoring");
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto candidates = read_corpus(opts->candidate);
      auto references = read_corpus(opts->reference);
      if (opts->sentence_level) {
        if (candidates.size() != references.size()) {
          throw LengthMismatch(candidates.size(), references.size());
        }
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          std::printf("%.4f\n", bleu_sentence(candidates[i], references[i], opts->lowercase_input));
        }
      } else {
        std::printf("BLEU = %.2f\n", bleu_corpus(candidates, references, opts->lowercase_input));
      }
      Manifest manifest("bleu");
      manifest.param("sentence", opts->sentence_level ? "1" : "0");
      manifest.param("lc", opts->lowercase_input ? "1" : "0");
      manifest.input(opts->candidate);
      manifest.input(opts->reference);
      finish_manifest(manifest, opts->common, opts->candidate + ".bleu");
    });
  }
}

}  // namespace mtkit::tools
