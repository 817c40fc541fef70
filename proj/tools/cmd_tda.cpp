// Subcommands: tda-augment, tda-paraphrase.

#include <fstream>
#include <memory>

#include "common.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/errors.hpp"
#include "mtkit/tda.hpp"

namespace mtkit::tools {

namespace {

struct AugmentOpts {
  CommonOpts common;
  std::string src, tgt, align;
  std::string fwd_src_lm, bwd_src_lm, fwd_tgt_lm, bwd_tgt_lm;
  std::string lex;
  std::string out_src, out_tgt, audit;
  std::string mode = "r1";
  std::uint64_t rare_threshold = 100;
  std::size_t top_k = 1000;
  std::size_t cap = 1;
  double log_floor = -12.0;
  std::size_t max_passes = 0;
  std::size_t vocab_limit = 0;
};

struct ParaphraseOpts {
  CommonOpts common;
  std::string input;
  std::string vocab_corpus;
  std::string synonyms;
  std::string output;
  std::string targets = "oov";
  std::uint64_t rare_threshold = 100;
  std::size_t vocab_limit = 30000;
};

}  // namespace

void register_tda_commands(CLI::App& app) {
  {
    auto opts = std::make_shared<AugmentOpts>();
    auto* cmd = app.add_subcommand(
        "tda-augment", "Generate new bitext pairs placing rare words in novel contexts");
    cmd->add_option("--src", opts->src, "Source side of the bitext")->required();
    cmd->add_option("--tgt", opts->tgt, "Target side of the bitext")->required();
    cmd->add_option("--align", opts->align, "Word alignments ('i-j' lines)")->required();
    cmd->add_option("--fwd-src-lm", opts->fwd_src_lm, "Forward source LM")->required();
    cmd->add_option("--bwd-src-lm", opts->bwd_src_lm, "Backward source LM")->required();
    cmd->add_option("--fwd-tgt-lm", opts->fwd_tgt_lm, "Forward target LM")->required();
    cmd->add_option("--bwd-tgt-lm", opts->bwd_tgt_lm, "Backward target LM")->required();
    cmd->add_option("--lex", opts->lex, "Lexical translation table")->required();
    cmd->add_option("--rare-threshold", opts->rare_threshold, "Rare-word frequency threshold R");
    cmd->add_option("--top-k", opts->top_k, "Top-K continuations per LM direction");
    cmd->add_option("--cap", opts->cap, "Max augmentations per rare word (N)");
    cmd->add_option("--mode", opts->mode, "r1 (one substitution) or rge1 (several, >= 5 apart)")
        ->check(CLI::IsMember({"r1", "rge1"}));
    cmd->add_option("--floor", opts->log_floor, "Log-probability acceptance floor");
    cmd->add_option("--max-passes", opts->max_passes, "Pass cap (0 = until nothing new)");
    cmd->add_option("--vocab-size", opts->vocab_limit, "Vocabulary size limit (0 = unlimited)");
    cmd->add_option("--out-src", opts->out_src, "Augmented source output")->required();
    cmd->add_option("--out-tgt", opts->out_tgt, "Augmented target output")->required();
    cmd->add_option("--audit", opts->audit, "Audit log TSV")->required();
    add_common(cmd, opts->common, /*seed_required=*/true);
    cmd->callback([opts] {
      auto bitext = zip_bitext(read_corpus(opts->src), read_corpus(opts->tgt),
                               read_alignments(opts->align));
      auto fwd_src = NGramModel::load(opts->fwd_src_lm);
      auto bwd_src = NGramModel::load(opts->bwd_src_lm);
      auto fwd_tgt = NGramModel::load(opts->fwd_tgt_lm);
      auto bwd_tgt = NGramModel::load(opts->bwd_tgt_lm);
      auto lex = LexTable::load(opts->lex);

      std::vector<Sentence> src_only;
      src_only.reserve(bitext.size());
      for (const auto& pair : bitext) src_only.push_back(pair.src);
      auto vocab = Vocabulary::build(
          src_only, opts->vocab_limit > 0 ? std::optional<std::size_t>(opts->vocab_limit)
                                          : std::nullopt);
      auto rare = select_rare_vocab(vocab, opts->rare_threshold);

      AugmentDeps deps{&fwd_src, &bwd_src, &fwd_tgt, &bwd_tgt, &lex, &rare};
      AugmentConfig config;
      config.mode = opts->mode == "r1" ? AugmentMode::kSingle : AugmentMode::kMulti;
      config.per_word_cap = opts->cap;
      config.top_k = opts->top_k;
      config.log_floor = opts->log_floor;
      config.max_passes = opts->max_passes;
      config.seed = opts->common.seed;
      config.workers = opts->common.workers;
      auto records = augment_corpus(bitext, deps, config);

      // D' = originals followed by the accepted augmented pairs.
      std::ofstream src_out(opts->out_src);
      std::ofstream tgt_out(opts->out_tgt);
      if (!src_out || !tgt_out) throw Error("cannot write augmented bitext");
      for (const auto& pair : bitext) {
        src_out << pair.src.text() << '\n';
        tgt_out << pair.tgt.text() << '\n';
      }
      for (const auto& rec : records) {
        src_out << rec.augmented.src.text() << '\n';
        tgt_out << rec.augmented.tgt.text() << '\n';
      }

      std::ofstream audit(opts->audit);
      if (!audit) throw Error("cannot write audit log: " + opts->audit);
      audit << "pair\tpass\tsrc_pos\told_src\tnew_src\ttgt_pos\told_tgt\tnew_tgt\tambiguous\n";
      for (const auto& rec : records) {
        for (const auto& sub : rec.substitutions) {
          audit << rec.pair_index << '\t' << rec.pass << '\t' << sub.src_pos << '\t' << sub.old_src
                << '\t' << sub.new_src << '\t' << sub.tgt_pos << '\t' << sub.old_tgt << '\t'
                << sub.new_tgt << '\t' << (sub.ambiguous_alignment ? 1 : 0) << '\n';
        }
      }

      Manifest manifest("tda-augment");
      manifest.seed(opts->common.seed);
      manifest.param("mode", opts->mode);
      manifest.param("rare_threshold", opts->rare_threshold);
      manifest.param("top_k", static_cast<std::uint64_t>(opts->top_k));
      manifest.param("cap", static_cast<std::uint64_t>(opts->cap));
      manifest.param("floor", opts->log_floor);
      for (const auto& path : {opts->src, opts->tgt, opts->align, opts->fwd_src_lm,
                               opts->bwd_src_lm, opts->fwd_tgt_lm, opts->bwd_tgt_lm, opts->lex}) {
        manifest.input(path);
      }
      manifest.output(opts->out_src);
      manifest.output(opts->out_tgt);
      manifest.output(opts->audit);
      finish_manifest(manifest, opts->common, opts->out_src);
    });
  }
  {
    auto opts = std::make_shared<ParaphraseOpts>();
    auto* cmd = app.add_subcommand(
        "tda-paraphrase", "Replace OOV (and rare) words with in-vocabulary synonyms");
    cmd->add_option("--input", opts->input, "Sentences to rewrite")->required();
    cmd->add_option("--vocab-corpus", opts->vocab_corpus, "Corpus defining the vocabulary")
        ->required();
    cmd->add_option("--vocab-size", opts->vocab_limit, "Vocabulary size limit");
    cmd->add_option("--synonyms", opts->synonyms, "TSV word<TAB>synonym<TAB>score")->required();
    cmd->add_option("--targets", opts->targets, "oov or oov-rare")
        ->check(CLI::IsMember({"oov", "oov-rare"}));
    cmd->add_option("--rare-threshold", opts->rare_threshold, "Rare frequency threshold");
    cmd->add_option("--output", opts->output, "Rewritten sentences")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto vocab = Vocabulary::build(read_corpus(opts->vocab_corpus),
                                     opts->vocab_limit > 0
                                         ? std::optional<std::size_t>(opts->vocab_limit)
                                         : std::nullopt);
      auto resource = SynonymResource::load(opts->synonyms);
      auto targets = opts->targets == "oov" ? ParaphraseTargets::kOovOnly
                                            : ParaphraseTargets::kOovAndRare;
      auto corpus = read_corpus(opts->input);
      std::vector<Sentence> rewritten;
      rewritten.reserve(corpus.size());
      std::size_t substituted = 0;
      for (const auto& sentence : corpus) {
        auto result = paraphrase_substitute(sentence, vocab, resource, targets,
                                            opts->rare_threshold);
        substituted += result.n_substituted;
        rewritten.push_back(std::move(result.sentence));
      }
      write_corpus(rewritten, opts->output);
      std::fprintf(stderr, "substituted %zu tokens across %zu sentences\n", substituted,
                   corpus.size());

      Manifest manifest("tda-paraphrase");
      manifest.param("targets", opts->targets);
      manifest.param("rare_threshold", opts->rare_threshold);
      manifest.input(opts->input);
      manifest.input(opts->vocab_corpus);
      manifest.input(opts->synonyms);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
}

}  // namespace mtkit::tools
