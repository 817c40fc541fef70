// Subcommands: idiom-annotate, idiom-split, idiom-eval.

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>

#include "common.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/errors.hpp"
#include "mtkit/idiom.hpp"
#include "mtkit/metrics.hpp"

namespace mtkit::tools {

namespace {

struct AnnotateOpts {
  CommonOpts common;
  std::string src, tgt, dict, lemmas, output, flag_src;
  std::size_t max_gap = kDefaultMaxGap;
};

struct SplitOpts {
  CommonOpts common;
  std::string src, tgt, dict, lemmas, out_prefix;
  std::size_t max_gap = kDefaultMaxGap;
  std::size_t test_size = 1500;
};

struct EvalOpts {
  CommonOpts common;
  std::string src, ref, hyp;
  std::string align_ref, align_hyp;
  std::string dict, lemmas, output;
  std::size_t max_gap = kDefaultMaxGap;
};

LemmaDict load_lemmas(const std::string& path) {
  return path.empty() ? LemmaDict{} : LemmaDict::load(path);
}

void write_annotations(const AnnotatedCorpus& annotated, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write annotations: " + path);
  out << "pair_id\tidiom_id\tpositions\n";
  for (std::size_t i = 0; i < annotated.matches.size(); ++i) {
    for (const auto& match : annotated.matches[i]) {
      out << i << '\t' << match.idiom_id << '\t';
      for (std::size_t k = 0; k < match.positions.size(); ++k) {
        if (k) out << ' ';
        out << match.positions[k];
      }
      out << '\n';
    }
  }
}

}  // namespace

void register_idiom_commands(CLI::App& app) {
  {
    auto opts = std::make_shared<AnnotateOpts>();
    auto* cmd =
        app.add_subcommand("idiom-annotate", "Label bitext pairs whose source contains an idiom");
    cmd->add_option("--src", opts->src, "Source corpus")->required();
    cmd->add_option("--tgt", opts->tgt, "Target corpus")->required();
    cmd->add_option("--dict", opts->dict, "Idiom dictionary TSV (id, phrase, equivalent)")
        ->required();
    cmd->add_option("--lemmas", opts->lemmas, "Lemma dictionary TSV");
    cmd->add_option("--max-gap", opts->max_gap, "Max intervening tokens inside a match");
    cmd->add_option("--output", opts->output, "Annotation sidecar TSV")->required();
    cmd->add_option("--flag-src", opts->flag_src, "Also write the source with <idm> flags");
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto lemmas = load_lemmas(opts->lemmas);
      auto entries = load_idiom_dictionary(opts->dict, lemmas);
      auto pairs = zip_bitext(read_corpus(opts->src), read_corpus(opts->tgt));
      auto annotated =
          annotate_corpus(std::move(pairs), entries, lemmas, opts->max_gap, opts->common.workers);
      write_annotations(annotated, opts->output);
      if (!opts->flag_src.empty()) {
        std::vector<Sentence> flagged;
        flagged.reserve(annotated.pairs.size());
        for (const auto& pair : annotated.pairs) {
          flagged.push_back(pair.labels.empty() ? pair.src : prepend_flag(pair.src));
        }
        write_corpus(flagged, opts->flag_src);
      }

      Manifest manifest("idiom-annotate");
      manifest.param("max_gap", static_cast<std::uint64_t>(opts->max_gap));
      manifest.input(opts->src);
      manifest.input(opts->tgt);
      manifest.input(opts->dict);
      if (!opts->lemmas.empty()) manifest.input(opts->lemmas);
      manifest.output(opts->output);
      if (!opts->flag_src.empty()) manifest.output(opts->flag_src);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<SplitOpts>();
    auto* cmd = app.add_subcommand(
        "idiom-split", "Build train/test sets with every test idiom covered in training");
    cmd->add_option("--src", opts->src, "Source corpus")->required();
    cmd->add_option("--tgt", opts->tgt, "Target corpus")->required();
    cmd->add_option("--dict", opts->dict, "Idiom dictionary TSV")->required();
    cmd->add_option("--lemmas", opts->lemmas, "Lemma dictionary TSV");
    cmd->add_option("--max-gap", opts->max_gap, "Max intervening tokens inside a match");
    cmd->add_option("--test-size", opts->test_size, "Number of test pairs")->required();
    cmd->add_option("--out-prefix", opts->out_prefix, "Prefix for .train/.test .src/.tgt files")
        ->required();
    add_common(cmd, opts->common, /*seed_required=*/true);
    cmd->callback([opts] {
      auto lemmas = load_lemmas(opts->lemmas);
      auto entries = load_idiom_dictionary(opts->dict, lemmas);
      auto pairs = zip_bitext(read_corpus(opts->src), read_corpus(opts->tgt));
      auto annotated =
          annotate_corpus(std::move(pairs), entries, lemmas, opts->max_gap, opts->common.workers);
      auto plan = build_split(annotated, opts->test_size, opts->common.seed);

      auto write_side = [&](const std::vector<std::size_t>& ids, const std::string& path,
                            bool source_side) {
        std::vector<Sentence> out;
        out.reserve(ids.size());
        for (std::size_t id : ids) {
          out.push_back(source_side ? annotated.pairs[id].src : annotated.pairs[id].tgt);
        }
        write_corpus(out, path);
      };
      write_side(plan.train_ids, opts->out_prefix + ".train.src", true);
      write_side(plan.train_ids, opts->out_prefix + ".train.tgt", false);
      write_side(plan.test_ids, opts->out_prefix + ".test.src", true);
      write_side(plan.test_ids, opts->out_prefix + ".test.tgt", false);

      std::ofstream summary(opts->out_prefix + ".split.tsv");
      if (!summary) throw Error("cannot write split summary");
      summary << "idiom\ttrain\ttest\n";
      for (const auto& [idiom, train_count] : plan.train_counts) {
        auto it = plan.test_counts.find(idiom);
        summary << idiom << '\t' << train_count << '\t'
                << (it == plan.test_counts.end() ? 0 : it->second) << '\n';
      }
      std::fprintf(stderr, "split: %zu train pairs, %zu test pairs\n", plan.train_ids.size(),
                   plan.test_ids.size());

      Manifest manifest("idiom-split");
      manifest.seed(opts->common.seed);
      manifest.param("test_size", static_cast<std::uint64_t>(opts->test_size));
      manifest.param("max_gap", static_cast<std::uint64_t>(opts->max_gap));
      manifest.input(opts->src);
      manifest.input(opts->tgt);
      manifest.input(opts->dict);
      if (!opts->lemmas.empty()) manifest.input(opts->lemmas);
      for (const char* suffix : {".train.src", ".train.tgt", ".test.src", ".test.tgt"}) {
        manifest.output(opts->out_prefix + suffix);
      }
      finish_manifest(manifest, opts->common, opts->out_prefix + ".split.tsv");
    });
  }
  {
    auto opts = std::make_shared<EvalOpts>();
    auto* cmd = app.add_subcommand(
        "idiom-eval", "Score idiom translations: BLEU, unigram precision, word accuracy");
    cmd->add_option("--src", opts->src, "Source sentences")->required();
    cmd->add_option("--ref", opts->ref, "Reference translations")->required();
    cmd->add_option("--hyp", opts->hyp, "System translations")->required();
    cmd->add_option("--align-ref", opts->align_ref, "src-ref word alignments")->required();
    cmd->add_option("--align-hyp", opts->align_hyp, "src-hyp word alignments")->required();
    cmd->add_option("--dict", opts->dict, "Idiom dictionary TSV")->required();
    cmd->add_option("--lemmas", opts->lemmas, "Lemma dictionary TSV");
    cmd->add_option("--max-gap", opts->max_gap, "Max intervening tokens inside a match");
    cmd->add_option("--output", opts->output, "Per-pair metric TSV")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto lemmas = load_lemmas(opts->lemmas);
      auto entries = load_idiom_dictionary(opts->dict, lemmas);
      std::map<std::string, const IdiomEntry*> by_id;
      for (const auto& entry : entries) by_id[entry.id] = &entry;

      auto src = read_corpus(opts->src);
      auto ref = read_corpus(opts->ref);
      auto hyp = read_corpus(opts->hyp);
      auto ref_pairs = zip_bitext(src, ref, read_alignments(opts->align_ref));
      auto hyp_pairs = zip_bitext(src, hyp, read_alignments(opts->align_hyp));
      auto annotated = annotate_corpus(std::move(ref_pairs), entries, lemmas, opts->max_gap,
                                       opts->common.workers);

      std::ofstream out(opts->output);
      if (!out) throw Error("cannot write metrics: " + opts->output);
      out << "pair_id\tidiom_id\tuni_prec\tword_acc\n";
      double uni_sum = 0.0, acc_sum = 0.0;
      std::size_t scored = 0;
      for (std::size_t i = 0; i < annotated.pairs.size(); ++i) {
        for (const auto& match : annotated.matches[i]) {
          const IdiomEntry& entry = *by_id.at(match.idiom_id);
          // Reference projection: the human translation of the idiom.
          std::vector<std::string> ref_projection;
          try {
            ref_projection = extract_idiom_translation(annotated.pairs[i], match);
          } catch (const EmptyProjection&) {
          }
          double uni = 0.0, acc = 0.0;
          try {
            auto hyp_projection = extract_idiom_translation(hyp_pairs[i], match);
            std::vector<std::vector<std::string>> references{entry.target_equivalent};
            if (!ref_projection.empty()) references.push_back(ref_projection);
            uni = uni_prec(hyp_projection, references);
            auto hits = count_hits(hyp_projection, entry.target_equivalent);
            acc = word_acc(hits.hits, hits.insertions, entry.target_equivalent.size());
          } catch (const EmptyProjection&) {
            // unaligned idiom: zero-hit, all-gold-missed
            uni = 0.0;
            acc = 0.0;
          }
          out << i << '\t' << match.idiom_id << '\t' << uni << '\t' << acc << '\n';
          uni_sum += uni;
          acc_sum += acc;
          ++scored;
        }
      }
      double corpus_bleu = bleu_corpus(hyp, ref);
      std::printf("BLEU = %.2f\n", corpus_bleu);
      if (scored > 0) {
        std::printf("UniPrec = %.4f\nWAcc = %.4f\n(over %zu idiom occurrences)\n",
                    uni_sum / static_cast<double>(scored), acc_sum / static_cast<double>(scored),
                    scored);
      } else {
        std::printf("no idiom matches found\n");
      }

      Manifest manifest("idiom-eval");
      manifest.param("max_gap", static_cast<std::uint64_t>(opts->max_gap));
      for (const auto& path :
           {opts->src, opts->ref, opts->hyp, opts->align_ref, opts->align_hyp, opts->dict}) {
        manifest.input(path);
      }
      if (!opts->lemmas.empty()) manifest.input(opts->lemmas);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
}

}  // namespace mtkit::tools
