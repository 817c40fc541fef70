// Subcommands: vol-generate, vol-assess.

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "common.hpp"
#include "mtkit/corpus.hpp"
#include "mtkit/errors.hpp"
#include "mtkit/volatility.hpp"

namespace mtkit::tools {

namespace {

struct GenerateOpts {
  CommonOpts common;
  std::string src, tgt, output;
  std::string ops = "delete,insert,number,gender";
  std::string adverbs, pronouns, insert_corpus;
  double threshold = 0.5;
};

struct AssessOpts {
  CommonOpts common;
  std::string variations, orig_translations, translations, output;
};

std::vector<std::pair<std::string, std::string>> load_adverbs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open adverb list: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 2) throw FormatError(path, line_no, 1, "expected 'adverb<TAB>translation'");
    out.emplace_back(fields[0], fields[1]);
  }
  return out;
}

PronounMap load_pronouns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pronoun map: " + path);
  PronounMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = split_char(line, '\t');
    if (fields.size() != 3 || (fields[0] != "src" && fields[0] != "tgt")) {
      throw FormatError(path, line_no, 1, "expected 'src|tgt<TAB>from<TAB>to'");
    }
    auto& table = fields[0] == "src" ? map.src : map.tgt;
    table[lowercase(fields[1])] = lowercase(fields[2]);
  }
  return map;
}

}  // namespace

void register_vol_commands(CLI::App& app) {
  {
    auto opts = std::make_shared<GenerateOpts>();
    auto* cmd = app.add_subcommand(
        "vol-generate", "Generate grammatical sentence variations of a parallel test set");
    cmd->add_option("--src", opts->src, "Source corpus")->required();
    cmd->add_option("--tgt", opts->tgt, "Target corpus")->required();
    cmd->add_option("--ops", opts->ops, "Comma list of delete,insert,number,gender");
    cmd->add_option("--adverbs", opts->adverbs, "Adverb pairs TSV (delete op)");
    cmd->add_option("--pronouns", opts->pronouns, "Pronoun map TSV (gender op)");
    cmd->add_option("--insert-corpus", opts->insert_corpus, "Corpus for gap statistics (insert op)");
    cmd->add_option("--threshold", opts->threshold, "Insertion probability threshold");
    cmd->add_option("--output", opts->output, "Variations TSV")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto pairs = zip_bitext(read_corpus(opts->src), read_corpus(opts->tgt));
      std::set<std::string> ops;
      for (const auto& op : split_char(opts->ops, ',')) ops.insert(op);
      for (const auto& op : ops) {
        if (!variation_kind_from(op)) throw Error("unknown variation op: " + op);
      }

      std::vector<std::pair<std::string, std::string>> adverbs;
      if (ops.count("delete")) {
        if (opts->adverbs.empty()) throw Error("the delete op needs --adverbs");
        adverbs = load_adverbs(opts->adverbs);
      }
      PronounMap pronouns;
      if (ops.count("gender")) {
        if (opts->pronouns.empty()) throw Error("the gender op needs --pronouns");
        pronouns = load_pronouns(opts->pronouns);
      }
      GapNGramModel gap_model;
      if (ops.count("insert")) {
        if (opts->insert_corpus.empty()) throw Error("the insert op needs --insert-corpus");
        gap_model = GapNGramModel::train(read_corpus(opts->insert_corpus));
      }

      std::ofstream out(opts->output);
      if (!out) throw Error("cannot write variations: " + opts->output);
      std::size_t n_variations = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string parent_id = std::to_string(i);
        std::vector<Variation> variations;
        if (ops.count("delete")) {
          for (auto& v : gen_delete(pairs[i], parent_id, adverbs)) variations.push_back(std::move(v));
        }
        if (ops.count("insert")) {
          for (auto& v : gen_insert(pairs[i], parent_id, gap_model, opts->threshold)) {
            variations.push_back(std::move(v));
          }
        }
        if (ops.count("number")) {
          for (auto& v : gen_subs_number(pairs[i], parent_id)) variations.push_back(std::move(v));
        }
        if (ops.count("gender")) {
          for (auto& v : gen_subs_gender(pairs[i], parent_id, pronouns)) {
            variations.push_back(std::move(v));
          }
        }
        for (const auto& v : variations) {
          out << v.parent_id << '\t' << variation_kind_name(v.kind) << '\t'
              << v.modified.src.text() << '\t' << v.modified.tgt.text() << '\n';
          ++n_variations;
        }
      }
      std::fprintf(stderr, "generated %zu variations from %zu pairs\n", n_variations, pairs.size());

      Manifest manifest("vol-generate");
      manifest.param("ops", opts->ops);
      manifest.param("threshold", opts->threshold);
      manifest.input(opts->src);
      manifest.input(opts->tgt);
      if (!opts->adverbs.empty()) manifest.input(opts->adverbs);
      if (!opts->pronouns.empty()) manifest.input(opts->pronouns);
      if (!opts->insert_corpus.empty()) manifest.input(opts->insert_corpus);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
  {
    auto opts = std::make_shared<AssessOpts>();
    auto* cmd = app.add_subcommand(
        "vol-assess", "Assess volatility of externally produced variation translations");
    cmd->add_option("--variations", opts->variations, "Variations TSV from vol-generate")
        ->required();
    cmd->add_option("--orig-translations", opts->orig_translations,
                    "Translations of the original pairs, line k = parent id k")
        ->required();
    cmd->add_option("--translations", opts->translations,
                    "Translations of the variations, line k = variations row k")
        ->required();
    cmd->add_option("--output", opts->output, "Per-variation report TSV")->required();
    add_common(cmd, opts->common);
    cmd->callback([opts] {
      auto originals = read_corpus(opts->orig_translations);
      auto translations = read_corpus(opts->translations);

      std::ifstream vars(opts->variations);
      if (!vars) throw Error("cannot open variations: " + opts->variations);
      std::vector<TranslatedVariation> variations;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(vars, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_char(line, '\t');
        if (fields.size() != 4) {
          throw FormatError(opts->variations, line_no, 1,
                            "expected 'parent_id<TAB>kind<TAB>src<TAB>tgt'");
        }
        auto kind = variation_kind_from(fields[1]);
        if (!kind) throw FormatError(opts->variations, line_no, 2, "unknown kind " + fields[1]);
        TranslatedVariation v;
        v.variation_id = std::to_string(variations.size());
        v.parent_id = fields[0];
        v.kind = *kind;
        v.reference = Sentence{split_ws(fields[3])};
        if (variations.size() >= translations.size()) {
          throw Error("more variation rows than translation lines");
        }
        v.translation = translations[variations.size()];
        variations.push_back(std::move(v));
      }
      if (variations.size() != translations.size()) {
        throw LengthMismatch(variations.size(), translations.size());
      }

      std::map<std::string, Sentence> parent_translations;
      for (std::size_t i = 0; i < originals.size(); ++i) {
        parent_translations[std::to_string(i)] = originals[i];
      }
      auto report = assess_volatility(variations, parent_translations);

      std::ofstream out(opts->output);
      if (!out) throw Error("cannot write report: " + opts->output);
      out << "variation_id\tparent_id\tkind\tlevenshtein\tspan\tclass\tbleu\tlength_ratio\t"
             "edit_rate\n";
      for (const auto& a : report.assessments) {
        out << a.variation_id << '\t' << a.parent_id << '\t' << variation_kind_name(a.kind) << '\t'
            << a.lev << '\t' << a.span << '\t' << change_class_name(a.cls) << '\t' << a.bleu
            << '\t' << a.len_ratio << '\t' << a.edit_rate << '\n';
      }
      out << "# oscillation ranges per parent\n";
      out << "parent_id\tn\tbleu_range\tlength_ratio_range\tedit_rate_range\n";
      for (const auto& o : report.oscillations) {
        out << o.parent_id << '\t' << o.n_variations << '\t' << o.bleu_range << '\t'
            << o.len_ratio_range << '\t' << o.edit_rate_range << '\n';
      }
      std::printf("variations: %zu  minor %.1f%%  major %.1f%%  mixed %.1f%%\n",
                  report.assessments.size(), 100.0 * report.minor_fraction,
                  100.0 * report.major_fraction, 100.0 * report.mixed_fraction);
      std::printf("mean oscillation: bleu %.2f  length_ratio %.2f  edit_rate %.3f\n",
                  report.mean_bleu_oscillation, report.mean_len_ratio_oscillation,
                  report.mean_edit_rate_oscillation);

      Manifest manifest("vol-assess");
      manifest.input(opts->variations);
      manifest.input(opts->orig_translations);
      manifest.input(opts->translations);
      manifest.output(opts->output);
      finish_manifest(manifest, opts->common, opts->output);
    });
  }
}

}  // namespace mtkit::tools
