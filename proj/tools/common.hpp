#ifndef MTKIT_TOOLS_COMMON_HPP
#define MTKIT_TOOLS_COMMON_HPP

#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "mtkit/manifest.hpp"

namespace mtkit::tools {

struct CommonOpts {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string manifest_path;
};

// --seed/--workers/--config/--manifest on every subcommand. Values from the
// config file are defaults; command-line flags win (CLI11 semantics).
inline void add_common(CLI::App* cmd, CommonOpts& opts, bool seed_required = false) {
  auto* seed = cmd->add_option("--seed", opts.seed, "Global random seed");
  if (seed_required) seed->required();
  cmd->add_option("--workers", opts.workers, "Worker thread count")
      ->envname("MTKIT_WORKERS")
      ->check(CLI::PositiveNumber);
  cmd->set_config("--config", "", "INI-style config file (flags win)");
  cmd->add_option("--manifest", opts.manifest_path,
                  "Manifest path (default: first output + .manifest)");
}

inline void finish_manifest(Manifest& manifest, const CommonOpts& opts,
                            const std::string& default_target) {
  std::string path = opts.manifest_path.empty() ? default_target + ".manifest" : opts.manifest_path;
  manifest.write(path);
}

void register_corpus_commands(CLI::App& app);
void register_tda_commands(CLI::App& app);
void register_bt_commands(CLI::App& app);
void register_idiom_commands(CLI::App& app);
void register_vol_commands(CLI::App& app);
void register_emb_commands(CLI::App& app);

}  // namespace mtkit::tools

#endif  // MTKIT_TOOLS_COMMON_HPP
