#ifndef MTKIT_MANIFEST_HPP
#define MTKIT_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mtkit {

std::uint64_t hash_file(const std::string& path);

// Sidecar record of one CLI run: inputs, parameters, seed, content hashes.
// Identical manifests imply byte-identical outputs.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  void param(const std::string& key, const std::string& value);
  void param(const std::string& key, std::uint64_t value);
  void param(const std::string& key, double value);
  void seed(std::uint64_t seed) { seed_ = seed; }
  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const std::string& path) { outputs_.push_back(path); }

  void write(const std::string& path) const;

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
};

// Flat INI-style "key = value" file; '#' and ';' start comments. Flags given
// on the command line win over file values.
std::map<std::string, std::string> load_config_file(const std::string& path);

}  // namespace mtkit

#endif  // MTKIT_MANIFEST_HPP
