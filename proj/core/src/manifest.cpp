#include "mtkit/manifest.hpp"

#include <fstream>
#include <sstream>

#include "mtkit/errors.hpp"
#include "mtkit/rng.hpp"

namespace mtkit {

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    h = fnv1a64(std::string_view(buffer, static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

void Manifest::param(const std::string& key, const std::string& value) {
  params_.emplace_back(key, value);
}
void Manifest::param(const std::string& key, std::uint64_t value) {
  params_.emplace_back(key, std::to_string(value));
}
void Manifest::param(const std::string& key, double value) {
  std::ostringstream out;
  out.precision(12);
  out << value;
  params_.emplace_back(key, out.str());
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << "subcommand " << subcommand_ << '\n';
  if (seed_) out << "seed " << *seed_ << '\n';
  for (const auto& [key, value] : params_) out << "param " << key << '=' << value << '\n';
  out << std::hex;
  for (const auto& input : inputs_) out << "input " << input << " fnv64=" << hash_file(input) << '\n';
  for (const auto& output : outputs_) {
    out << "output " << output << " fnv64=" << hash_file(output) << '\n';
  }
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '[') continue;  // sections are ignored
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw FormatError(path, line_no, 1, "expected 'key = value'");
    std::string key = trim(trimmed.substr(0, eq));
    std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) throw FormatError(path, line_no, 1, "empty config key");
    out[key] = value;
  }
  return out;
}

}  // namespace mtkit
