#ifndef MTKIT_TOKEN_INDEX_HPP
#define MTKIT_TOKEN_INDEX_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtkit {

// Bidirectional surface <-> dense id map used by the count models and the
// embedding trainer.
class TokenIndex {
 public:
  std::uint32_t intern(std::string_view surface) {
    auto it = index_.find(std::string(surface));
    if (it != index_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(surfaces_.size());
    surfaces_.emplace_back(surface);
    index_.emplace(surfaces_.back(), id);
    return id;
  }

  std::optional<std::uint32_t> lookup(std::string_view surface) const {
    auto it = index_.find(std::string(surface));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& surface(std::uint32_t id) const { return surfaces_[id]; }
  std::size_t size() const { return surfaces_.size(); }

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct IdSeqHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace mtkit

#endif  // MTKIT_TOKEN_INDEX_HPP
