#ifndef MTKIT_RNG_HPP
#define MTKIT_RNG_HPP

#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

namespace mtkit {

// SplitMix64. Self-contained so that seeded runs are byte-identical across
// platforms and standard libraries (std distributions make no such promise).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    shuffle(idx);
    return idx;
  }

 private:
  std::uint64_t state_;
};

// 64-bit FNV-1a; used for seed derivation and manifest content hashes.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
  return r.next();
}

// Derives an independent stream seed for (task, item, pass) from one global
// seed, so any subcommand or worker can be re-run in isolation.
inline std::uint64_t derive_seed(std::uint64_t global, std::string_view task, std::uint64_t item = 0,
                                 std::uint64_t pass = 0) {
  std::uint64_t h = fnv1a64(task);
  h = mix_seed(h, global);
  h = mix_seed(h, item + 1);
  h = mix_seed(h, pass + 1);
  return h;
}

}  // namespace mtkit

#endif  // MTKIT_RNG_HPP
