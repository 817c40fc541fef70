#ifndef MTKIT_WORD_VECTORS_HPP
#define MTKIT_WORD_VECTORS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtkit {

// Plain per-word vectors (the context-similarity and paraphrase consumers do
// not care about topics).
class WordVectors {
 public:
  WordVectors() = default;
  explicit WordVectors(std::size_t dim) : dim_(dim) {}

  void set(std::string_view word, std::vector<float> vec);
  const std::vector<float>* get(std::string_view word) const;
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }

  void save(const std::string& path) const;
  static WordVectors load(const std::string& path);

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> table_;
};

double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace mtkit

#endif  // MTKIT_WORD_VECTORS_HPP
