#include "mtkit/word_vectors.hpp"

#include <cmath>
#include <fstream>

#include "mtkit/errors.hpp"
#include "mtkit/text.hpp"

namespace mtkit {

void WordVectors::set(std::string_view word, std::vector<float> vec) {
  if (dim_ == 0) dim_ = vec.size();
  if (vec.size() != dim_) throw Error("vector dimension mismatch for word " + std::string(word));
  table_[std::string(word)] = std::move(vec);
}

const std::vector<float>* WordVectors::get(std::string_view word) const {
  auto it = table_.find(std::string(word));
  return it == table_.end() ? nullptr : &it->second;
}

void WordVectors::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write word vectors: " + path);
  out << table_.size() << ' ' << dim_ << '\n';
  out.precision(9);
  for (const auto& [word, vec] : table_) {
    out << word;
    for (float v : vec) out << ' ' << v;
    out << '\n';
  }
}

WordVectors WordVectors::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vectors: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path, 1, 1, "missing header");
  auto header = split_ws(line);
  if (header.size() != 2) throw FormatError(path, 1, 1, "expected 'vocab_size dim' header");
  std::size_t dim = std::stoull(header[1]);
  WordVectors vectors(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() != dim + 1) throw FormatError(path, line_no, 1, "wrong number of fields");
    std::vector<float> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) vec[i] = std::stof(fields[i + 1]);
    vectors.set(fields[0], std::move(vec));
  }
  return vectors;
}

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

}  // namespace mtkit
