#ifndef MTKIT_ERRORS_HPP
#define MTKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mtkit {

// Root of all library errors. CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

// Malformed data in a text resource; carries file/line (1-based) and column when known.
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t line, std::size_t column, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string file_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

class NegativeLoss : public Error {
 public:
  NegativeLoss(const std::string& where, double value)
      : Error(where + ": negative token loss " + std::to_string(value)) {}
};

class InfeasibleSplit : public Error {
 public:
  explicit InfeasibleSplit(const std::string& msg) : Error("infeasible split: " + msg) {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class MissingEmbeddings : public Error {
 public:
  explicit MissingEmbeddings(const std::string& msg) : Error("missing embeddings: " + msg) {}
};

class MissingTopics : public Error {
 public:
  explicit MissingTopics(const std::string& msg) : Error("missing topics: " + msg) {}
};

class UnknownWord : public Error {
 public:
  explicit UnknownWord(const std::string& word) : Error("unknown word: " + word) {}
};

class UnknownTopic : public Error {
 public:
  explicit UnknownTopic(int topic) : Error("unknown topic: " + std::to_string(topic)) {}
};

class EmptyCandidate : public Error {
 public:
  EmptyCandidate() : Error("empty candidate") {}
};

class EmptyContext : public Error {
 public:
  EmptyContext() : Error("empty context") {}
};

class EmptyGold : public Error {
 public:
  EmptyGold() : Error("empty gold standard") {}
};

class EmptyProjection : public Error {
 public:
  EmptyProjection() : Error("idiom match projects to no target token") {}
};

class EmptyReference : public Error {
 public:
  EmptyReference() : Error("empty reference") {}
};

class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& msg) : Error("undefined metric: " + msg) {}
};

class TooFewPairs : public Error {
 public:
  TooFewPairs(std::size_t got, std::size_t need)
      : Error("too few scored pairs: " + std::to_string(got) + " < " + std::to_string(need)) {}
};

class ZeroVariance : public Error {
 public:
  ZeroVariance() : Error("rank correlation undefined: zero variance input") {}
};

}  // namespace mtkit

#endif  // MTKIT_ERRORS_HPP
