#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppc/nlp.hpp"

namespace ppc {

class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::size_t dimension) : values_(dimension, 0.0) {}
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dimension() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  double dot(const EmbeddingVector& other) const;
  double norm() const;
  bool is_zero() const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

// Pre-trained word vectors in the plain "word v1 ... vd" format.
class WordVectorStore {
 public:
  WordVectorStore() = default;
  explicit WordVectorStore(std::size_t dimension) : dimension_(dimension) {}

  static WordVectorStore parse(std::istream& in, const std::string& source = "<vectors>");

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  // Lower-cases the key. Keeps the first entry on duplicates.
  void insert(std::string_view word, EmbeddingVector v);
  const EmbeddingVector* find(std::string_view word) const;

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, EmbeddingVector> vectors_;
};

WordVectorStore load_vectors(const std::filesystem::path& path);

// Mean of the in-vocabulary token vectors; zero vector when none is known.
EmbeddingVector embed_tokens(std::span<const std::string> tokens, const WordVectorStore& store);
EmbeddingVector embed_sentence(const ProcessedSentence& ps, const WordVectorStore& store);

// 0 when either vector has zero norm. Throws on dimension mismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

EmbeddingVector centroid(std::span<const EmbeddingVector> vectors);

}  // namespace ppc
