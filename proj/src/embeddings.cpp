#include "ppc/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("embedding component is not finite");
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  if (other.dimension() != dimension())
    throw Error("dimension mismatch: " + std::to_string(dimension()) + " vs " +
                std::to_string(other.dimension()));
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

double EmbeddingVector::norm() const { return std::sqrt(dot(*this)); }

bool EmbeddingVector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

WordVectorStore WordVectorStore::parse(std::istream& in, const std::string& source) {
  WordVectorStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::replace(line.begin(), line.end(), '\t', ' ');
    auto fields = split(trim(line), ' ');
    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].empty()) continue;
      double v = 0;
      if (!parse_double(fields[i], v))
        throw ParseError(source, line_no, "non-numeric component '" + std::string(fields[i]) + "'");
      values.push_back(v);
    }
    if (values.empty()) throw ParseError(source, line_no, "word without components");
    if (store.dimension_ == 0) store.dimension_ = values.size();
    if (values.size() != store.dimension_)
      throw ParseError(source, line_no,
                       "expected " + std::to_string(store.dimension_) + " components, found " +
                           std::to_string(values.size()));
    store.insert(fields[0], EmbeddingVector(std::move(values)));
  }
  if (store.vectors_.empty()) throw ParseError(source, 0, "no word vectors");
  return store;
}

void WordVectorStore::insert(std::string_view word, EmbeddingVector v) {
  if (dimension_ == 0) dimension_ = v.dimension();
  if (v.dimension() != dimension_) throw Error("vector for '" + std::string(word) + "' has wrong dimension");
  vectors_.emplace(to_lower(word), std::move(v));
}

const EmbeddingVector* WordVectorStore::find(std::string_view word) const {
  auto it = vectors_.find(to_lower(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

WordVectorStore load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vectors '" + path.string() + "'");
  return WordVectorStore::parse(in, path.string());
}

EmbeddingVector embed_tokens(std::span<const std::string> tokens, const WordVectorStore& store) {
  // Summing in lexical order makes the mean independent of token order.
  std::vector<const std::string*> order;
  for (const auto& t : tokens) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const std::string* a, const std::string* b) { return *a < *b; });

  std::vector<double> sum(store.dimension(), 0.0);
  std::size_t known = 0;
  for (const std::string* t : order) {
    const EmbeddingVector* v = store.find(*t);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++known;
  }
  if (known > 0)
    for (double& x : sum) x /= static_cast<double>(known);
  return EmbeddingVector(std::move(sum));
}

EmbeddingVector embed_sentence(const ProcessedSentence& ps, const WordVectorStore& store) {
  return embed_tokens(ps.tokens, store);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  double d = a.dot(b);
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(d / (na * nb), -1.0, 1.0);
}

EmbeddingVector centroid(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) throw Error("centroid of an empty list");
  const std::size_t dim = vectors.front().dimension();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.dimension() != dim) throw Error("dimension mismatch in centroid");
    for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
  }
  for (double& x : sum) x /= static_cast<double>(vectors.size());
  return EmbeddingVector(std::move(sum));
}

}  // namespace ppc
