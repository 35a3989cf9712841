#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ppc/embeddings.hpp"
#include "ppc/nlp.hpp"
#include "ppc/taxonomy.hpp"

namespace ppc {

struct CorpusRecord {
  std::string policy_id;
  std::size_t index = 0;
  std::string raw_text;
  std::vector<std::string> tokens;  // normalized
  std::vector<MetadataType> labels;

  bool operator==(const CorpusRecord&) const = default;
};

struct AnnotatedCorpus {
  std::vector<CorpusRecord> records;

  std::vector<std::string> policy_ids() const;  // in first-seen order
  bool operator==(const AnnotatedCorpus&) const = default;
};

// Labeled t or one of its descendants.
bool is_positive(const CorpusRecord& r, const MetadataType& t);
// Not positive, and labeled with some other type at t's level.
bool is_negative(const CorpusRecord& r, const MetadataType& t);

// ---------------------------------------------------------------------------
// Linear max-margin classifier

struct LinearModel {
  MetadataType target;
  std::vector<double> weights;
  double bias = 0.0;
  std::uint64_t seed = 0;

  std::size_t dimension() const noexcept { return weights.size(); }
  double score(const EmbeddingVector& v) const;
  bool operator==(const LinearModel&) const = default;
};

struct TrainOptions {
  std::size_t epochs = 300;
  double c = 1.0;
};

struct TrainResult {
  LinearModel model;
  std::size_t positives = 0;
  std::size_t negatives_available = 0;
  std::size_t negatives_sampled = 0;
};

// Indices of the balanced training set: all positives, then negatives
// sampled without replacement down to the positive count.
struct TrainingSelection {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  std::size_t negatives_available = 0;
};

TrainingSelection select_training_records(const AnnotatedCorpus& corpus, const MetadataType& t, std::uint64_t seed);

// `embeddings[i]` belongs to `corpus.records[i]`. Throws when t has no
// positive or no negative example, or is not a level-1/2 type.
TrainResult train_binary(const AnnotatedCorpus& corpus, std::span<const EmbeddingVector> embeddings,
                         const MetadataType& t, std::uint64_t seed, const TrainOptions& options = {});
TrainResult train_binary(const AnnotatedCorpus& corpus, const MetadataType& t, const WordVectorStore& store,
                         std::uint64_t seed, const TrainOptions& options = {});

// Strict: a score of exactly zero is negative.
bool predict_ml(const LinearModel& model, const EmbeddingVector& v);

// ---------------------------------------------------------------------------
// Centroid similarity

struct SimilarityModel {
  std::map<MetadataType, EmbeddingVector> centroids;
  double threshold = 0.9;

  bool operator==(const SimilarityModel&) const = default;
};

// Types without positives are left out.
SimilarityModel build_similarity_model(const AnnotatedCorpus& corpus, std::span<const EmbeddingVector> embeddings,
                                       std::span<const MetadataType> types, double threshold = 0.9);
SimilarityModel build_similarity_model(const AnnotatedCorpus& corpus, std::span<const MetadataType> types,
                                       double threshold, const WordVectorStore& store);

bool predict_similarity(const SimilarityModel& model, const EmbeddingVector& v, const MetadataType& t);
std::set<MetadataType> similar_types(const SimilarityModel& model, const EmbeddingVector& v);

struct DevExample {
  EmbeddingVector vector;
  std::vector<MetadataType> labels;
};

struct ThresholdSweep {
  double best = 0.9;
  // (candidate, F2) for every candidate evaluated; F2 < 0 means undefined.
  std::vector<std::pair<double, double>> curve;
};

// Picks the threshold maximizing micro F2 of similarity-only prediction
// over the model's types; ties go to the larger threshold.
ThresholdSweep tune_threshold(const SimilarityModel& model, std::span<const DevExample> dev, double lo = 0.5,
                              double hi = 0.9, double step = 0.01);

// ---------------------------------------------------------------------------
// Model set for a taxonomy

struct TrainedModels {
  std::size_t dimension = 0;
  std::map<MetadataType, LinearModel> linear;
  SimilarityModel similarity;

  bool operator==(const TrainedModels&) const = default;
};

struct TrainingSummaryRow {
  MetadataType type;
  std::size_t positives = 0;
  std::size_t negatives_available = 0;
  std::size_t negatives_sampled = 0;
  bool trained = false;
};

struct TrainingRun {
  TrainedModels models;
  std::vector<TrainingSummaryRow> summary;  // one row per level-1/2 non-structural type
};

// Every non-structural level-1/2 type with a positive and a negative gets a
// linear model and a centroid; the others are listed as skipped.
TrainingRun train_models(const AnnotatedCorpus& corpus, const TaxonomyRegistry& registry,
                         const WordVectorStore& store, std::uint64_t seed, double threshold = 0.9,
                         const TrainOptions& options = {});

std::vector<MetadataType> trainable_types(const TaxonomyRegistry& registry);

// ---------------------------------------------------------------------------
// Keywords

class KeywordIndex {
 public:
  struct Entry {
    MetadataType type;
    std::string phrase;               // as written
    std::vector<std::string> tokens;  // normalized

    bool operator==(const Entry&) const = default;
  };

  // "Type.Path<TAB>phrase" lines, phrases normalized with `nlp`.
  static KeywordIndex parse(std::string_view text, const TaxonomyRegistry& registry, const NlpConfig& nlp,
                            const std::string& source = "<keywords>");

  void add(const MetadataType& type, std::string phrase, std::vector<std::string> tokens);
  std::set<MetadataType> match(std::span<const std::string> tokens) const;
  std::string serialize() const;

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::set<MetadataType> types() const;

 private:
  std::vector<Entry> entries_;
};

const KeywordIndex& default_keyword_index();

std::set<MetadataType> predict_keywords(const KeywordIndex& index, const ProcessedSentence& ps);

}  // namespace ppc
