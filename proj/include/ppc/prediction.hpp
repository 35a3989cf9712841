#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppc/classifiers.hpp"
#include "ppc/embeddings.hpp"
#include "ppc/nlp.hpp"
#include "ppc/taxonomy.hpp"

namespace ppc {

// Classifier verdicts for one sentence: the types each classifier fired on.
struct Verdicts {
  std::set<MetadataType> ml;
  std::set<MetadataType> sim;
  std::set<MetadataType> kw;

  bool operator==(const Verdicts&) const = default;
};

struct PredictionContext {
  const TaxonomyRegistry* registry = nullptr;
  std::vector<Verdicts> verdicts;       // per sentence
  std::vector<std::string> raw_texts;   // per sentence, for the identity lookup
  std::string controller_id;            // Q1
  std::string representative_id;        // Q5, may be empty
};

struct SentencePrediction {
  std::size_t index = 0;
  std::set<MetadataType> labels;

  bool operator==(const SentencePrediction&) const = default;
};

// Fuses the verdicts of one sentence. Throws on an index outside the context.
SentencePrediction predict_sentence(const PredictionContext& ctx, std::size_t index);
std::vector<SentencePrediction> predict_all(const PredictionContext& ctx);

// Families subject to the context-window filter.
const std::vector<std::string>& filtered_families();
// Number of level-2 children of the family root.
std::size_t family_window(const TaxonomyRegistry& registry, const MetadataType& root);

// Drops level-2/3 labels of a filtered family when no other sentence within
// the family window carries a label of that family. Decisions use the input
// state only.
std::vector<SentencePrediction> post_process(std::span<const SentencePrediction> predictions,
                                             const TaxonomyRegistry& registry);

class PolicyMetadataPresence {
 public:
  void add(const MetadataType& t, std::size_t sentence);
  // t itself or any descendant carries a sentence.
  bool present(const MetadataType& t) const;
  // Sentences of t and its descendants.
  std::set<std::size_t> evidence(const MetadataType& t) const;
  // Exact labels as recorded.
  const std::map<MetadataType, std::set<std::size_t>>& labels() const noexcept { return labels_; }

  bool operator==(const PolicyMetadataPresence&) const = default;

 private:
  std::map<MetadataType, std::set<std::size_t>> labels_;
};

PolicyMetadataPresence presence_of(std::span<const SentencePrediction> predictions);

// Verdicts that reproduce gold labels: non-structural level-1 ancestors go
// to ml and sim, level-2 ancestors to all three, level-3 labels to kw.
Verdicts oracle_verdicts(std::span<const MetadataType> labels, const TaxonomyRegistry& registry);

Verdicts classify_sentence(const ProcessedSentence& ps, const EmbeddingVector& v, const TrainedModels& models,
                           const KeywordIndex& keywords);

struct DocumentAnalysis {
  std::string id;
  std::vector<ProcessedSentence> sentences;
  std::vector<SentencePrediction> fused;      // before the context filter
  std::vector<SentencePrediction> predictions;
  PolicyMetadataPresence presence;
};

// Runs the whole identification phase on one document.
DocumentAnalysis identify_metadata(const RawDocument& doc, const NlpConfig& nlp, const WordVectorStore& store,
                                   const TrainedModels& models, const KeywordIndex& keywords,
                                   const TaxonomyRegistry& registry, std::string_view controller_id,
                                   std::string_view representative_id);

// Same as above with verdicts supplied by the caller, one per sentence.
DocumentAnalysis identify_with_verdicts(std::string id, std::vector<std::string> raw_texts,
                                        std::vector<Verdicts> verdicts, const TaxonomyRegistry& registry,
                                        std::string_view controller_id, std::string_view representative_id);

// Oracle mode: verdicts derived from the gold labels of one policy's
// records. Sentence positions follow the record indices.
DocumentAnalysis identify_oracle(const AnnotatedCorpus& corpus, std::string_view policy_id,
                                 const TaxonomyRegistry& registry, std::string_view controller_id,
                                 std::string_view representative_id);

// "doc<TAB>index<TAB>Type.Path" lines.
std::string dump_predictions(std::string_view doc_id, std::span<const SentencePrediction> predictions);

}  // namespace ppc
