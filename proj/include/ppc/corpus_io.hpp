#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppc/classifiers.hpp"
#include "ppc/criteria.hpp"
#include "ppc/metrics.hpp"
#include "ppc/nlp.hpp"
#include "ppc/taxonomy.hpp"

namespace ppc {

// "<policy>\t<index>\t<raw text>\t<label;label;...>" per line. Tokens are
// filled in with normalize_text.
AnnotatedCorpus parse_corpus(std::string_view text, const TaxonomyRegistry& registry, const NlpConfig& nlp,
                             const std::string& source = "<corpus>");
AnnotatedCorpus load_corpus(const std::filesystem::path& path, const TaxonomyRegistry& registry,
                            const NlpConfig& nlp = default_nlp_config());
std::string serialize_corpus(const AnnotatedCorpus& corpus);
void save_corpus(const std::filesystem::path& path, const AnnotatedCorpus& corpus);

// Records of one policy ordered by index.
std::vector<const CorpusRecord*> records_of(const AnnotatedCorpus& corpus, std::string_view policy_id);

using AnswersMap = std::map<std::string, QuestionnaireAnswers>;

// "[policy <id>]" sections of "key = value" lines. Keys: q1, q2, q3, q4
// (comma list, may be empty), q5, q5_representative, q6.
AnswersMap parse_answers(std::string_view text, const std::string& source = "<answers>");
AnswersMap load_answers(const std::filesystem::path& path);
std::string serialize_answers(const AnswersMap& answers);
void save_answers(const std::filesystem::path& path, const AnswersMap& answers);

std::string serialize_models(const TrainedModels& models);
TrainedModels parse_models(std::string_view text, const TaxonomyRegistry& registry,
                           const std::string& source = "<models>");
void save_models(const std::filesystem::path& path, const TrainedModels& models);
TrainedModels load_models(const std::filesystem::path& path, const TaxonomyRegistry& registry);

// Tab-separated table whose header names the columns row, TP, FP, FN and TN
// (any order, other columns ignored).
std::vector<std::pair<std::string, ConfusionCounts>> parse_counts(std::string_view text,
                                                                  const std::string& source = "<counts>");
std::vector<std::pair<std::string, ConfusionCounts>> load_counts(const std::filesystem::path& path);

}  // namespace ppc
