#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ppc/classifiers.hpp"
#include "ppc/criteria.hpp"
#include "ppc/metrics.hpp"
#include "ppc/prediction.hpp"

namespace ppc {

// Gold sentences per type for every policy of a corpus, keyed by policy id.
std::map<std::string, PolicyMetadataPresence> gold_presence(const AnnotatedCorpus& corpus);

// Manifestation of t in one policy. Predicted sentences disjoint from the
// gold ones count as both FP and FN.
ConfusionCounts count_manifestations(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold);
ConfusionCounts count_manifestations(const PolicyMetadataPresence& predicted, const PolicyMetadataPresence& gold,
                                     const MetadataType& t);

// Criteria with several required groups are counted per group, the others
// once per criterion. Non-applicable criteria contribute TN units.
ConfusionCounts count_issues(const Finding& predicted, const Finding& gold, const Criterion& c);

// Types scored for manifestations: everything except structural roots and
// the identity types filled in by name lookup.
std::vector<MetadataType> evaluated_types(const TaxonomyRegistry& registry);

// Keyword-only identification: t is present when one of its phrases occurs
// in some sentence.
PolicyMetadataPresence baseline_identify(std::span<const ProcessedSentence> sentences, const KeywordIndex& index);
PolicyMetadataPresence baseline_identify(std::span<const std::vector<std::string>> sentence_tokens,
                                         const KeywordIndex& index);

struct TableRow {
  std::string label;
  ConfusionCounts counts;
  MetricSet metrics;
};

struct MetricTable {
  std::string title;
  std::vector<TableRow> rows;
  TableRow summary;  // micro average over rows
};

MetricTable make_table(std::string title, std::span<const std::pair<std::string, ConfusionCounts>> rows,
                       double beta = 2.0);

// Percentages with one decimal; "n/a" for undefined metrics.
std::string format_percent(const std::optional<double>& v);
std::string render_table_text(const MetricTable& t);
std::string render_table_tsv(const MetricTable& t);

// Per-policy contribution; merged with merge().
struct EvaluationCounts {
  std::map<MetadataType, ConfusionCounts> manifestations;
  std::map<std::string, ConfusionCounts> issues;

  EvaluationCounts& merge(const EvaluationCounts& o);
};

EvaluationCounts evaluate_policy(const PolicyMetadataPresence& predicted, const PolicyMetadataPresence& gold,
                                 const QuestionnaireAnswers& answers, std::span<const Criterion> criteria,
                                 std::span<const MetadataType> types);

struct EvaluationTables {
  MetricTable manifestations;
  MetricTable issues;
};

EvaluationTables make_tables(const EvaluationCounts& counts, std::span<const MetadataType> types,
                             std::span<const Criterion> criteria);

}  // namespace ppc
