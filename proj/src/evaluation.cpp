#include "ppc/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "ppc/error.hpp"

namespace ppc {

std::map<std::string, PolicyMetadataPresence> gold_presence(const AnnotatedCorpus& corpus) {
  std::map<std::string, PolicyMetadataPresence> out;
  for (const auto& r : corpus.records) {
    auto& p = out[r.policy_id];
    for (const auto& l : r.labels) p.add(l, r.index);
  }
  return out;
}

ConfusionCounts count_manifestations(const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold) {
  ConfusionCounts c;
  if (predicted.empty()) {
    if (gold.empty()) ++c.tn;
    else ++c.fn;
    return c;
  }
  const bool hit = std::any_of(predicted.begin(), predicted.end(), [&](std::size_t i) { return gold.count(i); });
  if (hit) {
    ++c.tp;
  } else {
    ++c.fp;
    if (!gold.empty()) ++c.fn;
  }
  return c;
}

ConfusionCounts count_manifestations(const PolicyMetadataPresence& predicted, const PolicyMetadataPresence& gold,
                                     const MetadataType& t) {
  return count_manifestations(predicted.evidence(t), gold.evidence(t));
}

namespace {

void tally(ConfusionCounts& c, bool flagged, bool genuine) {
  if (flagged && genuine) ++c.tp;
  else if (flagged) ++c.fp;
  else if (genuine) ++c.fn;
  else ++c.tn;
}

bool group_missing(const Finding& f, const RequirementGroup& g) {
  return is_issue(f.status) && std::find(f.missing.begin(), f.missing.end(), g) != f.missing.end();
}

}  // namespace

ConfusionCounts count_issues(const Finding& predicted, const Finding& gold, const Criterion& c) {
  if (predicted.criterion_id != c.id || gold.criterion_id != c.id)
    throw Error("findings do not belong to criterion " + c.id);
  ConfusionCounts out;
  if (c.postcondition.size() > 1) {
    for (const auto& g : c.postcondition) tally(out, group_missing(predicted, g), group_missing(gold, g));
  } else {
    tally(out, is_issue(predicted.status), is_issue(gold.status));
  }
  return out;
}

std::vector<MetadataType> evaluated_types(const TaxonomyRegistry& registry) {
  std::vector<MetadataType> out;
  for (const auto& n : registry.nodes()) {
    if (n.structural) continue;
    if (n.type.level() == 2 && n.type.name() == "Identity" && registry.is_structural(n.type.root())) continue;
    out.push_back(n.type);
  }
  return out;
}

PolicyMetadataPresence baseline_identify(std::span<const ProcessedSentence> sentences, const KeywordIndex& index) {
  PolicyMetadataPresence p;
  for (const auto& ps : sentences)
    for (const auto& t : predict_keywords(index, ps)) p.add(t, ps.sentence.index);
  return p;
}

PolicyMetadataPresence baseline_identify(std::span<const std::vector<std::string>> sentence_tokens,
                                         const KeywordIndex& index) {
  PolicyMetadataPresence p;
  for (std::size_t i = 0; i < sentence_tokens.size(); ++i)
    for (const auto& t : index.match(sentence_tokens[i])) p.add(t, i);
  return p;
}

MetricTable make_table(std::string title, std::span<const std::pair<std::string, ConfusionCounts>> rows,
                         double beta) {
  MetricTable t;
  t.title = std::move(title);
  ConfusionCounts total;
  for (const auto& [label, c] : rows) {
    t.rows.push_back(TableRow{label, c, metrics(c, beta)});
    total += c;
  }
  t.summary = TableRow{"Summary", total, metrics(total, beta)};
  return t;
}

std::string format_percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
  return buf;
}

namespace {

std::vector<std::string> cells(const TableRow& r) {
  return {r.label,
          std::to_string(r.counts.tp),
          std::to_string(r.counts.fp),
          std::to_string(r.counts.fn),
          std::to_string(r.counts.tn),
          format_percent(r.metrics.accuracy),
          format_percent(r.metrics.precision),
          format_percent(r.metrics.recall),
          format_percent(r.metrics.f_beta)};
}

std::vector<std::string> header() {
  return {"row", "TP", "FP", "FN", "TN", "A", "P", "R", "F2"};
}

}  // namespace

std::string render_table_text(const MetricTable& t) {
  std::vector<std::vector<std::string>> lines{header()};
  for (const auto& r : t.rows) lines.push_back(cells(r));
  lines.push_back(cells(t.summary));

  std::vector<std::size_t> width(lines.front().size(), 0);
  for (const auto& l : lines)
    for (std::size_t i = 0; i < l.size(); ++i) width[i] = std::max(width[i], l[i].size());

  std::string out = t.title.empty() ? "" : t.title + "\n";
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (n + 1 == lines.size()) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
    std::string row;
    for (std::size_t i = 0; i < lines[n].size(); ++i) {
      const auto& cell = lines[n][i];
      const std::string pad(width[i] - cell.size(), ' ');
      row += i == 0 ? cell + pad : pad + cell;
      if (i + 1 < lines[n].size()) row += "  ";
    }
    out += row + "\n";
  }
  return out;
}

std::string render_table_tsv(const MetricTable& t) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& l) {
    for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "\t" : "") + l[i];
    out += "\n";
  };
  emit(header());
  for (const auto& r : t.rows) emit(cells(r));
  emit(cells(t.summary));
  return out;
}

EvaluationCounts& EvaluationCounts::merge(const EvaluationCounts& o) {
  for (const auto& [t, c] : o.manifestations) manifestations[t] += c;
  for (const auto& [id, c] : o.issues) issues[id] += c;
  return *this;
}

EvaluationCounts evaluate_policy(const PolicyMetadataPresence& predicted, const PolicyMetadataPresence& gold,
                                 const QuestionnaireAnswers& answers, std::span<const Criterion> criteria,
                                 std::span<const MetadataType> types) {
  EvaluationCounts out;
  for (const auto& t : types) out.manifestations[t] = count_manifestations(predicted, gold, t);
  for (const auto& c : criteria)
    out.issues[c.id] = count_issues(evaluate(c, answers, predicted), evaluate(c, answers, gold), c);
  return out;
}

EvaluationTables make_tables(const EvaluationCounts& counts, std::span<const MetadataType> types,
                             std::span<const Criterion> criteria) {
  std::vector<std::pair<std::string, ConfusionCounts>> m, i;
  for (const auto& t : types) {
    auto it = counts.manifestations.find(t);
    m.emplace_back(t.str(), it == counts.manifestations.end() ? ConfusionCounts{} : it->second);
  }
  for (const auto& c : criteria) {
    auto it = counts.issues.find(c.id);
    i.emplace_back(c.id, it == counts.issues.end() ? ConfusionCounts{} : it->second);
  }
  return EvaluationTables{make_table("Metadata identification", m), make_table("Completeness checking", i)};
}

}  // namespace ppc
