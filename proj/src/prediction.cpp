#include "ppc/prediction.hpp"

#include <algorithm>

#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

namespace {

bool has(const std::set<MetadataType>& s, const MetadataType& t) { return s.count(t) != 0; }

}  // namespace

SentencePrediction predict_sentence(const PredictionContext& ctx, std::size_t index) {
  if (ctx.registry == nullptr) throw Error("prediction context without registry");
  if (index >= ctx.verdicts.size())
    throw Error("sentence index " + std::to_string(index) + " out of range");
  const TaxonomyRegistry& reg = *ctx.registry;
  const Verdicts& v = ctx.verdicts[index];

  SentencePrediction out;
  out.index = index;
  for (const auto& li : reg.roots()) {
    const bool structural = reg.is_structural(li);
    if (!structural && (has(v.ml, li) || has(v.sim, li))) {
      out.labels.insert(li);
      for (const auto& lj : reg.children(li))
        if (has(v.ml, lj) || has(v.sim, lj)) out.labels.insert(lj);
    } else {
      for (const auto& lj : reg.children(li)) {
        const int votes = int(has(v.ml, lj)) + int(has(v.sim, lj)) + int(has(v.kw, lj));
        if (votes >= 2) out.labels.insert(lj);
      }
    }
  }

  if (index < ctx.raw_texts.size()) {
    const std::string& text = ctx.raw_texts[index];
    if (!ctx.controller_id.empty() && icontains(text, ctx.controller_id)) {
      if (auto t = reg.find("Controller.Identity")) out.labels.insert(*t);
    } else if (!ctx.representative_id.empty() && icontains(text, ctx.representative_id)) {
      if (auto t = reg.find("Controller Representative.Identity")) out.labels.insert(*t);
    }
  }

  std::vector<MetadataType> level2;
  for (const auto& l : out.labels)
    if (l.level() == 2) level2.push_back(l);
  for (const auto& lj : level2)
    for (const auto& lq : reg.children(lj))
      if (has(v.kw, lq)) out.labels.insert(lq);
  return out;
}

std::vector<SentencePrediction> predict_all(const PredictionContext& ctx) {
  std::vector<SentencePrediction> out;
  out.reserve(ctx.verdicts.size());
  for (std::size_t i = 0; i < ctx.verdicts.size(); ++i) out.push_back(predict_sentence(ctx, i));
  return out;
}

const std::vector<std::string>& filtered_families() {
  static const std::vector<std::string> families{"Data Subject Right", "Transfer Outside Europe", "Legal Basis"};
  return families;
}

std::size_t family_window(const TaxonomyRegistry& registry, const MetadataType& root) {
  return registry.children(root.root()).size();
}

std::vector<SentencePrediction> post_process(std::span<const SentencePrediction> predictions,
                                             const TaxonomyRegistry& registry) {
  std::map<MetadataType, std::size_t> windows;
  for (const auto& name : filtered_families())
    if (auto t = registry.find(name)) windows.emplace(*t, family_window(registry, *t));

  auto has_family = [&](std::size_t i, const MetadataType& root) {
    return std::any_of(predictions[i].labels.begin(), predictions[i].labels.end(),
                       [&](const MetadataType& l) { return l.root() == root; });
  };

  std::vector<SentencePrediction> out(predictions.begin(), predictions.end());
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    for (const auto& label : predictions[k].labels) {
      if (label.level() < 2) continue;
      auto w = windows.find(label.root());
      if (w == windows.end()) continue;
      const std::size_t n = w->second;
      const std::size_t lo = k >= n ? k - n : 0;
      const std::size_t hi = std::min(predictions.size() - 1, k + n);
      bool supported = false;
      for (std::size_t j = lo; j <= hi && !supported; ++j)
        if (j != k && has_family(j, w->first)) supported = true;
      if (!supported) out[k].labels.erase(label);
    }
  }
  return out;
}

void PolicyMetadataPresence::add(const MetadataType& t, std::size_t sentence) { labels_[t].insert(sentence); }

bool PolicyMetadataPresence::present(const MetadataType& t) const {
  for (auto it = labels_.lower_bound(t); it != labels_.end() && t.covers(it->first); ++it)
    if (!it->second.empty()) return true;
  return false;
}

std::set<std::size_t> PolicyMetadataPresence::evidence(const MetadataType& t) const {
  std::set<std::size_t> out;
  for (auto it = labels_.lower_bound(t); it != labels_.end() && t.covers(it->first); ++it)
    out.insert(it->second.begin(), it->second.end());
  return out;
}

PolicyMetadataPresence presence_of(std::span<const SentencePrediction> predictions) {
  PolicyMetadataPresence p;
  for (const auto& sp : predictions)
    for (const auto& l : sp.labels) p.add(l, sp.index);
  return p;
}

Verdicts oracle_verdicts(std::span<const MetadataType> labels, const TaxonomyRegistry& registry) {
  Verdicts v;
  for (const auto& label : labels) {
    const MetadataType root = label.root();
    if (!registry.is_structural(root)) {
      v.ml.insert(root);
      v.sim.insert(root);
    }
    if (label.level() >= 2) {
      const MetadataType l2 = label.prefix(2);
      v.ml.insert(l2);
      v.sim.insert(l2);
      v.kw.insert(l2);
    }
    if (label.level() == 3) v.kw.insert(label);
  }
  return v;
}

Verdicts classify_sentence(const ProcessedSentence& ps, const EmbeddingVector& v, const TrainedModels& models,
                           const KeywordIndex& keywords) {
  Verdicts out;
  if (ps.tokens.empty()) return out;
  for (const auto& [t, model] : models.linear)
    if (predict_ml(model, v)) out.ml.insert(t);
  out.sim = similar_types(models.similarity, v);
  out.kw = predict_keywords(keywords, ps);
  return out;
}

DocumentAnalysis identify_with_verdicts(std::string id, std::vector<std::string> raw_texts,
                                        std::vector<Verdicts> verdicts, const TaxonomyRegistry& registry,
                                        std::string_view controller_id, std::string_view representative_id) {
  if (raw_texts.size() != verdicts.size()) throw Error("one verdict set per sentence is required");
  PredictionContext ctx;
  ctx.registry = &registry;
  ctx.verdicts = std::move(verdicts);
  ctx.raw_texts = std::move(raw_texts);
  ctx.controller_id = std::string(trim(controller_id));
  ctx.representative_id = std::string(trim(representative_id));

  DocumentAnalysis a;
  a.id = std::move(id);
  a.fused = predict_all(ctx);
  a.predictions = post_process(a.fused, registry);
  a.presence = presence_of(a.predictions);
  return a;
}

DocumentAnalysis identify_metadata(const RawDocument& doc, const NlpConfig& nlp, const WordVectorStore& store,
                                   const TrainedModels& models, const KeywordIndex& keywords,
                                   const TaxonomyRegistry& registry, std::string_view controller_id,
                                   std::string_view representative_id) {
  if (models.dimension != store.dimension())
    throw Error("models expect dimension " + std::to_string(models.dimension) + " but the vectors have " +
                std::to_string(store.dimension()));
  std::vector<ProcessedSentence> sentences = preprocess(doc, nlp);
  std::vector<std::string> texts;
  std::vector<Verdicts> verdicts;
  for (const auto& ps : sentences) {
    texts.push_back(ps.sentence.raw_text);
    verdicts.push_back(classify_sentence(ps, embed_sentence(ps, store), models, keywords));
  }
  DocumentAnalysis a = identify_with_verdicts(doc.id, std::move(texts), std::move(verdicts), registry,
                                              controller_id, representative_id);
  a.sentences = std::move(sentences);
  return a;
}

DocumentAnalysis identify_oracle(const AnnotatedCorpus& corpus, std::string_view policy_id,
                                 const TaxonomyRegistry& registry, std::string_view controller_id,
                                 std::string_view representative_id) {
  std::size_t count = 0;
  for (const auto& r : corpus.records)
    if (r.policy_id == policy_id) count = std::max(count, r.index + 1);
  if (count == 0) throw Error("no records for policy '" + std::string(policy_id) + "'");
  std::vector<std::string> texts(count);
  std::vector<Verdicts> verdicts(count);
  for (const auto& r : corpus.records) {
    if (r.policy_id != policy_id) continue;
    texts[r.index] = r.raw_text;
    verdicts[r.index] = oracle_verdicts(r.labels, registry);
  }
  return identify_with_verdicts(std::string(policy_id), std::move(texts), std::move(verdicts), registry,
                                controller_id, representative_id);
}

std::string dump_predictions(std::string_view doc_id, std::span<const SentencePrediction> predictions) {
  std::string out;
  for (const auto& sp : predictions)
    for (const auto& l : sp.labels)
      out += std::string(doc_id) + "\t" + std::to_string(sp.index) + "\t" + l.str() + "\n";
  return out;
}

}  // namespace ppc
