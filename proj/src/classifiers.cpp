#include "ppc/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "default_config.hpp"
#include "ppc/error.hpp"
#include "ppc/metrics.hpp"
#include "ppc/util.hpp"

namespace ppc {

std::vector<std::string> AnnotatedCorpus::policy_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : records)
    if (std::find(ids.begin(), ids.end(), r.policy_id) == ids.end()) ids.push_back(r.policy_id);
  return ids;
}

bool is_positive(const CorpusRecord& r, const MetadataType& t) {
  return std::any_of(r.labels.begin(), r.labels.end(), [&](const MetadataType& l) { return t.covers(l); });
}

bool is_negative(const CorpusRecord& r, const MetadataType& t) {
  if (is_positive(r, t)) return false;
  return std::any_of(r.labels.begin(), r.labels.end(),
                     [&](const MetadataType& l) { return l.level() >= t.level(); });
}

namespace {

// Uniform integer in [0, bound) by rejection, independent of the
// standard library's distribution implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

void check_trainable(const MetadataType& t) {
  if (t.level() < 1 || t.level() > 2)
    throw Error("classifiers are trained for level-1 and level-2 types only, not '" + t.str() + "'");
}

}  // namespace

TrainingSelection select_training_records(const AnnotatedCorpus& corpus, const MetadataType& t, std::uint64_t seed) {
  TrainingSelection sel;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (is_positive(corpus.records[i], t)) sel.positives.push_back(i);
    else if (is_negative(corpus.records[i], t)) negatives.push_back(i);
  }
  sel.negatives_available = negatives.size();

  const std::size_t keep = std::min(negatives.size(), sel.positives.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(rng, negatives.size() - i));
    std::swap(negatives[i], negatives[j]);
  }
  negatives.resize(keep);
  sel.negatives = std::move(negatives);
  return sel;
}

double LinearModel::score(const EmbeddingVector& v) const {
  if (v.dimension() != weights.size())
    throw Error("dimension mismatch: model " + std::to_string(weights.size()) + ", vector " +
                std::to_string(v.dimension()));
  double s = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * v[i];
  return s;
}

TrainResult train_binary(const AnnotatedCorpus& corpus, std::span<const EmbeddingVector> embeddings,
                         const MetadataType& t, std::uint64_t seed, const TrainOptions& options) {
  check_trainable(t);
  if (embeddings.size() != corpus.records.size()) throw Error("one embedding per corpus record is required");
  if (!(options.c > 0.0) || options.epochs == 0) throw Error("invalid training options");

  const TrainingSelection sel = select_training_records(corpus, t, seed);
  if (sel.positives.empty()) throw Error("no positive example for '" + t.str() + "'");
  if (sel.negatives.empty()) throw Error("no negative example for '" + t.str() + "'");

  std::vector<const EmbeddingVector*> x;
  std::vector<double> y;
  for (std::size_t i : sel.positives) {
    x.push_back(&embeddings[i]);
    y.push_back(1.0);
  }
  for (std::size_t i : sel.negatives) {
    x.push_back(&embeddings[i]);
    y.push_back(-1.0);
  }
  const std::size_t n = x.size();
  const std::size_t dim = x.front()->dimension();
  for (const auto* v : x)
    if (v->dimension() != dim) throw Error("training embeddings differ in dimension");

  // Primal objective lambda/2 |w|^2 + mean hinge with lambda = 1/(C n),
  // minimized by full-batch subgradient steps of size 1/(lambda t).
  const double lambda = 1.0 / (options.c * static_cast<double>(n));
  std::vector<double> w(dim, 0.0);
  double b = 0.0;

  auto margin = [&](std::size_t i) {
    double s = b;
    for (std::size_t k = 0; k < dim; ++k) s += w[k] * (*x[i])[k];
    return y[i] * s;
  };
  auto objective = [&] {
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss += std::max(0.0, 1.0 - margin(i));
    return 0.5 * lambda * reg + loss / static_cast<double>(n);
  };

  std::vector<double> best_w = w;
  double best_b = b;
  double best_obj = objective();
  std::vector<double> gw(dim);
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (margin(i) >= 1.0) continue;
      for (std::size_t k = 0; k < dim; ++k) gw[k] += y[i] * (*x[i])[k];
      gb += y[i];
    }
    const double eta = 1.0 / (lambda * static_cast<double>(epoch));
    const double shrink = 1.0 - eta * lambda;
    const double step = eta / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      w[k] = shrink * w[k] + step * gw[k];
      sq += w[k] * w[k];
    }
    b += step * gb;
    // Project onto the ball of radius 1/sqrt(lambda).
    const double radius = 1.0 / std::sqrt(lambda);
    if (sq > radius * radius) {
      const double f = radius / std::sqrt(sq);
      for (double& v : w) v *= f;
    }
    const double obj = objective();
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = b;
    }
  }

  TrainResult res;
  res.model.target = t;
  res.model.weights = std::move(best_w);
  res.model.bias = best_b;
  res.model.seed = seed;
  res.positives = sel.positives.size();
  res.negatives_available = sel.negatives_available;
  res.negatives_sampled = sel.negatives.size();
  return res;
}

TrainResult train_binary(const AnnotatedCorpus& corpus, const MetadataType& t, const WordVectorStore& store,
                         std::uint64_t seed, const TrainOptions& options) {
  std::vector<EmbeddingVector> emb;
  emb.reserve(corpus.records.size());
  for (const auto& r : corpus.records) emb.push_back(embed_tokens(r.tokens, store));
  return train_binary(corpus, emb, t, seed, options);
}

bool predict_ml(const LinearModel& model, const EmbeddingVector& v) { return model.score(v) > 0.0; }

SimilarityModel build_similarity_model(const AnnotatedCorpus& corpus, std::span<const EmbeddingVector> embeddings,
                                       std::span<const MetadataType> types, double threshold) {
  if (embeddings.size() != corpus.records.size()) throw Error("one embedding per corpus record is required");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("similarity threshold must be in (0, 1]");
  SimilarityModel model;
  model.threshold = threshold;
  for (const auto& t : types) {
    check_trainable(t);
    std::vector<EmbeddingVector> group;
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
      if (is_positive(corpus.records[i], t)) group.push_back(embeddings[i]);
    if (!group.empty()) model.centroids.emplace(t, centroid(group));
  }
  return model;
}

SimilarityModel build_similarity_model(const AnnotatedCorpus& corpus, std::span<const MetadataType> types,
                                       double threshold, const WordVectorStore& store) {
  std::vector<EmbeddingVector> emb;
  for (const auto& r : corpus.records) emb.push_back(embed_tokens(r.tokens, store));
  return build_similarity_model(corpus, emb, types, threshold);
}

bool predict_similarity(const SimilarityModel& model, const EmbeddingVector& v, const MetadataType& t) {
  auto it = model.centroids.find(t);
  if (it == model.centroids.end()) return false;
  return cosine_similarity(v, it->second) >= model.threshold;
}

std::set<MetadataType> similar_types(const SimilarityModel& model, const EmbeddingVector& v) {
  std::set<MetadataType> out;
  for (const auto& [t, c] : model.centroids)
    if (cosine_similarity(v, c) >= model.threshold) out.insert(t);
  return out;
}

ThresholdSweep tune_threshold(const SimilarityModel& model, std::span<const DevExample> dev, double lo, double hi,
                              double step) {
  constexpr double kEps = 1e-9;
  if (dev.empty()) throw Error("empty development set");
  if (!(step > 0.0) || lo > hi + kEps || lo < 0.5 - kEps || hi > 0.9 + kEps)
    throw Error("threshold range must lie within [0.5, 0.9] with a positive step");

  std::vector<std::vector<double>> cos(dev.size());
  std::vector<std::vector<bool>> gold(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    for (const auto& [t, c] : model.centroids) {
      cos[i].push_back(cosine_similarity(dev[i].vector, c));
      gold[i].push_back(std::any_of(dev[i].labels.begin(), dev[i].labels.end(),
                                    [&](const MetadataType& l) { return t.covers(l); }));
    }
  }

  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  ThresholdSweep sweep;
  double best_f = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = std::round((lo + static_cast<double>(k) * step) * 1e6) / 1e6;
    ConfusionCounts c;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      for (std::size_t j = 0; j < cos[i].size(); ++j) {
        const bool p = cos[i][j] >= theta;
        if (p && gold[i][j]) ++c.tp;
        else if (p) ++c.fp;
        else if (gold[i][j]) ++c.fn;
        else ++c.tn;
      }
    }
    const double f = metrics(c, 2.0).f_beta.value_or(-1.0);
    sweep.curve.emplace_back(theta, f);
    if (f >= best_f) {
      best_f = f;
      sweep.best = theta;
    }
  }
  return sweep;
}

KeywordIndex KeywordIndex::parse(std::string_view text, const TaxonomyRegistry& registry, const NlpConfig& nlp,
                                 const std::string& source) {
  KeywordIndex index;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(source, line_no, "expected 'Type.Path<TAB>phrase'");
    auto type_field = trim(line.substr(0, tab));
    auto phrase = trim(line.substr(tab + 1));
    auto type = registry.find(type_field);
    if (!type) throw ParseError(source, line_no, "unknown metadata type '" + std::string(type_field) + "'");
    auto tokens = normalize_text(phrase, nlp);
    if (tokens.empty())
      throw ParseError(source, line_no, "phrase '" + std::string(phrase) + "' is empty after normalization");
    index.add(*type, std::string(phrase), std::move(tokens));
  }
  return index;
}

void KeywordIndex::add(const MetadataType& type, std::string phrase, std::vector<std::string> tokens) {
  if (tokens.empty()) throw Error("empty keyword phrase");
  entries_.push_back(Entry{type, std::move(phrase), std::move(tokens)});
}

std::set<MetadataType> KeywordIndex::match(std::span<const std::string> tokens) const {
  std::set<MetadataType> out;
  for (const auto& e : entries_) {
    if (out.count(e.type)) continue;
    if (std::search(tokens.begin(), tokens.end(), e.tokens.begin(), e.tokens.end()) != tokens.end())
      out.insert(e.type);
  }
  return out;
}

std::string KeywordIndex::serialize() const {
  std::string out;
  for (const auto& e : entries_) out += e.type.str() + "\t" + e.phrase + "\n";
  return out;
}

std::set<MetadataType> KeywordIndex::types() const {
  std::set<MetadataType> out;
  for (const auto& e : entries_) out.insert(e.type);
  return out;
}

const KeywordIndex& default_keyword_index() {
  static const KeywordIndex index =
      KeywordIndex::parse(defaults::keywords, default_taxonomy(), default_nlp_config(), "keywords.tsv");
  return index;
}

std::set<MetadataType> predict_keywords(const KeywordIndex& index, const ProcessedSentence& ps) {
  return index.match(ps.tokens);
}

}  // namespace ppc

namespace ppc {

std::vector<MetadataType> trainable_types(const TaxonomyRegistry& registry) {
  std::vector<MetadataType> out;
  for (const auto& n : registry.nodes())
    if (n.type.level() <= 2 && !n.structural) out.push_back(n.type);
  return out;
}

TrainingRun train_models(const AnnotatedCorpus& corpus, const TaxonomyRegistry& registry,
                         const WordVectorStore& store, std::uint64_t seed, double threshold,
                         const TrainOptions& options) {
  std::vector<EmbeddingVector> emb;
  emb.reserve(corpus.records.size());
  for (const auto& r : corpus.records) emb.push_back(embed_tokens(r.tokens, store));

  TrainingRun run;
  run.models.dimension = store.dimension();
  const std::vector<MetadataType> types = trainable_types(registry);
  for (const auto& t : types) {
    TrainingSelection sel = select_training_records(corpus, t, seed);
    TrainingSummaryRow row{t, sel.positives.size(), sel.negatives_available, sel.negatives.size(), false};
    if (!sel.positives.empty() && !sel.negatives.empty()) {
      TrainResult res = train_binary(corpus, emb, t, seed, options);
      run.models.linear.emplace(t, std::move(res.model));
      row.trained = true;
    }
    run.summary.push_back(row);
  }
  run.models.similarity = build_similarity_model(corpus, emb, types, threshold);
  return run;
}

}  // namespace ppc
