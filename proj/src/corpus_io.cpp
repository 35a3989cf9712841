#include "ppc/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

namespace {

bool parse_size(std::string_view s, std::size_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

// ---------------------------------------------------------------------------
// Corpus

AnnotatedCorpus parse_corpus(std::string_view text, const TaxonomyRegistry& registry, const NlpConfig& nlp,
                             const std::string& source) {
  AnnotatedCorpus corpus;
  std::map<std::string, std::set<std::size_t>> seen;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = strip_cr(raw);
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() < 3 || fields.size() > 4)
      throw ParseError(source, line_no, "expected policy, index, text and labels separated by tabs");

    CorpusRecord r;
    r.policy_id = std::string(trim(fields[0]));
    if (r.policy_id.empty()) throw ParseError(source, line_no, "empty policy id");
    if (!parse_size(fields[1], r.index))
      throw ParseError(source, line_no, "bad sentence index '" + std::string(fields[1]) + "'");
    if (!seen[r.policy_id].insert(r.index).second)
      throw ParseError(source, line_no,
                       "duplicate sentence " + std::to_string(r.index) + " for policy '" + r.policy_id + "'");
    r.raw_text = std::string(fields[2]);
    if (fields.size() == 4) {
      for (auto item : split(fields[3], ';')) {
        item = trim(item);
        if (item.empty()) continue;
        auto t = registry.find(item);
        if (!t) throw ParseError(source, line_no, "unknown metadata type '" + std::string(item) + "'");
        if (std::find(r.labels.begin(), r.labels.end(), *t) == r.labels.end()) r.labels.push_back(*t);
      }
    }
    r.tokens = normalize_text(r.raw_text, nlp);
    corpus.records.push_back(std::move(r));
  }
  for (const auto& [policy, indices] : seen) {
    const std::size_t span = *indices.rbegin() - *indices.begin() + 1;
    if (span != indices.size())
      throw ParseError(source, 0, "sentence indices of policy '" + policy + "' have a gap");
  }
  return corpus;
}

AnnotatedCorpus load_corpus(const std::filesystem::path& path, const TaxonomyRegistry& registry,
                            const NlpConfig& nlp) {
  return parse_corpus(read_text_file(path), registry, nlp, path.string());
}

std::string serialize_corpus(const AnnotatedCorpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records) {
    if (r.raw_text.find_first_of("\t\n\r") != std::string::npos)
      throw Error("sentence " + std::to_string(r.index) + " of '" + r.policy_id +
                  "' contains a tab or line break");
    out += r.policy_id + "\t" + std::to_string(r.index) + "\t" + r.raw_text + "\t";
    for (std::size_t i = 0; i < r.labels.size(); ++i) out += (i ? ";" : "") + r.labels[i].str();
    out += "\n";
  }
  return out;
}

void save_corpus(const std::filesystem::path& path, const AnnotatedCorpus& corpus) {
  write_text_file(path, serialize_corpus(corpus));
}

std::vector<const CorpusRecord*> records_of(const AnnotatedCorpus& corpus, std::string_view policy_id) {
  std::vector<const CorpusRecord*> out;
  for (const auto& r : corpus.records)
    if (r.policy_id == policy_id) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const CorpusRecord* a, const CorpusRecord* b) { return a->index < b->index; });
  return out;
}

// ---------------------------------------------------------------------------
// Answers

namespace {

bool parse_yes_no(std::string_view v, bool& out) {
  v = trim(v);
  if (iequals(v, "yes") || iequals(v, "true")) {
    out = true;
    return true;
  }
  if (iequals(v, "no") || iequals(v, "false")) {
    out = false;
    return true;
  }
  return false;
}

void finish_policy(const std::string& source, const std::string& id, const std::set<std::string>& keys,
                   const QuestionnaireAnswers& a) {
  for (const char* required : {"q1", "q2", "q3", "q5", "q6"})
    if (!keys.count(required))
      throw ParseError(source, 0, "policy '" + id + "': missing key " + required);
  try {
    a.validate();
  } catch (const Error& e) {
    throw ParseError(source, 0, "policy '" + id + "': " + e.what());
  }
}

}  // namespace

AnswersMap parse_answers(std::string_view text, const std::string& source) {
  AnswersMap out;
  std::string current;
  std::set<std::string> keys;
  QuestionnaireAnswers answers;
  auto flush = [&] {
    if (current.empty()) return;
    finish_policy(source, current, keys, answers);
    out.emplace(current, answers);
  };

  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, line_no, "unterminated section header");
      auto inner = trim(line.substr(1, line.size() - 2));
      if (inner.substr(0, 7) != "policy " || trim(inner.substr(7)).empty())
        throw ParseError(source, line_no, "expected '[policy <id>]'");
      flush();
      current = std::string(trim(inner.substr(7)));
      if (out.count(current)) throw ParseError(source, line_no, "duplicate policy '" + current + "'");
      keys.clear();
      answers = QuestionnaireAnswers{};
      continue;
    }
    if (current.empty()) throw ParseError(source, line_no, "key outside a [policy] section");
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key = to_lower(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (!keys.insert(key).second) throw ParseError(source, line_no, "duplicate key '" + key + "'");

    if (key == "q1") {
      answers.q1_controller_identity = std::string(value);
    } else if (key == "q2" || key == "q3") {
      bool b = false;
      if (!parse_yes_no(value, b)) throw ParseError(source, line_no, key + " must be yes or no");
      (key == "q2" ? answers.q2_transfer_outside : answers.q3_other_recipients) = b;
    } else if (key == "q4") {
      for (auto item : split(value, ',')) {
        if (trim(item).empty() || iequals(trim(item), "none")) continue;
        auto v = parse_core_activity(item);
        if (!v) throw ParseError(source, line_no, "unknown core activity '" + std::string(trim(item)) + "'");
        answers.q4_core_activities.insert(*v);
      }
    } else if (key == "q5") {
      auto v = parse_location(value);
      if (!v) throw ParseError(source, line_no, "q5 must be inside_europe or outside_europe");
      answers.q5_location = *v;
    } else if (key == "q5_representative") {
      answers.q5_representative_identity = std::string(value);
    } else if (key == "q6") {
      auto v = parse_collection(value);
      if (!v) throw ParseError(source, line_no, "q6 must be Direct, Indirect or Both");
      answers.q6_collection = *v;
    } else {
      throw ParseError(source, line_no, "unknown key '" + key + "'");
    }
  }
  flush();
  return out;
}

AnswersMap load_answers(const std::filesystem::path& path) {
  return parse_answers(read_text_file(path), path.string());
}

std::string serialize_answers(const AnswersMap& answers) {
  std::string out;
  for (const auto& [id, a] : answers) {
    if (!out.empty()) out += "\n";
    out += "[policy " + id + "]\n";
    out += "q1 = " + a.q1_controller_identity + "\n";
    out += std::string("q2 = ") + (a.q2_transfer_outside ? "yes" : "no") + "\n";
    out += std::string("q3 = ") + (a.q3_other_recipients ? "yes" : "no") + "\n";
    std::string q4;
    for (auto v : a.q4_core_activities) q4 += (q4.empty() ? "" : ", ") + std::string(to_string(v));
    out += "q4 = " + q4 + "\n";
    out += "q5 = " + std::string(to_string(a.q5_location)) + "\n";
    if (!a.q5_representative_identity.empty())
      out += "q5_representative = " + a.q5_representative_identity + "\n";
    out += "q6 = " + std::string(to_string(a.q6_collection)) + "\n";
  }
  return out;
}

void save_answers(const std::filesystem::path& path, const AnswersMap& answers) {
  write_text_file(path, serialize_answers(answers));
}

// ---------------------------------------------------------------------------
// Models

namespace {

constexpr std::string_view kModelsHeader = "ppcheck-models 1";

std::string join_values(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

std::vector<double> parse_values(std::string_view s, const std::string& source, std::size_t line) {
  std::vector<double> out;
  for (auto item : split(trim(s), ' ')) {
    if (item.empty()) continue;
    double d = 0;
    if (!parse_double(item, d)) throw ParseError(source, line, "bad number '" + std::string(item) + "'");
    out.push_back(d);
  }
  return out;
}

std::string_view field_value(std::string_view field, std::string_view key, const std::string& source,
                             std::size_t line) {
  if (field.substr(0, key.size()) != key || field.substr(key.size(), 1) != "=")
    throw ParseError(source, line, "expected field '" + std::string(key) + "='");
  return field.substr(key.size() + 1);
}

}  // namespace

std::string serialize_models(const TrainedModels& models) {
  std::string out(kModelsHeader);
  out += "\ndimension " + std::to_string(models.dimension) + "\n";
  out += "threshold " + format_double(models.similarity.threshold) + "\n";
  for (const auto& [t, m] : models.linear)
    out += "linear\t" + t.str() + "\tseed=" + std::to_string(m.seed) + "\tbias=" + format_double(m.bias) +
           "\tweights=" + join_values(m.weights) + "\n";
  for (const auto& [t, c] : models.similarity.centroids) out += "centroid\t" + t.str() + "\t" + join_values(c.values()) + "\n";
  return out;
}

TrainedModels parse_models(std::string_view text, const TaxonomyRegistry& registry, const std::string& source) {
  TrainedModels m;
  bool have_header = false, have_dim = false, have_threshold = false;
  std::size_t line_no = 0;
  auto resolve = [&](std::string_view path) {
    auto t = registry.find(trim(path));
    if (!t) throw ParseError(source, line_no, "unknown metadata type '" + std::string(trim(path)) + "'");
    return *t;
  };
  auto check_dim = [&](std::size_t n) {
    if (!have_dim) throw ParseError(source, line_no, "model line before the dimension line");
    if (n != m.dimension)
      throw ParseError(source, line_no,
                       "dimension mismatch: expected " + std::to_string(m.dimension) + ", got " + std::to_string(n));
  };

  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = strip_cr(raw);
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (trim(line) != kModelsHeader) throw ParseError(source, line_no, "missing models header");
      have_header = true;
      continue;
    }
    if (line.substr(0, 10) == "dimension ") {
      if (!parse_size(line.substr(10), m.dimension) || m.dimension == 0)
        throw ParseError(source, line_no, "bad dimension");
      have_dim = true;
    } else if (line.substr(0, 10) == "threshold ") {
      if (!parse_double(trim(line.substr(10)), m.similarity.threshold) || m.similarity.threshold <= 0 ||
          m.similarity.threshold > 1)
        throw ParseError(source, line_no, "threshold must be in (0, 1]");
      have_threshold = true;
    } else if (line.substr(0, 7) == "linear\t") {
      auto f = split(line, '\t');
      if (f.size() != 5) throw ParseError(source, line_no, "expected type, seed, bias and weights");
      LinearModel lm;
      lm.target = resolve(f[1]);
      std::size_t seed = 0;
      if (!parse_size(field_value(f[2], "seed", source, line_no), seed))
        throw ParseError(source, line_no, "bad seed");
      lm.seed = seed;
      if (!parse_double(field_value(f[3], "bias", source, line_no), lm.bias))
        throw ParseError(source, line_no, "bad bias");
      lm.weights = parse_values(field_value(f[4], "weights", source, line_no), source, line_no);
      check_dim(lm.weights.size());
      if (!m.linear.emplace(lm.target, lm).second)
        throw ParseError(source, line_no, "duplicate model for '" + lm.target.str() + "'");
    } else if (line.substr(0, 9) == "centroid\t") {
      auto f = split(line, '\t');
      if (f.size() != 3) throw ParseError(source, line_no, "expected type and values");
      const MetadataType t = resolve(f[1]);
      auto values = parse_values(f[2], source, line_no);
      check_dim(values.size());
      if (!m.similarity.centroids.emplace(t, EmbeddingVector(std::move(values))).second)
        throw ParseError(source, line_no, "duplicate centroid for '" + t.str() + "'");
    } else {
      throw ParseError(source, line_no, "unrecognized line");
    }
  }
  if (!have_dim || !have_threshold)
    throw ParseError(source, 0, "models file lacks dimension or threshold");
  return m;
}

void save_models(const std::filesystem::path& path, const TrainedModels& models) {
  write_text_file(path, serialize_models(models));
}

TrainedModels load_models(const std::filesystem::path& path, const TaxonomyRegistry& registry) {
  return parse_models(read_text_file(path), registry, path.string());
}

// ---------------------------------------------------------------------------
// Counts replay

std::vector<std::pair<std::string, ConfusionCounts>> parse_counts(std::string_view text, const std::string& source) {
  std::vector<std::pair<std::string, ConfusionCounts>> out;
  std::map<std::string, std::size_t> column;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = strip_cr(raw);
    if (trim(line).empty() || line.front() == '#') continue;
    auto f = split(line, '\t');
    if (column.empty()) {
      for (std::size_t i = 0; i < f.size(); ++i) column[to_lower(trim(f[i]))] = i;
      for (const char* name : {"row", "tp", "fp", "fn", "tn"})
        if (!column.count(name)) throw ParseError(source, line_no, std::string("header lacks column '") + name + "'");
      continue;
    }
    auto cell = [&](const char* name) -> std::string_view {
      std::size_t i = column.at(name);
      if (i >= f.size()) throw ParseError(source, line_no, std::string("missing column '") + name + "'");
      return f[i];
    };
    ConfusionCounts c;
    std::pair<const char*, std::size_t*> nums[] = {{"tp", &c.tp}, {"fp", &c.fp}, {"fn", &c.fn}, {"tn", &c.tn}};
    for (auto& [name, dst] : nums)
      if (!parse_size(cell(name), *dst))
        throw ParseError(source, line_no, std::string("bad count in column '") + name + "'");
    out.emplace_back(std::string(trim(cell("row"))), c);
  }
  if (column.empty()) throw ParseError(source, 0, "empty counts table");
  return out;
}

std::vector<std::pair<std::string, ConfusionCounts>> load_counts(const std::filesystem::path& path) {
  return parse_counts(read_text_file(path), path.string());
}

}  // namespace ppc
