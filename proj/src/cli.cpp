#include "ppc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "ppc/classifiers.hpp"
#include "ppc/corpus_io.hpp"
#include "ppc/criteria.hpp"
#include "ppc/error.hpp"
#include "ppc/evaluation.hpp"
#include "ppc/prediction.hpp"
#include "ppc/report.hpp"
#include "ppc/util.hpp"

namespace ppc {

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source) {
  RunConfig cfg;
  auto path_of = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() ? p : base_dir / p;
  };
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key = to_lower(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key == "taxonomy") cfg.taxonomy = path_of(value);
    else if (key == "stopwords") cfg.stopwords = path_of(value);
    else if (key == "gazetteers") cfg.gazetteers = path_of(value);
    else if (key == "lemmas") cfg.lemmas = path_of(value);
    else if (key == "keywords") cfg.keywords = path_of(value);
    else if (key == "vectors") cfg.vectors = path_of(value);
    else if (key == "models") cfg.models = path_of(value);
    else if (key == "criteria") cfg.criteria = path_of(value);
    else if (key == "output") cfg.output_dir = path_of(value);
    else if (key == "threshold") {
      if (!parse_double(value, cfg.threshold) || !(cfg.threshold > 0 && cfg.threshold <= 1))
        throw ParseError(source, line_no, "threshold must be in (0, 1]");
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(std::string(value), &used);
        if (used != value.size()) throw std::invalid_argument("seed");
      } catch (const std::exception&) {
        throw ParseError(source, line_no, "bad seed '" + std::string(value) + "'");
      }
    } else if (key == "jobs") {
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), cfg.jobs);
      if (ec != std::errc{} || end != value.data() + value.size() || value.empty())
        throw ParseError(source, line_no, "bad jobs value");
    } else {
      throw ParseError(source, line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

namespace {

struct Resources {
  TaxonomyRegistry registry;
  NlpConfig nlp;
  KeywordIndex keywords;
  std::vector<Criterion> criteria;
};

Resources load_resources(const RunConfig& cfg) {
  Resources r;
  r.registry = cfg.taxonomy.empty() ? default_taxonomy() : load_taxonomy_file(cfg.taxonomy);
  r.nlp = default_nlp_config();
  if (!cfg.stopwords.empty()) r.nlp.stopwords = StopwordList::parse(read_text_file(cfg.stopwords));
  if (!cfg.gazetteers.empty())
    r.nlp.gazetteer = Gazetteer::parse(read_text_file(cfg.gazetteers), cfg.gazetteers.string());
  if (!cfg.lemmas.empty()) r.nlp.lemmatizer = Lemmatizer::parse(read_text_file(cfg.lemmas), cfg.lemmas.string());
  const bool custom = !cfg.taxonomy.empty() || !cfg.stopwords.empty() || !cfg.gazetteers.empty() ||
                      !cfg.lemmas.empty();
  if (!cfg.keywords.empty())
    r.keywords = KeywordIndex::parse(read_text_file(cfg.keywords), r.registry, r.nlp, cfg.keywords.string());
  else if (custom)
    r.keywords = KeywordIndex::parse(default_keyword_index().serialize(), r.registry, r.nlp, "keywords.tsv");
  else
    r.keywords = default_keyword_index();
  r.criteria = cfg.criteria.empty() ? default_criteria(r.registry) : load_criteria_file(cfg.criteria, r.registry);
  return r;
}

void require(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw Error(std::string("missing ") + what + " path");
}

// Runs fn(i) for i in [0, n) on a bounded pool; the first exception is rethrown.
void run_pool(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

const QuestionnaireAnswers& answers_for(const AnswersMap& answers, const std::string& id) {
  auto it = answers.find(id);
  if (it == answers.end()) throw Error("no questionnaire answers for policy '" + id + "'");
  return it->second;
}

// Verdicts for stored corpus sentences, positioned by record index.
DocumentAnalysis analyze_records(const AnnotatedCorpus& corpus, const std::string& id, const Resources& res,
                                 const TrainedModels& models, const WordVectorStore& store,
                                 const QuestionnaireAnswers& a) {
  auto records = records_of(corpus, id);
  const std::size_t count = records.back()->index + 1;
  std::vector<std::string> texts(count);
  std::vector<Verdicts> verdicts(count);
  for (const auto* r : records) {
    ProcessedSentence ps;
    ps.sentence = Sentence{r->index, 0, r->raw_text.size(), r->raw_text};
    ps.tokens = r->tokens;
    texts[r->index] = r->raw_text;
    verdicts[r->index] = classify_sentence(ps, embed_tokens(r->tokens, store), models, res.keywords);
  }
  return identify_with_verdicts(id, std::move(texts), std::move(verdicts), res.registry, a.q1_controller_identity,
                                a.q5_representative_identity);
}

std::string summary_table(const TrainingRun& run) {
  std::string out = "type\tpositives\tnegatives\tsampled\tstatus\n";
  for (const auto& row : run.summary)
    out += row.type.str() + "\t" + std::to_string(row.positives) + "\t" + std::to_string(row.negatives_available) +
           "\t" + std::to_string(row.negatives_sampled) + "\t" + (row.trained ? "trained" : "skipped") + "\n";
  return out;
}

void emit_tables(const EvaluationTables& tables, const RunConfig& cfg, const std::string& prefix, std::ostream& out) {
  out << render_table_text(tables.manifestations) << "\n" << render_table_text(tables.issues);
  if (!cfg.output_dir.empty()) {
    write_text_file(cfg.output_dir / (prefix + "manifestations.tsv"), render_table_tsv(tables.manifestations));
    write_text_file(cfg.output_dir / (prefix + "issues.tsv"), render_table_tsv(tables.issues));
  }
}

enum class Mode { oracle, models, baseline };

EvaluationTables evaluate_corpus(const RunConfig& cfg, const Resources& res, const std::filesystem::path& corpus_path,
                                 const AnswersMap& answers, Mode mode) {
  const AnnotatedCorpus corpus = load_corpus(corpus_path, res.registry, res.nlp);
  if (corpus.records.empty()) throw Error("test corpus '" + corpus_path.string() + "' is empty");
  const auto ids = corpus.policy_ids();
  for (const auto& id : ids) answers_for(answers, id);

  TrainedModels models;
  WordVectorStore store;
  if (mode == Mode::models) {
    require(cfg.vectors, "vectors");
    require(cfg.models, "models");
    store = load_vectors(cfg.vectors);
    models = load_models(cfg.models, res.registry);
  }

  const auto gold = gold_presence(corpus);
  const auto types = evaluated_types(res.registry);
  std::vector<EvaluationCounts> parts(ids.size());
  run_pool(ids.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& id = ids[i];
    const QuestionnaireAnswers& a = answers.at(id);
    PolicyMetadataPresence predicted;
    if (mode == Mode::oracle) {
      predicted = identify_oracle(corpus, id, res.registry, a.q1_controller_identity, a.q5_representative_identity)
                      .presence;
    } else if (mode == Mode::models) {
      predicted = analyze_records(corpus, id, res, models, store, a).presence;
    } else {
      auto records = records_of(corpus, id);
      std::vector<std::vector<std::string>> tokens(records.back()->index + 1);
      for (const auto* r : records) tokens[r->index] = r->tokens;
      predicted = baseline_identify(tokens, res.keywords);
    }
    parts[i] = evaluate_policy(predicted, gold.at(id), a, res.criteria, types);
  });
  EvaluationCounts total;
  for (const auto& p : parts) total.merge(p);
  return make_tables(total, types, res.criteria);
}

RunConfig initial_config() {
  const char* env = std::getenv(kConfigEnv);
  if (env == nullptr || *env == '\0') return {};
  const std::filesystem::path p(env);
  return parse_run_config(read_text_file(p), p.parent_path(), p.string());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = initial_config();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  CLI::App app{"Privacy-policy metadata identification and completeness checking"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--taxonomy", cfg.taxonomy, "Taxonomy file");
    sub->add_option("--stopwords", cfg.stopwords, "Stopword list");
    sub->add_option("--gazetteers", cfg.gazetteers, "Gazetteer file");
    sub->add_option("--lemmas", cfg.lemmas, "Lemma lexicon");
    sub->add_option("--keywords", cfg.keywords, "Keyword index");
    sub->add_option("--criteria", cfg.criteria, "Criteria override file");
  };

  std::filesystem::path corpus_path, answers_path, policy_path, oracle_path, replay_path, dump_path;
  std::string policy_id;
  std::size_t epochs = TrainOptions{}.epochs;
  bool oracle = false;

  auto* train = app.add_subcommand("train", "Train the per-type classifiers and centroids");
  add_common(train);
  train->add_option("--corpus", corpus_path, "Annotated training corpus")->required();
  train->add_option("--vectors", cfg.vectors, "Word-vector file");
  train->add_option("--models", cfg.models, "Output models file");
  train->add_option("--seed", cfg.seed, "Undersampling seed");
  train->add_option("--threshold", cfg.threshold, "Similarity threshold")->check(CLI::Range(1e-9, 1.0));
  train->add_option("--epochs", epochs, "Training epochs")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Check one policy and write its report");
  add_common(check);
  auto* policy_opt = check->add_option("--policy", policy_path, "Policy text file");
  auto* oracle_opt = check->add_option("--oracle", oracle_path, "Annotated corpus used as classifier oracle");
  policy_opt->excludes(oracle_opt);
  check->add_option("--answers", answers_path, "Questionnaire answers")->required();
  check->add_option("--policy-id", policy_id, "Policy id in the answers file");
  check->add_option("--vectors", cfg.vectors, "Word-vector file");
  check->add_option("--models", cfg.models, "Models file");
  check->add_option("--out", cfg.output_dir, "Directory for the report files");
  check->add_option("--dump-predictions", dump_path, "Write per-sentence labels here");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score identification and completeness checking");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--corpus", corpus_path, "Gold test corpus");
  evaluate_cmd->add_option("--answers", answers_path, "Questionnaire answers");
  evaluate_cmd->add_flag("--oracle", oracle, "Take classifier verdicts from the gold labels");
  evaluate_cmd->add_option("--replay", replay_path, "Compute metrics for a TP/FP/FN/TN table");
  evaluate_cmd->add_option("--vectors", cfg.vectors, "Word-vector file");
  evaluate_cmd->add_option("--models", cfg.models, "Models file");
  evaluate_cmd->add_option("--jobs", cfg.jobs, "Worker threads");
  evaluate_cmd->add_option("--out", cfg.output_dir, "Directory for TSV tables");

  auto* baseline = app.add_subcommand("baseline", "Score the keyword-only pipeline");
  add_common(baseline);
  baseline->add_option("--corpus", corpus_path, "Gold test corpus")->required();
  baseline->add_option("--answers", answers_path, "Questionnaire answers")->required();
  baseline->add_option("--jobs", cfg.jobs, "Worker threads");
  baseline->add_option("--out", cfg.output_dir, "Directory for TSV tables");

  auto* validate = app.add_subcommand("validate-config", "Load and cross-check every configuration file");
  add_common(validate);
  validate->add_option("--vectors", cfg.vectors, "Word-vector file");
  validate->add_option("--models", cfg.models, "Models file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    const Resources res = load_resources(cfg);

    if (*train) {
      require(cfg.vectors, "vectors");
      require(cfg.models, "models");
      const WordVectorStore store = load_vectors(cfg.vectors);
      const AnnotatedCorpus corpus = load_corpus(corpus_path, res.registry, res.nlp);
      if (corpus.records.empty()) throw Error("training corpus is empty");
      TrainOptions opts;
      opts.epochs = epochs;
      const TrainingRun run = train_models(corpus, res.registry, store, cfg.seed, cfg.threshold, opts);
      save_models(cfg.models, run.models);
      out << summary_table(run);
      return kExitOk;
    }

    if (*check) {
      const AnswersMap answers = load_answers(answers_path);
      DocumentAnalysis analysis;
      std::vector<std::string> texts;
      if (!oracle_path.empty()) {
        const AnnotatedCorpus corpus = load_corpus(oracle_path, res.registry, res.nlp);
        if (policy_id.empty()) {
          const auto ids = corpus.policy_ids();
          if (ids.size() != 1) throw Error("--policy-id is required for a corpus with several policies");
          policy_id = ids.front();
        }
        const QuestionnaireAnswers& a = answers_for(answers, policy_id);
        analysis = identify_oracle(corpus, policy_id, res.registry, a.q1_controller_identity,
                                   a.q5_representative_identity);
        texts.resize(analysis.predictions.size());
        for (const auto* r : records_of(corpus, policy_id)) texts[r->index] = r->raw_text;
      } else {
        require(policy_path, "policy");
        require(cfg.vectors, "vectors");
        require(cfg.models, "models");
        if (policy_id.empty()) policy_id = policy_path.stem().string();
        const QuestionnaireAnswers& a = answers_for(answers, policy_id);
        const WordVectorStore store = load_vectors(cfg.vectors);
        const TrainedModels models = load_models(cfg.models, res.registry);
        const RawDocument doc{policy_id, read_text_file(policy_path), policy_path.string()};
        analysis = identify_metadata(doc, res.nlp, store, models, res.keywords, res.registry,
                                     a.q1_controller_identity, a.q5_representative_identity);
        for (const auto& ps : analysis.sentences) texts.push_back(ps.sentence.raw_text);
      }
      const QuestionnaireAnswers& a = answers_for(answers, policy_id);
      const auto findings = check_all(analysis.presence, a, res.criteria);
      const CompletenessReport report = build_report(policy_id, texts, res.criteria, findings);
      const std::string text = render_text(report);
      out << text;
      if (!cfg.output_dir.empty()) {
        write_text_file(cfg.output_dir / (policy_id + ".report.txt"), text);
        write_text_file(cfg.output_dir / (policy_id + ".report.json"), render_structured(report));
      }
      if (!dump_path.empty()) write_text_file(dump_path, dump_predictions(policy_id, analysis.predictions));
      if (!report.complete) return kExitViolations;
      if (report.warnings > 0) err << "notice: " << report.warnings << " warning(s) need expert review\n";
      return kExitOk;
    }

    if (*evaluate_cmd) {
      if (!replay_path.empty()) {
        const auto rows = load_counts(replay_path);
        if (rows.empty()) throw Error("counts table has no rows");
        const MetricTable t = make_table("Replay", rows);
        out << render_table_text(t);
        if (!cfg.output_dir.empty()) write_text_file(cfg.output_dir / "replay.tsv", render_table_tsv(t));
        return kExitOk;
      }
      require(corpus_path, "corpus");
      require(answers_path, "answers");
      const AnswersMap answers = load_answers(answers_path);
      emit_tables(evaluate_corpus(cfg, res, corpus_path, answers, oracle ? Mode::oracle : Mode::models), cfg, "",
                  out);
      return kExitOk;
    }

    if (*baseline) {
      const AnswersMap answers = load_answers(answers_path);
      emit_tables(evaluate_corpus(cfg, res, corpus_path, answers, Mode::baseline), cfg, "baseline_", out);
      return kExitOk;
    }

    if (*validate) {
      out << "taxonomy: " << res.registry.size() << " types\n";
      out << "keywords: " << res.keywords.entries().size() << " phrases for " << res.keywords.types().size()
          << " types\n";
      out << "criteria: " << res.criteria.size() << "\n";
      std::size_t dim = 0;
      if (!cfg.vectors.empty()) {
        const WordVectorStore store = load_vectors(cfg.vectors);
        dim = store.dimension();
        out << "vectors: " << store.size() << " words, dimension " << dim << "\n";
      }
      if (!cfg.models.empty()) {
        const TrainedModels models = load_models(cfg.models, res.registry);
        if (dim != 0 && models.dimension != dim)
          throw Error("models have dimension " + std::to_string(models.dimension) + ", vectors " +
                      std::to_string(dim));
        out << "models: " << models.linear.size() << " linear, " << models.similarity.centroids.size()
            << " centroids, threshold " << format_double(models.similarity.threshold) << "\n";
      }
      out << "ok\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace ppc
