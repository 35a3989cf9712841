#include <gtest/gtest.h>

#include <random>

#include "ppc/corpus_io.hpp"
#include "ppc/error.hpp"
#include "ppc/evaluation.hpp"
#include "ppc/util.hpp"
#include "test_support.hpp"

using namespace ppc;
using ppc::testing::T;

namespace {

const std::vector<Criterion>& defaults() {
  static const auto c = default_criteria(default_taxonomy());
  return c;
}

const Criterion& by_id(const std::string& id) {
  for (const auto& c : defaults())
    if (c.id == id) return c;
  throw std::out_of_range(id);
}

struct PrintedRow {
  std::string label;
  ConfusionCounts counts;
  std::vector<std::string> printed;  // a, p, r, f2
};

std::vector<PrintedRow> load_printed(const std::string& name) {
  const std::string text = read_text_file(ppc::testing::fixture(name));
  std::vector<PrintedRow> out;
  const auto counts = parse_counts(text, name);
  std::size_t k = 0;
  bool header = true;
  for (auto line : split(text, '\n')) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto f = split(line, '\t');
    out.push_back({counts[k].first, counts[k].second, {std::string(f[5]), std::string(f[6]), std::string(f[7]), std::string(f[8])}});
    ++k;
  }
  return out;
}

bool cell_matches(const std::optional<double>& v, const std::string& printed) {
  if (printed == "n/a") return !v.has_value();
  return v.has_value() && std::abs(*v * 100.0 - std::stod(printed)) <= 0.1 + 1e-9;
}

QuestionnaireAnswers random_answers(std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  QuestionnaireAnswers a;
  a.q1_controller_identity = "X";
  a.q2_transfer_outside = coin(rng);
  a.q3_other_recipients = coin(rng);
  if (coin(rng)) a.q4_core_activities.insert(CoreActivity::public_authority);
  a.q6_collection = coin(rng) ? Collection::Both : Collection::Direct;
  return a;
}

PolicyMetadataPresence random_presence(std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  PolicyMetadataPresence p;
  for (const auto& n : default_taxonomy().nodes())
    if (coin(rng)) p.add(n.type, 0);
  return p;
}

}  // namespace

TEST(Manifestations, OverlapIsTruePositive) { EXPECT_EQ(count_manifestations({7, 12}, {3, 7}), (ConfusionCounts{1, 0, 0, 0})); }

TEST(Manifestations, DisjointPredictionIsDoublePenalty) {
  EXPECT_EQ(count_manifestations({12}, {3, 7}), (ConfusionCounts{0, 1, 1, 0}));
}

TEST(Manifestations, RemainingCases) {
  EXPECT_EQ(count_manifestations({}, {}), (ConfusionCounts{0, 0, 0, 1}));
  EXPECT_EQ(count_manifestations({}, {4}), (ConfusionCounts{0, 0, 1, 0}));
  EXPECT_EQ(count_manifestations({4}, {}), (ConfusionCounts{0, 1, 0, 0}));
}

TEST(Manifestations, PartitionProperty) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> idx(0, 9);
  std::uniform_int_distribution<int> len(0, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::set<std::size_t> pred, gold;
    for (int k = len(rng); k > 0; --k) pred.insert(idx(rng));
    for (int k = len(rng); k > 0; --k) gold.insert(idx(rng));
    auto c = count_manifestations(pred, gold);
    EXPECT_LE(c.tp + c.fn + c.tn, 1u);
    EXPECT_GE(c.total(), 1u);
    EXPECT_LE(c.fp, 1u);
    const bool disjoint_both = !pred.empty() && !gold.empty() && c.tp == 0;
    EXPECT_EQ(c.fp == 1 && c.fn == 1, disjoint_both);
  }
}

TEST(Manifestations, PresenceOverloadUsesDescendants) {
  PolicyMetadataPresence pred, gold;
  pred.add(T("Data Subject Right.Access"), 4);
  gold.add(T("Data Subject Right"), 4);
  EXPECT_EQ(count_manifestations(pred, gold, T("Data Subject Right")), (ConfusionCounts{1, 0, 0, 0}));
  EXPECT_EQ(count_manifestations(pred, gold, T("Data Subject Right.Access")), (ConfusionCounts{0, 1, 0, 0}));
}

TEST(Issues, IdenticalFindingsHaveNoErrors) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_answers(rng);
    auto p = random_presence(rng);
    for (const auto& c : defaults()) {
      auto f = evaluate(c, a, p);
      auto counts = count_issues(f, f, c);
      EXPECT_EQ(counts.fp + counts.fn, 0u);
    }
  }
}

TEST(Issues, UnitsPerPolicy) {
  std::mt19937_64 rng(13);
  ConfusionCounts c9, c5, c2;
  for (int policy = 0; policy < 48; ++policy) {
    auto a = random_answers(rng);
    auto pred = random_presence(rng);
    auto gold = random_presence(rng);
    auto unit = [&](const std::string& id) { return count_issues(evaluate(by_id(id), a, pred), evaluate(by_id(id), a, gold), by_id(id)); };
    c9 += unit("C9");
    c5 += unit("C5");
    c2 += unit("C2");
  }
  EXPECT_EQ(c9.total(), 192u);
  EXPECT_EQ(c5.total(), 192u);
  EXPECT_EQ(c2.total(), 48u);
  EXPECT_EQ((ConfusionCounts{31, 1, 1, 159}).total(), c9.total());
  EXPECT_EQ((ConfusionCounts{36, 0, 4, 152}).total(), c5.total());
  EXPECT_EQ((ConfusionCounts{13, 1, 1, 33}).total(), c2.total());
}

TEST(Issues, PerGroupCounting) {
  QuestionnaireAnswers a;
  a.q1_controller_identity = "X";
  PolicyMetadataPresence pred, gold;
  pred.add(T("Legal Basis.Consent"), 0);
  gold.add(T("Legal Basis.Consent"), 0);
  pred.add(T("Data Subject Right.Erasure"), 1);
  gold.add(T("Data Subject Right.Object"), 2);
  const auto& c9 = by_id("C9");
  // Erasure: missing in gold only -> FN. Object: missing in pred only -> FP.
  // Portability and Withdraw Consent: missing in both -> TP.
  EXPECT_EQ(count_issues(evaluate(c9, a, pred), evaluate(c9, a, gold), c9), (ConfusionCounts{2, 1, 1, 0}));
  gold = PolicyMetadataPresence{};
  EXPECT_EQ(count_issues(evaluate(c9, a, pred), evaluate(c9, a, gold), c9), (ConfusionCounts{0, 3, 0, 1}));
  Finding wrong;
  wrong.criterion_id = "C1";
  EXPECT_THROW(count_issues(wrong, evaluate(c9, a, gold), c9), Error);
}

TEST(Tables, ReplayCompletenessCheckingRowsForBaseline) {
  auto rows = load_printed("completeness_kw.tsv");
  ASSERT_EQ(rows.size(), 24u);
  for (const auto& row : rows) {
    auto m = metrics(row.counts);
    EXPECT_TRUE(cell_matches(m.accuracy, row.printed[0])) << row.label;
    EXPECT_TRUE(cell_matches(m.precision, row.printed[1])) << row.label;
    EXPECT_TRUE(cell_matches(m.recall, row.printed[2])) << row.label;
    EXPECT_TRUE(cell_matches(m.f_beta, row.printed[3])) << row.label;
  }
}

TEST(Tables, SummaryIsMicroAverage) {
  auto rows = load_printed("completeness_ai.tsv");
  std::vector<std::pair<std::string, ConfusionCounts>> criteria_rows;
  for (const auto& r : rows)
    if (r.label != "Summary") criteria_rows.emplace_back(r.label, r.counts);
  auto table = make_table("Completeness checking", criteria_rows);
  EXPECT_EQ(table.summary.counts, (ConfusionCounts{300, 23, 34, 1035}));
  EXPECT_EQ(format_percent(table.summary.metrics.precision), "92.9");
  EXPECT_EQ(format_percent(table.summary.metrics.recall), "89.8");
  EXPECT_EQ(format_percent(table.summary.metrics.f_beta), "90.4");
}

TEST(Tables, Rendering) {
  std::vector<std::pair<std::string, ConfusionCounts>> rows{{"C15", {0, 0, 3, 45}}, {"C01", {2, 0, 0, 46}}};
  auto t = make_table("T", rows);
  EXPECT_EQ(render_table_tsv(t),
            "row\tTP\tFP\tFN\tTN\tA\tP\tR\tF2\n"
            "C15\t0\t0\t3\t45\t93.8\tn/a\t0.0\tn/a\n"
            "C01\t2\t0\t0\t46\t100.0\t100.0\t100.0\t100.0\n"
            "Summary\t2\t0\t3\t91\t96.9\t100.0\t40.0\t45.5\n");
  auto parsed = parse_counts(render_table_tsv(t));
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_EQ(parsed[0].second, rows[0].second);
  auto text = render_table_text(t);
  auto lines = split(text, '\n');
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0], "T");
  EXPECT_EQ(lines[1].size(), lines[2].size());
  EXPECT_EQ(lines[4].find_first_not_of('-'), std::string_view::npos);
}

TEST(Tables, MergeIsOrderIndependent) {
  std::mt19937_64 rng(21);
  const auto types = evaluated_types(default_taxonomy());
  std::vector<EvaluationCounts> parts;
  for (int i = 0; i < 10; ++i)
    parts.push_back(evaluate_policy(random_presence(rng), random_presence(rng), random_answers(rng), defaults(), types));
  EvaluationCounts forward, backward;
  for (const auto& p : parts) forward.merge(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
  EXPECT_EQ(forward.manifestations, backward.manifestations);
  EXPECT_EQ(forward.issues, backward.issues);
  auto tables = make_tables(forward, types, defaults());
  EXPECT_EQ(tables.manifestations.rows.size(), types.size());
  EXPECT_EQ(tables.issues.rows.size(), 23u);
  EXPECT_EQ(tables.issues.summary.counts.total(), 10u * (23 + 3 + 3));
}

TEST(EvaluatedTypes, ExcludesStructuralAndLookupIdentity) {
  auto types = evaluated_types(default_taxonomy());
  auto has = [&](const char* p) { return std::find(types.begin(), types.end(), T(p)) != types.end(); };
  EXPECT_FALSE(has("Controller"));
  EXPECT_FALSE(has("Controller.Identity"));
  EXPECT_FALSE(has("Controller Representative.Identity"));
  EXPECT_TRUE(has("Controller.Identity.Legal Name"));
  EXPECT_TRUE(has("DPO.Contact"));
  EXPECT_TRUE(has("Recipients"));
}

TEST(Baseline, EmptyIndexFindsNothing) {
  std::vector<std::vector<std::string>> toks{{"right", "access"}, {"email"}};
  EXPECT_TRUE(baseline_identify(toks, KeywordIndex{}).labels().empty());
}

TEST(Baseline, RightToAccess) {
  auto ps = preprocess(RawDocument{"b", "We value you. You have the right to access your data.", ""}, default_nlp_config());
  auto p = baseline_identify(ps, default_keyword_index());
  EXPECT_TRUE(p.present(T("Data Subject Right.Access")));
  EXPECT_EQ(p.evidence(T("Data Subject Right.Access")), std::set<std::size_t>{1});
}

TEST(Baseline, MissesKeywordFreeManifestation) {
  const auto& corpus = ppc::testing::example_corpus();
  auto gold = gold_presence(corpus).at("hikari");
  std::vector<std::vector<std::string>> toks;
  for (const auto* r : records_of(corpus, "hikari")) toks.push_back(r->tokens);
  auto base = baseline_identify(toks, default_keyword_index());
  EXPECT_TRUE(gold.present(T("Recipients")));
  EXPECT_FALSE(base.present(T("Recipients")));

  auto answers = load_answers(ppc::testing::fixture("example_answers.txt")).at("hikari");
  auto pipeline = identify_oracle(corpus, "hikari", default_taxonomy(), answers.q1_controller_identity,
                                  answers.q5_representative_identity);
  const auto types = evaluated_types(default_taxonomy());
  auto full = evaluate_policy(pipeline.presence, gold, answers, defaults(), types);
  auto kw = evaluate_policy(base, gold, answers, defaults(), types);
  ConfusionCounts full_sum, kw_sum;
  for (const auto& [t, c] : full.manifestations) full_sum += c;
  for (const auto& [t, c] : kw.manifestations) kw_sum += c;
  EXPECT_GT(*metrics(full_sum).recall, *metrics(kw_sum).recall);
}

TEST(GoldPresence, FromCorpus) {
  auto g = gold_presence(ppc::testing::example_corpus());
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.at("hikari").evidence(T("Children")), (std::set<std::size_t>{39, 40}));
}
