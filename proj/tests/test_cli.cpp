#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "ppc/cli.hpp"
#include "ppc/corpus_io.hpp"
#include "ppc/error.hpp"
#include "ppc/report.hpp"
#include "ppc/util.hpp"
#include "test_support.hpp"

using namespace ppc;
using ppc::testing::fixture;
using ppc::testing::T;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string f(const std::string& name) { return fixture(name).string(); }

// Trains once per process into a shared scratch directory.
const std::filesystem::path& trained_models() {
  static const std::filesystem::path path = [] {
    auto dir = ppc::testing::scratch_dir("cli_models");
    auto p = dir / "models.txt";
    auto r = run({"train", "--corpus", f("example_corpus.tsv"), "--vectors", f("tiny_vectors.txt"), "--models", p.string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return p;
  }();
  return path;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) { ::setenv(name, value.c_str(), 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({"check", "--oracle", f("example_corpus.tsv")}).code, kExitError);
  EXPECT_EQ(run({"check", "--oracle", f("example_corpus.tsv"), "--policy", f("example_policy.txt"), "--answers",
                 f("example_answers.txt")})
                .code,
            kExitError);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("validate-config"), std::string::npos);
}

TEST(Cli, ValidateConfig) {
  auto r = run({"validate-config"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("taxonomy: 67 types"), std::string::npos);
  EXPECT_NE(r.out.find("criteria: 23"), std::string::npos);
  r = run({"validate-config", "--vectors", f("tiny_vectors.txt"), "--models", trained_models().string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("dimension 10"), std::string::npos);
}

TEST(Cli, MissingVectorsFile) {
  auto r = run({"validate-config", "--vectors", "/nonexistent/vectors.txt"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  auto dir = ppc::testing::scratch_dir("cli_novec");
  r = run({"train", "--corpus", f("example_corpus.tsv"), "--models", (dir / "m.txt").string()});
  EXPECT_EQ(r.code, kExitError);
}

TEST(Cli, BadTaxonomyOverride) {
  auto dir = ppc::testing::scratch_dir("cli_tax");
  write_text_file(dir / "tax.txt", "A\nB.C.D.E\n");
  EXPECT_EQ(run({"validate-config", "--taxonomy", (dir / "tax.txt").string()}).code, kExitError);
}

TEST(Cli, OracleCheckComplete) {
  auto dir = ppc::testing::scratch_dir("cli_oracle");
  auto r = run({"check", "--oracle", f("example_corpus.tsv"), "--answers", f("example_answers.txt"), "--out", dir.string(),
                "--dump-predictions", (dir / "pred.tsv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("COMPLETE, 0 violations, 0 warnings"), std::string::npos);
  EXPECT_EQ(read_text_file(dir / "hikari.report.txt"), r.out);
  auto report = parse_structured(read_text_file(dir / "hikari.report.json"));
  EXPECT_TRUE(report.complete);
  EXPECT_EQ(report.details.size(), 23u);
  EXPECT_NE(read_text_file(dir / "pred.tsv").find("hikari\t32\tData Subject Right.Portability\n"), std::string::npos);
}

TEST(Cli, MutatedPolicyExitsWithViolations) {
  auto dir = ppc::testing::scratch_dir("cli_mut");
  save_corpus(dir / "mut.tsv", ppc::testing::delete_type(ppc::testing::example_corpus(), T("Data Subject Right.Withdraw Consent")));
  auto r = run({"check", "--oracle", (dir / "mut.tsv").string(), "--answers", f("example_answers.txt")});
  EXPECT_EQ(r.code, kExitViolations) << r.err;
  EXPECT_NE(r.out.find("C9 (violation): VIOLATION"), std::string::npos);
  EXPECT_NE(r.out.find("  Data Subject Right.Withdraw Consent: NOT FOUND \xE2\x80\x94 VIOLATION"), std::string::npos);
}

TEST(Cli, WarningOnlyExitsZeroWithNotice) {
  auto dir = ppc::testing::scratch_dir("cli_warn");
  save_corpus(dir / "w.tsv", ppc::testing::delete_type(ppc::testing::example_corpus(), T("Data Subject Right.Complaint.SA")));
  auto r = run({"check", "--oracle", (dir / "w.tsv").string(), "--answers", f("example_answers.txt")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("1 warning"), std::string::npos);
}

TEST(Cli, AnswersMissingForPolicy) {
  auto dir = ppc::testing::scratch_dir("cli_answers");
  write_text_file(dir / "a.txt", "[policy other]\nq1 = X\nq2 = no\nq3 = no\nq4 =\nq5 = inside_europe\nq6 = Direct\n");
  auto r = run({"check", "--oracle", f("example_corpus.tsv"), "--answers", (dir / "a.txt").string()});
  EXPECT_EQ(r.code, kExitError);
  r = run({"evaluate", "--oracle", "--corpus", f("example_corpus.tsv"), "--answers", (dir / "a.txt").string()});
  EXPECT_EQ(r.code, kExitError);
}

TEST(Cli, EmptyCorpus) {
  auto dir = ppc::testing::scratch_dir("cli_empty");
  write_text_file(dir / "empty.tsv", "# nothing\n");
  EXPECT_EQ(run({"train", "--corpus", (dir / "empty.tsv").string(), "--vectors", f("tiny_vectors.txt"), "--models",
                 (dir / "m.txt").string()})
                .code,
            kExitError);
  EXPECT_EQ(run({"evaluate", "--oracle", "--corpus", (dir / "empty.tsv").string(), "--answers", f("example_answers.txt")})
                .code,
            kExitError);
}

TEST(Cli, TrainIsDeterministic) {
  auto dir = ppc::testing::scratch_dir("cli_train");
  for (const char* name : {"a.txt", "b.txt"}) {
    auto r = run({"train", "--corpus", f("example_corpus.tsv"), "--vectors", f("tiny_vectors.txt"), "--models",
                  (dir / name).string(), "--seed", "7"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("Legal Basis.Public Function"), std::string::npos);
  }
  EXPECT_EQ(read_text_file(dir / "a.txt"), read_text_file(dir / "b.txt"));
}

TEST(Cli, CheckPolicyWithTrainedModels) {
  auto r = run({"check", "--policy", f("example_policy.txt"), "--policy-id", "hikari", "--answers", f("example_answers.txt"),
                "--vectors", f("tiny_vectors.txt"), "--models", trained_models().string()});
  EXPECT_TRUE(r.code == kExitOk || r.code == kExitViolations) << r.err;
  EXPECT_NE(r.out.find("COMPLETENESS ANALYSIS REPORT"), std::string::npos);
  r = run({"check", "--policy", f("example_policy.txt"), "--policy-id", "hikari", "--answers", f("example_answers.txt")});
  EXPECT_EQ(r.code, kExitError);
}

TEST(Cli, ConfigFileFromEnvironment) {
  auto dir = ppc::testing::scratch_dir("cli_env");
  std::filesystem::copy_file(fixture("tiny_vectors.txt"), dir / "vec.txt");
  std::filesystem::copy_file(trained_models(), dir / "models.txt");
  write_text_file(dir / "ppcheck.conf", "# test config\nvectors = vec.txt\nmodels = models.txt\nseed = 3\njobs = 2\n");
  {
    ScopedEnv env(kConfigEnv, (dir / "ppcheck.conf").string());
    auto r = run({"check", "--policy", f("example_policy.txt"), "--policy-id", "hikari", "--answers", f("example_answers.txt")});
    EXPECT_TRUE(r.code == kExitOk || r.code == kExitViolations) << r.err;
  }
  write_text_file(dir / "bad.conf", "colour = blue\n");
  ScopedEnv env(kConfigEnv, (dir / "bad.conf").string());
  EXPECT_EQ(run({"validate-config"}).code, kExitError);
}

TEST(Cli, RunConfigParsing) {
  auto cfg = parse_run_config("taxonomy = t.txt\nmodels = /abs/m.txt\nthreshold = 0.8\nseed = 9\njobs = 4\n", "/base");
  EXPECT_EQ(cfg.taxonomy, std::filesystem::path("/base/t.txt"));
  EXPECT_EQ(cfg.models, std::filesystem::path("/abs/m.txt"));
  EXPECT_DOUBLE_EQ(cfg.threshold, 0.8);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.jobs, 4u);
  EXPECT_THROW(parse_run_config("threshold = 2\n", "/"), ParseError);
  EXPECT_THROW(parse_run_config("jobs = -1\n", "/"), ParseError);
  EXPECT_THROW(parse_run_config("seed = x\n", "/"), ParseError);
  EXPECT_THROW(parse_run_config("just words\n", "/"), ParseError);
}

TEST(Cli, CriteriaOverride) {
  auto dir = ppc::testing::scratch_dir("cli_crit");
  write_text_file(dir / "crit.txt", "X1 | violation | PRE: none | POST: {Legal Basis.Public Function}\n");
  auto r = run({"check", "--oracle", f("example_corpus.tsv"), "--answers", f("example_answers.txt"), "--criteria",
                (dir / "crit.txt").string()});
  EXPECT_EQ(r.code, kExitViolations);
  EXPECT_NE(r.out.find("X1 (violation): VIOLATION"), std::string::npos);
}

TEST(Cli, EvaluateOracleAndBaseline) {
  auto dir = ppc::testing::scratch_dir("cli_eval");
  auto r = run({"evaluate", "--oracle", "--corpus", f("example_corpus.tsv"), "--answers", f("example_answers.txt"), "--out",
                dir.string(), "--jobs", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto issues = load_counts(dir / "issues.tsv");
  ASSERT_EQ(issues.size(), 24u);
  EXPECT_EQ(issues.back().second.fp + issues.back().second.fn, 0u);
  EXPECT_EQ(issues.back().second.total(), 23u + 3 + 3);
  auto manifest = load_counts(dir / "manifestations.tsv");
  EXPECT_EQ(manifest.back().second.fn, 0u);

  auto again = run({"evaluate", "--oracle", "--corpus", f("example_corpus.tsv"), "--answers", f("example_answers.txt"),
                    "--jobs", "4"});
  EXPECT_EQ(again.out, r.out);

  auto b = run({"baseline", "--corpus", f("example_corpus.tsv"), "--answers", f("example_answers.txt"), "--out", dir.string()});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  auto base = load_counts(dir / "baseline_manifestations.tsv");
  EXPECT_GT(base.back().second.fn, 0u);
}

TEST(Cli, EvaluateWithModels) {
  auto r = run({"evaluate", "--corpus", f("example_corpus.tsv"), "--answers", f("example_answers.txt"), "--vectors",
                f("tiny_vectors.txt"), "--models", trained_models().string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Summary"), std::string::npos);
}

TEST(Cli, ReplayCounts) {
  auto dir = ppc::testing::scratch_dir("cli_replay");
  auto r = run({"evaluate", "--replay", f("completeness_ai.tsv"), "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto rows = load_counts(dir / "replay.tsv");
  ASSERT_EQ(rows.size(), 25u);
  // The fixture's own summary row is replayed as a row; the computed
  // summary doubles it.
  EXPECT_EQ(rows.back().second, (ConfusionCounts{600, 46, 68, 2070}));
  EXPECT_NE(r.out.find("92.9"), std::string::npos);
  EXPECT_EQ(run({"evaluate", "--replay", "/nonexistent.tsv"}).code, kExitError);
}
