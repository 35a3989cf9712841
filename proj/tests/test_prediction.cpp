#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ppc/corpus_io.hpp"
#include "ppc/error.hpp"
#include "ppc/prediction.hpp"
#include "test_support.hpp"

using namespace ppc;
using ppc::testing::T;

namespace {

const char* kController = "Hikari Bank Ltd";
const char* kRepresentative = "the Holding Bank Services";

PredictionContext single(Verdicts v, std::string text = "", std::string cid = "", std::string rid = "") {
  PredictionContext ctx;
  ctx.registry = &default_taxonomy();
  ctx.verdicts = {std::move(v)};
  ctx.raw_texts = {std::move(text)};
  ctx.controller_id = std::move(cid);
  ctx.representative_id = std::move(rid);
  return ctx;
}

std::set<MetadataType> fuse(Verdicts v) { return predict_sentence(single(std::move(v)), 0).labels; }

std::vector<SentencePrediction> layout(std::size_t n, std::vector<std::pair<std::size_t, std::string>> labels) {
  std::vector<SentencePrediction> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].index = i;
  for (const auto& [i, path] : labels) out[i].labels.insert(T(path));
  return out;
}

bool has(const std::vector<SentencePrediction>& p, std::size_t i, const std::string& path) {
  return p[i].labels.count(T(path)) != 0;
}

std::vector<MetadataType> layout_pool() {
  std::vector<MetadataType> pool;
  for (const auto& root : {"Data Subject Right", "Transfer Outside Europe", "Legal Basis", "Recipients", "PD Origin"})
    for (const auto& t : default_taxonomy().subtree(T(root))) pool.push_back(t);
  return pool;
}

}  // namespace

TEST(PredictSentence, CaseOneAcceptsEitherChildClassifier) {
  Verdicts v;
  v.ml = {T("Data Subject Right")};
  v.sim = {T("Data Subject Right.Erasure")};
  auto m = fuse(v);
  EXPECT_TRUE(m.count(T("Data Subject Right")));
  EXPECT_TRUE(m.count(T("Data Subject Right.Erasure")));
}

TEST(PredictSentence, CaseTwoInfersFromTwoClassifiers) {
  Verdicts v;
  v.ml = {T("Legal Basis.Vital Interest")};
  v.kw = {T("Legal Basis.Vital Interest")};
  auto m = fuse(v);
  EXPECT_TRUE(m.count(T("Legal Basis.Vital Interest")));
  EXPECT_FALSE(m.count(T("Legal Basis")));
}

TEST(PredictSentence, CaseTwoRejectsSingleClassifier) {
  Verdicts v;
  v.kw = {T("Legal Basis.Vital Interest")};
  EXPECT_TRUE(fuse(v).empty());
}

TEST(PredictSentence, CaseOneIgnoresChildKeyword) {
  Verdicts v;
  v.sim = {T("Legal Basis")};
  v.kw = {T("Legal Basis.Consent")};
  EXPECT_EQ(fuse(v), std::set<MetadataType>{T("Legal Basis")});
}

TEST(PredictSentence, ControllerIdentityLookup) {
  auto m = predict_sentence(single({}, "Hikari Bank Ltd is the controller", kController, kRepresentative), 0).labels;
  EXPECT_EQ(m, std::set<MetadataType>{T("Controller.Identity")});
  m = predict_sentence(single({}, "Our representative is the Holding Bank Services.", kController, kRepresentative), 0)
          .labels;
  EXPECT_EQ(m, std::set<MetadataType>{T("Controller Representative.Identity")});
  m = predict_sentence(single({}, "HIKARI BANK LTD processes data", kController), 0).labels;
  EXPECT_TRUE(m.count(T("Controller.Identity")));
  EXPECT_TRUE(predict_sentence(single({}, "We process data.", kController, kRepresentative), 0).labels.empty());
  EXPECT_TRUE(predict_sentence(single({}, "anything", "", ""), 0).labels.empty());
}

TEST(PredictSentence, StructuralRootsUseCaseTwoOnly) {
  Verdicts v;
  v.ml = {T("Controller"), T("Controller.Contact")};
  EXPECT_TRUE(fuse(v).empty());
  v.kw = {T("Controller.Contact"), T("Controller.Contact.Email")};
  EXPECT_EQ(fuse(v), (std::set<MetadataType>{T("Controller.Contact"), T("Controller.Contact.Email")}));
}

TEST(PredictSentence, LevelThreeNeedsPredictedParent) {
  Verdicts v;
  v.ml = {T("Transfer Outside Europe.Adequacy Decision")};
  v.sim = {T("Transfer Outside Europe.Adequacy Decision")};
  v.kw = {T("Transfer Outside Europe.Adequacy Decision.Country")};
  EXPECT_TRUE(fuse(v).count(T("Transfer Outside Europe.Adequacy Decision.Country")));
  Verdicts w;
  w.kw = {T("Transfer Outside Europe.Adequacy Decision.Country")};
  EXPECT_TRUE(fuse(w).empty());
}

TEST(PredictSentence, IdentityLookupEnablesLevelThree) {
  Verdicts v;
  v.kw = {T("Controller.Identity.Legal Name")};
  auto m = predict_sentence(single(v, "Hikari Bank Ltd is our legal name.", kController), 0).labels;
  EXPECT_TRUE(m.count(T("Controller.Identity.Legal Name")));
}

TEST(PredictSentence, OutOfRangeIndexThrows) { EXPECT_THROW(predict_sentence(single({}), 1), Error); }

TEST(PredictSentence, ExhaustiveToyDecisionTable) {
  auto reg = load_taxonomy(oracle::kToyTaxonomy);
  for (unsigned bits = 0; bits < 512; ++bits) {
    auto tv = oracle::toy_from_bits(bits);
    PredictionContext ctx;
    ctx.registry = &reg;
    ctx.verdicts = {oracle::toy_verdicts(tv)};
    EXPECT_EQ(predict_sentence(ctx, 0).labels, oracle::toy_expected(tv)) << "bits=" << bits;
  }
}

TEST(PredictSentence, ResultIsClosedUnderParentsExceptCaseTwo) {
  std::mt19937_64 rng(31);
  auto pool = layout_pool();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    Verdicts v;
    for (int k = 0; k < 6; ++k) {
      v.ml.insert(pool[pick(rng)]);
      v.sim.insert(pool[pick(rng)]);
      v.kw.insert(pool[pick(rng)]);
    }
    for (const auto& l : fuse(v)) {
      if (l.level() == 3) EXPECT_TRUE(fuse(v).count(l.prefix(2)));
      if (l.level() == 2 && fuse(v).count(l.root()) == 0) {
        const int votes = int(v.ml.count(l)) + int(v.sim.count(l)) + int(v.kw.count(l));
        EXPECT_GE(votes, 2);
      }
    }
  }
}

TEST(PostProcess, WindowSizes) {
  const auto& reg = default_taxonomy();
  EXPECT_EQ(family_window(reg, T("Data Subject Right")), 8u);
  EXPECT_EQ(family_window(reg, T("Transfer Outside Europe")), 3u);
  EXPECT_EQ(family_window(reg, T("Legal Basis")), 6u);
}

TEST(PostProcess, IsolatedPredictionRemoved) {
  auto in = layout(20, {{10, "Data Subject Right.Portability"}});
  auto out = post_process(in, default_taxonomy());
  EXPECT_FALSE(has(out, 10, "Data Subject Right.Portability"));
}

TEST(PostProcess, NineAwayRemovedEightAwayKept) {
  auto far = post_process(layout(20, {{1, "Data Subject Right.Erasure"}, {10, "Data Subject Right.Portability"}}),
                          default_taxonomy());
  EXPECT_FALSE(has(far, 10, "Data Subject Right.Portability"));
  auto near = post_process(layout(20, {{2, "Data Subject Right.Erasure"}, {10, "Data Subject Right.Portability"}}),
                           default_taxonomy());
  EXPECT_TRUE(has(near, 10, "Data Subject Right.Portability"));
  EXPECT_TRUE(has(near, 2, "Data Subject Right.Erasure"));
  auto after = post_process(layout(20, {{18, "Data Subject Right"}, {10, "Data Subject Right.Portability"}}),
                            default_taxonomy());
  EXPECT_TRUE(has(after, 10, "Data Subject Right.Portability"));
  EXPECT_TRUE(has(after, 18, "Data Subject Right"));
}

TEST(PostProcess, SupportFromSameSentenceDoesNotCount) {
  auto out = post_process(layout(5, {{2, "Data Subject Right.Access"}, {2, "Data Subject Right.Erasure"}}),
                          default_taxonomy());
  EXPECT_TRUE(out[2].labels.empty());
}

TEST(PostProcess, UnfilteredFamiliesUntouched) {
  auto in = layout(30, {{15, "Recipients"}, {3, "PD Origin.Indirect.Third Party"}, {25, "Data Subject Right"}});
  EXPECT_EQ(post_process(in, default_taxonomy()), in);
}

TEST(PostProcess, SmallerWindowForTransfers) {
  auto in = layout(12, {{2, "Transfer Outside Europe.Safeguards"}, {6, "Transfer Outside Europe.Specific Derogation"}});
  auto out = post_process(in, default_taxonomy());
  EXPECT_FALSE(has(out, 2, "Transfer Outside Europe.Safeguards"));
  in = layout(12, {{2, "Transfer Outside Europe.Safeguards"}, {5, "Transfer Outside Europe.Specific Derogation"}});
  EXPECT_EQ(post_process(in, default_taxonomy()), in);
}

TEST(PostProcess, RandomLayoutsMatchReferenceAndAreAntiExtensiveAndIdempotent) {
  std::mt19937_64 rng(2024);
  const auto& reg = default_taxonomy();
  auto pool = layout_pool();
  for (int trial = 0; trial < 1000; ++trial) {
    auto in = oracle::random_layout(rng, pool);
    auto once = post_process(in, reg);
    ASSERT_EQ(once.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
      EXPECT_EQ(once[i].index, in[i].index);
      EXPECT_TRUE(std::includes(in[i].labels.begin(), in[i].labels.end(), once[i].labels.begin(), once[i].labels.end()));
    }
    EXPECT_EQ(post_process(once, reg), once);
    EXPECT_EQ(once, oracle::post_process_reference(in, reg));
  }
}

TEST(Presence, DescendantsCountForAncestors) {
  PolicyMetadataPresence p;
  p.add(T("Data Subject Right.Access"), 3);
  p.add(T("Data Subject Right.Complaint.SA"), 7);
  p.add(T("Data Subject Right"), 1);
  EXPECT_TRUE(p.present(T("Data Subject Right")));
  EXPECT_TRUE(p.present(T("Data Subject Right.Complaint")));
  EXPECT_FALSE(p.present(T("Data Subject Right.Erasure")));
  EXPECT_EQ(p.evidence(T("Data Subject Right")), (std::set<std::size_t>{1, 3, 7}));
  EXPECT_EQ(p.evidence(T("Data Subject Right.Complaint")), (std::set<std::size_t>{7}));
  EXPECT_FALSE(p.present(MetadataType::parse("Data Subject")));
}

TEST(Presence, DoesNotLeakAcrossSiblingPrefixes) {
  PolicyMetadataPresence p;
  p.add(T("Controller Representative.Contact"), 2);
  EXPECT_FALSE(p.present(T("Controller")));
  EXPECT_TRUE(p.present(T("Controller Representative")));
}

TEST(Presence, NothingFiredMeansNothingPresent) {
  auto doc = identify_with_verdicts("empty", {"one.", "two."}, {Verdicts{}, Verdicts{}}, default_taxonomy(), kController,
                                    kRepresentative);
  for (const auto& n : default_taxonomy().nodes()) EXPECT_FALSE(doc.presence.present(n.type));
}

TEST(OracleMode, ExamplePresenceCoversEveryAnnotatedType) {
  const auto& corpus = ppc::testing::example_corpus();
  auto doc = identify_oracle(corpus, "hikari", default_taxonomy(), kController, kRepresentative);
  ASSERT_EQ(doc.predictions.size(), 41u);
  for (const auto& r : corpus.records)
    for (const auto& l : r.labels) {
      EXPECT_TRUE(doc.presence.present(l)) << l.str();
      EXPECT_TRUE(doc.predictions[r.index].labels.count(l)) << r.index << " " << l.str();
    }
}

TEST(OracleMode, RemovingConsentOnlyChangesConsent) {
  const auto& reg = default_taxonomy();
  const auto& corpus = ppc::testing::example_corpus();
  auto base = identify_oracle(corpus, "hikari", reg, kController, kRepresentative);
  auto mutated_corpus = ppc::testing::delete_type(corpus, T("Legal Basis.Consent"));
  auto mutated = identify_oracle(mutated_corpus, "hikari", reg, kController, kRepresentative);
  ASSERT_TRUE(base.presence.present(T("Legal Basis.Consent")));
  EXPECT_FALSE(mutated.presence.present(T("Legal Basis.Consent")));
  for (const auto& n : reg.nodes())
    if (n.type != T("Legal Basis.Consent"))
      EXPECT_EQ(base.presence.present(n.type), mutated.presence.present(n.type)) << n.type.str();
}

TEST(OracleMode, UnknownPolicyThrows) {
  EXPECT_THROW(identify_oracle(ppc::testing::example_corpus(), "nope", default_taxonomy(), kController, ""), Error);
}

TEST(OracleVerdicts, ReproduceLabelsThroughFusion) {
  const auto& reg = default_taxonomy();
  for (const auto& r : ppc::testing::example_corpus().records) {
    auto m = fuse(oracle_verdicts(r.labels, reg));
    for (const auto& l : r.labels) EXPECT_TRUE(m.count(l)) << r.index << " " << l.str();
  }
}

TEST(ModelMode, EmptyTokensGiveNoVerdicts) {
  TrainedModels models;
  models.dimension = 2;
  models.linear.emplace(T("Recipients"), LinearModel{T("Recipients"), {1, 1}, 5.0, 0});
  ProcessedSentence ps;
  ps.sentence.raw_text = "It is what it is.";
  EXPECT_EQ(classify_sentence(ps, EmbeddingVector(2), models, default_keyword_index()), Verdicts{});
}

TEST(ModelMode, DimensionMismatchThrows) {
  TrainedModels models;
  models.dimension = 3;
  WordVectorStore store(2);
  store.insert("data", EmbeddingVector(std::vector<double>{1, 0}));
  EXPECT_THROW(identify_metadata(RawDocument{"d", "We keep data.", ""}, default_nlp_config(), store, models,
                                 default_keyword_index(), default_taxonomy(), kController, ""),
               Error);
}

TEST(DumpPredictions, Format) {
  auto p = layout(3, {{0, "Recipients"}, {2, "Data Subject Right.Access"}, {2, "Data Subject Right"}});
  EXPECT_EQ(dump_predictions("doc", p), "doc\t0\tRecipients\ndoc\t2\tData Subject Right\ndoc\t2\tData Subject Right.Access\n");
}
