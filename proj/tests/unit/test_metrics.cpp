#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "phenogen/chem/fingerprint.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/error.h"
#include "phenogen/io/corpus.h"
#include "phenogen/metrics/metrics.h"
#include "phenogen/reward/oracle.h"
#include "phenogen/reward/reward.h"
#include "test_support.h"

namespace phenogen::metrics {
namespace {

using testing::data_path;
using testing::read_lines;
using testing::scratch_dir;

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::kInvalidArgument;
}

chem::DescriptorVector lip(double mw, double logp, int hbd, int hba) {
  chem::DescriptorVector d;
  d.mw = mw;
  d.logp_proxy = logp;
  d.hbd = hbd;
  d.hba = hba;
  return d;
}

// Drug-like molecules mixed with an invalid ring, an invalid valence and a
// duplicate spelling.
const std::vector<std::string> kMixed = {"CCO",      "OCC",  "c1ccccc1O", "C1CC",    "C(C)(C)(C)(C)C",
                                         "CC(=O)O",  "CCN",  "c1ccncc1",  "OC(C)=O", "CCCCCC"};

TEST(ValidityRate, WorkedExample) { EXPECT_DOUBLE_EQ(validity_rate({"CCO", "C1CC"}), 0.5); }

TEST(ValidityRate, EmptyListIsAnError) { EXPECT_EQ(error_of([] { validity_rate({}); }), Errc::kEmptyInput); }

TEST(ValidityRate, IgnoresQed) {
  // Valid but far outside any drug-like range.
  EXPECT_DOUBLE_EQ(validity_rate({"C", "CCCCCCCCCCCCCCCCCCCCCCCC"}), 1.0);
}

TEST(UniquenessRate, WorkedExamples) {
  EXPECT_DOUBLE_EQ(uniqueness_rate({"CCO", "OCC"}), 0.5);
  EXPECT_DOUBLE_EQ(uniqueness_rate({"CCO", "OCC", "CCN"}), 2.0 / 3.0);
}

TEST(UniquenessRate, InvalidEntriesDoNotCount) { EXPECT_DOUBLE_EQ(uniqueness_rate({"CCO", "C1CC", "CCN"}), 1.0); }

TEST(UniquenessRate, NoValidMolecules) {
  EXPECT_EQ(error_of([] { uniqueness_rate({"C1CC", "xyz"}); }), Errc::kNoValidMolecules);
}

TEST(UniquenessRate, DuplicatingNeverRaisesIt) {
  std::vector<std::string> twice = kMixed;
  twice.insert(twice.end(), kMixed.begin(), kMixed.end());
  EXPECT_LE(uniqueness_rate(twice), uniqueness_rate(kMixed));
  EXPECT_DOUBLE_EQ(uniqueness_rate(twice), uniqueness_rate(kMixed) / 2.0);
}

TEST(NoveltyRate, WorkedExample) {
  EXPECT_DOUBLE_EQ(novelty_rate({"CCO", "CCN"}, reference_keys({"NCC"})), 0.5);
}

TEST(NoveltyRate, EmptyReferenceIsFullyNovel) { EXPECT_DOUBLE_EQ(novelty_rate({"CCO", "CCN"}, {}), 1.0); }

TEST(NoveltyRate, CountsDistinctMolecules) {
  // Three copies of a known molecule and one new one: two distinct keys.
  EXPECT_DOUBLE_EQ(novelty_rate({"CCO", "OCC", "C(O)C", "CCN"}, reference_keys({"CCO"})), 0.5);
}

TEST(NoveltyRate, NoValidMolecules) {
  EXPECT_EQ(error_of([] { novelty_rate({"C1CC"}, {}); }), Errc::kNoValidMolecules);
}

TEST(InternalDiversity, MatchesIndependentPairwiseOracle) {
  // Golden value from tests/oracles/diversity_reference.py over the frozen
  // on-bits in diversity_bits.txt.
  std::vector<std::string> smiles;
  for (const auto& line : read_lines(data_path("diversity_bits.txt"))) {
    const std::string s = line.substr(0, line.find(' '));
    smiles.push_back(s);
    // The frozen bits still describe the current fingerprint.
    const chem::BitVector fp = chem::fingerprint(chem::parse_smiles(s), 1024);
    std::string bits = s;
    for (int b = 0; b < 1024; ++b) {
      if (fp.test(b)) bits += " " + std::to_string(b);
    }
    EXPECT_EQ(bits, line);
  }
  ASSERT_EQ(smiles.size(), 5u);
  EXPECT_NEAR(internal_diversity(smiles, 1024), 0.85385247041955104, 1e-12);
}

TEST(InternalDiversity, CopiesOfOneMoleculeWithoutDedup) {
  EXPECT_DOUBLE_EQ(internal_diversity({"c1ccccc1O", "Oc1ccccc1", "c1ccccc1O"}, 1024, false), 0.0);
  EXPECT_EQ(error_of([] { internal_diversity({"c1ccccc1O", "Oc1ccccc1"}, 1024, true); }), Errc::kTooFewMolecules);
}

TEST(InternalDiversity, DisjointFingerprints) {
  const chem::BitVector a = chem::fingerprint(chem::parse_smiles("C"));
  const chem::BitVector b = chem::fingerprint(chem::parse_smiles("O"));
  ASSERT_EQ(chem::tanimoto(a, b), 0.0);
  EXPECT_DOUBLE_EQ(internal_diversity({"C", "O"}), 1.0);
}

TEST(InternalDiversity, TooFewMolecules) {
  EXPECT_EQ(error_of([] { internal_diversity({"CCO"}); }), Errc::kTooFewMolecules);
  EXPECT_EQ(error_of([] { internal_diversity({"CCO", "C1CC"}); }), Errc::kTooFewMolecules);
}

TEST(InternalDiversity, StaysInUnitInterval) {
  const auto corpus = io::synth_corpus(40, 3);
  const double d = internal_diversity(corpus);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1.0);
}

TEST(Lipinski, StrictThresholds) {
  EXPECT_TRUE(lipinski_pass(lip(400, 3, 2, 5)));
  EXPECT_FALSE(lipinski_pass(lip(500, 3, 2, 5)));
  EXPECT_FALSE(lipinski_pass(lip(400, 5, 2, 5)));
  EXPECT_FALSE(lipinski_pass(lip(400, 3, 5, 5)));
  EXPECT_FALSE(lipinski_pass(lip(400, 3, 2, 10)));
  EXPECT_TRUE(lipinski_pass(lip(499.999, 4.999, 4, 9)));
}

TEST(Summarize, LinearInterpolationPercentiles) {
  const auto s = summarize({4.0, 1.0, 3.0, 2.0, 5.0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->count, 5);
  EXPECT_DOUBLE_EQ(s->mean, 3.0);
  EXPECT_DOUBLE_EQ(s->median, 3.0);
  EXPECT_DOUBLE_EQ(s->p90, 4.6);
  const auto even = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(even->median, 2.5);
  EXPECT_DOUBLE_EQ(even->p90, 3.7);
  EXPECT_DOUBLE_EQ(summarize({7.0})->p90, 7.0);
  EXPECT_FALSE(summarize({}));
}

TEST(Evaluate, AgreesWithStandaloneMetrics) {
  const auto ref = reference_keys({"CCO", "CCCCCC"});
  const EvalReport r = evaluate(kMixed, ref);
  EXPECT_EQ(r.n_generated, 10);
  EXPECT_EQ(r.n_valid, 8);
  EXPECT_DOUBLE_EQ(r.validity_rate, validity_rate(kMixed));
  EXPECT_DOUBLE_EQ(*r.uniqueness_rate, uniqueness_rate(kMixed));
  EXPECT_DOUBLE_EQ(*r.novelty_rate, novelty_rate(kMixed, ref));
  EXPECT_NEAR(*r.internal_diversity, internal_diversity(kMixed), 1e-15);
  EXPECT_TRUE(r.has_reference);
  ASSERT_TRUE(r.qed);
  EXPECT_EQ(r.qed->count, 6);
  EXPECT_FALSE(r.dock);
  EXPECT_FALSE(r.reward);
}

TEST(Evaluate, RowsOrderedByKeyThenInvalidText) {
  const EvalReport r = evaluate(kMixed, std::nullopt);
  ASSERT_EQ(r.molecules.size(), 8u);
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_TRUE(r.molecules[i].valid);
    keys.push_back(r.molecules[i].key);
  }
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_EQ(r.molecules[6].smiles, "C(C)(C)(C)(C)C");
  EXPECT_EQ(r.molecules[7].smiles, "C1CC");
  int total = 0;
  for (const auto& m : r.molecules) total += m.count;
  EXPECT_EQ(total, 10);
  EXPECT_FALSE(r.has_reference);
  EXPECT_DOUBLE_EQ(*r.novelty_rate, 1.0);
  EXPECT_FALSE(r.molecules[0].novel);
}

TEST(Evaluate, PermutationInvariant) {
  const auto ref = reference_keys({"CCO"});
  const std::string base = report_json(evaluate(kMixed, ref));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::string> shuffled = kMixed;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(report_json(evaluate(shuffled, ref)), base);
  }
}

TEST(Evaluate, EmptyList) { EXPECT_EQ(error_of([] { evaluate({}, std::nullopt); }), Errc::kEmptyInput); }

TEST(Evaluate, AllInvalid) {
  const EvalReport r = evaluate({"C1CC", "xyz"}, std::nullopt);
  EXPECT_EQ(r.n_valid, 0);
  EXPECT_FALSE(r.uniqueness_rate);
  EXPECT_FALSE(r.internal_diversity);
  EXPECT_FALSE(r.qed);
  EXPECT_EQ(r.molecules.size(), 2u);
}

TEST(Evaluate, CarriesDockingScores) {
  const std::vector<std::string> mols = {"CCO", "c1ccccc1O", "OCC", "C1CC"};
  reward::MockOracle oracle(1, reward::PharmacophoreSpec{});
  const auto recs = reward::reward_batch(mols, oracle, reward::RewardConfig{});
  const EvalReport r = evaluate(mols, std::nullopt, &recs);
  std::vector<double> raws;
  for (const auto& m : r.molecules) {
    if (m.raw_dock) raws.push_back(*m.raw_dock);
  }
  ASSERT_TRUE(r.dock);
  EXPECT_EQ(r.dock->count, static_cast<int>(raws.size()));
  for (const auto& rec : recs) {
    if (!rec.raw_dock) continue;
    const auto it = std::find_if(r.molecules.begin(), r.molecules.end(), [&](const MoleculeRow& m) { return m.key == rec.key; });
    ASSERT_NE(it, r.molecules.end());
    EXPECT_EQ(*it->raw_dock, *rec.raw_dock);
    EXPECT_EQ(*it->reward, rec.reward);
  }
  EXPECT_EQ(error_of([&] {
              const std::vector<reward::RewardRecord> short_recs(1);
              evaluate(mols, std::nullopt, &short_recs);
            }),
            Errc::kInvalidArgument);
}

TEST(EmitReport, RoundTripsThroughSchema) {
  const auto dir = scratch_dir("metrics_roundtrip");
  const EvalReport r = evaluate(kMixed, reference_keys({"CCO"}));
  emit_report(r, dir / "report.json", dir / "report.txt");
  const auto j = nlohmann::json::parse(io::read_file(dir / "report.json"));
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("n_generated"), r.n_generated);
  EXPECT_EQ(j.at("n_valid"), r.n_valid);
  EXPECT_EQ(j.at("validity_rate").get<double>(), r.validity_rate);
  EXPECT_EQ(j.at("uniqueness_rate").get<double>(), *r.uniqueness_rate);
  EXPECT_EQ(j.at("novelty_rate").get<double>(), *r.novelty_rate);
  EXPECT_EQ(j.at("internal_diversity").get<double>(), *r.internal_diversity);
  EXPECT_EQ(j.at("lipinski_pass_rate").get<double>(), *r.lipinski_pass_rate);
  EXPECT_EQ(j.at("qed").at("p90").get<double>(), r.qed->p90);
  EXPECT_TRUE(j.at("dock").is_null());
  EXPECT_TRUE(j.at("sa").is_null());
  ASSERT_EQ(j.at("molecules").size(), r.molecules.size());
  for (std::size_t i = 0; i < r.molecules.size(); ++i) {
    const auto& row = j.at("molecules")[i];
    const MoleculeRow& m = r.molecules[i];
    EXPECT_EQ(row.at("smiles"), m.smiles);
    EXPECT_EQ(row.at("count"), m.count);
    EXPECT_EQ(row.at("valid"), m.valid);
    EXPECT_TRUE(row.at("sa").is_null());
    if (m.valid) {
      EXPECT_EQ(row.at("key"), m.key);
      EXPECT_EQ(row.at("qed").get<double>(), *m.qed);
      EXPECT_EQ(row.at("hba").get<int>(), *m.hba);
      EXPECT_EQ(row.at("novel").get<bool>(), *m.novel);
    } else {
      EXPECT_TRUE(row.at("key").is_null());
      EXPECT_TRUE(row.at("qed").is_null());
    }
  }
  const std::string table = io::read_file(dir / "report.txt");
  EXPECT_NE(table.find("validity_rate"), std::string::npos);
  EXPECT_NE(table.find("C1CC"), std::string::npos);
}

TEST(EmitReport, ByteIdenticalAcrossRuns) {
  const auto dir = scratch_dir("metrics_bytes");
  emit_report(evaluate(kMixed, std::nullopt), dir / "a.json", dir / "a.txt");
  emit_report(evaluate(kMixed, std::nullopt), dir / "b.json", dir / "b.txt");
  EXPECT_EQ(io::read_file(dir / "a.json"), io::read_file(dir / "b.json"));
  EXPECT_EQ(io::read_file(dir / "a.txt"), io::read_file(dir / "b.txt"));
}

TEST(EmitReport, TableColumnsAligned) {
  const std::string table = report_table(evaluate(kMixed, std::nullopt));
  const auto body = table.substr(table.find("\n\n") + 2);
  std::vector<std::size_t> widths;
  std::size_t start = 0;
  while (start < body.size()) {
    const std::size_t end = body.find('\n', start);
    widths.push_back(end - start);
    start = end + 1;
  }
  ASSERT_EQ(widths.size(), 9u);
  for (std::size_t w : widths) EXPECT_EQ(w, widths.front());
}

TEST(EmitReport, EmptyReportWritesNothing) {
  const auto dir = scratch_dir("metrics_empty");
  EXPECT_EQ(error_of([&] { emit_report(EvalReport{}, dir / "r.json", dir / "r.txt"); }), Errc::kIoFailure);
  EXPECT_TRUE(std::filesystem::is_empty(dir));
}

TEST(EmitReport, UnwritableDestinationLeavesNoPartialFile) {
  const auto dir = scratch_dir("metrics_unwritable");
  const EvalReport r = evaluate(kMixed, std::nullopt);
  EXPECT_EQ(error_of([&] { emit_report(r, dir / "r.json", dir / "missing" / "r.txt"); }), Errc::kIoFailure);
  EXPECT_TRUE(std::filesystem::is_empty(dir));
}

}  // namespace
}  // namespace phenogen::metrics
