#include <gtest/gtest.h>

#include <random>
#include <numeric>
#include <set>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/fingerprint.h"
#include "phenogen/chem/smiles_parser.h"
#include "test_support.h"

namespace phenogen::chem {
namespace {

std::string key(std::string_view s) { return canonical_key(parse_smiles(s)); }

TEST(CanonicalKey, SameMoleculeDifferentOrder) {
  EXPECT_EQ(key("OCC"), key("CCO"));
  EXPECT_NE(key("CCO"), key("CCN"));
  EXPECT_EQ(key("c1ccccc1O"), key("Oc1ccccc1"));
  EXPECT_EQ(key("C1CC1C"), key("CC1CC1"));
  EXPECT_NE(key("CC=CC"), key("C=CCC"));
}

TEST(CanonicalKey, KeyReparsesToSameKey) {
  for (const auto& s : testing::read_lines(testing::data_path("seed_molecules.smi"))) {
    const std::string k = key(s);
    EXPECT_EQ(key(k), k) << s;
  }
}

// Spellings produced by tests/oracles/isobutane_spellings.py.
TEST(CanonicalKey, AllIsobutaneSpellingsShareOneKey) {
  const auto spellings = testing::read_lines(testing::data_path("isobutane_spellings.txt"));
  ASSERT_EQ(spellings.size(), 48u);
  std::set<std::string> keys;
  for (const auto& s : spellings) keys.insert(key(s));
  EXPECT_EQ(keys.size(), 1u);
  EXPECT_EQ(*keys.begin(), key("CC(C)C"));
}

TEST(CanonicalKey, InvariantUnderAtomPermutation) {
  const auto seeds = testing::read_lines(testing::data_path("seed_molecules.smi"));
  ASSERT_EQ(seeds.size(), 50u);
  std::mt19937_64 rng(99);
  int mismatches = 0;
  for (const auto& s : seeds) {
    const MolGraph g = parse_smiles(s);
    const std::string k = canonical_key(g);
    for (int p = 0; p < 1000; ++p) {
      if (canonical_key(testing::permute_graph(g, rng)) != k) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(CanonicalKey, InvariantUnderRespelling) {
  std::mt19937_64 rng(5);
  for (const auto& s : testing::read_lines(testing::data_path("seed_molecules.smi"))) {
    const MolGraph g = parse_smiles(s);
    const std::string k = canonical_key(g);
    std::vector<int> ranks(g.atom_count());
    std::iota(ranks.begin(), ranks.end(), 0);
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(ranks.begin(), ranks.end(), rng);
      const std::string spelled = write_smiles(g, ranks);
      EXPECT_EQ(key(spelled), k) << s << " spelled " << spelled;
    }
  }
}

TEST(CanonicalKey, DistinctSeedsGetDistinctKeys) {
  std::set<std::string> keys;
  const auto seeds = testing::read_lines(testing::data_path("seed_molecules.smi"));
  for (const auto& s : seeds) keys.insert(key(s));
  // c1ccccc1 and C1=CC=CC=C1 are different graphs here since no
  // kekulization is attempted.
  EXPECT_EQ(keys.size(), seeds.size());
}

TEST(Fingerprint, DeterministicAndSelfSimilar) {
  const MolGraph g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  const BitVector a = fingerprint(g);
  EXPECT_EQ(a, fingerprint(g));
  EXPECT_EQ(a, fingerprint(parse_smiles("Oc1ccc(NC(C)=O)cc1")));
  EXPECT_DOUBLE_EQ(tanimoto(a, a), 1.0);
  EXPECT_GT(a.count(), 0);
}

TEST(Fingerprint, MethaneVersusAniline) {
  const double t = tanimoto(fingerprint(parse_smiles("C")), fingerprint(parse_smiles("c1ccccc1N")));
  EXPECT_LT(t, 0.5);
  EXPECT_DOUBLE_EQ(t, 0.0);
}

TEST(Fingerprint, SizeMustBePowerOfTwo) {
  EXPECT_THROW(fingerprint(parse_smiles("CC"), 1000), std::exception);
  EXPECT_EQ(fingerprint(parse_smiles("CC"), 64).size(), 64);
}

}  // namespace
}  // namespace phenogen::chem
