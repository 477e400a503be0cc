#include <gtest/gtest.h>

#include <functional>

#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/vocabulary.h"
#include "phenogen/error.h"

namespace phenogen::chem {
namespace {

const Vocabulary& V() { return Vocabulary::default_vocabulary(); }

std::vector<int> ids_of(std::initializer_list<const char*> toks) {
  std::vector<int> out{V().bos_id()};
  for (const char* t : toks) out.push_back(*V().id(t));
  out.push_back(V().eos_id());
  return out;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::kInvalidArgument;
}

TEST(Vocabulary, DenseIdsAndDistinctFraming) {
  const auto& v = V();
  EXPECT_EQ(v.size(), 40);
  EXPECT_NE(v.bos_id(), v.eos_id());
  EXPECT_NE(v.bos_id(), v.pad_id());
  EXPECT_NE(v.eos_id(), v.pad_id());
  for (int i = 0; i < v.size(); ++i) EXPECT_EQ(*v.id(v.token(i)), i);
}

TEST(Vocabulary, TextRoundTripPreservesHash) {
  const Vocabulary copy = Vocabulary::from_text(V().to_text());
  EXPECT_EQ(copy, V());
  EXPECT_EQ(copy.hash(), V().hash());
}

TEST(Vocabulary, RejectsMissingFramingTokens) {
  EXPECT_THROW(Vocabulary::from_text("C\nN\n"), Error);
}

TEST(Tokenizer, OneTokenPerAtomSymbol) {
  EXPECT_EQ(tokenize("CCO", V()).ids, ids_of({"C", "C", "O"}));
}

TEST(Tokenizer, MaximalMunchOnTwoLetterElements) {
  EXPECT_EQ(tokenize("CCl", V()).ids, ids_of({"C", "Cl"}));
  EXPECT_EQ(tokenize("BrCBr", V()).ids, ids_of({"Br", "C", "Br"}));
}

TEST(Tokenizer, BracketAtomsAreSingleTokens) {
  EXPECT_EQ(tokenize("c1cc[nH]c1", V()).ids, ids_of({"c", "1", "c", "c", "[nH]", "c", "1"}));
  EXPECT_EQ(tokenize("C[O-]", V()).ids, ids_of({"C", "[O-]"}));
}

TEST(Tokenizer, RingPairingIsNotCheckedAtTokenizeTime) {
  EXPECT_NO_THROW(tokenize("C1CC", V()));
}

TEST(Tokenizer, UnknownTokens) {
  EXPECT_EQ(code_of([] { tokenize("[zZ]", V()); }), Errc::kUnknownToken);
  EXPECT_EQ(code_of([] { tokenize("c1ccc(cc1)[nH]0", V()); }), Errc::kUnknownToken);
  EXPECT_EQ(code_of([] { tokenize("C<eos>", V()); }), Errc::kUnknownToken);
}

TEST(Tokenizer, LengthCap) {
  const std::string ok(100, 'C');
  const std::string too_long(101, 'C');
  const auto seq = tokenize(ok, V());
  EXPECT_EQ(seq.ids.size(), 102u);
  EXPECT_TRUE(is_well_formed(seq, V()));
  EXPECT_EQ(code_of([&] { tokenize(too_long, V()); }), Errc::kTooLong);
  EXPECT_EQ(code_of([] { tokenize("", V()); }), Errc::kInvalidArgument);
}

TEST(Tokenizer, DetokenizeRoundTrip) {
  for (const char* s : {"CCO", "CCl", "c1ccccc1", "CC(=O)[O-]", "C[C@@H](N)C(=O)O", "F/C=C/F",
                        "C[NH3+]", "c1ccc2ccccc2c1", "C#N", "O=[N+]([O-])c1ccccc1"}) {
    EXPECT_EQ(detokenize(tokenize(s, V()), V()), s) << s;
  }
}

TEST(Tokenizer, WellFormedness) {
  TokenSequence seq = tokenize("CC", V());
  EXPECT_TRUE(is_well_formed(seq, V()));
  seq.ids.insert(seq.ids.begin() + 1, V().pad_id());
  EXPECT_FALSE(is_well_formed(seq, V()));

  TokenSequence truncated{{V().bos_id(), *V().id("C")}, 1, true};
  EXPECT_TRUE(is_well_formed(truncated, V()));
  truncated.truncated = false;
  EXPECT_FALSE(is_well_formed(truncated, V()));
}

}  // namespace
}  // namespace phenogen::chem
