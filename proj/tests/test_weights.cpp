#include <gtest/gtest.h>

#include "etale/presets.hpp"
#include "etale/weights.hpp"

using namespace etale;

namespace {
RhoParams P2(const SubsetJ& Jr) { return validate_params(13, 2, IntVec{5, 6}, Jr); }
}  // namespace

TEST(Params, Validation) {
  EXPECT_NO_THROW(validate_params(11, 1, IntVec{4}, SubsetJ::empty(1)));
  EXPECT_NO_THROW(validate_params(13, 2, IntVec{5, 6}, SubsetJ::full(2)));
  try {
    validate_params(11, 1, IntVec{3}, SubsetJ::empty(1));
    FAIL() << "expected a genericity violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenericityViolation);
  }
  EXPECT_THROW(validate_params(13, 2, IntVec{4, 6}, SubsetJ::full(2)), Error);
  EXPECT_THROW(validate_params(13, 2, IntVec{5, 7}, SubsetJ::full(2)), Error);
  EXPECT_THROW(validate_params(15, 2, IntVec{5, 6}, SubsetJ::full(2)), Error);
  EXPECT_THROW(validate_params(11, 2, IntVec{5, 5}, SubsetJ::full(2)), Error);
}

TEST(Params, PresetsAreGeneric) {
  EXPECT_EQ(preset_for_f(1).rs.size(), 3u);
  EXPECT_EQ(preset_for_f(2).rs.size(), 4u);
  EXPECT_EQ(preset_for_f(3).rs.size(), 8u);
  for (const auto& pr : presets()) EXPECT_EQ(preset_params(pr).size(), pr.rs.size() << pr.f);
}

TEST(Weights, SJTJExamples) {
  auto P = P2(SubsetJ::full(2));
  auto e = sJ_tJ(P, SubsetJ::empty(2));
  EXPECT_EQ(e.s, (IntVec{5, 6}));
  EXPECT_EQ(e.t, (IntVec{0, 0}));
  auto one = sJ_tJ(P, SubsetJ::of(2, {0}));
  EXPECT_EQ(one.s, (IntVec{6, 5}));
  EXPECT_EQ(one.t, (IntVec{-1, 7}));
  auto full = sJ_tJ(P, SubsetJ::full(2));
  EXPECT_EQ(full.s, (IntVec{13 - 3 - 5, 13 - 3 - 6}));
  EXPECT_EQ(full.t, (IntVec{6, 7}));
}

TEST(Weights, TranslationExamples) {
  for (const auto& pr : presets())
    for (const auto& P : preset_params(pr)) {
      EXPECT_EQ(translate_in_graph(P, SubsetJ::empty(P.f), IntVec(P.f, 0)).b, IntVec(P.f, 0));
      for (const auto& J : all_subsets(P.f)) {
        auto pt = decompose_parts(J, P.Jrho);
        EXPECT_EQ(translate_in_graph(P, J, -indicator(pt.nss)), sigma_J(P, pt.ss));
        SubsetJ m1 = J.shift(-1) & P.Jrho;
        EXPECT_EQ(translate_in_graph(P, J, -indicator(J ^ m1)), sigma_J(P, m1));
        for (const auto& Jp : all_subsets(P.f))
          EXPECT_EQ(translate_in_graph(P, J, -translation_to(P, J, Jp)), sigma_J(P, Jp))
              << P.to_string() << " J=" << J.to_string() << " J'=" << Jp.to_string();
      }
    }
  auto P = P2(SubsetJ::full(2));
  EXPECT_THROW(translate_in_graph(P, SubsetJ::empty(2), IntVec{-6, 0}), Error);
  EXPECT_THROW(translate_in_graph(P, SubsetJ::empty(2), IntVec{5, 0}), Error);
}

TEST(Weights, TranslationSignVariantIsInconsistent) {
  // On Jrho the alternative sign pattern (δ_{j∈J} − δ_{j∉J'}) lands on the "complement"
  // weight, so it cannot reproduce sigma_{J^ss} from J. Recorded to pin down the chosen form.
  auto P = P2(SubsetJ::full(2));
  int mismatches = 0;
  for (const auto& J : all_subsets(2)) {
    SubsetJ Jp = J & P.Jrho;
    IntVec b(2);
    for (int j = 0; j < 2; ++j)
      b[j] = (dlt(J.contains(j)) - dlt(!Jp.contains(j))) * sgn(J.contains(j + 1));
    if (translate_in_graph(P, J, -b) != sigma_J(P, Jp)) ++mismatches;
  }
  EXPECT_EQ(mismatches, 4);
}

TEST(Weights, SerreWeightSets) {
  auto P0 = P2(SubsetJ::empty(2));
  EXPECT_EQ(serre_weights_of_rhobar(P0), (WeightSet{WeightB{IntVec{0, 0}}}));
  EXPECT_EQ(serre_weights_of_rhobar(P2(SubsetJ::full(2))).size(), 4u);
  EXPECT_EQ(serre_weights_of_rhobar(P2(SubsetJ::of(2, {0}))),
            (WeightSet{WeightB{IntVec{0, 0}}, WeightB{IntVec{1, 0}}}));
  auto P1 = validate_params(11, 1, IntVec{4}, SubsetJ::empty(1));
  EXPECT_EQ(jh_D0(P1), (WeightSet{WeightB{IntVec{-1}}, WeightB{IntVec{0}}, WeightB{IntVec{1}}}));
}

TEST(Weights, ComponentsPartition) {
  for (const auto& pr : presets())
    for (const auto& P : preset_params(pr)) {
      auto full = jh_D0(P);
      std::size_t total = 0;
      WeightSet uni;
      for (const auto& J : all_subsets(P.f)) {
        if (!J.subset_of(P.Jrho)) {
          EXPECT_THROW(jh_D0_component(P, J), Error);
          continue;
        }
        auto c = jh_D0_component(P, J);
        total += c.size();
        uni.insert(c.begin(), c.end());
      }
      EXPECT_EQ(total, full.size());
      EXPECT_EQ(uni, full);
      for (const auto& w : serre_weights_of_rhobar(P)) EXPECT_EQ(full.count(w), 1u);
    }
}

TEST(Weights, ShiftGeneratedConstituents) {
  auto Pf = P2(SubsetJ::full(2));
  for (const auto& J : all_subsets(2)) {
    auto s = shift_generated_constituents(Pf, J, IntVec(2, 0));
    EXPECT_EQ(s, (WeightSet{WeightB{indicator(J)}}));
  }
  auto P0 = P2(SubsetJ::empty(2));
  auto s = shift_generated_constituents(P0, SubsetJ::of(2, {0}), IntVec{1, 0});
  EXPECT_EQ(s, (WeightSet{WeightB{IntVec{-1, 0}}, WeightB{IntVec{0, 0}}, WeightB{IntVec{1, 0}}}));
  EXPECT_THROW(shift_generated_constituents(P0, SubsetJ::of(2, {0}), IntVec{3, 0}), Error);
  EXPECT_THROW(shift_generated_constituents(Pf, SubsetJ::full(2), IntVec{2, 0}), Error);
}

TEST(Weights, AdmissibleFamilies) {
  auto Pf = P2(SubsetJ::full(2));
  EXPECT_EQ(enumerate_admissible_S(Pf).size(), 8u);
  auto P1 = validate_params(11, 1, IntVec{4}, SubsetJ::empty(1));
  auto fams = enumerate_admissible_S(P1);
  // {}, {∅}, {∅, {0}}
  EXPECT_EQ(fams, (std::vector<Family>{0b00, 0b01, 0b11}));
  for (const auto& pr : presets())
    for (const auto& P : preset_params(pr)) {
      auto all = enumerate_admissible_S(P);
      Family full = (Family{1} << (1u << P.f)) - 1;
      EXPECT_EQ(rank_for_S(P, full), int64_t{1} << P.f);
      EXPECT_EQ(rank_for_S(P, 0), 0);
      EXPECT_TRUE(jh_pi1(P, 0).empty());
      for (Family S : all) EXPECT_TRUE(is_admissible_S(P, S));
    }
  // {{0}} is not shift-stable for f = 2.
  EXPECT_THROW(rank_for_S(Pf, Family{1} << 1), Error);
}

TEST(Weights, RankForEmptyOnlyFamily) {
  auto Pf = P2(SubsetJ::full(2));
  Family S = 1;  // {∅}
  EXPECT_EQ(rank_for_S(Pf, S), 1);
  auto pi1 = jh_pi1(Pf, S);
  for (const auto& w : pi1) EXPECT_TRUE(w.b.leq(IntVec(2, 0)));
  std::size_t nonpos = 0;
  for (const auto& w : jh_D0(Pf)) nonpos += w.b.leq(IntVec(2, 0)) ? 1 : 0;
  EXPECT_EQ(pi1.size(), nonpos);
}

TEST(Characters, Basics) {
  for (const auto& pr : presets())
    for (const auto& P : preset_params(pr)) {
      EXPECT_EQ(char_of_weight(P, SubsetJ::empty(P.f)), chi_lambda(P, P.r, IntVec(P.f, 0)));
      for (const auto& J : all_subsets(P.f)) {
        auto c = char_of_weight(P, J);
        EXPECT_EQ(conjugate(conjugate(c)), c);
        EXPECT_EQ(char_of_x_index(P, J, IntVec(P.f, 0)), chi_prime(P, J));
      }
    }
}

TEST(Characters, ExponentReductionOracle) {
  auto P = P2(SubsetJ::full(2));
  // 1 + 13·2 = 27 and q − 1 = 168.
  EXPECT_EQ(reduce_exponent(P, IntVec{1, 2}), 27);
  EXPECT_EQ(reduce_exponent(P, IntVec{-1, 0}), 167);
  EXPECT_EQ(reduce_exponent(P, IntVec{168, 13}), 169 % 168);
}

TEST(Suites, WeightsAndRankPassOnPresets) {
  for (const auto& pr : presets())
    for (const auto& P : preset_params(pr)) {
      auto w = verify_weights(P);
      EXPECT_TRUE(w.passed) << P.to_string();
      EXPECT_GT(w.checked, 0);
      auto r = verify_rank(P);
      EXPECT_TRUE(r.passed) << P.to_string();
    }
}
