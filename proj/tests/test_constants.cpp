#include <gtest/gtest.h>

#include "etale/constants.hpp"
#include "etale/presets.hpp"

using namespace etale;

namespace {

RhoParams P2(const SubsetJ& Jr) { return validate_params(13, 2, IntVec{5, 6}, Jr); }

// Case-table oracles indexed by (j in J, j+1 in J).
int64_t r_table(const RhoParams& P, const SubsetJ& J, int j) {
  bool a = J.contains(j), b = J.contains(j + 1);
  if (!a && !b) return 0;
  if (a && !b) return -1;
  if (!a && b) return P.r[j] + 1;
  return P.r[j];
}
int64_t c_table(const RhoParams& P, const SubsetJ& J, int j) {
  bool a = J.contains(j), b = J.contains(j + 1);
  if (!a && !b) return P.p - 1;
  if (a && !b) return P.r[j] + 1;
  if (!a && b) return P.p - 2 - P.r[j];
  return 0;
}

std::vector<RhoParams> small_sweep() {
  std::vector<RhoParams> out;
  for (const auto& pr : presets()) {
    if (pr.f > 2) continue;
    auto ps = preset_params(pr);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

}  // namespace

TEST(Constants, RJAgainstCaseTable) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    EXPECT_EQ(C.rJ(SubsetJ::empty(P.f)), IntVec(P.f, 0));
    EXPECT_EQ(C.rJ(SubsetJ::full(P.f)), P.r);
    for (const auto& J : all_subsets(P.f))
      for (int j = 0; j < P.f; ++j) EXPECT_EQ(C.rJ(J)[j], r_table(P, J, j));
  }
  auto P = P2(SubsetJ::full(2));
  Constants C(P);
  EXPECT_EQ(C.rJ(SubsetJ::of(2, {0})), (IntVec{-1, 7}));
  EXPECT_EQ(C.rJ(SubsetJ::of(2, {1})), (IntVec{6, -1}));
}

TEST(Constants, TJEqualsRJPlusShifting) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    for (const auto& J : all_subsets(P.f)) EXPECT_EQ(C.tJ(J), C.rJ(J) + indicator(C.parts(J).sh));
  }
}

TEST(Constants, CJAgainstCaseTable) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    EXPECT_EQ(C.cJ(SubsetJ::empty(P.f)), IntVec(P.f, P.p - 1));
    EXPECT_EQ(C.cJ(SubsetJ::full(P.f)), IntVec(P.f, 0));
    for (const auto& J : all_subsets(P.f)) {
      for (int j = 0; j < P.f; ++j) EXPECT_EQ(C.cJ(J)[j], c_table(P, J, j));
      IntVec lhs = P.p * indicator(J & J.shift(1)).shifted() + C.cJ(J) - C.cPrimeJ(J);
      EXPECT_EQ(lhs, IntVec(P.f, P.f));
    }
  }
}

TEST(Constants, EpsilonExamples) {
  auto P0 = P2(SubsetJ::empty(2));
  Constants C0(P0);
  EXPECT_EQ(C0.epsilonJ(SubsetJ::empty(2)), 1);
  EXPECT_EQ(C0.epsilonJ(SubsetJ::full(2)), -1);
  EXPECT_EQ(C0.epsilonJ(SubsetJ::of(2, {0})), 1);
  auto P3 = validate_params(17, 3, IntVec{7, 7, 7}, SubsetJ::empty(3));
  EXPECT_EQ(Constants(P3).epsilonJ(SubsetJ::full(3)), 1);
  // (J\∂J)^nss = {0} for J = {0,1} and Jrho = ∅.
  EXPECT_EQ(Constants(P3).epsilonJ(SubsetJ::of(3, {0, 1})), -1);
  auto P3f = validate_params(17, 3, IntVec{7, 7, 7}, SubsetJ::full(3));
  EXPECT_EQ(Constants(P3f).epsilonJ(SubsetJ::full(3)), 1);
}

TEST(Constants, TJJpExamples) {
  auto P = P2(SubsetJ::full(2));
  Constants C(P);
  EXPECT_EQ(C.tJJp(SubsetJ::empty(2), SubsetJ::empty(2)), (IntVec{7, 6}));
  for (const auto& J : all_subsets(2))
    EXPECT_EQ(C.tJJp(J, SubsetJ::full(2)), C.tJJp(J, SubsetJ::empty(2)) + IntVec(2, 1));
}

TEST(Constants, MVecBasics) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    EXPECT_EQ(C.mVec(IntVec(P.f, 0), SubsetJ::empty(P.f), SubsetJ::empty(P.f)), IntVec(P.f, 0));
  }
  auto P = P2(SubsetJ::full(2));
  Constants C(P);
  EXPECT_THROW(C.mVec(IntVec{-1, 0}, SubsetJ::empty(2), SubsetJ::empty(2)), Error);
  // {0,1} has full shifting index, so the cap is f-1 = 1.
  EXPECT_THROW(C.mVec(IntVec{2, 0}, SubsetJ::full(2), SubsetJ::empty(2)), Error);
  EXPECT_NO_THROW(C.mVec(IntVec{2, 0}, SubsetJ::of(2, {0}), SubsetJ::empty(2)));
}

TEST(Constants, TJxExamples) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    for (const auto& J : all_subsets(P.f))
      for (int j = 0; j < P.f; ++j) {
        EXPECT_EQ(C.tJx(J, j, 0), 0);
        if (!J.contains(j + 1)) EXPECT_EQ(C.tJx(J, j, 1), P.r[j] + 1);
        if (J.contains(j + 1)) EXPECT_EQ(C.tJx(J, j, 3), P.p + (P.p - 1 - P.r[j]));
        EXPECT_EQ(C.tJx(J, j, 4), 2 * P.p);
      }
  }
}

TEST(Constants, AJnHypotheses) {
  auto P = P2(SubsetJ::full(2));
  Constants C(P);
  EXPECT_THROW(C.aJn(SubsetJ::empty(2), IntVec{1, 1}, 0), Error);
  EXPECT_THROW(C.aJn(SubsetJ::full(2), IntVec{4, 0}, 0), Error);
  EXPECT_NO_THROW(C.aJn(SubsetJ::empty(2), IntVec{4, 0}, 0));
  // J = 𝒥 with Jrho = 𝒥: j0 = 0 lies in J^sh, so the j0 entry is 0.
  EXPECT_EQ(C.aJn(SubsetJ::full(2), IntVec{3, 0}, 0)[0], 0);
}

TEST(Constants, HJExamples) {
  auto P1 = validate_params(11, 1, IntVec{5}, SubsetJ::empty(1));
  Constants C1(P1);
  EXPECT_EQ(C1.hj(C1.h_default(), 0), 6);
  auto P = P2(SubsetJ::full(2));
  Constants C(P);
  IntVec h = C.h_default();
  EXPECT_EQ(C.hj(h, 0), 97);
  EXPECT_EQ(C.hj(h, 1), 85);
  EXPECT_EQ(13 * 85 - 97, 168 * 6);
  for (const auto& pr : presets())
    for (const auto& Q : preset_params(pr)) {
      Constants D(Q);
      IntVec hh = D.h_default();
      for (int j = 0; j < Q.f; ++j) EXPECT_EQ(Q.p * D.hj(hh, j + 1) - D.hj(hh, j), (Q.q() - 1) * (Q.r[j] + 1));
    }
}

TEST(Constants, DecomposeIndex) {
  auto P1 = validate_params(11, 1, IntVec{5}, SubsetJ::empty(1));
  Constants C1(P1);
  auto s = C1.decompose_index(SubsetJ::empty(1), IntVec{25});
  EXPECT_EQ(s.iPrime, IntVec{2});
  EXPECT_EQ(s.ell, IntVec{7});
  for (const auto& P : small_sweep()) {
    Constants C(P);
    for (const auto& J : all_subsets(P.f)) {
      auto z = C.decompose_index(J, C.cJ(J));
      EXPECT_EQ(z.iPrime, IntVec(P.f, 0));
      EXPECT_EQ(z.ell, IntVec(P.f, 0));
    }
  }
}

TEST(MuAlgebra, RatioAndSign) {
  auto F = Field::make(13, 2);
  for (const auto& Jr : all_subsets(2)) {
    auto P = P2(Jr);
    MuAlgebra M(P, F, 7);
    MuAlgebra M2(P, F, 7);
    Constants C(P);
    const auto subs = all_subsets(2);
    for (const auto& J : subs)
      for (const auto& Jp : subs) {
        if (!mu_pair_defined(P, J, Jp)) {
          EXPECT_THROW(M.mu(J, Jp), Error);
          continue;
        }
        EXPECT_EQ(M.mu(J, Jp), M2.mu(J, Jp));
        FElem ratio = F->div(M.gamma(J, Jp), M.mu(J, Jp));
        int sign = ((P.f - 1) % 2 == 0 ? 1 : -1) * C.epsilonJ(Jp);
        EXPECT_EQ(ratio, sign == 1 ? F->one() : F->neg(F->one()));
      }
    for (const auto& J1 : subs)
      for (const auto& J2 : subs)
        for (const auto& J3 : subs)
          for (const auto& J4 : subs) {
            if (!mu_pair_defined(P, J1, J3) || !mu_pair_defined(P, J1, J4) || !mu_pair_defined(P, J2, J3) ||
                !mu_pair_defined(P, J2, J4))
              continue;
            EXPECT_EQ(F->div(M.mu(J1, J3), M.mu(J1, J4)), F->div(M.mu(J2, J3), M.mu(J2, J4)));
          }
  }
}

TEST(Suites, IdentitySuitesPassOnSmallPresets) {
  for (const auto& P : small_sweep()) {
    Constants C(P);
    for (auto res : {verify_appendix_D(C), verify_lemma_A2(C), verify_region_claims(C), verify_bounds(C)}) {
      EXPECT_TRUE(res.passed) << res.name << " " << P.to_string();
      EXPECT_GT(res.checked, 0) << res.name;
      if (!res.passed && res.counterexample)
        for (const auto& [k, v] : *res.counterexample) ADD_FAILURE() << k << "=" << v;
    }
  }
}

TEST(Suites, EveryMutationIsDetected) {
  auto P = P2(SubsetJ::of(2, {0}));
  for (const auto& [m, name] : mutation_names()) {
    if (m == Mutation::None || m == Mutation::gamma) continue;
    Constants C(P, m);
    bool failed = false;
    for (auto res : {verify_appendix_D(C), verify_lemma_A2(C), verify_region_claims(C), verify_bounds(C)})
      failed = failed || !res.passed;
    EXPECT_TRUE(failed) << "mutation " << name << " escaped";
  }
}

TEST(Suites, RegionClaimsNeedTheLowerBoundOnP) {
  // p = 7 < 4f+4 with r at the edge of the weight range.
  RhoParams bad{7, 2, IntVec{5, 5}, SubsetJ::empty(2)};
  EXPECT_FALSE(verify_region_claims(Constants(bad)).passed);
}

TEST(Suites, FailureCarriesWitness) {
  auto P = P2(SubsetJ::full(2));
  auto res = verify_lemma_A2(Constants(P, Mutation::rJ));
  ASSERT_FALSE(res.passed);
  ASSERT_TRUE(res.counterexample.has_value());
  EXPECT_FALSE(res.counterexample->empty());
  EXPECT_GT(res.failures, 0);
}
