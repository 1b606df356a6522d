#include <gtest/gtest.h>

#include "etale/base.hpp"

using namespace etale;

TEST(SubsetJ, ShiftExamples) {
  EXPECT_EQ(SubsetJ::of(3, {0, 2}).shift(-1), SubsetJ::of(3, {1, 2}));
  EXPECT_EQ(SubsetJ::of(2, {0}).shift(1), SubsetJ::of(2, {1}));
  for (int f = 1; f <= 5; ++f)
    for (const auto& J : all_subsets(f)) {
      EXPECT_EQ(J.shift(f), J);
      for (int k = -2 * f; k <= 2 * f; ++k) EXPECT_EQ(J.shift(k).shift(-k), J);
    }
}

TEST(SubsetJ, ShiftMatchesElementwise) {
  for (int f = 1; f <= 6; ++f)
    for (const auto& J : all_subsets(f))
      for (int k = -f; k <= f; ++k) {
        SubsetJ want(f);
        for (int j : J.elements()) want = want.with(((j + k) % f + f) % f);
        EXPECT_EQ(J.shift(k), want);
      }
}

TEST(SubsetJ, DecomposeParts) {
  auto pt = decompose_parts(SubsetJ::of(3, {0, 2}), SubsetJ::full(3));
  EXPECT_EQ(pt.ss, SubsetJ::of(3, {0, 2}));
  EXPECT_TRUE(pt.nss.is_empty());
  EXPECT_EQ(pt.sh, SubsetJ::of(3, {2}));

  auto e = decompose_parts(SubsetJ::of(3, {1}), SubsetJ::empty(3));
  EXPECT_TRUE(e.ss.is_empty());
  EXPECT_EQ(e.nss, SubsetJ::of(3, {1}));
  EXPECT_TRUE(e.sh.is_empty());

  auto full = decompose_parts(SubsetJ::full(4), SubsetJ::full(4));
  EXPECT_TRUE(full.ss.is_full() && full.sh.is_full() && full.nss.is_empty());
}

TEST(SubsetJ, PartsInvariants) {
  for (int f = 1; f <= 5; ++f)
    for (const auto& J : all_subsets(f))
      for (const auto& Jr : all_subsets(f)) {
        auto pt = decompose_parts(J, Jr);
        EXPECT_TRUE(pt.sh.subset_of(pt.ss));
        EXPECT_TRUE(pt.ss.subset_of(J));
        EXPECT_TRUE((pt.ss & pt.nss).is_empty());
        EXPECT_EQ(pt.ss | pt.nss, J);
      }
}

namespace {
/// Number of maximal cyclic runs, counted by walking the circle.
int count_runs(const SubsetJ& J) {
  int f = J.f(), runs = 0;
  for (int j = 0; j < f; ++j)
    if (J.contains(j) && !J.contains(j - 1)) ++runs;
  return runs;
}
}  // namespace

TEST(SubsetJ, RightBoundary) {
  EXPECT_EQ(right_boundary(SubsetJ::of(3, {0, 2})), SubsetJ::of(3, {0}));
  EXPECT_EQ(right_boundary(SubsetJ::of(2, {1})), SubsetJ::of(2, {1}));
  EXPECT_TRUE(right_boundary(SubsetJ::full(3)).is_empty());
  EXPECT_TRUE(right_boundary(SubsetJ::empty(3)).is_empty());
  EXPECT_TRUE(right_boundary(SubsetJ::of(1, {0})).is_empty());
  for (int f = 1; f <= 6; ++f)
    for (const auto& J : all_subsets(f)) {
      auto d = right_boundary(J);
      EXPECT_TRUE(d.subset_of(J));
      if (!J.is_full()) {
        EXPECT_EQ(d.size(), count_runs(J));
      }
    }
}

TEST(SubsetJ, SymmetricDifference) {
  auto a = SubsetJ::of(2, {0});
  EXPECT_EQ(symmetric_difference(a, SubsetJ::full(2)), SubsetJ::of(2, {1}));
  for (const auto& J : all_subsets(4)) {
    EXPECT_TRUE(symmetric_difference(J, J).is_empty());
    EXPECT_EQ(symmetric_difference(J, SubsetJ::empty(4)), J);
  }
}

TEST(SubsetJ, RejectsMismatchedAmbient) {
  EXPECT_THROW(SubsetJ::full(2) & SubsetJ::full(3), Error);
  EXPECT_THROW(SubsetJ(17), Error);
}

TEST(IntVec, BasicOps) {
  IntVec i{3, 5};
  EXPECT_EQ(vec_shift(i), (IntVec{5, 3}));
  EXPECT_EQ(vec_norm(i), 8);
  EXPECT_EQ(indicator(SubsetJ::empty(3)), IntVec(3, 0));
  for (const auto& J : all_subsets(4)) EXPECT_EQ(indicator(J).norm(), J.size());
  IntVec v{1, -2, 7};
  IntVec s = v;
  for (int k = 0; k < 3; ++k) s = s.shifted();
  EXPECT_EQ(s, v);
  EXPECT_EQ(v[-1], 7);
  EXPECT_EQ(v[4], -2);
  EXPECT_TRUE((IntVec{0, 0}).leq(IntVec{0, 1}));
  EXPECT_FALSE((IntVec{1, 0}).leq(IntVec{0, 1}));
}
