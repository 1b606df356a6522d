#include <gtest/gtest.h>

#include <random>

#include "etale/phigamma.hpp"
#include "etale/presets.hpp"

using namespace etale;

namespace {

struct Fixture {
  std::shared_ptr<const IwasawaContext> ctx;
  RhoParams P;
  Constants C;
  MuAlgebra mu;
  Fixture(int p, int f, int D, IntVec r, SubsetJ Jr, Mutation m = Mutation::None)
      : ctx(IwasawaContext::get(p, f, D)),
        P(validate_params(p, f, r, Jr)),
        C(P, m),
        mu(P, ctx->field_ptr(), 5) {}
  const ARing& A() const { return ctx->ring(); }
};

std::vector<WittElem> sample_units(const IwasawaContext& ctx, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<WittElem> us;
  for (int k = 0; k < n; ++k) us.push_back(ctx.witt().random_principal_unit(rng));
  return us;
}

ThetaProblem zero_problem(const ARing& A, SubsetJ J, SubsetJ Jp, int64_t prec) {
  const int f = A.f();
  return ThetaProblem{J, Jp, std::vector<FElem>(f, A.field().one()), IntVec(f, 1), std::vector<AElement>(f, A.zero(prec))};
}

}  // namespace

TEST(MatPhi, SingleEntryColumnWhenEverythingIsSemisimple) {
  Fixture s(13, 2, 30, IntVec{5, 6}, SubsetJ::full(2));
  auto M = mat_phi_untwisted(s.A(), s.C, s.mu);
  const SubsetJ full = SubsetJ::full(2);
  ASSERT_TRUE(M.has(full, full));
  // c^J vanishes for J = everything, so the entry is the scalar γ.
  EXPECT_TRUE(s.A().equal(M.get(full, full), s.A().scalar(s.mu.gamma(full, full))));
  for (const auto& Jp : all_subsets(2))
    if (Jp != full) EXPECT_FALSE(M.has(Jp, full));
}

TEST(MatPhi, TwistedEntryDegrees) {
  Fixture s(13, 2, 30, IntVec{5, 6}, SubsetJ::empty(2));
  auto M = mat_phi_twisted(s.A(), s.C, s.mu);
  for (const auto& [k, v] : M.entries()) {
    SubsetJ J = M.subset(k.second).shift(-1);
    int64_t want = 0;
    for (int j : J.complement().elements()) want -= 12 * (s.P.r[j] + 1);
    ASSERT_EQ(v.terms.size(), 1u);
    EXPECT_EQ(s.A().fdeg(v), want);
  }
}

TEST(MatPhi, InverseOfTheTwoByTwoCase) {
  Fixture s(11, 1, 40, IntVec{5}, SubsetJ::empty(1));
  const ARing& A = s.A();
  const Field& F = A.field();
  auto M = mat_phi_twisted(A, s.C, s.mu);
  const SubsetJ e = SubsetJ::empty(1), o = SubsetJ::full(1);
  // [[a, b], [0, d]] with a = γ_{∅,∅} Y^{6(1-φ)}, b = γ_{{0},∅}, d = γ_{{0},{0}}.
  AElement a = M.get(e, e), b = M.get(e, o), d = M.get(o, o);
  EXPECT_TRUE(A.equal(a, A.monomial(s.mu.gamma(e, e), IntVec{6 - 66})));
  EXPECT_TRUE(A.equal(b, A.scalar(s.mu.gamma(o, e))));
  EXPECT_TRUE(A.equal(d, A.scalar(s.mu.gamma(o, o))));
  EXPECT_FALSE(M.has(o, e));
  auto X = solve_right_inverse(A, M);
  AElement ai = A.invert_unit(a);
  FElem di = F.inv(s.mu.gamma(o, o));
  EXPECT_TRUE(A.equal(X.get(e, e), ai));
  EXPECT_TRUE(A.equal(X.get(o, o), A.scalar(di)));
  EXPECT_TRUE(A.equal(X.get(e, o), A.neg(A.mul(A.mul(ai, b), A.scalar(di)))));
  EXPECT_TRUE(A.zero_below(X.get(o, e), kExact));
}

TEST(MatPhi, LostUnitIsNotInvertible) {
  Fixture s(13, 2, 30, IntVec{5, 6}, SubsetJ::of(2, {0}));
  auto M = mat_phi_twisted(s.A(), s.C, s.mu);
  const SubsetJ J = SubsetJ::of(2, {1});
  M.set(J, J.shift(1), s.A().zero());
  try {
    solve_right_inverse(s.A(), M);
    FAIL() << "expected NotInvertible";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInvertible);
  }
}

TEST(MatPhi, SuitePassesOnEveryTupleAtF1AndF2) {
  for (const auto& pr : presets()) {
    if (pr.f > 2) continue;
    auto ctx = IwasawaContext::get(pr.p, pr.f, pr.default_cutoff);
    for (const auto& P : preset_params(pr)) {
      auto res = verify_etale_matrix(ctx->ring(), Constants(P), MuAlgebra(P, ctx->field_ptr(), 9));
      EXPECT_TRUE(res.passed) << P.to_string();
    }
  }
}

TEST(MatPhi, ChangeOfBasisCatchesTableMutations) {
  for (Mutation m : {Mutation::cJ, Mutation::rJ}) {
    Fixture s(13, 2, 30, IntVec{5, 6}, SubsetJ::of(2, {1}), m);
    EXPECT_FALSE(verify_etale_matrix(s.A(), s.C, s.mu).passed) << mutation_name(m);
  }
}

TEST(Theta, ConstantsAreInTheKernelWhenJEqualsJPrime) {
  auto ctx = IwasawaContext::get(13, 2, 30);
  const ARing& A = ctx->ring();
  ThetaProblem pr = zero_problem(A, SubsetJ::of(2, {0}), SubsetJ::of(2, {0}), 30);
  std::vector<AElement> mu_vec{A.scalar(ctx->field().gen(), 30), A.scalar(ctx->field().gen(), 30)};
  for (const auto& x : theta_apply(A, pr, mu_vec)) EXPECT_TRUE(x.empty());
}

TEST(Theta, ZeroRightHandSideGivesZero) {
  auto ctx = IwasawaContext::get(13, 2, 30);
  const ARing& A = ctx->ring();
  ThetaProblem pr = zero_problem(A, SubsetJ::full(2), SubsetJ::empty(2), 49);
  for (auto sched : {ThetaSchedule::Jacobi, ThetaSchedule::GaussSeidel})
    for (const auto& x : theta_solve(A, pr, sched).a) EXPECT_TRUE(x.empty());
}

TEST(Theta, HypothesesAreEnforced) {
  auto ctx = IwasawaContext::get(13, 2, 30);
  const ARing& A = ctx->ring();
  auto kind_of = [&](const ThetaProblem& pr) {
    try {
      theta_solve(A, pr);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigInvalid;
  };
  ThetaProblem same = zero_problem(A, SubsetJ::of(2, {0}), SubsetJ::of(2, {0}), 49);
  EXPECT_EQ(kind_of(same), ErrorKind::HypothesisViolation);
  ThetaProblem big_h = zero_problem(A, SubsetJ::full(2), SubsetJ::empty(2), 49);
  big_h.h = IntVec{13 - 2, 1};  // p-1-f = 10
  EXPECT_EQ(kind_of(big_h), ErrorKind::HypothesisViolation);
  ThetaProblem shallow = zero_problem(A, SubsetJ::full(2), SubsetJ::empty(2), 49);
  shallow.b[0] = A.monomial(A.field().one(), IntVec{13, -1}, 49);  // degree 12 < 2(p-1)
  EXPECT_EQ(kind_of(shallow), ErrorKind::HypothesisViolation);
  ThetaProblem twisted = zero_problem(A, SubsetJ::full(2), SubsetJ::empty(2), 49);
  twisted.b[1] = A.monomial(A.field().one(), IntVec{30, 0}, 49);
  EXPECT_EQ(kind_of(twisted), ErrorKind::HypothesisViolation);
  ThetaProblem exact = zero_problem(A, SubsetJ::full(2), SubsetJ::empty(2), kExact);
  EXPECT_EQ(kind_of(exact), ErrorKind::PrecisionExhausted);
}

TEST(Theta, SolverSuitePassesAtEveryPresetSize) {
  for (auto [p, f, D] : {std::tuple{11, 1, 40}, std::tuple{13, 2, 30}, std::tuple{17, 3, 34}}) {
    ARing A(Field::make(p, f), f);
    auto res = verify_theta_solver(A, 21, 20, theta_cutoff(p, f, D));
    EXPECT_TRUE(res.passed) << "f=" << f;
    EXPECT_EQ(res.checked, 20 * 6 * f);
  }
}

TEST(Theta, SolutionIsDeterministic) {
  ARing A(Field::make(13, 2), 2);
  std::mt19937_64 r1(3), r2(3);
  ThetaProblem a = random_theta_problem(A, r1, 49), b = random_theta_problem(A, r2, 49);
  auto s1 = theta_solve(A, a), s2 = theta_solve(A, b);
  for (int i = 0; i < 2; ++i) EXPECT_TRUE(A.equal(s1.a[i], s2.a[i]));
}

TEST(MatA, TorusActsTrivially) {
  Fixture s(13, 2, 30, IntVec{6, 5}, SubsetJ::of(2, {1}));
  WittElem g = s.ctx->witt().teichmuller(s.ctx->field().gen());
  MatA M = build_mat_a(*s.ctx, s.C, s.mu, g);
  EXPECT_TRUE(identity_defects(s.A(), M.P, kExact).empty());
}

TEST(MatA, SemisimpleCaseIsDiagonal) {
  Fixture s(13, 2, 30, IntVec{5, 5}, SubsetJ::full(2));
  auto us = sample_units(*s.ctx, 2, 4);
  MatA M = build_mat_a(*s.ctx, s.C, s.mu, us[0]);
  EXPECT_TRUE(M.diagonal);
  for (const auto& [k, v] : M.P.entries()) EXPECT_EQ(k.first, k.second);
  auto rep = check_commutation(*s.ctx, mat_phi_twisted(s.A(), s.C, s.mu), M.P, us[0]);
  EXPECT_TRUE(rep.ok);
  EXPECT_GE(rep.floor, 12);
}

TEST(MatA, OffDiagonalEntriesAreNontrivialAndNeeded) {
  Fixture s(13, 2, 30, IntVec{5, 6}, SubsetJ::empty(2));
  auto us = sample_units(*s.ctx, 1, 6);
  MatA M = build_mat_a(*s.ctx, s.C, s.mu, us[0]);
  const SubsetJ e = SubsetJ::empty(2), full = SubsetJ::full(2);
  AElement corner = M.P.get(e, full);
  EXPECT_FALSE(corner.empty());
  EXPECT_GE(s.A().fdeg(corner), 2 * 12);
  auto Pphi = mat_phi_twisted(s.A(), s.C, s.mu);
  EXPECT_TRUE(check_commutation(*s.ctx, Pphi, M.P, us[0]).ok);
  M.P.set(e, full, s.A().zero());
  EXPECT_FALSE(check_commutation(*s.ctx, Pphi, M.P, us[0]).ok);
}

TEST(MatA, SuitePassesAndMutationsAreDetected) {
  auto pr = preset_for_f(2);
  auto ctx = IwasawaContext::get(pr.p, pr.f, pr.default_cutoff);
  auto us = sample_units(*ctx, 3, 11);
  for (const auto& P : preset_params(pr)) {
    auto res = verify_mat_a(*ctx, Constants(P), MuAlgebra(P, ctx->field_ptr(), 2), us);
    EXPECT_TRUE(res.passed) << P.to_string();
    ASSERT_TRUE(res.floor.has_value());
    EXPECT_GE(*res.floor, pr.p - 1);
  }
  auto P = validate_params(13, 2, IntVec{6, 6}, SubsetJ::of(2, {0}));
  for (Mutation m : {Mutation::hj, Mutation::gamma}) {
    auto res = verify_mat_a(*ctx, Constants(P, m), MuAlgebra(P, ctx->field_ptr(), 2), us, 1, false);
    EXPECT_FALSE(res.passed) << mutation_name(m);
  }
}

TEST(MatA, SuitePassesAtF1) {
  auto pr = preset_for_f(1);
  auto ctx = IwasawaContext::get(pr.p, pr.f, pr.default_cutoff);
  auto us = sample_units(*ctx, 5, 12);
  for (const auto& P : preset_params(pr))
    EXPECT_TRUE(verify_mat_a(*ctx, Constants(P), MuAlgebra(P, ctx->field_ptr(), 3), us).passed) << P.to_string();
}

TEST(Eigen, Classification) {
  auto F = Field::make(13, 2);
  const int64_t qm1 = 168;
  auto c0 = classify_phi_q_eigen(*F, F->one(), IntVec{0, 0});
  EXPECT_TRUE(c0.line);
  EXPECT_EQ(c0.t, (IntVec{0, 0}));
  auto c1 = classify_phi_q_eigen(*F, F->one(), IntVec{qm1 * 2, -qm1});
  EXPECT_TRUE(c1.line);
  EXPECT_EQ(c1.t, (IntVec{2, -1}));
  EXPECT_FALSE(classify_phi_q_eigen(*F, F->gen(), IntVec{qm1, 0}).line);
  EXPECT_FALSE(classify_phi_q_eigen(*F, F->one(), IntVec{5, 0}).line);
}

TEST(Eigen, AgreesWithMonomialSubstitution) {
  auto F = Field::make(11, 2);
  ARing A(F, 2);
  const int64_t qm1 = 120;
  std::mt19937_64 rng(6);
  // a = c Y^{-t} solves a = λ Y^s φ^f(a) exactly when the classifier says so.
  for (int trial = 0; trial < 200; ++trial) {
    FElem lambda = trial % 3 == 0 ? F->random_nonzero(rng) : F->one();
    IntVec t{static_cast<int64_t>(rng() % 5) - 2, static_cast<int64_t>(rng() % 5) - 2};
    IntVec s = trial % 2 == 0 ? qm1 * t : IntVec{static_cast<int64_t>(rng() % 400) - 200, static_cast<int64_t>(rng() % 400) - 200};
    AElement a = A.monomial(F->random_nonzero(rng), -t);
    AElement rhs = A.mul_monomial(A.phi_pow(a, 2), lambda, s);
    bool solves = A.equal(a, rhs);
    auto cls = classify_phi_q_eigen(*F, lambda, s);
    EXPECT_EQ(solves, cls.line && cls.t == t) << "trial " << trial;
  }
}
