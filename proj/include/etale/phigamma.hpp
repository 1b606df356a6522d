#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "base.hpp"
#include "check.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "iwasawa.hpp"
#include "laurent.hpp"
#include "parallel.hpp"
#include "weights.hpp"

namespace etale {

/// A 2^f x 2^f matrix over A with rows and columns indexed by subsets of {0..f-1}.
/// Only declared entries are stored; every other entry is zero.
class PhiGammaMatrix {
 public:
  using Key = std::pair<uint32_t, uint32_t>;

  explicit PhiGammaMatrix(RhoParams P) : params_(std::move(P)) {}

  const RhoParams& params() const { return params_; }
  int f() const { return params_.f; }
  std::size_t dim() const { return std::size_t{1} << params_.f; }

  void set(const SubsetJ& row, const SubsetJ& col, AElement x) { entries_[{row.bits(), col.bits()}] = std::move(x); }
  const AElement* find(const SubsetJ& row, const SubsetJ& col) const {
    auto it = entries_.find({row.bits(), col.bits()});
    return it == entries_.end() ? nullptr : &it->second;
  }
  bool has(const SubsetJ& row, const SubsetJ& col) const { return find(row, col) != nullptr; }
  AElement get(const SubsetJ& row, const SubsetJ& col) const {
    const AElement* x = find(row, col);
    return x ? *x : AElement{kExact, {}};
  }
  const std::map<Key, AElement>& entries() const { return entries_; }
  SubsetJ subset(uint32_t bits) const { return SubsetJ(params_.f, bits); }

 private:
  RhoParams params_;
  std::map<Key, AElement> entries_;
};

namespace detail {

inline PhiGammaMatrix mat_mul(const ARing& A, const PhiGammaMatrix& X, const PhiGammaMatrix& Y) {
  PhiGammaMatrix Z(X.params());
  std::map<uint32_t, std::vector<const std::pair<const PhiGammaMatrix::Key, AElement>*>> rows_of_y;
  for (const auto& e : Y.entries()) rows_of_y[e.first.first].push_back(&e);
  std::map<PhiGammaMatrix::Key, AElement> acc;
  for (const auto& [kx, x] : X.entries()) {
    auto it = rows_of_y.find(kx.second);
    if (it == rows_of_y.end()) continue;
    for (const auto* ey : it->second) {
      PhiGammaMatrix::Key k{kx.first, ey->first.second};
      AElement prod = A.mul(x, ey->second);
      auto [slot, fresh] = acc.try_emplace(k, prod);
      if (!fresh) slot->second = A.add(slot->second, prod);
    }
  }
  for (auto& [k, v] : acc) Z.set(Z.subset(k.first), Z.subset(k.second), std::move(v));
  return Z;
}

template <typename Fn>
PhiGammaMatrix mat_map(const PhiGammaMatrix& X, Fn&& fn) {
  PhiGammaMatrix Z(X.params());
  for (const auto& [k, v] : X.entries()) Z.set(Z.subset(k.first), Z.subset(k.second), fn(v));
  return Z;
}

/// Under Mutation::gamma, the one off-diagonal slot (J^ss, J+1) whose sign is flipped:
/// the first J (by bits) with J^ss != J. None exists when Jrho is everything.
inline std::optional<std::pair<uint32_t, uint32_t>> mutated_gamma_slot(const Constants& C) {
  if (C.mutation() != Mutation::gamma) return std::nullopt;
  for (const auto& J : all_subsets(C.f())) {
    SubsetJ ss = C.parts(J).ss;
    if (ss != J) return std::pair{ss.bits(), J.shift(1).bits()};
  }
  return std::nullopt;
}

inline FElem phi_entry_gamma(const Constants& C, const MuAlgebra& mu, const SubsetJ& J, const SubsetJ& Jp,
                             const std::optional<std::pair<uint32_t, uint32_t>>& slot) {
  FElem g = mu.gamma(J.shift(1), Jp);
  if (slot && slot->first == Jp.bits() && slot->second == J.shift(1).bits()) g = mu.field().neg(g);
  return g;
}

/// The row subsets J' with J^ss ⊆ J' ⊆ J.
inline std::vector<SubsetJ> phi_support_rows(const Constants& C, const SubsetJ& J) {
  std::vector<SubsetJ> out;
  SubsetJ ss = C.parts(J).ss;
  for (const auto& Jp : all_subsets(C.f()))
    if (ss.subset_of(Jp) && Jp.subset_of(J)) out.push_back(Jp);
  return out;
}

inline IntVec twist_sum(const ARing& A, const SubsetJ& S, const IntVec& h) {
  IntVec k(A.f(), 0);
  for (int j : S.elements()) k += A.twist_exponent(j, h[j]);
  return k;
}

inline int64_t mod_inverse(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, b = ((a % m) + m) % m;
  while (b != 0) {
    int64_t qt = g / b;
    std::tie(g, b) = std::pair{b, g - qt * b};
    std::tie(x, x1) = std::pair{x1, x - qt * x1};
  }
  require(g == 1, ErrorKind::ConfigInvalid, "no inverse modulo p^N");
  return ((x % m) + m) % m;
}

}  // namespace detail

/// Mat(φ): entry (J', J+1) is γ_{J+1,J'} Y^{-(c^J + r^{J\J'})} for J^ss ⊆ J' ⊆ J.
inline PhiGammaMatrix mat_phi_untwisted(const ARing& A, const Constants& C, const MuAlgebra& mu) {
  PhiGammaMatrix M(C.params());
  auto slot = detail::mutated_gamma_slot(C);
  for (const auto& J : all_subsets(C.f()))
    for (const auto& Jp : detail::phi_support_rows(C, J)) {
      IntVec k = -(C.cJ(J) + C.rJ(J - Jp));
      M.set(Jp, J.shift(1), A.monomial(detail::phi_entry_gamma(C, mu, J, Jp, slot), k));
    }
  return M;
}

/// Mat(φ)': entry (J', J+1) is γ_{J+1,J'} Π_{j∉J} Y_j^{(r_j+1)(1-φ)} on the same support.
inline PhiGammaMatrix mat_phi_twisted(const ARing& A, const Constants& C, const MuAlgebra& mu) {
  PhiGammaMatrix M(C.params());
  auto slot = detail::mutated_gamma_slot(C);
  const IntVec h = C.params().r + IntVec(C.f(), 1);
  for (const auto& J : all_subsets(C.f())) {
    IntVec k = detail::twist_sum(A, J.complement(), h);
    for (const auto& Jp : detail::phi_support_rows(C, J))
      M.set(Jp, J.shift(1), A.monomial(detail::phi_entry_gamma(C, mu, J, Jp, slot), k));
  }
  return M;
}

/// Diagonal change of basis Q_{J,J} = Y^{r^{J^c}}.
inline PhiGammaMatrix change_of_basis_Q(const ARing& A, const Constants& C) {
  PhiGammaMatrix Q(C.params());
  for (const auto& J : all_subsets(C.f())) Q.set(J, J, A.Y(C.rJ(J.complement())));
  return Q;
}

/// Q · M · φ(Q)^{-1} for diagonal monomial Q.
inline PhiGammaMatrix apply_change_of_basis(const ARing& A, const PhiGammaMatrix& Q, const PhiGammaMatrix& M) {
  PhiGammaMatrix phiQinv(Q.params());
  for (const auto& [k, v] : Q.entries())
    phiQinv.set(Q.subset(k.first), Q.subset(k.second), A.invert_unit(A.phi(v)));
  return detail::mat_mul(A, detail::mat_mul(A, Q, M), phiQinv);
}

/// X with M X = I, for M supported on {(J', J+1) : J' ⊆ J}. With N_{J',J} = M_{J',J+1}
/// upper triangular for inclusion, Z = N^{-1} comes from back-substitution and X_{J+1,L} = Z_{J,L}.
inline PhiGammaMatrix solve_right_inverse(const ARing& A, const PhiGammaMatrix& M) {
  const int f = M.f();
  const auto subs = all_subsets(f);
  for (const auto& [k, v] : M.entries()) {
    SubsetJ row = M.subset(k.first), J = M.subset(k.second).shift(-1);
    require(row.subset_of(J) || v.empty(), ErrorKind::ConfigInvalid,
            "entry (" + row.to_string() + "," + J.shift(1).to_string() + ") breaks the triangular support");
  }
  auto N = [&](const SubsetJ& r, const SubsetJ& c) { return M.get(r, c.shift(1)); };
  std::vector<AElement> diag_inv;
  for (const auto& J : subs) {
    AElement d = N(J, J);
    require(!d.empty(), ErrorKind::NotInvertible, "diagonal slot (" + J.to_string() + "," + J.shift(1).to_string() + ") is zero");
    try {
      diag_inv.push_back(A.invert_unit(d));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotAUnit) throw;
      fail(ErrorKind::NotInvertible, "diagonal slot (" + J.to_string() + "," + J.shift(1).to_string() + ") is not a unit");
    }
  }
  std::vector<SubsetJ> by_size = subs;
  std::stable_sort(by_size.begin(), by_size.end(), [](const SubsetJ& a, const SubsetJ& b) { return a.size() > b.size(); });
  PhiGammaMatrix X(M.params());
  std::map<std::pair<uint32_t, uint32_t>, AElement> Z;
  for (const auto& L : subs)
    for (const auto& J : by_size) {
      if (!J.subset_of(L)) continue;
      AElement s = J == L ? A.one() : A.zero();
      for (const auto& K : subs) {
        if (!(J.proper_subset_of(K) && K.subset_of(L))) continue;
        AElement n = N(J, K);
        if (n.empty()) continue;
        s = A.sub(s, A.mul(n, Z.at({K.bits(), L.bits()})));
      }
      AElement z = A.mul(diag_inv[J.bits()], s);
      Z[{J.bits(), L.bits()}] = z;
      if (!z.empty()) X.set(J.shift(1), L, z);
    }
  return X;
}

/// Entries of M - I that carry a term below `below`, as (row, col) pairs.
inline std::vector<std::pair<SubsetJ, SubsetJ>> identity_defects(const ARing& A, const PhiGammaMatrix& M, int64_t below) {
  std::vector<std::pair<SubsetJ, SubsetJ>> out;
  for (const auto& J : all_subsets(M.f()))
    for (const auto& L : all_subsets(M.f())) {
      AElement d = M.get(J, L);
      if (J == L) d = A.sub(d, A.one());
      if (!A.zero_below(d, below)) out.emplace_back(J, L);
    }
  return out;
}

// ---------------------------------------------------------------------------
// The θ-operator.

/// θ(a)_i = a_i − λ_i Π_{j−i∈J\J'} Y_j^{h_j(1−φ)} Π_{j−i∈J'\J} Y_j^{−h_j(1−φ)} φ(a_{i+1}).
struct ThetaProblem {
  SubsetJ J, Jp;
  std::vector<FElem> lambda;
  IntVec h;
  std::vector<AElement> b;
};

enum class ThetaSchedule { Jacobi, GaussSeidel };

struct ThetaSolution {
  std::vector<AElement> a;
  int iterations = 0;
};

/// Exponent of the monomial multiplying φ(a_{i+1}) in θ(a)_i.
inline IntVec theta_monomial(const ARing& A, const ThetaProblem& pr, int i) {
  IntVec k(A.f(), 0);
  for (int j = 0; j < A.f(); ++j) {
    int d = ((j - i) % A.f() + A.f()) % A.f();
    if (pr.J.contains(d) && !pr.Jp.contains(d)) k += A.twist_exponent(j, pr.h[j]);
    if (pr.Jp.contains(d) && !pr.J.contains(d)) k -= A.twist_exponent(j, pr.h[j]);
  }
  return k;
}

/// λ_i Y^{k_i} φ(a_{i+1}), the part of θ that is not the identity.
inline AElement theta_tail(const ARing& A, const ThetaProblem& pr, const std::vector<AElement>& a, int i) {
  const int f = A.f();
  return A.mul_monomial(A.phi(a[(i + 1) % f]), pr.lambda[i], theta_monomial(A, pr, i));
}

inline std::vector<AElement> theta_apply(const ARing& A, const ThetaProblem& pr, const std::vector<AElement>& a) {
  const int f = A.f();
  require(static_cast<int>(a.size()) == f, ErrorKind::ConfigInvalid, "theta_apply needs f components");
  for (const auto& x : a) require(A.is_torus_fixed(x), ErrorKind::HypothesisViolation, "theta_apply needs torus-fixed input");
  std::vector<AElement> out;
  for (int i = 0; i < f; ++i) out.push_back(A.sub(a[i], theta_tail(A, pr, a, i)));
  return out;
}

/// Hypotheses of the solver branch: J' ⊊ J, 1 <= h_j <= p-1-f, b torus-fixed with fdeg b_i >= |J\J'|(p-1).
inline void theta_check_hypotheses(const ARing& A, const ThetaProblem& pr) {
  const int f = A.f(), p = A.p();
  require(static_cast<int>(pr.b.size()) == f && static_cast<int>(pr.lambda.size()) == f && pr.h.f() == f,
          ErrorKind::ConfigInvalid, "theta problem needs f components");
  require(pr.Jp.proper_subset_of(pr.J), ErrorKind::HypothesisViolation, "solver needs J' ⊊ J");
  for (int j = 0; j < f; ++j) {
    require(pr.h[j] >= 1 && pr.h[j] <= p - 1 - f, ErrorKind::HypothesisViolation,
            "h_" + std::to_string(j) + " = " + std::to_string(pr.h[j]) + " outside [1, p-1-f]");
    require(!pr.lambda[j].is_zero(), ErrorKind::HypothesisViolation, "lambda must be nonzero");
  }
  const int64_t depth = static_cast<int64_t>((pr.J - pr.Jp).size()) * (p - 1);
  for (int i = 0; i < f; ++i) {
    require(A.is_torus_fixed(pr.b[i]), ErrorKind::HypothesisViolation, "b_" + std::to_string(i) + " is not torus-fixed");
    require(A.fdeg(pr.b[i]) >= depth, ErrorKind::HypothesisViolation,
            "fdeg b_" + std::to_string(i) + " = " + std::to_string(A.fdeg(pr.b[i])) + " < " + std::to_string(depth));
  }
}

/// The unique a with θ(a) = b, below the precision of b.
/// Jacobi iterates a <- b + tail(a) from a = b; Gauss-Seidel sweeps i = f-1..0 from a = 0.
inline ThetaSolution theta_solve(const ARing& A, const ThetaProblem& pr, ThetaSchedule schedule = ThetaSchedule::Jacobi) {
  theta_check_hypotheses(A, pr);
  const int f = A.f();
  int64_t P = kExact;
  for (const auto& x : pr.b) P = std::min(P, x.prec);
  require(P < kExact, ErrorKind::PrecisionExhausted, "theta_solve needs b at finite precision");
  const int64_t max_iter = std::max<int64_t>(P, 0) + 2;
  ThetaSolution sol;
  auto same = [&](const std::vector<AElement>& x, const std::vector<AElement>& y) {
    for (int i = 0; i < f; ++i)
      if (!A.equal(x[i], y[i])) return false;
    return true;
  };
  if (schedule == ThetaSchedule::Jacobi) {
    std::vector<AElement> a;
    for (const auto& x : pr.b) a.push_back(A.truncate(x, P));
    while (true) {
      require(sol.iterations < max_iter, ErrorKind::NonConvergence, "Jacobi iteration stalled");
      ++sol.iterations;
      std::vector<AElement> next;
      for (int i = 0; i < f; ++i) next.push_back(A.truncate(A.add(pr.b[i], theta_tail(A, pr, a, i)), P));
      if (same(next, a)) break;
      a = std::move(next);
    }
    sol.a = std::move(a);
  } else {
    std::vector<AElement> a(f, A.zero(P));
    while (true) {
      require(sol.iterations < max_iter, ErrorKind::NonConvergence, "Gauss-Seidel iteration stalled");
      ++sol.iterations;
      std::vector<AElement> before = a;
      for (int i = f - 1; i >= 0; --i) a[i] = A.truncate(A.add(pr.b[i], theta_tail(A, pr, a, i)), P);
      if (same(before, a)) break;
    }
    sol.a = std::move(a);
  }
  return sol;
}

/// Torus-fixed monomial exponents come from the lattice spanned by p e_j - e_{j+1}, each of degree p-1.
inline IntVec random_torus_exponent(int p, int f, int count, std::mt19937_64& rng) {
  IntVec k(f, 0);
  std::uniform_int_distribution<int> pick(0, f - 1);
  for (int c = 0; c < count; ++c) {
    int j = pick(rng);
    k[j] += p;
    k[j + 1] -= 1;
  }
  return k;
}

/// A random problem meeting the solver hypotheses, with b at precision `cutoff`.
inline ThetaProblem random_theta_problem(const ARing& A, std::mt19937_64& rng, int64_t cutoff) {
  const int f = A.f(), p = A.p();
  const Field& F = A.field();
  std::uniform_int_distribution<uint32_t> bits(1, (1u << f) - 1);
  SubsetJ J(f, bits(rng));
  SubsetJ Jp(f, 0);
  do {
    Jp = SubsetJ(f, static_cast<uint32_t>(rng()) & J.bits());
  } while (Jp == J);
  ThetaProblem pr{J, Jp, {}, IntVec(f, 0), {}};
  std::uniform_int_distribution<int> hd(1, p - 1 - f);
  for (int j = 0; j < f; ++j) {
    pr.lambda.push_back(F.random_nonzero(rng));
    pr.h[j] = hd(rng);
  }
  const int d = (J - Jp).size();
  std::uniform_int_distribution<int> nterms(0, 5), extra(0, 2);
  for (int i = 0; i < f; ++i) {
    AElement b = A.zero(cutoff);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
      IntVec k = random_torus_exponent(p, f, d + extra(rng), rng);
      b = A.add(b, A.monomial(F.random_nonzero(rng), k, cutoff));
    }
    pr.b.push_back(b);
  }
  return pr;
}

/// Smallest cutoff that keeps the congruence a_i ≡ b_i mod F_{(f+1)(1-p)}A visible.
inline int64_t theta_cutoff(int p, int f, int64_t D) { return std::max<int64_t>(D, (f + 1) * (p - 1) + p); }

// ---------------------------------------------------------------------------
// Mat(a)'.

/// Mat(a)' = Q_a · diag(P_{a,J}) with Q_a unit upper triangular for inclusion.
struct MatA {
  PhiGammaMatrix P;
  PhiGammaMatrix Q;
  std::vector<AElement> Paj;  // P_{a,j}
  bool diagonal = false;
  int theta_solves = 0;
  int theta_iterations = 0;
};

/// P_{a,j} = f_{a,j}^{h^{(j)}(1-φ)/(1-q)} with h^{(j)} = Σ_i h_{j+i} p^i and h = r + 1.
inline std::vector<AElement> unit_twist_factors(const IwasawaContext& ctx, const Constants& C, const WittElem& u) {
  const ARing& A = ctx.ring();
  const WittRing& W = ctx.witt();
  auto ua = ctx.unit(u);
  const int64_t pN = W.pN();
  const int64_t q = C.params().q();
  const int64_t inv = detail::mod_inverse(((1 - q) % pN + pN) % pN, pN);
  const IntVec h = C.h_default();
  std::vector<AElement> out;
  for (int j = 0; j < C.f(); ++j) {
    const int64_t hjj = ((C.hj(h, j) % pN) + pN) % pN;
    ZpExponent e = ZpExponent::from_int(ctx.p(), W.N(), static_cast<int64_t>((static_cast<__int128>(hjj) * inv) % pN));
    const AElement& fa = ua->f_a[j];
    out.push_back(A.zp_power_phi(fa, {e, e.neg()}, fa.prec));
  }
  return out;
}

inline AElement unit_twist_product(const ARing& A, const std::vector<AElement>& Paj, const SubsetJ& S) {
  AElement r = A.one();
  for (int j : S.elements()) r = A.mul(r, Paj[j]);
  return r;
}

/// Right-hand side b_{0,1} − b_{0,2} of the θ-equation for the entry Q_{X',X}.
inline AElement mat_a_rhs(const ARing& A, const Constants& C, const MuAlgebra& mu, const std::vector<AElement>& Paj,
                          const std::map<std::pair<uint32_t, uint32_t>, AElement>& Qm, const SubsetJ& Xp,
                          const SubsetJ& X) {
  const int f = C.f();
  const Field& F = A.field();
  const IntVec h = C.params().r + IntVec(f, 1);
  auto Q = [&](const SubsetJ& r, const SubsetJ& c) -> AElement {
    if (r == c) return A.one();
    return Qm.at({r.bits(), c.bits()});
  };
  const FElem g_den = mu.gamma(X.shift(1), X);
  const SubsetJ Xss = C.parts(X).ss;
  AElement b01 = A.zero(), b02 = A.zero();
  for (const auto& K : all_subsets(f)) {
    if (Xp.proper_subset_of(K) && K.subset_of(X) && C.parts(K).ss.subset_of(Xp)) {
      FElem c = F.div(mu.gamma(K.shift(1), Xp), g_den);
      AElement term = A.mul_monomial(A.phi(Q(K.shift(1), X.shift(1))), c, detail::twist_sum(A, X - K, h));
      b01 = A.add(b01, term);
    }
    if ((Xp | Xss).subset_of(K) && K.proper_subset_of(X)) {
      AElement term = A.mul(Q(Xp, K), unit_twist_product(A, Paj, X - K));
      b02 = A.add(b02, A.scale(mu.gamma_star_ratio(K, X), term));
    }
  }
  return A.sub(b01, b02);
}

/// Mat(a)' for the unit u, with diagonal normalization ξ = 1. When Jrho is everything the
/// result is diag(P_{a,J}) with B = I.
inline MatA build_mat_a(const IwasawaContext& ctx, const Constants& C, const MuAlgebra& mu, const WittElem& u) {
  const ARing& A = ctx.ring();
  const int f = C.f();
  const auto subs = all_subsets(f);
  MatA out{PhiGammaMatrix(C.params()), PhiGammaMatrix(C.params()), unit_twist_factors(ctx, C, u)};
  std::vector<AElement> PaJ;
  for (const auto& J : subs) PaJ.push_back(unit_twist_product(A, out.Paj, J.complement()));
  std::map<std::pair<uint32_t, uint32_t>, AElement> Qm;
  out.diagonal = C.params().Jrho.is_full();
  if (!out.diagonal) {
    int64_t work_prec = kExact;
    for (const auto& x : out.Paj) work_prec = std::min(work_prec, x.prec);
    const IntVec h = C.params().r + IntVec(f, 1);
    for (int d = 1; d <= f; ++d)
      for (const auto& J : subs)
        for (const auto& Jp : subs) {
          if (!Jp.proper_subset_of(J) || (J - Jp).size() != d || Qm.count({Jp.bits(), J.bits()})) continue;
          ThetaProblem pr{J, Jp, {}, h, {}};
          for (int i = 0; i < f; ++i) {
            SubsetJ Xi = J.shift(i), Xpi = Jp.shift(i);
            pr.lambda.push_back(A.field().div(mu.gamma(Xpi.shift(1), Xpi), mu.gamma(Xi.shift(1), Xi)));
            pr.b.push_back(A.truncate(mat_a_rhs(A, C, mu, out.Paj, Qm, Xpi, Xi), work_prec));
          }
          ThetaSolution sol = theta_solve(A, pr);
          ++out.theta_solves;
          out.theta_iterations += sol.iterations;
          for (int i = 0; i < f; ++i) Qm[{Jp.shift(i).bits(), J.shift(i).bits()}] = sol.a[i];
        }
  }
  for (const auto& J : subs) {
    out.Q.set(J, J, A.one());
    out.P.set(J, J, PaJ[J.bits()]);
  }
  for (const auto& [k, q] : Qm) {
    SubsetJ r = out.Q.subset(k.first), c = out.Q.subset(k.second);
    out.Q.set(r, c, q);
    out.P.set(r, c, A.mul(q, PaJ[k.second]));
  }
  return out;
}

/// The unit acting entrywise on a matrix.
inline PhiGammaMatrix act(const IwasawaContext& ctx, const WittElem& u, const PhiGammaMatrix& M) {
  return detail::mat_map(M, [&](const AElement& x) { return ctx.unit_action(u, x); });
}
inline PhiGammaMatrix phi(const ARing& A, const PhiGammaMatrix& M) {
  return detail::mat_map(M, [&](const AElement& x) { return A.phi(x); });
}

struct CommutationReport {
  bool ok = true;
  /// Smallest depth, relative to the column's P_φ monomial, below which the residual was certified.
  int64_t floor = kExact;
  int64_t entries = 0;
  std::optional<Witness> witness;
};

/// Residual P_a a(P_φ) − P_φ φ(P_a), checked entrywise below its propagated precision.
inline CommutationReport check_commutation(const IwasawaContext& ctx, const PhiGammaMatrix& Pphi,
                                           const PhiGammaMatrix& Pa, const WittElem& u) {
  const ARing& A = ctx.ring();
  PhiGammaMatrix L = detail::mat_mul(A, Pa, act(ctx, u, Pphi));
  PhiGammaMatrix R = detail::mat_mul(A, Pphi, phi(A, Pa));
  CommutationReport rep;
  for (const auto& row : all_subsets(Pa.f()))
    for (const auto& J : all_subsets(Pa.f())) {
      SubsetJ col = J.shift(1);
      if (!L.has(row, col) && !R.has(row, col)) continue;
      AElement diff = A.sub(L.get(row, col), R.get(row, col));
      ++rep.entries;
      int64_t base = A.fdeg(Pphi.get(J, col));
      int64_t depth = diff.prec >= kExact || base >= kExact ? kExact : diff.prec - base;
      rep.floor = std::min(rep.floor, depth);
      if (!diff.empty() && rep.ok) {
        rep.ok = false;
        rep.witness = Witness{{"check", "commutation"},
                              {"row", row.to_string()},
                              {"col", col.to_string()},
                              {"residual", A.to_string(diff, 3)},
                              {"relative_depth", std::to_string(A.fdeg(diff) - base)}};
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// φ^f-eigenvectors.

/// Solutions of a = λ Y^s φ^f(a) in A: the line F·Y^{-t} when s = (q-1)t and λ = 1, else zero.
struct EigenClass {
  bool line = false;
  IntVec t;
};

inline EigenClass classify_phi_q_eigen(const Field& F, FElem lambda, const IntVec& s) {
  const int64_t qm1 = static_cast<int64_t>(F.order()) - 1;
  EigenClass out{false, IntVec(s.f(), 0)};
  if (!(lambda == F.one())) return out;
  for (int j = 0; j < s.f(); ++j) {
    if (s[j] % qm1 != 0) return out;
    out.t[j] = s[j] / qm1;
  }
  out.line = true;
  return out;
}

// ---------------------------------------------------------------------------
// Suites.

/// Support patterns, change of basis, unit diagonal slots and an exact inverse of Mat(φ)'.
inline SuiteResult verify_etale_matrix(const ARing& A, const Constants& C, const MuAlgebra& mu) {
  SuiteResult res("etale_matrix");
  const int f = C.f(), p = C.p();
  const auto subs = all_subsets(f);
  auto where = [](const char* what, const SubsetJ& r, const SubsetJ& c) {
    return Witness{{"check", what}, {"row", r.to_string()}, {"col", c.to_string()}};
  };
  PhiGammaMatrix Mu = mat_phi_untwisted(A, C, mu), Mt = mat_phi_twisted(A, C, mu);
  const IntVec h = C.params().r + IntVec(f, 1);
  for (const auto& J : subs) {
    SubsetJ col = J.shift(1), ss = C.parts(J).ss;
    for (const auto& Jp : subs) {
      bool in_support = ss.subset_of(Jp) && Jp.subset_of(J);
      for (const auto* M : {&Mu, &Mt}) {
        const AElement* x = M->find(Jp, col);
        res.check(in_support == (x != nullptr && !x->empty()), [&] { return where("support pattern", Jp, col); });
        if (x) res.check(x->terms.size() == 1, [&] { return where("entry is a monomial", Jp, col); });
      }
      if (const AElement* x = Mt.find(Jp, col); x && !x->empty()) {
        int64_t want = 0;
        for (int j : J.complement().elements()) want -= (p - 1) * h[j];
        res.check(A.fdeg(*x) == want, [&] { return where("fdeg of Mat(phi)' entry", Jp, col); });
        if (J.is_full()) res.check(A.fdeg(*x) == 0 && x->terms.size() == 1, [&] { return where("scalar column", Jp, col); });
      }
    }
    const AElement* d = Mt.find(J, col);
    res.check(d && d->terms.size() == 1, [&] { return where("unit at (J, J+1)", J, col); });
  }
  PhiGammaMatrix conj = apply_change_of_basis(A, change_of_basis_Q(A, C), Mu);
  for (const auto& r : subs)
    for (const auto& c : subs)
      res.check(A.equal(conj.get(r, c), Mt.get(r, c)), [&] {
        Witness w = where("Q Mat(phi) phi(Q)^-1 = Mat(phi)'", r, c);
        w.push_back({"lhs", A.to_string(conj.get(r, c))});
        w.push_back({"rhs", A.to_string(Mt.get(r, c))});
        return w;
      });
  for (const auto* M : {&Mt, &Mu}) {
    try {
      PhiGammaMatrix X = solve_right_inverse(A, *M);
      auto right = identity_defects(A, detail::mat_mul(A, *M, X), kExact);
      auto left = identity_defects(A, detail::mat_mul(A, X, *M), kExact);
      res.check(right.empty(), [&] { return where("M X = I", right[0].first, right[0].second); });
      res.check(left.empty(), [&] { return where("X M = I", left[0].first, left[0].second); });
    } catch (const Error& e) {
      res.check(false, [&] { return Witness{{"check", "solve_right_inverse"}, {"error", e.what()}}; });
    }
  }
  return res;
}

/// θ-solver on `count` random valid problems: exact residual, the (f+1)(p-1) congruence,
/// agreement of both schedules, and θ(0) = 0 / linearity of theta_apply.
inline SuiteResult verify_theta_solver(const ARing& A, uint64_t seed, int count, int64_t cutoff) {
  SuiteResult res("theta_solver");
  const int f = A.f(), p = A.p();
  std::mt19937_64 rng(seed ^ 0x7468657461ULL);
  const int64_t cong = std::min<int64_t>(static_cast<int64_t>(f + 1) * (p - 1), cutoff);
  for (int n = 0; n < count; ++n) {
    ThetaProblem pr = random_theta_problem(A, rng, cutoff);
    auto tag = [&](const char* what) {
      return Witness{{"check", what}, {"problem", std::to_string(n)}, {"J", pr.J.to_string()}, {"J'", pr.Jp.to_string()},
                     {"h", pr.h.to_string()}};
    };
    try {
      ThetaSolution s1 = theta_solve(A, pr, ThetaSchedule::Jacobi);
      ThetaSolution s2 = theta_solve(A, pr, ThetaSchedule::GaussSeidel);
      auto th = theta_apply(A, pr, s1.a);
      for (int i = 0; i < f; ++i) {
        AElement r = A.sub(th[i], pr.b[i]);
        res.check(r.empty() && r.prec >= cutoff, [&] {
          Witness w = tag("theta(a) - b empty below cutoff");
          w.push_back({"i", std::to_string(i)});
          w.push_back({"residual", A.to_string(r, 3)});
          return w;
        });
        res.check(A.zero_below(A.sub(s1.a[i], pr.b[i]), cong), [&] { return tag("a_i = b_i mod F_{(f+1)(1-p)}A"); });
        res.check(A.equal(s1.a[i], s2.a[i]), [&] { return tag("Jacobi and Gauss-Seidel agree"); });
        res.check(A.is_torus_fixed(s1.a[i]), [&] { return tag("solution is torus-fixed"); });
      }
      res.note_floor(cutoff);
      // Linearity of θ on (a, b), and θ(0) = 0.
      auto tb = theta_apply(A, pr, pr.b);
      std::vector<AElement> sum;
      for (int i = 0; i < f; ++i) sum.push_back(A.add(s1.a[i], pr.b[i]));
      auto ts = theta_apply(A, pr, sum);
      auto t0 = theta_apply(A, pr, std::vector<AElement>(f, A.zero(cutoff)));
      for (int i = 0; i < f; ++i) {
        res.check(A.equal(ts[i], A.add(th[i], tb[i])), [&] { return tag("theta is additive"); });
        res.check(t0[i].empty(), [&] { return tag("theta(0) = 0"); });
      }
    } catch (const Error& e) {
      res.check(false, [&] {
        Witness w = tag("solver raised");
        w.push_back({"error", e.what()});
        return w;
      });
    }
  }
  return res;
}

/// Mat(a)' for sampled principal units: identity on the torus, zero pattern, depth bounds,
/// diagonal normalization, off-diagonal congruence and commutation with Mat(φ)'.
/// With cocycle set, also compares P_{u1 u2} with P_{u1} u1(P_{u2}).
inline SuiteResult verify_mat_a(const IwasawaContext& ctx, const Constants& C, const MuAlgebra& mu,
                                const std::vector<WittElem>& units, int threads = 1, bool cocycle = true) {
  SuiteResult res("mat_a");
  const ARing& A = ctx.ring();
  const Field& F = ctx.field();
  const WittRing& W = ctx.witt();
  const int f = C.f(), p = C.p();
  const auto subs = all_subsets(f);
  const PhiGammaMatrix Pphi = mat_phi_twisted(A, C, mu);
  const int64_t cong = static_cast<int64_t>(f + 1) * (p - 1);

  // The torus acts trivially on the basis.
  {
    WittElem g = W.teichmuller(F.gen());
    try {
      MatA M = build_mat_a(ctx, C, mu, g);
      auto defects = identity_defects(A, M.P, kExact);
      res.check(defects.empty(), [&] {
        return Witness{{"check", "Mat([a])' = I"}, {"row", defects[0].first.to_string()}, {"col", defects[0].second.to_string()}};
      });
      auto rep = check_commutation(ctx, Pphi, M.P, g);
      res.check(rep.ok, [&] { return *rep.witness; });
    } catch (const Error& e) {
      res.check(false, [&] { return Witness{{"check", "Mat([a])'"}, {"error", e.what()}}; });
    }
  }

  std::vector<SuiteResult> parts(units.size(), SuiteResult("mat_a"));
  std::vector<std::optional<MatA>> built(units.size());
  parallel_for(units.size(), threads, [&](std::size_t k) {
    SuiteResult& r = parts[k];
    const WittElem& u = units[k];
    auto tag = [&](const char* what, const SubsetJ& a, const SubsetJ& b) {
      return Witness{{"check", what}, {"u", W.to_string(u)}, {"J'", a.to_string()}, {"J", b.to_string()}};
    };
    try {
      MatA M = build_mat_a(ctx, C, mu, u);
      for (const auto& [key, x] : M.P.entries()) {
        SubsetJ row = M.P.subset(key.first), col = M.P.subset(key.second);
        r.check(row.subset_of(col), [&] { return tag("Mat(a)'_{J',J} = 0 unless J' ⊆ J", row, col); });
      }
      for (const auto& J : subs) {
        AElement dj = A.sub(M.P.get(J, J), A.one());
        r.check(A.fdeg(dj) >= p - 1, [&] { return tag("Mat(a)'_{J,J} in 1 + F_{1-p}A", J, J); });
        SubsetJ Jss = C.parts(J).ss;
        for (const auto& Jp : subs) {
          if (!Jp.proper_subset_of(J)) continue;
          const int64_t depth = static_cast<int64_t>((J - Jp).size()) * (p - 1);
          AElement e = M.P.get(Jp, J);
          r.check(A.fdeg(e) >= depth || e.prec <= depth, [&] {
            Witness w = tag("Mat(a)'_{J',J} in F_{|J\\J'|(1-p)}A", Jp, J);
            w.push_back({"fdeg", std::to_string(A.fdeg(e))});
            return w;
          });
          AElement want = A.zero();
          if (Jss.subset_of(Jp)) {
            AElement prod = A.one();
            for (int j : (J - Jp).elements()) prod = A.mul(prod, A.sub(A.one(), M.Paj[j]));
            want = A.scale(mu.gamma_star_ratio(Jp, J), prod);
          }
          AElement q = M.Q.get(Jp, J);
          r.check(A.zero_below(A.sub(q, want), cong), [&] { return tag("Q_a congruence mod F_{(f+1)(1-p)}A", Jp, J); });
          r.note_floor(std::min(cong, q.prec));
        }
      }
      auto rep = check_commutation(ctx, Pphi, M.P, u);
      r.check(rep.ok, [&] { return *rep.witness; });
      r.check(rep.floor >= p - 1, [&] {
        Witness w = tag("commutation floor is non-vacuous", SubsetJ::empty(f), SubsetJ::empty(f));
        w.push_back({"floor", std::to_string(rep.floor)});
        return w;
      });
      r.note_floor(rep.floor);
      built[k] = std::move(M);
    } catch (const Error& e) {
      r.check(false, [&] {
        Witness w{{"check", "build_mat_a"}, {"u", W.to_string(u)}};
        w.push_back({"error", e.what()});
        return w;
      });
    }
  });
  for (const auto& r : parts) res.merge(r);

  if (cocycle && units.size() >= 2 && built[0] && built[1]) {
    try {
      const WittElem& u1 = units[0];
      MatA M12 = build_mat_a(ctx, C, mu, W.mul(u1, units[1]));
      PhiGammaMatrix prod = detail::mat_mul(A, built[0]->P, act(ctx, u1, built[1]->P));
      for (const auto& r : subs)
        for (const auto& c : subs) {
          AElement d = A.sub(M12.P.get(r, c), prod.get(r, c));
          res.check(d.empty(), [&] {
            return Witness{{"check", "P_{u1 u2} = P_{u1} u1(P_{u2})"}, {"row", r.to_string()}, {"col", c.to_string()},
                           {"residual", A.to_string(d, 3)}};
          });
        }
    } catch (const Error& e) {
      res.check(false, [&] { return Witness{{"check", "cocycle"}, {"error", e.what()}}; });
    }
  }
  return res;
}

}  // namespace etale
