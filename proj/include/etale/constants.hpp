#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "base.hpp"
#include "check.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "weights.hpp"

namespace etale {

/// Deliberate single-table perturbations used to prove the verifiers can fail.
enum class Mutation { None, rJ, cJ, cPrimeJ, sJ, tJJp, tJx, hj, gamma };

inline const std::vector<std::pair<Mutation, std::string>>& mutation_names() {
  static const std::vector<std::pair<Mutation, std::string>> names = {
      {Mutation::None, "none"}, {Mutation::rJ, "rJ"},     {Mutation::cJ, "cJ"},
      {Mutation::cPrimeJ, "cPrimeJ"}, {Mutation::sJ, "sJ"}, {Mutation::tJJp, "tJJp"},
      {Mutation::tJx, "tJx"},   {Mutation::hj, "hj"},     {Mutation::gamma, "gamma"},
  };
  return names;
}

inline std::string mutation_name(Mutation m) {
  for (const auto& [k, v] : mutation_names())
    if (k == m) return v;
  return "none";
}

inline Mutation parse_mutation(const std::string& s) {
  for (const auto& [k, v] : mutation_names())
    if (v == s) return k;
  fail(ErrorKind::ConfigInvalid, "unknown mutation '" + s + "'");
}

struct IndexSplit {
  IntVec iPrime, ell;
};

/// The constant vectors attached to subsets of J, for one parameter tuple.
/// A non-None mutation perturbs exactly one table.
class Constants {
 public:
  explicit Constants(RhoParams P, Mutation mut = Mutation::None) : P_(std::move(P)), mut_(mut) {}

  const RhoParams& params() const { return P_; }
  Mutation mutation() const { return mut_; }
  int f() const { return P_.f; }
  int p() const { return P_.p; }

  Parts parts(const SubsetJ& J) const { return decompose_parts(J, P_.Jrho); }

  IntVec sJ(const SubsetJ& J) const {
    IntVec s = sJ_tJ(P_, J).s;
    if (mut_ == Mutation::sJ && !J.is_empty()) s[0] += 1;
    return s;
  }
  IntVec tJ(const SubsetJ& J) const { return sJ_tJ(P_, J).t; }

  /// r^J_j = δ_{j+1∈J}(r_j+1) − δ_{j∈J}.
  IntVec rJ(const SubsetJ& J) const {
    IntVec out(P_.f);
    for (int j = 0; j < P_.f; ++j) out[j] = dlt(J.contains(j + 1)) * (P_.r[j] + 1) - dlt(J.contains(j));
    if (mut_ == Mutation::rJ && !J.is_empty()) out[0] += 1;
    return out;
  }

  /// c^J_j = δ_{j∉J}(p−2−r_j) + δ_{j+1∉J}(r_j+1).
  IntVec cJ(const SubsetJ& J) const {
    IntVec out(P_.f);
    for (int j = 0; j < P_.f; ++j)
      out[j] = dlt(!J.contains(j)) * (P_.p - 2 - P_.r[j]) + dlt(!J.contains(j + 1)) * (P_.r[j] + 1);
    if (mut_ == Mutation::cJ) out[0] += 1;
    return out;
  }

  IntVec cPrimeJ(const SubsetJ& J) const {
    IntVec out(P_.f);
    const int64_t p = P_.p, f = P_.f;
    for (int j = 0; j < P_.f; ++j) {
      bool a = J.contains(j), b = J.contains(j + 1);
      int64_t r = P_.r[j];
      if (!a && !b)
        out[j] = p - 1 - f;
      else if (a && !b)
        out[j] = r + 1 - f;
      else if (!a && b)
        out[j] = p - 2 - r - f;
      else
        out[j] = p - f;
    }
    if (mut_ == Mutation::cPrimeJ) out[0] += 1;
    return out;
  }

  int epsilonJ(const SubsetJ& J) const {
    if (P_.Jrho.is_empty() && J.is_full()) return (P_.f - 1) % 2 == 0 ? 1 : -1;
    SubsetJ inner = (J - right_boundary(J)) - P_.Jrho;
    return inner.size() % 2 == 0 ? 1 : -1;
  }

  /// t^J(J')_j = p−1−s^J_j+δ_{j−1∈J'}.
  IntVec tJJp(const SubsetJ& J, const SubsetJ& Jp) const {
    IntVec s = sJ(J), out(P_.f);
    for (int j = 0; j < P_.f; ++j) out[j] = P_.p - 1 - s[j] + dlt(Jp.contains(j - 1));
    if (mut_ == Mutation::tJJp) out[0] += 1;
    return out;
  }

  /// m(i, J, J') without the range hypothesis on i.
  IntVec mVecRaw(const IntVec& i, const SubsetJ& J, const SubsetJ& Jp) const {
    SubsetJ Jm1ss = J.shift(-1) & P_.Jrho;
    SubsetJ D = J ^ Jm1ss;
    IntVec m(P_.f);
    for (int j = 0; j < P_.f; ++j)
      m[j] = sgn(!J.contains(j + 1)) *
             (2 * i[j] + dlt(Jm1ss.contains(j)) - dlt(D.contains(j)) + dlt(Jp.contains(j - 1)));
    return m;
  }

  /// m(i, J, J') for 0 <= i <= f − e^{J^sh}.
  IntVec mVec(const IntVec& i, const SubsetJ& J, const SubsetJ& Jp) const {
    check_index_range(i, J);
    return mVecRaw(i, J, Jp);
  }

  /// t^J_j(x) for x = 2n+δ: np + δ(δ_{j+1∉J}(r_j+1) + δ_{j+1∈J}(p−1−r_j)).
  int64_t tJx(const SubsetJ& J, int j, int64_t x) const {
    int64_t n = x >= 0 ? x / 2 : -((-x + 1) / 2);
    int64_t d = x - 2 * n;
    int64_t v = n * P_.p + d * (J.contains(j + 1) ? (P_.p - 1 - P_.r[j]) : (P_.r[j] + 1));
    if (mut_ == Mutation::tJx && J.mod(j) == 0 && d == 1) v += 1;
    return v;
  }

  bool aJn_hypothesis(const SubsetJ& J, const IntVec& n, int j0) const {
    if (n[j0 + 1] != 0) return false;
    for (int j = 0; j < P_.f; ++j) {
      if (J.mod(j) == J.mod(j0 + 1)) continue;
      if (n[j] < 1 || n[j] > 2 * P_.f - dlt(J.contains(j))) return false;
    }
    return true;
  }

  IntVec aJn(const SubsetJ& J, const IntVec& n, int j0) const {
    require(aJn_hypothesis(J, n, j0), ErrorKind::HypothesisViolation,
            "a^J(n) needs n_{j0+1}=0 and 1<=n_j<=2f-δ_{j∈J}; J=" + J.to_string() + " n=" + n.to_string());
    SubsetJ sh = parts(J).sh;
    IntVec a(P_.f);
    for (int j = 0; j < P_.f; ++j) {
      if (J.mod(j) == J.mod(j0) && sh.contains(j0))
        a[j] = 0;
      else
        a[j] = tJx(J, j, n[j + 1]) - n[j];
    }
    return a;
  }

  /// h^{(j)} = Σ_i h_{j+i} p^i.
  int64_t hj(const IntVec& h, int j) const {
    int64_t acc = 0, pw = 1;
    for (int i = 0; i < P_.f; ++i) {
      acc += h[j + i] * pw;
      pw *= P_.p;
    }
    if (mut_ == Mutation::hj && P_.Jrho.mod(j) == 0) acc += 1;
    return acc;
  }
  IntVec h_default() const { return P_.r + IntVec(P_.f, 1); }

  /// The unique (i', ℓ) with i = pδ(i') + c^J − ℓ and 0 <= ℓ <= p−1.
  IndexSplit decompose_index(const SubsetJ& J, const IntVec& i) const {
    IntVec c = cJ(J), ip(P_.f), ell(P_.f);
    const int64_t p = P_.p;
    for (int j = 0; j < P_.f; ++j) {
      int64_t num = i[j] - c[j];
      int64_t up = num >= 0 ? (num + p - 1) / p : -((-num) / p);
      ip[j + 1] = up;
      ell[j] = p * up + c[j] - i[j];
    }
    return {ip, ell};
  }

  void check_index_range(const IntVec& i, const SubsetJ& J) const {
    SubsetJ sh = parts(J).sh;
    for (int j = 0; j < P_.f; ++j)
      if (i[j] < 0 || i[j] > P_.f - dlt(sh.contains(j)))
        fail(ErrorKind::RangeViolation, "index i=" + i.to_string() + " outside 0 <= i <= f-e^{Jsh}");
  }

 private:
  RhoParams P_;
  Mutation mut_;
};

// Free-function spellings of the tables.
inline IntVec rJ(const RhoParams& P, const SubsetJ& J) { return Constants(P).rJ(J); }
inline IntVec cJ(const RhoParams& P, const SubsetJ& J) { return Constants(P).cJ(J); }
inline IntVec cPrimeJ(const RhoParams& P, const SubsetJ& J) { return Constants(P).cPrimeJ(J); }
inline int epsilonJ(const RhoParams& P, const SubsetJ& J) { return Constants(P).epsilonJ(J); }
inline IntVec tJJp(const RhoParams& P, const SubsetJ& J, const SubsetJ& Jp) { return Constants(P).tJJp(J, Jp); }
inline IntVec mVec(const RhoParams& P, const IntVec& i, const SubsetJ& J, const SubsetJ& Jp) {
  return Constants(P).mVec(i, J, Jp);
}
inline int64_t tJx(const RhoParams& P, const SubsetJ& J, int j, int64_t x) { return Constants(P).tJx(J, j, x); }
inline IntVec aJn(const RhoParams& P, const SubsetJ& J, const IntVec& n, int j0) {
  return Constants(P).aJn(J, n, j0);
}
inline int64_t hj(const RhoParams& P, const IntVec& h, int j) { return Constants(P).hj(h, j); }
inline IndexSplit decompose_index(const RhoParams& P, const SubsetJ& J, const IntVec& i) {
  return Constants(P).decompose_index(J, i);
}

/// (J−1)^ss = (J')^ss, the condition under which mu_{J,J'} exists.
inline bool mu_pair_defined(const RhoParams& P, const SubsetJ& J, const SubsetJ& Jp) {
  return (J.shift(-1) & P.Jrho) == (Jp & P.Jrho);
}

/// Product-form instance of the mu constants: mu(J,J') = rho(J) sigma(J').
class MuAlgebra {
 public:
  MuAlgebra(const RhoParams& P, std::shared_ptr<const Field> F, uint64_t seed)
      : C_(P), F_(std::move(F)), seed_(seed) {
    std::mt19937_64 rng(seed ^ 0x6d75616c67656272ULL);
    std::size_t n = std::size_t{1} << P.f;
    rho_.resize(n);
    sigma_.resize(n);
    for (std::size_t k = 0; k < n; ++k) rho_[k] = F_->random_nonzero(rng);
    for (std::size_t k = 0; k < n; ++k) sigma_[k] = F_->random_nonzero(rng);
  }

  const RhoParams& params() const { return C_.params(); }
  const Field& field() const { return *F_; }
  uint64_t seed() const { return seed_; }

  FElem rho_factor(const SubsetJ& J) const { return rho_[J.bits()]; }
  FElem sigma_factor(const SubsetJ& J) const { return sigma_[J.bits()]; }

  FElem mu(const SubsetJ& J, const SubsetJ& Jp) const {
    if (!mu_pair_defined(C_.params(), J, Jp))
      fail(ErrorKind::PairNotDefined, "mu(" + J.to_string() + "," + Jp.to_string() + ")");
    return F_->mul(rho_factor(J), sigma_factor(Jp));
  }

  /// gamma_{J,J'} = (−1)^{f−1} ε_{J'} mu_{J,J'}.
  FElem gamma(const SubsetJ& J, const SubsetJ& Jp) const {
    FElem m = mu(J, Jp);
    int s = ((C_.f() - 1) % 2 == 0 ? 1 : -1) * C_.epsilonJ(Jp);
    return s == 1 ? m : F_->neg(m);
  }

  /// mu_{*,J''}/mu_{*,J}, independent of the first slot; needs J''^ss = J^ss.
  FElem mu_star_ratio(const SubsetJ& Jpp, const SubsetJ& J) const {
    require_same_ss(Jpp, J);
    return F_->div(sigma_factor(Jpp), sigma_factor(J));
  }
  /// gamma_{*,J''}/gamma_{*,J}.
  FElem gamma_star_ratio(const SubsetJ& Jpp, const SubsetJ& J) const {
    FElem r = mu_star_ratio(Jpp, J);
    return C_.epsilonJ(Jpp) == C_.epsilonJ(J) ? r : F_->neg(r);
  }

 private:
  void require_same_ss(const SubsetJ& A, const SubsetJ& B) const {
    const auto& Jr = C_.params().Jrho;
    if ((A & Jr) != (B & Jr))
      fail(ErrorKind::PairNotDefined, "star ratio needs equal ss parts: " + A.to_string() + " vs " + B.to_string());
  }

  Constants C_;
  std::shared_ptr<const Field> F_;
  uint64_t seed_;
  std::vector<FElem> rho_, sigma_;
};

inline MuAlgebra mu_gamma(const RhoParams& P, std::shared_ptr<const Field> F, uint64_t seed) {
  return MuAlgebra(P, std::move(F), seed);
}

namespace detail {

/// Calls fn on every vector with lo_j <= v_j <= hi_j.
inline void for_each_box(const IntVec& lo, const IntVec& hi, const std::function<void(const IntVec&)>& fn) {
  int f = lo.f();
  for (int j = 0; j < f; ++j)
    if (lo[j] > hi[j]) return;
  IntVec v = lo;
  while (true) {
    fn(v);
    int j = 0;
    while (j < f) {
      if (v[j] < hi[j]) {
        ++v[j];
        break;
      }
      v[j] = lo[j];
      ++j;
    }
    if (j == f) return;
  }
}

inline Witness w_params(const RhoParams& P) {
  return {{"p", std::to_string(P.p)}, {"f", std::to_string(P.f)}, {"r", P.r.to_string()}, {"Jrho", P.Jrho.to_string()}};
}

}  // namespace detail

/// Relations on p−2−s, m, the shifted relation, and r/c relations; every hypothesis-satisfying tuple.
inline SuiteResult verify_appendix_D(const Constants& C) {
  SuiteResult res("appendix_d");
  const RhoParams& P = C.params();
  const int f = P.f;
  const int64_t p = P.p;
  const auto subsets = all_subsets(f);
  auto W = [&](Witness extra) {
    Witness w = detail::w_params(P);
    w.insert(w.end(), extra.begin(), extra.end());
    return w;
  };

  // 2δ_{j∈(J∩J')^nss} + (p−2−s^J_j) + δ_{j∈JΔJ'} = s^{J'}_j for j+1 ∈ JΔJ'.
  for (const auto& J : subsets)
    for (const auto& Jp : subsets) {
      if (!mu_pair_defined(P, J, Jp)) continue;
      SubsetJ D = J ^ Jp, nss = (J & Jp) - P.Jrho;
      IntVec sJ = C.sJ(J), sJp = C.sJ(Jp);
      for (int j = 0; j < f; ++j) {
        if (!D.contains(j + 1)) continue;
        int64_t lhs = 2 * dlt(nss.contains(j)) + (p - 2 - sJ[j]) + dlt(D.contains(j));
        res.check(lhs == sJp[j], [&] {
          return W({{"claim", "p-2-s"}, {"J", J.to_string()}, {"Jp", Jp.to_string()}, {"j", std::to_string(j)},
                    {"lhs", std::to_string(lhs)}, {"rhs", std::to_string(sJp[j])}});
        });
      }
      // m(e^{(J∩J')^nss}, J, (JΔJ')−1)_j = δ_{j∈J'}(−1)^{δ_{j+1∉J}}.
      IntVec m = C.mVec(indicator(nss), J, D.shift(-1));
      IntVec expect(f);
      for (int j = 0; j < f; ++j) expect[j] = dlt(Jp.contains(j)) * sgn(!J.contains(j + 1));
      res.check(m == expect, [&] {
        return W({{"claim", "m closed form"}, {"J", J.to_string()}, {"Jp", Jp.to_string()}, {"m", m.to_string()},
                  {"expected", expect.to_string()}});
      });
    }

  // The shifted relation between (i, J, J') and (i', J\{j0+2}, J'').
  for (const auto& J : subsets) {
    Parts pt = C.parts(J);
    SubsetJ Jm1ss = J.shift(-1) & P.Jrho;
    SubsetJ Jm1nss = J.shift(-1) - P.Jrho;
    IntVec hi(f);
    for (int j = 0; j < f; ++j) hi[j] = f - dlt(pt.sh.contains(j));
    for (int j0 = 0; j0 < f; ++j0) {
      if (!Jm1nss.contains(j0 + 1)) continue;
      SubsetJ K = J.without(j0 + 2);
      SubsetJ DJ = J ^ Jm1ss, DK = K ^ Jm1ss;
      for (const auto& Jp : subsets) {
        if (Jp.contains(j0) != J.contains(j0 + 1)) continue;
        SubsetJ Jpp = Jp ^ SubsetJ::of(f, {(j0 + 1) % f});
        detail::for_each_box(IntVec(f, 0), hi, [&](const IntVec& i) {
          if (i[j0 + 1] != 0) return;
          IntVec ip = i;
          ip[j0 + 2] = i[j0 + 2] - dlt(!Jp.contains(j0 + 1)) + dlt(Jm1ss.contains(j0 + 2));
          auto tuple = [&](Witness extra) {
            Witness w = W({{"J", J.to_string()}, {"Jp", Jp.to_string()}, {"j0", std::to_string(j0)},
                           {"i", i.to_string()}, {"ip", ip.to_string()}});
            w.insert(w.end(), extra.begin(), extra.end());
            return w;
          };
          // i' <= f − e^{K^sh}
          SubsetJ Ksh = C.parts(K).sh;
          bool bounded = true;
          for (int j = 0; j < f; ++j) bounded = bounded && ip[j] <= f - dlt(Ksh.contains(j));
          res.check(bounded, [&] { return tuple({{"claim", "i' upper bound"}}); });

          IntVec m = C.mVec(i, J, Jp), mp = C.mVecRaw(ip, K, Jpp);
          res.check(m == mp && m[j0 + 1] == 0 && mp[j0 + 1] == 0, [&] {
            return tuple({{"claim", "m = m'"}, {"m", m.to_string()}, {"mp", mp.to_string()}});
          });

          IntVec t = C.tJJp(J, Jp), tp = C.tJJp(K, Jpp);
          for (int j = 0; j < f; ++j) {
            if (J.mod(j) == J.mod(j0 + 1)) continue;
            res.check(2 * i[j] + t[j] == 2 * ip[j] + tp[j], [&] {
              return tuple({{"claim", "2i+t = 2i'+t'"}, {"j", std::to_string(j)}});
            });
          }
          res.check(2 * i[j0 + 1] + t[j0 + 1] == P.r[j0 + 1] + 1, [&] {
            return tuple({{"claim", "2i+t at j0+1 = r+1"}, {"value", std::to_string(2 * i[j0 + 1] + t[j0 + 1])}});
          });
          res.check(2 * ip[j0 + 1] + tp[j0 + 1] == p - 1 - P.r[j0 + 1], [&] {
            return tuple({{"claim", "2i'+t' at j0+1 = p-1-r"}, {"value", std::to_string(2 * ip[j0 + 1] + tp[j0 + 1])}});
          });

          IntVec sss = C.sJ(Jm1ss), c(f), cp(f);
          for (int j = 0; j < f; ++j) {
            int64_t corr = dlt(J.mod(j) == J.mod(j0 + 1)) * dlt(!J.contains(j0 + 1));
            c[j] = p * i[j + 1] + dlt(DJ.contains(j + 1)) * sss[j] + dlt(!DJ.contains(j + 1)) * (p - 1) -
                   dlt(!Jp.contains(j)) * (2 * i[j] + t[j]) - corr;
            cp[j] = p * ip[j + 1] + dlt(DK.contains(j + 1)) * sss[j] + dlt(!DK.contains(j + 1)) * (p - 1) -
                    dlt(!Jpp.contains(j)) * (2 * ip[j] + tp[j]) - corr;
          }
          res.check(c == cp, [&] { return tuple({{"claim", "c = c'"}, {"c", c.to_string()}, {"cp", cp.to_string()}}); });

          bool hyp = true;
          for (int j = 0; j < f; ++j) hyp = hyp && (2 * i[j] - dlt(DJ.contains(j)) + dlt(Jp.contains(j - 1)) >= 0);
          if (hyp)
            res.check(c.geq(IntVec(f, 0)), [&] { return tuple({{"claim", "c >= 0"}, {"c", c.to_string()}}); });
        });
      }
    }
  }

  // r/c relations.
  const int64_t qm1 = P.q() - 1;
  const HCharacter chi_r0 = chi_lambda(P, P.r, IntVec(f, 0));
  for (const auto& J : subsets) {
    HCharacter lhs = mul_alpha(P, chi_prime(P, J), C.rJ(J));
    res.check(lhs == chi_r0, [&] {
      return W({{"claim", "chi'_J alpha^{r^J} = chi_(r,0)"}, {"J", J.to_string()}, {"lhs", lhs.to_string()},
                {"rhs", chi_r0.to_string()}});
    });

    IntVec diff = C.cJ(J) + C.rJ(J) - C.rJ(J.shift(1));
    IntVec expect(f);
    for (int j = 0; j < f; ++j) expect[j] = p * dlt(!J.contains(j)) - dlt(!J.contains(j - 1));
    res.check(diff == expect, [&] {
      return W({{"claim", "c^J + r^J - r^{J+1}"}, {"J", J.to_string()}, {"value", diff.to_string()},
                {"expected", expect.to_string()}});
    });
    res.check(reduce_exponent(P, diff) == 0 && posmod(reduce_exponent(P, C.cJ(J)) -
                                                          reduce_exponent(P, C.rJ(J.shift(1)) - C.rJ(J)), qm1) == 0,
              [&] { return W({{"claim", "alpha^{c^J} = alpha^{r^{J+1}-r^J}"}, {"J", J.to_string()}}); });
  }
  for (const auto& J1 : subsets)
    for (const auto& J2 : subsets) {
      if (!(J1 & J2).is_empty()) continue;
      IntVec lhs = C.rJ(J1 | J2), rhs = C.rJ(J1) + C.rJ(J2);
      res.check(lhs == rhs, [&] {
        return W({{"claim", "r additivity"}, {"J1", J1.to_string()}, {"J2", J2.to_string()}, {"lhs", lhs.to_string()},
                  {"rhs", rhs.to_string()}});
      });
    }
  const IntVec fvec(f, f);
  for (const auto& J : subsets)
    for (const auto& Jp : subsets) {
      if (!Jp.subset_of(J)) continue;
      SubsetJ Jpp = Jp ^ J.shift(-1);
      SubsetJ Jp1 = Jp.shift(1);
      SubsetJ Jp1sh = C.parts(Jp1).sh;
      IntVec c = p * indicator(Jp & J.shift(-1)) + C.cJ(Jp) - fvec - C.rJ(J - Jp);
      IntVec t = C.tJJp(Jp1, Jpp);
      IntVec cv = C.cJ(Jp) - C.rJ(J - Jp), cJv = C.cJ(J);
      for (int j = 0; j < f; ++j) {
        int64_t bound = dlt(!Jpp.contains(j)) *
                            (2 * (dlt((Jp1 & J).contains(j)) - dlt(Jp1sh.contains(j))) + t[j]) +
                        dlt(Jpp.is_empty());
        for (int d = 0; d <= 1; ++d)
          res.check(c[j] - d >= bound, [&] {
            return W({{"claim", "c - delta lower bound"}, {"J", J.to_string()}, {"Jp", Jp.to_string()},
                      {"j", std::to_string(j)}, {"delta_j", std::to_string(d)}, {"c_j", std::to_string(c[j])},
                      {"bound", std::to_string(bound)}});
          });
        int64_t expect = cJv[j] + dlt((J - Jp).contains(j)) * (p - 1 - P.r[j]);
        res.check(cv[j] == expect, [&] {
          return W({{"claim", "c^{J'} - r^{J\\J'} = c^J + ..."}, {"J", J.to_string()}, {"Jp", Jp.to_string()},
                    {"j", std::to_string(j)}});
        });
      }
    }
  return res;
}

/// a^J(n) + r^{J\J'} = a^{J'}(n + e^{J\J'}) over every admissible (J, J', j0, n).
inline SuiteResult verify_lemma_A2(const Constants& C) {
  SuiteResult res("lemma_a2");
  const RhoParams& P = C.params();
  const int f = P.f;
  const auto subsets = all_subsets(f);
  for (const auto& J : subsets) {
    Parts pt = C.parts(J);
    for (int j0 = 0; j0 < f; ++j0) {
      IntVec lo(f, 1), hi(f);
      for (int j = 0; j < f; ++j) hi[j] = 2 * f - dlt(J.contains(j));
      lo[j0 + 1] = 0;
      hi[j0 + 1] = 0;
      for (const auto& Jp : subsets) {
        if (!Jp.subset_of(J)) continue;
        SubsetJ diff = J - Jp;
        if (diff.contains(j0 + 1)) continue;
        if (pt.sh.contains(j0) && !(pt.ss.with(j0 + 1)).subset_of(Jp)) continue;
        detail::for_each_box(lo, hi, [&](const IntVec& n) {
          IntVec lhs = C.aJn(J, n, j0) + C.rJ(diff);
          IntVec rhs = C.aJn(Jp, n + indicator(diff), j0);
          res.check(lhs == rhs, [&] {
            Witness w = detail::w_params(P);
            w.insert(w.end(), {{"J", J.to_string()}, {"Jp", Jp.to_string()}, {"j0", std::to_string(j0)},
                               {"n", n.to_string()}, {"lhs", lhs.to_string()}, {"rhs", rhs.to_string()}});
            return w;
          });
        });
      }
    }
  }
  return res;
}

/// The two domination claims feeding the vanishing of x_{J,i}. Parameters need not be generic,
/// so that the role of the genericity bounds can be observed.
inline SuiteResult verify_region_claims(const Constants& C) {
  SuiteResult res("region_claims");
  const RhoParams& P = C.params();
  const int f = P.f;
  const auto subsets = all_subsets(f);
  for (const auto& J0 : subsets)
    for (int j0 = 0; j0 < f; ++j0)
      for (int64_t m = 1; m <= P.p - 1; ++m) {
        IntVec n(f, m <= 2 * f - 2 ? m : 2 * f - 1);
        n[j0 + 1] = 0;
        if (!C.aJn_hypothesis(J0, n, j0)) {
          res.check(false, [&] {
            Witness w = detail::w_params(P);
            w.insert(w.end(), {{"claim", "n recipe admissible"}, {"J0", J0.to_string()}, {"j0", std::to_string(j0)},
                               {"m", std::to_string(m)}});
            return w;
          });
          continue;
        }
        IntVec a = C.aJn(J0, n, j0) - IntVec::unit(f, (j0 + 1) % f);
        IntVec lo(f, -m), hi(f, f + (f - 1) * m);
        lo[j0] = -m;
        hi[j0] = -m;
        detail::for_each_box(lo, hi, [&](const IntVec& i) {
          if (i.norm() > f) return;
          res.check(a.geq(i), [&] {
            Witness w = detail::w_params(P);
            w.insert(w.end(), {{"claim", "a^{J0}(n)-e_{j0+1} >= i"}, {"J0", J0.to_string()}, {"j0", std::to_string(j0)},
                               {"m", std::to_string(m)}, {"i", i.to_string()}, {"a", a.to_string()}});
            return w;
          });
        });
      }
  if (f >= 2)
    for (const auto& J : subsets) {
      Parts pt = C.parts(J);
      for (const auto& Jp : subsets) {
        if (!pt.ss.subset_of(Jp) || !Jp.proper_subset_of(J)) continue;
        SubsetJ diff = J - Jp;
        for (int j0 = 0; j0 < f; ++j0) {
          if (diff.contains(j0 + 1)) continue;
          IntVec n(f, 2);
          n[j0] = 1 + dlt(diff.contains(j0));
          n[j0 + 1] = 0;
          IntVec lhs = C.aJn(Jp, n, j0) - IntVec::unit(f, (j0 + 1) % f);
          IntVec rhs = C.rJ(diff) + IntVec(f, f) - (f + 1 - dlt(pt.sh.contains(j0))) * IntVec::unit(f, j0);
          res.check(lhs.geq(rhs), [&] {
            Witness w = detail::w_params(P);
            w.insert(w.end(), {{"claim", "a^{J'}(n)-e_{j0+1} >= r^{J\\J'}+f-(f+1-d)e_{j0}"}, {"J", J.to_string()},
                               {"Jp", Jp.to_string()}, {"j0", std::to_string(j0)}, {"lhs", lhs.to_string()},
                               {"rhs", rhs.to_string()}});
            return w;
          });
        }
      }
    }
  return res;
}

/// Range bounds on s^J, t^J(J'), c^J, c'^J, the c/c' identity, the h^{(j)} identity and index splitting.
inline SuiteResult verify_bounds(const Constants& C) {
  SuiteResult res("bounds");
  const RhoParams& P = C.params();
  const int f = P.f;
  const int64_t p = P.p;
  const auto subsets = all_subsets(f);
  for (const auto& J : subsets) {
    SubsetJ sh = C.parts(J).sh;
    IntVec s = C.sJ(J), c = C.cJ(J), cp = C.cPrimeJ(J);
    for (int j = 0; j < f; ++j) {
      int64_t e = dlt(sh.contains(j));
      int64_t lo = 2 * (f - e) + 1 + dlt(f == 1), hi = p - 2 - 2 * (f + e);
      res.check(lo <= s[j] && s[j] <= hi, [&] {
        Witness w = detail::w_params(P);
        w.insert(w.end(), {{"claim", "bound s"}, {"J", J.to_string()}, {"j", std::to_string(j)}, {"s", s.to_string()}});
        return w;
      });
      res.check(0 <= c[j] && c[j] <= p - 1 && 0 <= cp[j] && cp[j] <= p - 1, [&] {
        Witness w = detail::w_params(P);
        w.insert(w.end(), {{"claim", "0 <= c, c' <= p-1"}, {"J", J.to_string()}, {"c", c.to_string()},
                           {"cp", cp.to_string()}});
        return w;
      });
    }
    IntVec ident = p * indicator(J & J.shift(1)).shifted() + c - cp;
    res.check(ident == IntVec(f, f), [&] {
      Witness w = detail::w_params(P);
      w.insert(w.end(), {{"claim", "f = p delta(e^{J∩(J+1)}) + c^J - c'^J"}, {"J", J.to_string()},
                         {"value", ident.to_string()}});
      return w;
    });
    for (const auto& Jp : subsets) {
      IntVec t = C.tJJp(J, Jp);
      for (int j = 0; j < f; ++j) {
        int64_t hi = p - 1 - 2 * (f - dlt(sh.contains(j)));
        res.check(1 <= t[j] && t[j] <= hi, [&] {
          Witness w = detail::w_params(P);
          w.insert(w.end(), {{"claim", "bound t^J(J')"}, {"J", J.to_string()}, {"Jp", Jp.to_string()},
                             {"t", t.to_string()}});
          return w;
        });
      }
    }
    // Index splitting over ||i|| <= 3f with entries in [-p, 3f].
    detail::for_each_box(IntVec(f, -p), IntVec(f, 3 * f), [&](const IntVec& i) {
      if (i.norm() > 3 * f) return;
      IndexSplit sp = C.decompose_index(J, i);
      IntVec back = p * sp.iPrime.shifted() + C.cJ(J) - sp.ell;
      bool ok = back == i && sp.ell.geq(IntVec(f, 0)) && sp.ell.leq(IntVec(f, p - 1));
      int64_t mx = *std::max_element(i.data().begin(), i.data().end());
      int64_t mxp = *std::max_element(sp.iPrime.data().begin(), sp.iPrime.data().end());
      if (mx > f) ok = ok && mxp < mx;
      res.check(ok, [&] {
        Witness w = detail::w_params(P);
        w.insert(w.end(), {{"claim", "index split"}, {"J", J.to_string()}, {"i", i.to_string()},
                           {"ip", sp.iPrime.to_string()}, {"ell", sp.ell.to_string()}});
        return w;
      });
    });
  }
  IntVec h = C.h_default();
  const int64_t qm1 = P.q() - 1;
  for (int j = 0; j < f; ++j) {
    int64_t lhs = p * C.hj(h, j + 1) - C.hj(h, j);
    res.check(lhs == qm1 * (P.r[j] + 1), [&] {
      Witness w = detail::w_params(P);
      w.insert(w.end(), {{"claim", "p h^(j+1) - h^(j) = (q-1)(r_j+1)"}, {"j", std::to_string(j)},
                         {"lhs", std::to_string(lhs)}});
      return w;
    });
  }
  return res;
}

}  // namespace etale
