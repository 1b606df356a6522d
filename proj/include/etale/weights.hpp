#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "base.hpp"
#include "check.hpp"
#include "errors.hpp"

namespace etale {

inline bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

/// Residue of x modulo m in [0, m).
inline int64_t posmod(int64_t x, int64_t m) {
  int64_t r = x % m;
  return r < 0 ? r + m : r;
}

/// Validated parameters of the residual representation.
struct RhoParams {
  int p = 0;
  int f = 0;
  IntVec r;
  SubsetJ Jrho;

  int64_t q() const { return ipow(p, f); }
  std::string to_string() const {
    return "p=" + std::to_string(p) + " f=" + std::to_string(f) + " r=" + r.to_string() +
           " Jrho=" + Jrho.to_string();
  }
};

/// Rejects with the failing bound named; genericity is 2f+1 <= r_j <= p-3-2f, r_0 >= 4 when f=1,
/// and p >= 4f+4.
inline RhoParams validate_params(int p, int f, const IntVec& r, const SubsetJ& Jrho) {
  require(f >= 1 && f <= kMaxF, ErrorKind::ConfigInvalid, "f out of range");
  require(is_prime(p), ErrorKind::ConfigInvalid, "p=" + std::to_string(p) + " is not prime");
  require(r.f() == f, ErrorKind::ConfigInvalid, "r must have length f");
  require(Jrho.f() == f, ErrorKind::ConfigInvalid, "Jrho must live over f");
  require(p >= 4 * f + 4, ErrorKind::GenericityViolation, "p >= 4f+4 fails");
  for (int j = 0; j < f; ++j) {
    if (r[j] < 2 * f + 1)
      fail(ErrorKind::GenericityViolation, "j=" + std::to_string(j) + " bound 2f+1 <= r_j");
    if (r[j] > p - 3 - 2 * f)
      fail(ErrorKind::GenericityViolation, "j=" + std::to_string(j) + " bound r_j <= p-3-2f");
  }
  if (f == 1 && r[0] < 4) fail(ErrorKind::GenericityViolation, "j=0 bound r_0 >= 4 (f=1)");
  return RhoParams{p, f, r, Jrho};
}

/// A Serre weight sigma_b, recorded by its b-vector relative to r.
struct WeightB {
  IntVec b;
  bool operator==(const WeightB&) const = default;
  auto operator<=>(const WeightB&) const = default;
  std::string to_string() const { return "sigma_" + b.to_string(); }
};

using WeightSet = std::set<WeightB>;

/// −r <= b <= p−2−r.
inline bool in_weight_window(const RhoParams& P, const IntVec& b) {
  for (int j = 0; j < P.f; ++j)
    if (b[j] < -P.r[j] || b[j] > P.p - 2 - P.r[j]) return false;
  return true;
}

struct SJTJ {
  IntVec s, t;
};

/// sigma_J = (s^J) ⊗ det^{t^J}, by cases on (j in J, j+1 in J).
inline SJTJ sJ_tJ(const RhoParams& P, const SubsetJ& J) {
  IntVec s(P.f), t(P.f);
  for (int j = 0; j < P.f; ++j) {
    bool a = J.contains(j), b = J.contains(j + 1);
    int64_t r = P.r[j];
    if (!a && !b) {
      s[j] = r;
      t[j] = 0;
    } else if (a && !b) {
      s[j] = r + 1;
      t[j] = -1;
    } else if (!a && b) {
      s[j] = P.p - 2 - r;
      t[j] = r + 1;
    } else if (!P.Jrho.contains(j)) {
      s[j] = P.p - 1 - r;
      t[j] = r;
    } else {
      s[j] = P.p - 3 - r;
      t[j] = r + 1;
    }
  }
  return {s, t};
}

/// a^J_j = δ_{j∈J}(−1)^{δ_{j+1∈J}} + 2δ_{j∈J^sh}.
inline IntVec aJ(const RhoParams& P, const SubsetJ& J) {
  SubsetJ sh = decompose_parts(J, P.Jrho).sh;
  IntVec a(P.f);
  for (int j = 0; j < P.f; ++j) a[j] = dlt(J.contains(j)) * sgn(J.contains(j + 1)) + 2 * dlt(sh.contains(j));
  return a;
}

inline WeightB sigma_J(const RhoParams& P, const SubsetJ& J) { return WeightB{aJ(P, J)}; }

/// The weight obtained from sigma_J by translating by b in the extension graph.
/// Valid for −(2(f−e^{J^sh})+1) <= b <= 2(f+e^{J^sh}).
inline WeightB translate_in_graph(const RhoParams& P, const SubsetJ& J, const IntVec& b) {
  require(b.f() == P.f, ErrorKind::RangeViolation, "b has wrong length");
  SubsetJ sh = decompose_parts(J, P.Jrho).sh;
  IntVec a(P.f);
  for (int j = 0; j < P.f; ++j) {
    int64_t e = dlt(sh.contains(j));
    if (b[j] < -(2 * (P.f - e) + 1) || b[j] > 2 * (P.f + e))
      fail(ErrorKind::RangeViolation, "b=" + b.to_string() + " outside translation range at j=" + std::to_string(j));
    a[j] = sgn(J.contains(j + 1)) * (b[j] + dlt(J.contains(j))) + 2 * e;
  }
  return WeightB{a};
}

namespace detail {
/// Cartesian product of per-coordinate value lists.
inline WeightSet product_region(const std::vector<std::vector<int64_t>>& choices) {
  WeightSet out;
  int f = static_cast<int>(choices.size());
  std::vector<std::size_t> idx(f, 0);
  while (true) {
    IntVec b(f);
    for (int j = 0; j < f; ++j) b[j] = choices[j][idx[j]];
    out.insert(WeightB{b});
    int j = 0;
    while (j < f && ++idx[j] == choices[j].size()) idx[j++] = 0;
    if (j == f) break;
  }
  return out;
}
}  // namespace detail

/// W(rhobar): b_j = 0 off Jrho and b_j in {0,1} on Jrho.
inline WeightSet serre_weights_of_rhobar(const RhoParams& P) {
  std::vector<std::vector<int64_t>> ch(P.f);
  for (int j = 0; j < P.f; ++j) ch[j] = P.Jrho.contains(j) ? std::vector<int64_t>{0, 1} : std::vector<int64_t>{0};
  return detail::product_region(ch);
}

/// Semisimple Serre weights: every b in {0,1}^f.
inline WeightSet serre_weights_semisimple(const RhoParams& P) {
  return detail::product_region(std::vector<std::vector<int64_t>>(P.f, {0, 1}));
}

/// JH(D_0): b_j in {−1,0,1} off Jrho and {−1,0,1,2} on Jrho.
inline WeightSet jh_D0(const RhoParams& P) {
  std::vector<std::vector<int64_t>> ch(P.f);
  for (int j = 0; j < P.f; ++j)
    ch[j] = P.Jrho.contains(j) ? std::vector<int64_t>{-1, 0, 1, 2} : std::vector<int64_t>{-1, 0, 1};
  return detail::product_region(ch);
}

/// Constituents of the summand attached to sigma_J, for J ⊆ Jrho.
inline WeightSet jh_D0_component(const RhoParams& P, const SubsetJ& J) {
  require(J.subset_of(P.Jrho), ErrorKind::HypothesisViolation, "component needs J ⊆ Jrho");
  std::vector<std::vector<int64_t>> ch(P.f);
  for (int j = 0; j < P.f; ++j) {
    if (!P.Jrho.contains(j))
      ch[j] = {-1, 0, 1};
    else if (J.contains(j))
      ch[j] = {1, 2};
    else
      ch[j] = {-1, 0};
  }
  return detail::product_region(ch);
}

/// The unique J ⊆ Jrho whose component contains sigma_b.
inline SubsetJ component_of(const RhoParams& P, const WeightB& w) {
  SubsetJ J(P.f);
  for (int j = 0; j < P.f; ++j)
    if (P.Jrho.contains(j) && w.b[j] >= 1) J = J.with(j);
  return J;
}

/// Region of constituents generated by the shifted vectors of index i, 0 <= i <= f − e^{J^sh}.
inline WeightSet shift_generated_constituents(const RhoParams& P, const SubsetJ& J, const IntVec& i) {
  Parts pt = decompose_parts(J, P.Jrho);
  std::vector<std::vector<int64_t>> ch(P.f);
  for (int j = 0; j < P.f; ++j) {
    if (i[j] < 0 || i[j] > P.f - dlt(pt.sh.contains(j)))
      fail(ErrorKind::RangeViolation, "i=" + i.to_string() + " outside 0 <= i <= f-e^{Jsh}");
    if (!pt.nss.contains(j))
      ch[j] = {dlt(J.contains(j))};
    else if (i[j] == 0)
      ch[j] = {0, sgn(J.contains(j + 1))};
    else
      ch[j] = {-1, 0, 1};
    std::sort(ch[j].begin(), ch[j].end());
    ch[j].erase(std::unique(ch[j].begin(), ch[j].end()), ch[j].end());
  }
  return detail::product_region(ch);
}

/// A family S ⊆ P(J), indexed by subset bitmask; only f <= 6 is supported here.
using Family = uint64_t;

inline bool family_contains(Family S, const SubsetJ& J) { return (S >> J.bits()) & 1u; }

inline std::string family_to_string(Family S, int f) {
  std::string s = "{";
  bool first = true;
  for (const auto& J : all_subsets(f)) {
    if (!family_contains(S, J)) continue;
    if (!first) s += ",";
    s += J.to_string();
    first = false;
  }
  return s + "}";
}

inline bool is_admissible_S(const RhoParams& P, Family S) {
  for (const auto& J : all_subsets(P.f)) {
    if (!family_contains(S, J)) continue;
    if (!family_contains(S, J.shift(-1))) return false;
    if (!P.Jrho.is_full())
      for (const auto& K : all_subsets(P.f))
        if (K.subset_of(J) && !family_contains(S, K)) return false;
  }
  return true;
}

/// All shift-stable families (downward closed as well unless Jrho = J), in increasing mask order.
inline std::vector<Family> enumerate_admissible_S(const RhoParams& P) {
  require(P.f <= 6, ErrorKind::ConfigInvalid, "S enumeration supports f <= 6");
  std::vector<Family> orbits;
  Family seen = 0;
  for (const auto& J : all_subsets(P.f)) {
    if (family_contains(seen, J)) continue;
    Family orb = 0;
    for (int k = 0; k < P.f; ++k) orb |= Family{1} << J.shift(k).bits();
    orbits.push_back(orb);
    seen |= orb;
  }
  std::vector<Family> out;
  for (uint64_t pick = 0; pick < (uint64_t{1} << orbits.size()); ++pick) {
    Family S = 0;
    for (std::size_t o = 0; o < orbits.size(); ++o)
      if ((pick >> o) & 1u) S |= orbits[o];
    if (P.Jrho.is_full() || is_admissible_S(P, S)) out.push_back(S);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline WeightSet jh_pi1(const RhoParams& P, Family S) {
  require(is_admissible_S(P, S), ErrorKind::InadmissibleS, family_to_string(S, P.f));
  WeightSet out;
  for (const auto& w : jh_D0(P)) {
    SubsetJ J(P.f);
    for (int j = 0; j < P.f; ++j)
      if (w.b[j] >= 1) J = J.with(j);
    if (family_contains(S, J)) out.insert(w);
  }
  return out;
}

inline int64_t rank_for_S(const RhoParams& P, Family S) {
  require(is_admissible_S(P, S), ErrorKind::InadmissibleS, family_to_string(S, P.f));
  return std::popcount(S);
}

/// Character of the torus H, as two exponents reduced mod q−1.
struct HCharacter {
  int64_t e1 = 0, e2 = 0;
  bool operator==(const HCharacter&) const = default;
  std::string to_string() const { return "chi[" + std::to_string(e1) + "," + std::to_string(e2) + "]"; }
};

/// Σ λ_j p^j mod (q−1).
inline int64_t reduce_exponent(const RhoParams& P, const IntVec& lam) {
  require(P.f <= 12, ErrorKind::ConfigInvalid, "character arithmetic supports q < 2^62");
  int64_t m = P.q() - 1, acc = 0, pj = 1;
  for (int j = 0; j < P.f; ++j) {
    acc = posmod(acc + posmod(lam[j], m) * (pj % m) % m, m);
    pj = pj * P.p % m;
  }
  return acc;
}

inline HCharacter chi_lambda(const RhoParams& P, const IntVec& l1, const IntVec& l2) {
  return HCharacter{reduce_exponent(P, l1), reduce_exponent(P, l2)};
}

/// chi_J = chi_{(s^J + t^J, t^J)}.
inline HCharacter char_of_weight(const RhoParams& P, const SubsetJ& J) {
  SJTJ st = sJ_tJ(P, J);
  return chi_lambda(P, st.s + st.t, st.t);
}

inline HCharacter conjugate(const HCharacter& c) { return HCharacter{c.e2, c.e1}; }

/// chi · alpha^i with alpha^i = chi_{(i, −i)}.
inline HCharacter mul_alpha(const RhoParams& P, const HCharacter& c, const IntVec& i) {
  int64_t m = P.q() - 1, e = reduce_exponent(P, i);
  return HCharacter{posmod(c.e1 + e, m), posmod(c.e2 - e, m)};
}

/// chi'_J = chi_J alpha^{e^{J^sh}}.
inline HCharacter chi_prime(const RhoParams& P, const SubsetJ& J) {
  return mul_alpha(P, char_of_weight(P, J), indicator(decompose_parts(J, P.Jrho).sh));
}

/// H-eigencharacter of x_{J,i}: chi'_J alpha^{−i}.
inline HCharacter char_of_x_index(const RhoParams& P, const SubsetJ& J, const IntVec& i) {
  return mul_alpha(P, chi_prime(P, J), -i);
}

/// Translation vector b with sigma_{J'} = translate(J, −b).
/// On Jrho the sign pattern uses δ_{j∈J'}; the variant with δ_{j∉J'} contradicts the J' = J^ss case.
inline IntVec translation_to(const RhoParams& P, const SubsetJ& J, const SubsetJ& Jp) {
  IntVec b(P.f);
  SubsetJ D = J ^ Jp;
  for (int j = 0; j < P.f; ++j) {
    if (!P.Jrho.contains(j))
      b[j] = dlt(J.contains(j)) + dlt(Jp.contains(j)) * sgn(!D.contains(j + 1));
    else
      b[j] = (dlt(J.contains(j)) - dlt(Jp.contains(j))) * sgn(J.contains(j + 1));
  }
  return b;
}

namespace detail {
inline Witness weight_witness(const RhoParams& P, Witness extra) {
  Witness w = {{"p", std::to_string(P.p)}, {"f", std::to_string(P.f)}, {"r", P.r.to_string()},
               {"Jrho", P.Jrho.to_string()}};
  w.insert(w.end(), extra.begin(), extra.end());
  return w;
}
inline int64_t ipow64(int64_t b, int64_t e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}
}  // namespace detail

/// Counting, partition and translation identities for the weight sets.
inline SuiteResult verify_weights(const RhoParams& P) {
  SuiteResult res("weights");
  const int f = P.f, k = P.Jrho.size();
  auto W = [&](Witness e) { return detail::weight_witness(P, std::move(e)); };
  WeightSet sw = serre_weights_of_rhobar(P), jh = jh_D0(P);
  res.check(static_cast<int64_t>(sw.size()) == detail::ipow64(2, k),
            [&] { return W({{"claim", "|W(rhobar)| = 2^|Jrho|"}, {"size", std::to_string(sw.size())}}); });
  res.check(static_cast<int64_t>(jh.size()) == detail::ipow64(3, f - k) * detail::ipow64(4, k),
            [&] { return W({{"claim", "|JH(D0)| = 3^(f-|Jrho|) 4^|Jrho|"}, {"size", std::to_string(jh.size())}}); });
  for (const auto& w : sw)
    res.check(jh.count(w) == 1, [&] { return W({{"claim", "W(rhobar) in JH(D0)"}, {"weight", w.to_string()}}); });
  for (const auto& w : jh)
    res.check(in_weight_window(P, w.b), [&] { return W({{"claim", "JH(D0) in window"}, {"weight", w.to_string()}}); });

  WeightSet uni;
  std::size_t total = 0;
  for (const auto& J : all_subsets(f)) {
    if (!J.subset_of(P.Jrho)) continue;
    WeightSet comp = jh_D0_component(P, J);
    total += comp.size();
    res.check(static_cast<int64_t>(comp.size()) == detail::ipow64(3, f - k) * detail::ipow64(2, k), [&] {
      return W({{"claim", "component size"}, {"J", J.to_string()}, {"size", std::to_string(comp.size())}});
    });
    for (const auto& w : comp) {
      uni.insert(w);
      res.check(component_of(P, w) == J, [&] {
        return W({{"claim", "component_of"}, {"J", J.to_string()}, {"weight", w.to_string()}});
      });
    }
    res.check(aJ(P, J) == indicator(J), [&] { return W({{"claim", "sigma_J = sigma_{e^J}"}, {"J", J.to_string()}}); });
  }
  res.check(uni == jh && total == jh.size(), [&] {
    return W({{"claim", "components partition JH(D0)"}, {"union", std::to_string(uni.size())},
              {"sum", std::to_string(total)}});
  });

  for (const auto& J : all_subsets(f)) {
    Parts pt = decompose_parts(J, P.Jrho);
    SubsetJ Jm1ss = J.shift(-1) & P.Jrho;
    WeightB a1 = translate_in_graph(P, J, -indicator(pt.nss));
    res.check(a1.b == aJ(P, pt.ss), [&] { return W({{"claim", "translate to sigma_{Jss}"}, {"J", J.to_string()}}); });
    WeightB a2 = translate_in_graph(P, J, -indicator(J ^ Jm1ss));
    res.check(a2.b == aJ(P, Jm1ss),
              [&] { return W({{"claim", "translate to sigma_{(J-1)ss}"}, {"J", J.to_string()}}); });
    for (const auto& Jp : all_subsets(f)) {
      WeightB a3 = translate_in_graph(P, J, -translation_to(P, J, Jp));
      res.check(a3.b == aJ(P, Jp), [&] {
        return W({{"claim", "translate to sigma_{J'}"}, {"J", J.to_string()}, {"Jp", Jp.to_string()},
                  {"got", a3.b.to_string()}, {"want", aJ(P, Jp).to_string()}});
      });
    }
    // Every translate inside the allowed b-range stays in the weight window.
    IntVec lo(f), hi(f);
    for (int j = 0; j < f; ++j) {
      int64_t e = dlt(pt.sh.contains(j));
      lo[j] = -(2 * (f - e) + 1);
      hi[j] = 2 * (f + e);
    }
    IntVec b = lo;
    while (true) {
      WeightB w = translate_in_graph(P, J, b);
      res.check(in_weight_window(P, w.b), [&] {
        return W({{"claim", "translate in window"}, {"J", J.to_string()}, {"b", b.to_string()}});
      });
      int j = 0;
      while (j < f && b[j] == hi[j]) b[j] = lo[j], ++j;
      if (j == f) break;
      ++b[j];
    }
  }
  return res;
}

/// Admissible families and the rank formula rank = |S| = |JH(pi1^K1) ∩ W(rhobar^ss)|.
inline SuiteResult verify_rank(const RhoParams& P) {
  SuiteResult res("rank");
  auto W = [&](Witness e) { return detail::weight_witness(P, std::move(e)); };
  auto fams = enumerate_admissible_S(P);
  const Family all = (P.f >= 6) ? ~Family{0} : ((Family{1} << (1u << P.f)) - 1);
  WeightSet ss = serre_weights_semisimple(P);
  bool has_empty = false, has_all = false;
  for (Family S : fams) {
    has_empty = has_empty || S == 0;
    has_all = has_all || S == all;
    res.check(is_admissible_S(P, S), [&] { return W({{"claim", "admissible"}, {"S", family_to_string(S, P.f)}}); });
    WeightSet pi1 = jh_pi1(P, S);
    int64_t inter = 0;
    for (const auto& w : pi1) inter += static_cast<int64_t>(ss.count(w));
    int64_t rk = rank_for_S(P, S);
    res.check(inter == rk, [&] {
      return W({{"claim", "|JH(pi1) ∩ W(ss)| = |S|"}, {"S", family_to_string(S, P.f)}, {"intersection", std::to_string(inter)},
                {"rank", std::to_string(rk)}});
    });
    for (Family T : fams)
      if ((S & ~T) == 0)
        res.check(rk <= rank_for_S(P, T), [&] {
          return W({{"claim", "rank monotone"}, {"S", family_to_string(S, P.f)}, {"T", family_to_string(T, P.f)}});
        });
  }
  // Brute-force count of admissible families as an independent oracle.
  if (P.f <= 3) {
    int64_t brute = 0;
    for (Family S = 0; S <= all; ++S) brute += is_admissible_S(P, S) ? 1 : 0;
    res.check(brute == static_cast<int64_t>(fams.size()), [&] {
      return W({{"claim", "orbit enumeration is exhaustive"}, {"brute", std::to_string(brute)},
                {"enumerated", std::to_string(fams.size())}});
    });
  }
  res.check(has_empty && has_all, [&] { return W({{"claim", "empty and full families admissible"}}); });
  res.check(rank_for_S(P, all) == (int64_t{1} << P.f), [&] { return W({{"claim", "rank(P(J)) = 2^f"}}); });
  return res;
}

}  // namespace etale
