#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "base.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "series.hpp"

namespace etale {

/// Precision of an exact element.
inline constexpr int64_t kExact = std::numeric_limits<int64_t>::max() / 4;

/// Exponent vectors k in Z^f (f <= 3) packed 21 bits per coordinate with offset 2^20.
namespace keys {
inline constexpr int kBits = 21;
inline constexpr int64_t kOff = int64_t{1} << (kBits - 1);
inline constexpr uint64_t kMask = (uint64_t{1} << kBits) - 1;

inline uint64_t zero_key(int f) {
  uint64_t k = 0;
  for (int j = 0; j < f; ++j) k |= static_cast<uint64_t>(kOff) << (kBits * j);
  return k;
}
inline int64_t coord(uint64_t key, int j) { return static_cast<int64_t>((key >> (kBits * j)) & kMask) - kOff; }
inline uint64_t pack(const int64_t* k, int f) {
  uint64_t key = 0;
  for (int j = 0; j < f; ++j) {
    require(k[j] > -kOff && k[j] < kOff, ErrorKind::RangeViolation, "exponent outside packable range");
    key |= static_cast<uint64_t>(k[j] + kOff) << (kBits * j);
  }
  return key;
}
inline uint64_t pack(const IntVec& k) { return pack(k.data().data(), k.f()); }
inline IntVec unpack(uint64_t key, int f) {
  IntVec v(f);
  for (int j = 0; j < f; ++j) v[j] = coord(key, j);
  return v;
}
}  // namespace keys

struct ATerm {
  uint64_t key;
  int64_t deg;
  FElem c;
};

/// Element of A: a finite Laurent sum in Y_0..Y_{f-1}, exact below total degree prec.
/// Terms are nonzero, unique, sorted by (deg, key), and all have deg < prec.
struct AElement {
  int64_t prec = kExact;
  std::vector<ATerm> terms;

  bool empty() const { return terms.empty(); }
};

/// A Z_p exponent known mod p^N, applied to 1-units through base-p digits.
struct ZpExponent {
  int p = 0;
  int N = 0;
  int64_t value = 0;  // in [0, p^N)

  int digit(int i) const {
    int64_t v = value;
    for (int k = 0; k < i; ++k) v /= p;
    return static_cast<int>(v % p);
  }
  static ZpExponent from_int(int p, int N, int64_t n) {
    int64_t pN = 1;
    for (int i = 0; i < N; ++i) pN *= p;
    int64_t v = n % pN;
    return {p, N, v < 0 ? v + pN : v};
  }
  ZpExponent neg() const { return from_int(p, N, -value); }
};

/// Arithmetic in A for fixed (F, f). Every binary operation propagates precision as
/// min(prec_x + fdeg_y, prec_y + fdeg_x).
class ARing {
 public:
  ARing(std::shared_ptr<const Field> F, int f) : F_(std::move(F)), f_(f), zero_key_(keys::zero_key(f)) {
    require(f >= 1 && f <= 3, ErrorKind::ConfigInvalid, "A supports f <= 3");
  }

  const Field& field() const { return *F_; }
  std::shared_ptr<const Field> field_ptr() const { return F_; }
  int f() const { return f_; }
  int p() const { return F_->p(); }

  AElement zero(int64_t prec = kExact) const { return AElement{prec, {}}; }
  AElement scalar(FElem c, int64_t prec = kExact) const { return monomial(c, IntVec(f_, 0), prec); }
  AElement one(int64_t prec = kExact) const { return scalar(F_->one(), prec); }
  AElement monomial(FElem c, const IntVec& k, int64_t prec = kExact) const {
    AElement x{prec, {}};
    if (!c.is_zero() && k.norm() < prec) x.terms.push_back({keys::pack(k), k.norm(), c});
    return x;
  }
  /// Y_0^{k_0}...Y_{f-1}^{k_{f-1}}.
  AElement Y(const IntVec& k) const { return monomial(F_->one(), k); }
  /// Y_j^{h(1-φ)} = Y_j^h Y_{j-1}^{-ph}.
  IntVec twist_exponent(int j, int64_t h) const {
    IntVec k(f_, 0);
    k[j] += h;
    k[j - 1] -= p() * h;
    return k;
  }

  /// A Y-chart power series as an element of A.
  AElement from_series(const SeriesRing& S, const TSeries& x) const {
    require(x.chart == Chart::Y, ErrorKind::ConfigInvalid, "only Y-chart series embed in A");
    require(S.f() == f_, ErrorKind::ConfigInvalid, "series has the wrong number of variables");
    AElement r{x.prec, {}};
    const auto& M = S.index();
    std::vector<int64_t> k(f_);
    for (std::size_t i = 0; i < x.c.size(); ++i) {
      if (x.c[i].is_zero()) continue;
      for (int l = 0; l < f_; ++l) k[l] = M.exp(i, l);
      r.terms.push_back({keys::pack(k.data(), f_), M.deg(i), x.c[i]});
    }
    normalize(r);
    return r;
  }

  IntVec exponent(const ATerm& t) const { return keys::unpack(t.key, f_); }

  /// Minimal total degree of the support; kExact for zero.
  int64_t fdeg(const AElement& x) const { return x.terms.empty() ? kExact : x.terms.front().deg; }
  /// Every term of degree < d vanishes.
  bool zero_below(const AElement& x, int64_t d) const { return x.terms.empty() || x.terms.front().deg >= d; }
  /// Coefficient of Y^k (zero if absent or beyond precision).
  FElem coeff(const AElement& x, const IntVec& k) const {
    uint64_t key = keys::pack(k);
    for (const auto& t : x.terms)
      if (t.key == key) return t.c;
    return F_->zero();
  }

  /// Torus-fixed: every exponent has sum k_j p^j = 0 mod q-1.
  bool is_torus_fixed(const AElement& x) const {
    const int64_t qm1 = static_cast<int64_t>(F_->order()) - 1;
    for (const auto& t : x.terms) {
      int64_t s = 0, pj = 1;
      for (int j = 0; j < f_; ++j) {
        s = (s + keys::coord(t.key, j) % qm1 * pj) % qm1;
        pj = pj * p() % qm1;
      }
      if (s % qm1 != 0) return false;
    }
    return true;
  }

  AElement truncate(const AElement& x, int64_t P) const {
    AElement r{std::min(x.prec, P), {}};
    for (const auto& t : x.terms)
      if (t.deg < r.prec) r.terms.push_back(t);
    return r;
  }

  AElement add(const AElement& x, const AElement& y) const {
    AElement r{std::min(x.prec, y.prec), {}};
    r.terms.reserve(x.terms.size() + y.terms.size());
    std::size_t i = 0, j = 0;
    auto less = [](const ATerm& a, const ATerm& b) { return a.deg != b.deg ? a.deg < b.deg : a.key < b.key; };
    while (i < x.terms.size() || j < y.terms.size()) {
      const ATerm* t;
      if (j == y.terms.size() || (i < x.terms.size() && less(x.terms[i], y.terms[j]))) {
        t = &x.terms[i++];
        if (t->deg < r.prec) r.terms.push_back(*t);
      } else if (i == x.terms.size() || less(y.terms[j], x.terms[i])) {
        t = &y.terms[j++];
        if (t->deg < r.prec) r.terms.push_back(*t);
      } else {
        FElem c = F_->add(x.terms[i].c, y.terms[j].c);
        if (!c.is_zero() && x.terms[i].deg < r.prec) r.terms.push_back({x.terms[i].key, x.terms[i].deg, c});
        ++i;
        ++j;
      }
    }
    return r;
  }
  AElement neg(const AElement& x) const {
    AElement r = x;
    for (auto& t : r.terms) t.c = F_->neg(t.c);
    return r;
  }
  AElement sub(const AElement& x, const AElement& y) const { return add(x, neg(y)); }
  AElement scale(FElem a, const AElement& x) const {
    if (a.is_zero()) return zero(x.prec);
    AElement r = x;
    for (auto& t : r.terms) t.c = F_->mul(a, t.c);
    return r;
  }
  /// Multiplication by c Y^k: exact shift of every term and of the precision.
  AElement mul_monomial(const AElement& x, FElem c, const IntVec& k) const {
    if (c.is_zero()) return zero();
    check_range(x, k, 1);
    AElement r{x.prec >= kExact ? kExact : x.prec + k.norm(), {}};
    const uint64_t kk = keys::pack(k);
    const int64_t d = k.norm();
    r.terms.reserve(x.terms.size());
    for (const auto& t : x.terms) r.terms.push_back({t.key + kk - zero_key_, t.deg + d, F_->mul(c, t.c)});
    normalize(r);
    return r;
  }

  AElement mul(const AElement& x, const AElement& y, int64_t cap = kExact) const {
    const int64_t P = std::min({sat_add(x.prec, fdeg(y)), sat_add(y.prec, fdeg(x)), cap});
    if (x.terms.empty() || y.terms.empty()) return zero(P);
    if (x.terms.size() == 1) return truncate(mul_monomial(y, x.terms[0].c, exponent(x.terms[0])), P);
    if (y.terms.size() == 1) return truncate(mul_monomial(x, y.terms[0].c, exponent(y.terms[0])), P);
    check_pair_range(x, y);
    std::unordered_map<uint64_t, FElem> acc;
    acc.reserve(std::min<std::size_t>(x.terms.size() * y.terms.size(), 1 << 20));
    for (const auto& a : x.terms) {
      if (a.deg + y.terms.front().deg >= P) break;
      for (const auto& b : y.terms) {
        if (a.deg + b.deg >= P) break;
        uint64_t k = a.key + b.key - zero_key_;
        auto [it, fresh] = acc.try_emplace(k, FElem{});
        it->second = F_->add(it->second, F_->mul(a.c, b.c));
      }
    }
    AElement r{P, {}};
    r.terms.reserve(acc.size());
    for (const auto& [k, c] : acc)
      if (!c.is_zero()) r.terms.push_back({k, key_degree(k), c});
    normalize(r);
    return r;
  }

  /// φ: Y_j -> Y_{j-1}^p; multiplies degrees and precision by p.
  AElement phi(const AElement& x) const {
    AElement r{x.prec >= kExact / p() ? kExact : x.prec * p(), {}};
    r.terms.reserve(x.terms.size());
    std::vector<int64_t> k(f_);
    for (const auto& t : x.terms) {
      for (int j = 0; j < f_; ++j) k[(j - 1 + f_) % f_] = p() * keys::coord(t.key, j);
      r.terms.push_back({keys::pack(k.data(), f_), t.deg * p(), t.c});
    }
    normalize(r);
    return r;
  }
  AElement phi_pow(const AElement& x, int n) const {
    AElement r = x;
    for (int i = 0; i < n; ++i) r = phi(r);
    return r;
  }

  /// Inverse of c Y^m (1 + ε) with fdeg ε >= 1, by the geometric series; exact below
  /// min(prec - 2|m|, cap).
  AElement invert_unit(const AElement& x, int64_t cap = kExact) const {
    require(!x.terms.empty(), ErrorKind::NotAUnit, "zero is not a unit");
    const ATerm lead = x.terms.front();
    require(x.terms.size() == 1 || x.terms[1].deg > lead.deg, ErrorKind::NotAUnit,
            "leading form is not a single monomial");
    const IntVec m = exponent(lead);
    const int64_t md = m.norm();
    const int64_t rel = std::min(x.prec >= kExact ? kExact : x.prec - md, cap >= kExact ? kExact : cap + md);
    const FElem cinv = F_->inv(lead.c);
    if (x.terms.size() == 1) return monomial(cinv, -m, rel >= kExact ? kExact : rel - md);
    require(rel < kExact, ErrorKind::PrecisionExhausted, "inverse of an exact non-monomial needs a cap");
    require(rel > 0, ErrorKind::PrecisionExhausted, "unit known to no relative precision");
    // eps = c^{-1} Y^{-m} x - 1, exact below rel.
    AElement eps = truncate(mul_monomial(x, cinv, -m), rel);
    eps = sub(eps, one(rel));
    AElement sum = one(rel), term = one(rel);
    AElement neg_eps = neg(eps);
    while (!term.terms.empty()) {
      term = mul(term, neg_eps, rel);
      sum = add(sum, term);
    }
    sum.prec = rel;
    return mul_monomial(sum, cinv, -m);
  }

  /// x^n for integer n; negative n inverts first.
  AElement pow(const AElement& x, int64_t n, int64_t cap = kExact) const {
    if (n < 0) return pow(invert_unit(x, cap), -n, cap);
    AElement result = one(), base = x;
    while (n > 0) {
      if (n & 1) result = mul(result, base, cap);
      n >>= 1;
      if (n) base = mul(base, base, cap);
    }
    return result;
  }

  /// (sum c_k Y^k)^{p^i} = sum c_k^{p^i} Y^{p^i k}: the p-power map in characteristic p.
  AElement frobenius_power_map(const AElement& x, int i) const {
    AElement r = x;
    for (int s = 0; s < i; ++s) {
      AElement t{r.prec >= kExact / p() ? kExact : r.prec * p(), {}};
      std::vector<int64_t> k(f_);
      for (const auto& term : r.terms) {
        for (int j = 0; j < f_; ++j) k[j] = p() * keys::coord(term.key, j);
        t.terms.push_back({keys::pack(k.data(), f_), term.deg * p(), F_->pow(term.c, p())});
      }
      normalize(t);
      r = std::move(t);
    }
    return r;
  }

  /// g^c for g = 1 + t with fdeg t >= 1, via g^c = prod_i (1 + t^{p^i})^{c_i}.
  AElement zp_power(const AElement& g, const ZpExponent& c, int64_t cap = kExact) const {
    const int64_t P = std::min(g.prec, cap);
    require(P < kExact, ErrorKind::PrecisionExhausted, "p-adic power of an exact series needs a cap");
    AElement t = sub(truncate(g, P), one(P));
    require(fdeg(t) >= 1, ErrorKind::HypothesisViolation, "zp_power needs g = 1 mod F_{-1}A");
    AElement result = one(P);
    if (t.terms.empty()) return result;
    const int64_t d = fdeg(t);
    int64_t reach = d;
    for (int i = 0; reach < P; ++i) {
      require(i < c.N, ErrorKind::ExponentPrecisionTooLow,
              "exponent digits beyond p^" + std::to_string(c.N) + " are needed at precision " + std::to_string(P));
      int ci = c.digit(i);
      if (ci != 0) {
        AElement ti = truncate(frobenius_power_map(t, i), P);
        result = mul(result, binomial_power(ti, ci, P), P);
      }
      reach = reach > kExact / p() ? kExact : reach * p();
    }
    result.prec = P;
    return result;
  }

  /// prod_i φ^i(g^{c_i}) for the φ-polynomial exponent sum c_i φ^i.
  AElement zp_power_phi(const AElement& g, const std::vector<ZpExponent>& cs, int64_t cap = kExact) const {
    AElement result = one();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      AElement part = phi_pow(zp_power(g, cs[i], cap), static_cast<int>(i));
      result = mul(result, part, cap);
    }
    return result;
  }

  bool equal(const AElement& x, const AElement& y) const {
    if (x.prec != y.prec || x.terms.size() != y.terms.size()) return false;
    for (std::size_t i = 0; i < x.terms.size(); ++i)
      if (x.terms[i].key != y.terms[i].key || !(x.terms[i].c == y.terms[i].c)) return false;
    return true;
  }

  std::string to_string(const AElement& x, std::size_t max_terms = 6) const {
    std::string s;
    std::size_t shown = 0;
    for (const auto& t : x.terms) {
      if (shown == max_terms) {
        s += " + ...";
        break;
      }
      if (!s.empty()) s += " + ";
      s += "(" + F_->to_string(t.c) + ")Y^" + exponent(t).to_string();
      ++shown;
    }
    if (s.empty()) s = "0";
    if (x.prec < kExact) s += " + O(deg " + std::to_string(x.prec) + ")";
    return s;
  }

  int64_t key_degree(uint64_t key) const {
    int64_t d = 0;
    for (int j = 0; j < f_; ++j) d += keys::coord(key, j);
    return d;
  }

 private:
  static int64_t sat_add(int64_t a, int64_t b) {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
  }

  /// (1+s)^c = sum_m binom(c, m) s^m for 0 <= c < p.
  AElement binomial_power(const AElement& s, int c, int64_t P) const {
    AElement result = one(P), pw = one(P);
    int64_t binom = 1;
    for (int m = 1; m <= c; ++m) {
      pw = mul(pw, s, P);
      if (pw.terms.empty()) break;
      binom = binom * (c - m + 1) / m;
      result = add(result, scale(F_->from_int(binom % p()), pw));
    }
    return result;
  }

  void normalize(AElement& x) const {
    std::sort(x.terms.begin(), x.terms.end(),
              [](const ATerm& a, const ATerm& b) { return a.deg != b.deg ? a.deg < b.deg : a.key < b.key; });
    std::vector<ATerm> out;
    out.reserve(x.terms.size());
    for (const auto& t : x.terms) {
      if (t.deg >= x.prec) continue;
      if (!out.empty() && out.back().key == t.key) {
        out.back().c = F_->add(out.back().c, t.c);
        if (out.back().c.is_zero()) out.pop_back();
      } else if (!t.c.is_zero()) {
        out.push_back(t);
      }
    }
    x.terms = std::move(out);
  }

  /// Coordinate bounds of the support.
  void bounds(const AElement& x, std::vector<int64_t>& lo, std::vector<int64_t>& hi) const {
    lo.assign(f_, 0);
    hi.assign(f_, 0);
    for (const auto& t : x.terms)
      for (int j = 0; j < f_; ++j) {
        lo[j] = std::min(lo[j], keys::coord(t.key, j));
        hi[j] = std::max(hi[j], keys::coord(t.key, j));
      }
  }
  void check_range(const AElement& x, const IntVec& k, int64_t) const {
    std::vector<int64_t> lo, hi;
    bounds(x, lo, hi);
    for (int j = 0; j < f_; ++j)
      require(lo[j] + k[j] > -keys::kOff && hi[j] + k[j] < keys::kOff, ErrorKind::RangeViolation,
              "exponent outside packable range");
  }
  void check_pair_range(const AElement& x, const AElement& y) const {
    std::vector<int64_t> lx, hx, ly, hy;
    bounds(x, lx, hx);
    bounds(y, ly, hy);
    for (int j = 0; j < f_; ++j)
      require(lx[j] + ly[j] > -keys::kOff && hx[j] + hy[j] < keys::kOff, ErrorKind::RangeViolation,
              "exponent outside packable range");
  }

  std::shared_ptr<const Field> F_;
  int f_;
  uint64_t zero_key_;
};

}  // namespace etale
