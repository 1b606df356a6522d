#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace etale {

/// Element of F_{p^k} in logarithmic form: v = log_g(x) in [0, q−1), or kZero.
struct FElem {
  static constexpr uint32_t kZero = 0xFFFFFFFFu;
  uint32_t v = kZero;
  bool is_zero() const { return v == kZero; }
  bool operator==(const FElem&) const = default;
  auto operator<=>(const FElem&) const = default;
};

namespace detail {

using Poly = std::vector<int64_t>;  // c_0 + c_1 x + ..., coefficients in [0, p)

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& g, int64_t p) {
  std::size_t n = g.size() - 1;
  std::vector<int64_t> prod(2 * n, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  for (std::size_t d = prod.size(); d-- > n;) {
    int64_t c = prod[d];
    if (c == 0) continue;
    for (std::size_t i = 0; i <= n; ++i) prod[d - n + i] = ((prod[d - n + i] - c * g[i]) % p + p) % p;
  }
  prod.resize(n);
  return prod;
}

inline Poly poly_powmod(Poly a, uint64_t e, const Poly& g, int64_t p) {
  Poly r(g.size() - 1, 0);
  r[0] = 1;
  while (e) {
    if (e & 1) r = poly_mulmod(r, a, g, p);
    a = poly_mulmod(a, a, g, p);
    e >>= 1;
  }
  return r;
}

inline std::vector<uint64_t> prime_factors(uint64_t n) {
  std::vector<uint64_t> out;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline uint64_t upow(uint64_t b, int e) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

/// Evaluates the monic polynomial h at the ring element beta (both mod g).
inline Poly poly_eval_at(const Poly& h, const Poly& beta, const Poly& g, int64_t p) {
  std::size_t n = g.size() - 1;
  Poly acc(n, 0);
  for (std::size_t i = h.size(); i-- > 0;) {
    acc = poly_mulmod(acc, beta, g, p);
    acc[0] = (acc[0] + h[i]) % p;
  }
  return acc;
}

}  // namespace detail

/// Conway polynomial C_{p,n}, returned as c_0..c_n with c_n = 1: the first primitive polynomial
/// in Conway's order compatible with C_{p,d} for every proper divisor d of n.
inline std::vector<int64_t> conway_polynomial(int p, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<int64_t>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, n});
    if (it != cache.end()) return it->second;
  }
  std::vector<std::pair<int, std::vector<int64_t>>> subs;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) subs.emplace_back(d, conway_polynomial(p, d));

  const uint64_t q = detail::upow(p, n);
  const auto ell = detail::prime_factors(q - 1);
  std::vector<int64_t> a(n, 0);  // a[0] is a_{n-1}, the most significant
  std::vector<int64_t> found;
  for (uint64_t counter = 0; counter < q && found.empty(); ++counter) {
    uint64_t c = counter;
    for (int i = n - 1; i >= 0; --i) {
      a[i] = static_cast<int64_t>(c % p);
      c /= p;
    }
    detail::Poly g(n + 1);
    g[n] = 1;
    for (int i = 0; i < n; ++i) {
      int64_t ai = a[n - 1 - i];
      g[i] = ((n - i) % 2 == 0) ? ai : (p - ai) % p;
    }
    if (g[0] == 0) continue;
    detail::Poly x(n, 0);
    if (n == 1)
      x[0] = (p - g[0]) % p;
    else
      x[1] = 1;
    auto one = detail::poly_powmod(x, q - 1, g, p);
    bool is_one = one[0] == 1;
    for (int i = 1; i < n; ++i) is_one = is_one && one[i] == 0;
    if (!is_one) continue;
    bool primitive = true;
    for (uint64_t l : ell) {
      auto y = detail::poly_powmod(x, (q - 1) / l, g, p);
      bool y1 = y[0] == 1;
      for (int i = 1; i < n; ++i) y1 = y1 && y[i] == 0;
      if (y1) {
        primitive = false;
        break;
      }
    }
    if (!primitive) continue;
    bool compatible = true;
    for (const auto& [d, h] : subs) {
      auto beta = detail::poly_powmod(x, (q - 1) / (detail::upow(p, d) - 1), g, p);
      auto v = detail::poly_eval_at(h, beta, g, p);
      for (int64_t coef : v) compatible = compatible && coef == 0;
    }
    if (compatible) found = g;
  }
  require(!found.empty(), ErrorKind::ConfigInvalid, "no Conway polynomial found");
  std::lock_guard<std::mutex> lock(mu);
  cache[{p, n}] = found;
  return found;
}

inline std::string poly_to_string(const std::vector<int64_t>& g) {
  std::string s;
  for (std::size_t i = g.size(); i-- > 0;) {
    if (g[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0 || g[i] != 1) s += std::to_string(g[i]);
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

/// The finite field F_{p^k} = F_p[x]/(C_{p,k}), with x as the primitive generator.
/// Elements are coded as integers sum c_i p^i for the polynomial sum c_i x^i.
class Field {
 public:
  Field(int p, int k) : p_(p), k_(k) {
    require(p >= 3 && k >= 1, ErrorKind::ConfigInvalid, "field needs odd p and k >= 1");
    q_ = detail::upow(p, k);
    require(q_ <= (uint64_t{1} << 24), ErrorKind::ConfigInvalid, "field too large for log tables");
    modulus_ = conway_polynomial(p, k);
    const uint32_t n = static_cast<uint32_t>(q_ - 1);
    exp_.assign(n, 0);
    log_.assign(q_, FElem::kZero);
    detail::Poly cur(k, 0);
    cur[0] = 1;
    detail::Poly x(k, 0);
    if (k == 1)
      x[0] = (p - modulus_[0]) % p;
    else
      x[1] = 1;
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t code = encode(cur);
      exp_[i] = code;
      log_[code] = i;
      cur = detail::poly_mulmod(cur, x, modulus_, p);
    }
    zech_.assign(n, FElem::kZero);
    for (uint32_t d = 0; d < n; ++d) {
      uint32_t c = exp_[d];
      uint32_t low = c % p_;
      uint32_t plus1 = c - low + (low + 1) % p_;
      zech_[d] = log_[plus1];
    }
    half_ = (p_ == 2) ? 0 : n / 2;
    if (k_ <= 3) {
      lanes_.assign(2 * static_cast<std::size_t>(n), 0);
      for (uint32_t d = 0; d < 2 * n; ++d) {
        uint32_t c = exp_[d % n];
        uint64_t packed = 0;
        for (int i = 0; i < k_; ++i) {
          packed |= static_cast<uint64_t>(c % p_) << (kLaneBits * i);
          c /= p_;
        }
        lanes_[d] = packed;
      }
    }
  }

  /// Lane accumulation: each coordinate of a sum of products lives in its own 21-bit lane
  /// of a uint64, so a run of products is added with plain integer additions.
  static constexpr int kLaneBits = 21;
  bool has_lanes() const { return !lanes_.empty(); }
  /// Lanes of a*b for log-indices a.v + b.v < 2(q-1).
  const uint64_t* lane_table() const { return lanes_.data(); }
  /// How many products fit in a lane before it can overflow.
  uint64_t lane_capacity() const { return ((uint64_t{1} << kLaneBits) - 1) / static_cast<uint64_t>(p_ - 1); }
  FElem from_lanes(uint64_t acc) const {
    uint32_t code = 0;
    for (int i = k_ - 1; i >= 0; --i) code = code * p_ + static_cast<uint32_t>(((acc >> (kLaneBits * i)) & ((uint64_t{1} << kLaneBits) - 1)) % p_);
    return FElem{log_[code]};
  }
  uint64_t to_lanes(FElem a) const { return a.is_zero() ? 0 : lanes_[a.v]; }

  static std::shared_ptr<const Field> make(int p, int k) { return std::make_shared<const Field>(p, k); }

  int p() const { return p_; }
  int degree() const { return k_; }
  uint64_t order() const { return q_; }
  const std::vector<int64_t>& modulus() const { return modulus_; }
  std::string modulus_string() const { return poly_to_string(modulus_); }

  FElem zero() const { return FElem{}; }
  FElem one() const { return FElem{0}; }
  /// The generator x of the multiplicative group.
  FElem gen() const { return FElem{q_ == 2 ? 0u : 1u}; }
  FElem from_log(uint64_t l) const { return FElem{static_cast<uint32_t>(l % (q_ - 1))}; }
  FElem from_code(uint32_t code) const { return FElem{log_[code]}; }
  FElem from_int(int64_t n) const {
    int64_t r = ((n % p_) + p_) % p_;
    return FElem{log_[static_cast<uint32_t>(r)]};
  }
  uint32_t code(FElem a) const { return a.is_zero() ? 0 : exp_[a.v]; }
  /// Coefficients c_0..c_{k-1} of a in the polynomial basis.
  std::vector<int64_t> coords(FElem a) const {
    std::vector<int64_t> c(k_);
    uint32_t x = code(a);
    for (int i = 0; i < k_; ++i) {
      c[i] = x % p_;
      x /= p_;
    }
    return c;
  }
  FElem from_coords(const std::vector<int64_t>& c) const {
    detail::Poly v(k_, 0);
    for (int i = 0; i < k_ && i < static_cast<int>(c.size()); ++i) v[i] = ((c[i] % p_) + p_) % p_;
    return from_code(encode(v));
  }

  FElem mul(FElem a, FElem b) const {
    if (a.is_zero() || b.is_zero()) return FElem{};
    uint32_t s = a.v + b.v, n = static_cast<uint32_t>(q_ - 1);
    return FElem{s >= n ? s - n : s};
  }
  FElem add(FElem a, FElem b) const {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    uint32_t n = static_cast<uint32_t>(q_ - 1);
    uint32_t d = b.v >= a.v ? b.v - a.v : b.v + n - a.v;
    uint32_t z = zech_[d];
    if (z == FElem::kZero) return FElem{};
    uint32_t s = a.v + z;
    return FElem{s >= n ? s - n : s};
  }
  FElem neg(FElem a) const {
    if (a.is_zero()) return a;
    uint32_t s = a.v + half_, n = static_cast<uint32_t>(q_ - 1);
    return FElem{s >= n ? s - n : s};
  }
  FElem sub(FElem a, FElem b) const { return add(a, neg(b)); }
  FElem inv(FElem a) const {
    require(!a.is_zero(), ErrorKind::NotInvertible, "inverse of zero in F");
    uint32_t n = static_cast<uint32_t>(q_ - 1);
    return FElem{a.v == 0 ? 0 : n - a.v};
  }
  FElem div(FElem a, FElem b) const { return mul(a, inv(b)); }
  FElem pow(FElem a, int64_t e) const {
    if (a.is_zero()) {
      require(e >= 0, ErrorKind::NotInvertible, "negative power of zero");
      return e == 0 ? one() : a;
    }
    int64_t n = static_cast<int64_t>(q_ - 1);
    int64_t r = ((static_cast<__int128>(a.v) * (e % n)) % n + n) % n;
    return FElem{static_cast<uint32_t>(r)};
  }
  /// a^{p^j}, j taken mod k.
  FElem frob(FElem a, int j) const {
    int jj = ((j % k_) + k_) % k_;
    return pow(a, static_cast<int64_t>(detail::upow(p_, jj)));
  }
  FElem random_nonzero(std::mt19937_64& rng) const {
    return FElem{static_cast<uint32_t>(rng() % (q_ - 1))};
  }
  FElem random(std::mt19937_64& rng) const {
    uint64_t c = rng() % q_;
    return from_code(static_cast<uint32_t>(c));
  }
  bool in_prime_field(FElem a) const { return code(a) < static_cast<uint32_t>(p_); }

  std::string to_string(FElem a) const { return poly_to_string(coords(a)); }

 private:
  uint32_t encode(const detail::Poly& c) const {
    uint32_t code = 0;
    for (int i = k_ - 1; i >= 0; --i) code = code * p_ + static_cast<uint32_t>(c[i]);
    return code;
  }

  int p_, k_;
  uint64_t q_;
  std::vector<int64_t> modulus_;
  std::vector<uint32_t> exp_;
  std::vector<uint32_t> log_;
  std::vector<uint32_t> zech_;
  std::vector<uint64_t> lanes_;
  uint32_t half_ = 0;
};

inline FElem frobenius_power(const Field& F, FElem a, int j) { return F.frob(a, j); }

}  // namespace etale
