#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace etale {

/// Element of O_K / p^N = (Z/p^N)[x]/(m), with m the lift of the Conway polynomial of F_q.
struct WittElem {
  std::vector<int64_t> c;  // coefficients of 1, x, ..., x^{f-1}, each in [0, p^N)
  bool operator==(const WittElem&) const = default;
};

/// Truncated unramified Witt ring W_N(F_q); shares its modulus with the field F_q.
class WittRing {
 public:
  WittRing(std::shared_ptr<const Field> F, int N) : F_(std::move(F)), N_(N) {
    require(N >= 1, ErrorKind::ConfigInvalid, "Witt precision must be >= 1");
    p_ = F_->p();
    f_ = F_->degree();
    pN_ = 1;
    for (int i = 0; i < N; ++i) {
      require(pN_ < (int64_t{1} << 31) / p_, ErrorKind::ConfigInvalid, "p^N exceeds 2^31");
      pN_ *= p_;
    }
    m_ = F_->modulus();
  }

  const Field& field() const { return *F_; }
  std::shared_ptr<const Field> field_ptr() const { return F_; }
  int p() const { return p_; }
  int f() const { return f_; }
  int N() const { return N_; }
  int64_t pN() const { return pN_; }

  WittElem zero() const { return WittElem{std::vector<int64_t>(f_, 0)}; }
  WittElem one() const { return from_int(1); }
  WittElem from_int(int64_t n) const {
    WittElem e = zero();
    e.c[0] = md(n);
    return e;
  }
  /// The element x of the fixed Z_p-basis {1, x, ..., x^{f-1}}.
  WittElem basis(int i) const {
    require(i >= 0 && i < f_, ErrorKind::RangeViolation, "basis index out of range");
    WittElem e = zero();
    e.c[i] = 1;
    return e;
  }

  WittElem add(const WittElem& a, const WittElem& b) const {
    WittElem r = zero();
    for (int i = 0; i < f_; ++i) r.c[i] = md(a.c[i] + b.c[i]);
    return r;
  }
  WittElem sub(const WittElem& a, const WittElem& b) const {
    WittElem r = zero();
    for (int i = 0; i < f_; ++i) r.c[i] = md(a.c[i] - b.c[i]);
    return r;
  }
  WittElem scale(const WittElem& a, int64_t k) const {
    WittElem r = zero();
    for (int i = 0; i < f_; ++i) r.c[i] = md(static_cast<__int128>(a.c[i]) * md(k) % pN_);
    return r;
  }
  WittElem mul(const WittElem& a, const WittElem& b) const {
    std::vector<__int128> prod(2 * f_, 0);
    for (int i = 0; i < f_; ++i)
      for (int j = 0; j < f_; ++j) prod[i + j] = (prod[i + j] + static_cast<__int128>(a.c[i]) * b.c[j]) % pN_;
    for (int d = 2 * f_ - 1; d >= f_; --d) {
      __int128 c = prod[d];
      if (c == 0) continue;
      for (int i = 0; i <= f_; ++i) prod[d - f_ + i] = (prod[d - f_ + i] - c * m_[i]) % pN_;
    }
    WittElem r = zero();
    for (int i = 0; i < f_; ++i) r.c[i] = md(static_cast<int64_t>(prod[i] % pN_));
    return r;
  }
  WittElem pow(WittElem a, uint64_t e) const {
    WittElem r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// Reduction mod p, as an element of F_q.
  FElem reduce(const WittElem& a) const {
    std::vector<int64_t> c(f_);
    for (int i = 0; i < f_; ++i) c[i] = a.c[i] % p_;
    return F_->from_coords(c);
  }
  bool is_unit(const WittElem& a) const { return !reduce(a).is_zero(); }

  /// The unique lift y of x with y^q = y; found as the limit of y -> y^q.
  WittElem teichmuller(FElem x) const {
    if (x.is_zero()) return zero();
    WittElem y = zero();
    auto cs = F_->coords(x);
    for (int i = 0; i < f_; ++i) y.c[i] = cs[i];
    for (int it = 0; it <= N_ + 1; ++it) {
      WittElem z = pow(y, F_->order());
      if (z == y) return y;
      y = z;
    }
    fail(ErrorKind::NonConvergence, "Teichmuller iteration did not stabilise");
  }

  /// Coordinates in the basis {1, x, ..., x^{f-1}}, each mod p^N.
  std::vector<int64_t> zp_coordinates(const WittElem& a) const { return a.c; }

  WittElem inverse(const WittElem& u) const {
    require(is_unit(u), ErrorKind::NotAUnit, "inverse of a non-unit");
    // The unit group of O_K/p^N has order (q-1) q^{N-1}.
    uint64_t order = F_->order() - 1;
    for (int i = 1; i < N_; ++i) order *= F_->order();
    return pow(u, order - 1);
  }

  struct UnitParts {
    FElem a0;
    WittElem u1;
  };
  /// u = [a0] u1 with u1 = 1 mod p.
  UnitParts unit_decompose(const WittElem& u) const {
    FElem a0 = reduce(u);
    require(!a0.is_zero(), ErrorKind::NotAUnit, "unit_decompose of a non-unit");
    WittElem u1 = mul(u, teichmuller(F_->inv(a0)));
    return {a0, u1};
  }

  /// Uniform element of 1 + p O_K / p^N.
  WittElem random_principal_unit(std::mt19937_64& rng) const {
    WittElem e = one();
    int64_t range = pN_ / p_;
    for (int i = 0; i < f_; ++i) e.c[i] = md(e.c[i] + p_ * static_cast<int64_t>(rng() % static_cast<uint64_t>(range)));
    return e;
  }
  /// Uniform unit of O_K / p^N.
  WittElem random_unit(std::mt19937_64& rng) const {
    return mul(teichmuller(F_->random_nonzero(rng)), random_principal_unit(rng));
  }

  std::string to_string(const WittElem& a) const {
    std::string s = "[";
    for (int i = 0; i < f_; ++i) s += (i ? "," : "") + std::to_string(a.c[i]);
    return s + "]";
  }

 private:
  int64_t md(int64_t v) const {
    int64_t r = v % pN_;
    return r < 0 ? r + pN_ : r;
  }

  std::shared_ptr<const Field> F_;
  int N_;
  int p_ = 0, f_ = 0;
  int64_t pN_ = 1;
  std::vector<int64_t> m_;
};

}  // namespace etale
