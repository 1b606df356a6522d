#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "errors.hpp"

namespace etale {

inline constexpr int kMaxF = 16;

/// Subset of the cyclic index set Z/fZ, stored as a bitmask.
class SubsetJ {
 public:
  SubsetJ() = default;
  explicit SubsetJ(int f, uint32_t bits = 0) : f_(f), bits_(bits & full_mask(f)) {
    require(f >= 1 && f <= kMaxF, ErrorKind::ConfigInvalid, "f must lie in [1, 16]");
  }
  static SubsetJ of(int f, std::initializer_list<int> elems) {
    SubsetJ s(f);
    for (int j : elems) s = s.with(j);
    return s;
  }
  static SubsetJ empty(int f) { return SubsetJ(f, 0); }
  static SubsetJ full(int f) { return SubsetJ(f, full_mask(f)); }

  int f() const { return f_; }
  uint32_t bits() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool is_empty() const { return bits_ == 0; }
  bool is_full() const { return bits_ == full_mask(f_); }

  /// Membership of j taken mod f, so negative and oversized indices are fine.
  bool contains(int j) const { return (bits_ >> mod(j)) & 1u; }
  SubsetJ with(int j) const { return SubsetJ(f_, bits_ | (1u << mod(j)), raw_tag{}); }
  SubsetJ without(int j) const { return SubsetJ(f_, bits_ & ~(1u << mod(j)), raw_tag{}); }

  /// J+k = {j+k : j in J}.
  SubsetJ shift(int k) const {
    int s = mod(k);
    if (s == 0) return *this;
    uint32_t m = full_mask(f_);
    return SubsetJ(f_, ((bits_ << s) | (bits_ >> (f_ - s))) & m, raw_tag{});
  }
  SubsetJ complement() const { return SubsetJ(f_, ~bits_ & full_mask(f_), raw_tag{}); }
  SubsetJ operator&(const SubsetJ& o) const { check(o); return SubsetJ(f_, bits_ & o.bits_, raw_tag{}); }
  SubsetJ operator|(const SubsetJ& o) const { check(o); return SubsetJ(f_, bits_ | o.bits_, raw_tag{}); }
  SubsetJ operator-(const SubsetJ& o) const { check(o); return SubsetJ(f_, bits_ & ~o.bits_, raw_tag{}); }
  SubsetJ operator^(const SubsetJ& o) const { check(o); return SubsetJ(f_, bits_ ^ o.bits_, raw_tag{}); }
  bool subset_of(const SubsetJ& o) const { check(o); return (bits_ & ~o.bits_) == 0; }
  bool proper_subset_of(const SubsetJ& o) const { return subset_of(o) && bits_ != o.bits_; }

  bool operator==(const SubsetJ& o) const = default;
  auto operator<=>(const SubsetJ& o) const = default;

  std::vector<int> elements() const {
    std::vector<int> out;
    for (int j = 0; j < f_; ++j)
      if (contains(j)) out.push_back(j);
    return out;
  }
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int j : elements()) {
      if (!first) s += ",";
      s += std::to_string(j);
      first = false;
    }
    return s + "}";
  }

  int mod(int j) const { return ((j % f_) + f_) % f_; }
  static uint32_t full_mask(int f) { return f >= 32 ? 0xFFFFFFFFu : ((1u << f) - 1u); }

 private:
  struct raw_tag {};
  SubsetJ(int f, uint32_t bits, raw_tag) : f_(f), bits_(bits) {}
  void check(const SubsetJ& o) const {
    require(o.f_ == f_, ErrorKind::ConfigInvalid, "subsets over different f");
  }

  int f_ = 1;
  uint32_t bits_ = 0;
};

/// Shorthand for the symmetric difference.
inline SubsetJ symmetric_difference(const SubsetJ& a, const SubsetJ& b) { return a ^ b; }
inline SubsetJ shift_subset(const SubsetJ& J, int k) { return J.shift(k); }

/// ∂J = {j in J : j+1 not in J}. With f=1 this is always empty.
inline SubsetJ right_boundary(const SubsetJ& J) { return J - J.shift(-1); }

struct Parts {
  SubsetJ ss, nss, sh;
};

/// Jss = J∩Jrho, Jnss = J\Jrho, Jsh = J∩(J−1)∩Jrho.
inline Parts decompose_parts(const SubsetJ& J, const SubsetJ& Jrho) {
  return Parts{J & Jrho, J - Jrho, J & J.shift(-1) & Jrho};
}

/// All 2^f subsets in increasing bitmask order.
inline std::vector<SubsetJ> all_subsets(int f) {
  std::vector<SubsetJ> out;
  out.reserve(std::size_t{1} << f);
  for (uint32_t b = 0; b < (1u << f); ++b) out.emplace_back(f, b);
  return out;
}

/// Integer vector indexed by Z/fZ.
class IntVec {
 public:
  IntVec() = default;
  explicit IntVec(int f, int64_t fill = 0) : v_(static_cast<std::size_t>(f), fill) {
    require(f >= 1, ErrorKind::ConfigInvalid, "IntVec needs f >= 1");
  }
  IntVec(std::initializer_list<int64_t> xs) : v_(xs) {}
  explicit IntVec(std::vector<int64_t> xs) : v_(std::move(xs)) {}

  static IntVec indicator(const SubsetJ& J) {
    IntVec e(J.f());
    for (int j = 0; j < J.f(); ++j) e.v_[j] = J.contains(j) ? 1 : 0;
    return e;
  }
  static IntVec unit(int f, int j) {
    IntVec e(f);
    e[j] = 1;
    return e;
  }

  int f() const { return static_cast<int>(v_.size()); }
  /// Cyclic access: index taken mod f.
  int64_t& operator[](int j) { return v_[idx(j)]; }
  int64_t operator[](int j) const { return v_[idx(j)]; }
  const std::vector<int64_t>& data() const { return v_; }

  IntVec operator+(const IntVec& o) const { return zip(o, [](int64_t a, int64_t b) { return a + b; }); }
  IntVec operator-(const IntVec& o) const { return zip(o, [](int64_t a, int64_t b) { return a - b; }); }
  IntVec operator-() const { return scale(-1); }
  IntVec& operator+=(const IntVec& o) { return *this = *this + o; }
  IntVec& operator-=(const IntVec& o) { return *this = *this - o; }
  IntVec scale(int64_t k) const {
    IntVec r = *this;
    for (auto& x : r.v_) x *= k;
    return r;
  }
  friend IntVec operator*(int64_t k, const IntVec& v) { return v.scale(k); }

  /// δ(i)_j = i_{j+1}.
  IntVec shifted() const {
    IntVec r(f());
    for (int j = 0; j < f(); ++j) r[j] = (*this)[j + 1];
    return r;
  }
  int64_t norm() const {
    int64_t s = 0;
    for (auto x : v_) s += x;
    return s;
  }
  /// Componentwise order.
  bool leq(const IntVec& o) const {
    check(o);
    for (int j = 0; j < f(); ++j)
      if (v_[j] > o.v_[j]) return false;
    return true;
  }
  bool geq(const IntVec& o) const { return o.leq(*this); }

  bool operator==(const IntVec& o) const = default;
  auto operator<=>(const IntVec& o) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (int j = 0; j < f(); ++j) {
      if (j) s += ",";
      s += std::to_string(v_[j]);
    }
    return s + ")";
  }

 private:
  std::size_t idx(int j) const {
    int n = f();
    return static_cast<std::size_t>(((j % n) + n) % n);
  }
  void check(const IntVec& o) const {
    require(o.f() == f(), ErrorKind::ConfigInvalid, "IntVec length mismatch");
  }
  template <class Op>
  IntVec zip(const IntVec& o, Op op) const {
    check(o);
    IntVec r(f());
    for (int j = 0; j < f(); ++j) r.v_[j] = op(v_[j], o.v_[j]);
    return r;
  }

  std::vector<int64_t> v_;
};

inline IntVec indicator(const SubsetJ& J) { return IntVec::indicator(J); }
inline IntVec vec_shift(const IntVec& i) { return i.shifted(); }
inline int64_t vec_norm(const IntVec& i) { return i.norm(); }

/// 1 if cond else 0; the Kronecker delta of a condition.
inline int64_t dlt(bool cond) { return cond ? 1 : 0; }
/// (−1)^e for e in {0,1}.
inline int64_t sgn(bool odd) { return odd ? -1 : 1; }

}  // namespace etale
