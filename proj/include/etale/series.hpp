#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace etale {

/// Monomials in f variables of total degree < D, listed by degree.
/// Each monomial also has a mixed-radix code (base D); the code of a product is the sum of codes.
class MonomialIndex {
 public:
  MonomialIndex(int f, int D) : f_(f), D_(D) {
    require(f >= 1 && f <= 4, ErrorKind::ConfigInvalid, "series support f <= 4");
    require(D >= 1 && D <= 256, ErrorKind::ConfigInvalid, "series cutoff out of range");
    uint64_t box = 1;
    for (int l = 0; l < f; ++l) box *= static_cast<uint64_t>(D);
    require(box <= (uint64_t{1} << 26), ErrorKind::ConfigInvalid, "series cutoff too large for f");
    by_code_.assign(box, -1);
    count_below_.assign(D + 1, 0);
    std::vector<int> e(f, 0);
    for (int d = 0; d < D; ++d) {
      count_below_[d] = exps_.size() / f;
      enumerate_degree(d, 0, d, e);
    }
    count_below_[D] = size();
  }

  int f() const { return f_; }
  int D() const { return D_; }
  std::size_t size() const { return deg_.size(); }
  /// Number of monomials of degree < d (d clamped to [0, D]).
  std::size_t count_below(int d) const { return count_below_[std::clamp(d, 0, D_)]; }
  int deg(std::size_t i) const { return deg_[i]; }
  uint32_t code(std::size_t i) const { return code_[i]; }
  const int* exps(std::size_t i) const { return &exps_[i * f_]; }
  int exp(std::size_t i, int l) const { return exps_[i * f_ + l]; }
  /// Index of the monomial with the given code; valid only when its degree is < D.
  int32_t at_code(uint32_t c) const { return by_code_[c]; }
  int32_t index_of(const int* e) const {
    int total = 0;
    uint32_t c = 0, mult = 1;
    for (int l = 0; l < f_; ++l) {
      if (e[l] < 0) return -1;
      total += e[l];
      c += static_cast<uint32_t>(e[l]) * mult;
      mult *= static_cast<uint32_t>(D_);
    }
    return total < D_ ? by_code_[c] : -1;
  }
  int32_t index_of(const std::vector<int>& e) const { return index_of(e.data()); }
  /// Index of the variable T_l (degree-1 monomial).
  int32_t var(int l) const {
    std::vector<int> e(f_, 0);
    e[l] = 1;
    return index_of(e);
  }

 private:
  void enumerate_degree(int d, int l, int left, std::vector<int>& e) {
    if (l == f_ - 1) {
      e[l] = left;
      uint32_t c = 0, mult = 1;
      for (int k = 0; k < f_; ++k) {
        c += static_cast<uint32_t>(e[k]) * mult;
        mult *= static_cast<uint32_t>(D_);
      }
      by_code_[c] = static_cast<int32_t>(deg_.size());
      deg_.push_back(d);
      code_.push_back(c);
      exps_.insert(exps_.end(), e.begin(), e.end());
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[l] = v;
      enumerate_degree(d, l + 1, left - v, e);
    }
  }

  int f_, D_;
  std::vector<int> deg_;
  std::vector<uint32_t> code_;
  std::vector<int> exps_;
  std::vector<int32_t> by_code_;
  std::vector<std::size_t> count_below_;
};

/// Which coordinate system a truncated power series is written in.
enum class Chart { T, Y };

/// Power series in f variables with coefficients in F, exact below total degree prec.
struct TSeries {
  Chart chart = Chart::T;
  int prec = 0;
  std::vector<FElem> c;  // indexed by MonomialIndex, size count_below(prec)

  bool operator==(const TSeries&) const = default;
};

/// Arithmetic on TSeries sharing one field and one monomial index.
class SeriesRing {
 public:
  SeriesRing(std::shared_ptr<const Field> F, int f, int D)
      : F_(std::move(F)), M_(std::make_shared<const MonomialIndex>(f, D)) {}

  const Field& field() const { return *F_; }
  std::shared_ptr<const Field> field_ptr() const { return F_; }
  const MonomialIndex& index() const { return *M_; }
  int f() const { return M_->f(); }
  int D() const { return M_->D(); }

  TSeries zero(Chart ch, int prec = -1) const {
    int P = prec < 0 ? D() : std::min(prec, D());
    return TSeries{ch, P, std::vector<FElem>(M_->count_below(P))};
  }
  TSeries constant(Chart ch, FElem a, int prec = -1) const {
    TSeries s = zero(ch, prec);
    if (!s.c.empty()) s.c[0] = a;
    return s;
  }
  TSeries variable(Chart ch, int l, int prec = -1) const {
    TSeries s = zero(ch, prec);
    if (s.prec > 1) s.c[M_->var(l)] = F_->one();
    return s;
  }

  /// Lowest degree carrying a nonzero coefficient; prec when there is none.
  int valuation(const TSeries& x) const {
    for (std::size_t i = 0; i < x.c.size(); ++i)
      if (!x.c[i].is_zero()) return M_->deg(i);
    return x.prec;
  }
  bool is_zero(const TSeries& x) const { return valuation(x) >= x.prec; }

  TSeries truncate(const TSeries& x, int P) const {
    TSeries r = x;
    r.prec = std::min(x.prec, P);
    r.c.resize(M_->count_below(r.prec));
    return r;
  }

  TSeries add(const TSeries& x, const TSeries& y) const {
    check_chart(x, y);
    int P = std::min(x.prec, y.prec);
    TSeries r = zero(x.chart, P);
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = F_->add(x.c[i], y.c[i]);
    return r;
  }
  TSeries sub(const TSeries& x, const TSeries& y) const { return add(x, neg(y)); }
  TSeries neg(const TSeries& x) const {
    TSeries r = x;
    for (auto& v : r.c) v = F_->neg(v);
    return r;
  }
  TSeries scale(FElem a, const TSeries& x) const {
    TSeries r = x;
    for (auto& v : r.c) v = F_->mul(a, v);
    return r;
  }

  /// Product, exact below min(prec_x + val_y, prec_y + val_x, cap).
  TSeries mul(const TSeries& x, const TSeries& y, int cap = 1 << 30) const {
    check_chart(x, y);
    int vx = valuation(x), vy = valuation(y);
    int P = std::min({x.prec + vy, y.prec + vx, cap, D()});
    TSeries r = zero(x.chart, P);
    const std::size_t nx = M_->count_below(P);
    if (F_->has_lanes() && r.c.size() < F_->lane_capacity()) {
      mul_lanes(x, y, P, r);
      return r;
    }
    for (std::size_t i = 0; i < nx && i < x.c.size(); ++i) {
      FElem a = x.c[i];
      if (a.is_zero()) continue;
      const int di = M_->deg(i);
      const std::size_t ny = std::min(M_->count_below(P - di), y.c.size());
      const uint32_t ci = M_->code(i);
      for (std::size_t j = 0; j < ny; ++j) {
        FElem b = y.c[j];
        if (b.is_zero()) continue;
        int32_t k = M_->at_code(ci + M_->code(j));
        r.c[k] = F_->add(r.c[k], F_->mul(a, b));
      }
    }
    return r;
  }

  TSeries pow(const TSeries& x, uint64_t e) const {
    TSeries result = constant(x.chart, F_->one(), x.prec);
    TSeries base = x;
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return result;
  }

  /// S(G_0, ..., G_{f-1}) written in the chart of G; every G_l must have zero constant term.
  /// Multivariate Horner evaluation, each step at the precision it actually needs.
  TSeries compose(const TSeries& S, const std::vector<TSeries>& G, int cap = 1 << 30) const {
    require(static_cast<int>(G.size()) == f(), ErrorKind::ConfigInvalid, "compose needs f substitutions");
    int P = std::min({S.prec, cap, D()});
    for (const auto& g : G) {
      P = std::min(P, g.prec);
      require(g.c.empty() || g.c[0].is_zero(), ErrorKind::HypothesisViolation,
              "substituted series must have zero constant term");
    }
    std::vector<int> e(f(), 0);
    return compose_rec(S, G, 0, 0, P, e);
  }

  /// Monomial map: the coefficient of x^m moves to y^{perm(m)}, with perm linear in m.
  /// Used for Frobenius in either chart.
  TSeries frobenius(const TSeries& x, int p) const {
    const int f_ = f();
    int P = x.prec >= (1 << 29) / p ? D() : std::min(D(), x.prec * p);
    TSeries r = zero(x.chart, P);
    std::vector<int> e(f_);
    for (std::size_t i = 0; i < x.c.size(); ++i) {
      if (x.c[i].is_zero()) continue;
      const int* m = M_->exps(i);
      if (x.chart == Chart::T) {
        for (int l = 0; l < f_; ++l) e[l] = p * m[l];
      } else {
        // Y_j -> Y_{j-1}^p.
        for (int l = 0; l < f_; ++l) e[(l - 1 + f_) % f_] = p * m[l];
      }
      int32_t k = M_->index_of(e);
      if (k >= 0 && static_cast<std::size_t>(k) < r.c.size()) r.c[k] = x.c[i];
    }
    return r;
  }

  std::string to_string(const TSeries& x, std::size_t max_terms = 12) const {
    std::string s;
    std::size_t shown = 0;
    const char var = x.chart == Chart::T ? 'T' : 'Y';
    for (std::size_t i = 0; i < x.c.size() && shown < max_terms; ++i) {
      if (x.c[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + F_->to_string(x.c[i]) + ")";
      for (int l = 0; l < f(); ++l)
        if (M_->exp(i, l)) s += std::string("*") + var + std::to_string(l) + "^" + std::to_string(M_->exp(i, l));
      ++shown;
    }
    if (s.empty()) s = "0";
    return s + " + O(deg " + std::to_string(x.prec) + ")";
  }

 private:
  static void check_chart(const TSeries& x, const TSeries& y) {
    require(x.chart == y.chart, ErrorKind::ConfigInvalid, "series in different charts");
  }

  /// Products accumulated lane-wise; a coefficient receives at most r.c.size() products.
  void mul_lanes(const TSeries& x, const TSeries& y, int P, TSeries& r) const {
    const uint64_t* lanes = F_->lane_table();
    std::vector<uint64_t> acc(r.c.size(), 0);
    std::vector<uint32_t> ylog, ycode;
    std::vector<int> ydeg;
    const std::size_t ny_all = std::min(M_->count_below(P), y.c.size());
    for (std::size_t j = 0; j < ny_all; ++j) {
      if (y.c[j].is_zero()) continue;
      ylog.push_back(y.c[j].v);
      ycode.push_back(M_->code(j));
      ydeg.push_back(M_->deg(j));
    }
    const std::size_t nx = std::min(M_->count_below(P), x.c.size());
    for (std::size_t i = 0; i < nx; ++i) {
      FElem a = x.c[i];
      if (a.is_zero()) continue;
      const int lim = P - M_->deg(i);
      const uint32_t ci = M_->code(i);
      const uint32_t av = a.v;
      for (std::size_t t = 0; t < ylog.size() && ydeg[t] < lim; ++t)
        acc[M_->at_code(ci + ycode[t])] += lanes[av + ylog[t]];
    }
    for (std::size_t k = 0; k < acc.size(); ++k)
      if (acc[k]) r.c[k] = F_->from_lanes(acc[k]);
  }

  TSeries compose_rec(const TSeries& S, const std::vector<TSeries>& G, int v, int used, int P,
                      std::vector<int>& e) const {
    const Chart out = G[0].chart;
    if (P <= 0) return zero(out, 0);
    if (v == f()) {
      int32_t k = M_->index_of(e);
      FElem a = (k >= 0 && static_cast<std::size_t>(k) < S.c.size()) ? S.c[k] : F_->zero();
      return constant(out, a, P);
    }
    const int emax = std::min(P - 1, S.prec - 1 - used);
    if (emax < 0) return zero(out, P);
    TSeries R;
    bool have = false;
    for (int k = emax; k >= 0; --k) {
      e[v] = k;
      TSeries C = compose_rec(S, G, v + 1, used + k, P - k, e);
      if (have) {
        R = add(mul(R, G[v], P - k), C);
      } else {
        R = C;
        have = true;
      }
    }
    e[v] = 0;
    return R;
  }

  std::shared_ptr<const Field> F_;
  std::shared_ptr<const MonomialIndex> M_;
};

}  // namespace etale
