#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "check.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "laurent.hpp"
#include "series.hpp"
#include "witt.hpp"

namespace etale {

/// N = floor(log_p max(D, 1)) + 2.
inline int witt_precision(int p, int D) {
  int n = 0;
  int64_t pk = p;
  while (pk <= std::max(D, 1)) {
    ++n;
    pk *= p;
  }
  return n + 2;
}

namespace detail {

/// binom(c, m) mod p by Lucas, with c given through its base-p digits.
class LucasTable {
 public:
  explicit LucasTable(int p) : p_(p), small_(static_cast<std::size_t>(p) * p, 0) {
    for (int n = 0; n < p; ++n) {
      small_[n * p] = 1;
      for (int k = 1; k <= n; ++k) small_[n * p + k] = (small_[(n - 1) * p + k - 1] + (k <= n - 1 ? small_[(n - 1) * p + k] : 0)) % p;
    }
  }
  int binom(int64_t c, int64_t m) const {
    int r = 1;
    while (m > 0) {
      if (c == 0) return 0;
      int cd = static_cast<int>(c % p_), md = static_cast<int>(m % p_);
      if (md > cd) return 0;
      r = r * small_[cd * p_ + md] % p_;
      c /= p_;
      m /= p_;
    }
    return r;
  }
  /// binom(c, t) mod p for t = 0..D-1.
  std::vector<int> row(int64_t c, int D) const {
    std::vector<int> out(D);
    for (int t = 0; t < D; ++t) out[t] = binom(c, t);
    return out;
  }

 private:
  int p_;
  std::vector<int> small_;
};

/// Inverse of an f x f matrix over F; SingularJacobian when not invertible.
inline std::vector<std::vector<FElem>> invert_matrix(const Field& F, std::vector<std::vector<FElem>> a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<FElem>> inv(n, std::vector<FElem>(n, F.zero()));
  for (int i = 0; i < n; ++i) inv[i][i] = F.one();
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    require(piv >= 0, ErrorKind::SingularJacobian, "linear part of (Y_j) is singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    FElem s = F.inv(a[col][col]);
    for (int k = 0; k < n; ++k) {
      a[col][k] = F.mul(s, a[col][k]);
      inv[col][k] = F.mul(s, inv[col][k]);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      FElem m = a[r][col];
      for (int k = 0; k < n; ++k) {
        a[r][k] = F.sub(a[r][k], F.mul(m, a[col][k]));
        inv[r][k] = F.sub(inv[r][k], F.mul(m, inv[col][k]));
      }
    }
  }
  return inv;
}

}  // namespace detail

/// Everything the action of a fixed unit u on F[[N_0]] and on A needs.
struct UnitAction {
  WittElem u;
  FElem abar;                       // u mod p
  std::vector<TSeries> sigma;       // T_i -> n(u e_i) - 1, T-chart
  std::vector<TSeries> image_T;     // u(Y_j) from the group-algebra sum, T-chart
  std::vector<TSeries> image_Y;     // u(Y_j), Y-chart
  std::vector<FElem> lead;          // coefficient of Y_j in u(Y_j)
  std::vector<AElement> U;          // u(Y_j) / (lead_j Y_j), a 1-unit of A
  std::vector<AElement> V;          // U_j^{-1}
  std::vector<AElement> f_a;        // f_{u,j} = abar^{p^j} Y_j / u(Y_j)
};

/// The truncated Iwasawa algebra F[[N_0]] at cutoff D together with its two charts.
/// Built once per (p, f, D) and then shared read-only.
class IwasawaContext {
 public:
  IwasawaContext(int p, int f, int D)
      : F_(Field::make(p, f)),
        W_(F_, witt_precision(p, D)),
        S_(F_, f, D),
        A_(F_, f),
        lucas_(p) {
    qm1_ = static_cast<int64_t>(F_->order()) - 1;
    // [g]^i for the generator g of F_q^x.
    WittElem tg = W_.teichmuller(F_->gen());
    teich_.reserve(qm1_);
    WittElem cur = W_.one();
    for (int64_t i = 0; i < qm1_; ++i) {
      teich_.push_back(cur);
      cur = W_.mul(cur, tg);
    }
    Y_ = group_sum(W_.one());
    L_.assign(f, std::vector<FElem>(f, F_->zero()));
    for (int j = 0; j < f; ++j)
      for (int l = 0; l < f; ++l) L_[j][l] = Y_[j].c.size() > 1 ? Y_[j].c[S_.index().var(l)] : F_->zero();
    Linv_ = detail::invert_matrix(*F_, L_);
    build_reversion();
  }

  /// Shared context per (p, f, D).
  static std::shared_ptr<const IwasawaContext> get(int p, int f, int D) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const IwasawaContext>> cache;
    {
      std::lock_guard<std::mutex> lock(mu);
      auto it = cache.find({p, f, D});
      if (it != cache.end()) return it->second;
    }
    auto ctx = std::make_shared<const IwasawaContext>(p, f, D);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::tuple{p, f, D}, ctx).first->second;
  }

  const Field& field() const { return *F_; }
  std::shared_ptr<const Field> field_ptr() const { return F_; }
  const WittRing& witt() const { return W_; }
  const SeriesRing& series() const { return S_; }
  const ARing& ring() const { return A_; }
  int p() const { return F_->p(); }
  int f() const { return S_.f(); }
  int D() const { return S_.D(); }

  /// Y_j in the T-chart.
  const TSeries& Yj(int j) const { return Y_[((j % f()) + f()) % f()]; }
  const std::vector<TSeries>& Y() const { return Y_; }
  /// T_l written in the Y-chart.
  const std::vector<TSeries>& T_of_Y() const { return TY_; }
  const std::vector<std::vector<FElem>>& jacobian() const { return L_; }
  /// The Teichmüller lift of g^i.
  const WittElem& teich_pow(int64_t i) const { return teich_[((i % qm1_) + qm1_) % qm1_]; }

  /// sum_{a in F_q^x} a^{-p^j} n(v [a]) for j = 0..f-1, in the T-chart.
  std::vector<TSeries> group_sum(const WittElem& v) const {
    const int f_ = f(), Dd = D();
    const auto& M = S_.index();
    std::vector<TSeries> out(f_, S_.zero(Chart::T));
    std::vector<std::vector<int>> rows(f_);
    for (int64_t i = 0; i < qm1_; ++i) {
      // a = g^i, weight a^{-p^j} = g^{-i p^j}.
      std::vector<FElem> w(f_);
      for (int j = 0; j < f_; ++j) w[j] = F_->frob(F_->from_log(qm1_ - i % qm1_), j);
      auto c = W_.zp_coordinates(W_.mul(v, teich_[i]));
      for (int l = 0; l < f_; ++l) rows[l] = lucas_.row(c[l], Dd);
      for (std::size_t m = 0; m < M.size(); ++m) {
        int prod = 1;
        const int* e = M.exps(m);
        for (int l = 0; l < f_ && prod; ++l) prod = prod * rows[l][e[l]] % p();
        if (!prod) continue;
        FElem n = F_->from_int(prod);
        for (int j = 0; j < f_; ++j) out[j].c[m] = F_->add(out[j].c[m], F_->mul(w[j], n));
      }
    }
    return out;
  }

  /// T_i -> n(u e_i) - 1 = prod_l (1+T_l)^{c_l(u e_i)} - 1.
  std::vector<TSeries> substitution(const WittElem& u) const {
    const int f_ = f(), Dd = D();
    const auto& M = S_.index();
    std::vector<TSeries> out;
    std::vector<std::vector<int>> rows(f_);
    for (int i = 0; i < f_; ++i) {
      auto c = W_.zp_coordinates(W_.mul(u, W_.basis(i)));
      for (int l = 0; l < f_; ++l) rows[l] = lucas_.row(c[l], Dd);
      TSeries s = S_.zero(Chart::T);
      for (std::size_t m = 1; m < M.size(); ++m) {
        int prod = 1;
        const int* e = M.exps(m);
        for (int l = 0; l < f_ && prod; ++l) prod = prod * rows[l][e[l]] % p();
        if (prod) s.c[m] = F_->from_int(prod);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  /// x(T) -> x(T(Y)).
  TSeries t_to_y(const TSeries& x) const {
    require(x.chart == Chart::T, ErrorKind::ConfigInvalid, "t_to_y expects a T-chart series");
    return S_.compose(x, TY_);
  }
  /// x(Y) -> x(Y(T)).
  TSeries y_to_t(const TSeries& x) const {
    require(x.chart == Chart::Y, ErrorKind::ConfigInvalid, "y_to_t expects a Y-chart series");
    return S_.compose(x, Y_);
  }

  /// φ: T_i -> T_i^p in the T-chart, Y_j -> Y_{j-1}^p in the Y-chart.
  TSeries frobenius(const TSeries& x) const { return S_.frobenius(x, p()); }
  AElement frobenius(const AElement& x) const { return A_.phi(x); }

  /// Cached action data for the unit u.
  std::shared_ptr<const UnitAction> unit(const WittElem& u) const {
    require(W_.is_unit(u), ErrorKind::NotAUnit, "unit action by a non-unit");
    {
      std::lock_guard<std::mutex> lock(unit_mu_);
      auto it = units_.find(u.c);
      if (it != units_.end()) return it->second;
    }
    auto ua = std::make_shared<UnitAction>(build_unit(u));
    std::lock_guard<std::mutex> lock(unit_mu_);
    return units_.emplace(u.c, ua).first->second;
  }

  /// The automorphism n(y) -> n(uy). T-chart: substitution; Y-chart: Y_j -> u(Y_j).
  TSeries unit_action(const WittElem& u, const TSeries& x) const {
    auto ua = unit(u);
    return x.chart == Chart::T ? S_.compose(x, ua->sigma) : S_.compose(x, ua->image_Y);
  }

  /// u acting on A; Y_j^{-1} goes to the inverse of u(Y_j).
  AElement unit_action(const WittElem& u, const AElement& x) const {
    auto ua = unit(u);
    AElement out = A_.zero(x.prec);
    for (const auto& t : x.terms) {
      IntVec k = A_.exponent(t);
      FElem c = t.c;
      AElement factor = A_.one();
      for (int j = 0; j < f(); ++j) {
        if (k[j] == 0) continue;
        c = F_->mul(c, F_->pow(ua->lead[j], k[j]));
        factor = A_.mul(factor, unit_power(*ua, j, k[j]));
      }
      out = A_.add(out, A_.mul_monomial(factor, c, k));
    }
    return out;
  }

 private:
  void build_reversion() {
    const int f_ = f();
    // First-order inverse T = L^{-1} Y, then one degree per pass.
    TY_.assign(f_, S_.zero(Chart::Y, std::min(2, D())));
    for (int l = 0; l < f_; ++l)
      for (int j = 0; j < f_; ++j)
        if (D() > 1) TY_[l].c[S_.index().var(j)] = Linv_[l][j];
    for (int P = 3; P <= D(); ++P) {
      for (auto& t : TY_) t = pad(t, P);
      std::vector<TSeries> E;
      for (int j = 0; j < f_; ++j) E.push_back(S_.sub(S_.compose(Y_[j], TY_, P), S_.variable(Chart::Y, j, P)));
      for (int l = 0; l < f_; ++l)
        for (int j = 0; j < f_; ++j) TY_[l] = S_.sub(TY_[l], S_.scale(Linv_[l][j], E[j]));
    }
  }

  TSeries pad(const TSeries& x, int P) const {
    TSeries r = x;
    r.prec = std::min(P, D());
    r.c.resize(S_.index().count_below(r.prec), F_->zero());
    return r;
  }

  UnitAction build_unit(const WittElem& u) const {
    UnitAction ua;
    ua.u = u;
    ua.abar = W_.reduce(u);
    ua.sigma = substitution(u);
    ua.image_T = group_sum(u);
    for (const auto& y : ua.image_T) ua.image_Y.push_back(t_to_y(y));
    const int64_t R = D() - 1;
    for (int j = 0; j < f(); ++j) {
      const TSeries& y = ua.image_Y[j];
      FElem c = y.c.size() > 1 ? y.c[S_.index().var(j)] : F_->zero();
      require(!c.is_zero(), ErrorKind::NotAUnit, "u(Y_j) has no Y_j term");
      ua.lead.push_back(c);
      IntVec ej = IntVec::unit(f(), j);
      AElement Uj = A_.truncate(A_.mul_monomial(A_.from_series(S_, y), F_->inv(c), -ej), R);
      ua.U.push_back(Uj);
      ua.V.push_back(A_.invert_unit(Uj));
      // f_{u,j} = abar^{p^j} Y_j / (c Y_j U_j) = (abar^{p^j} / c) V_j.
      ua.f_a.push_back(A_.scale(F_->div(F_->frob(ua.abar, j), c), ua.V.back()));
    }
    return ua;
  }

  AElement unit_power(const UnitAction& ua, int j, int64_t n) const {
    std::lock_guard<std::mutex> lock(pow_mu_);
    auto key = std::tuple{ua.u.c, j, n};
    auto it = powers_.find(key);
    if (it != powers_.end()) return it->second;
    AElement r = n >= 0 ? A_.pow(ua.U[j], n) : A_.pow(ua.V[j], -n);
    powers_.emplace(key, r);
    return r;
  }

  std::shared_ptr<const Field> F_;
  WittRing W_;
  SeriesRing S_;
  ARing A_;
  detail::LucasTable lucas_;
  int64_t qm1_ = 0;
  std::vector<WittElem> teich_;
  std::vector<TSeries> Y_;
  std::vector<std::vector<FElem>> L_, Linv_;
  std::vector<TSeries> TY_;

  mutable std::mutex unit_mu_;
  mutable std::map<std::vector<int64_t>, std::shared_ptr<const UnitAction>> units_;
  mutable std::mutex pow_mu_;
  mutable std::map<std::tuple<std::vector<int64_t>, int, int64_t>, AElement> powers_;
};

inline TSeries build_Yj(const IwasawaContext& ctx, int j) { return ctx.Yj(j); }

/// Iwasawa axioms: φ(Y_j) = Y_{j-1}^p, [a](Y_j) = abar^{p^j} Y_j, chart round trips,
/// commuting actions, and fdeg(f_{a,j} - 1) >= p-1 for sampled a in 1 + pO_K.
inline SuiteResult verify_iwasawa(const IwasawaContext& ctx, uint64_t seed, int unit_samples = 20,
                                  int torus_samples = 2) {
  SuiteResult res("iwasawa");
  const Field& F = ctx.field();
  const SeriesRing& S = ctx.series();
  const ARing& A = ctx.ring();
  const WittRing& W = ctx.witt();
  const int f = ctx.f(), p = ctx.p();
  auto tag = [](std::string what, int j) { return Witness{{"check", std::move(what)}, {"j", std::to_string(j)}}; };
  std::mt19937_64 rng(seed ^ 0x69776173ULL);

  auto frob_direct = ctx.group_sum(W.from_int(p));
  for (int j = 0; j < f; ++j) {
    const TSeries& y = ctx.Yj(j);
    res.check(y.c[0].is_zero(), [&] { return tag("constant term of Y_j", j); });
    TSeries phiY = ctx.frobenius(y);
    res.check(phiY == S.pow(ctx.Yj(j - 1), p), [&] { return tag("phi(Y_j) = Y_{j-1}^p", j); });
    res.check(phiY == frob_direct[j], [&] { return tag("phi(Y_j) = sum a^{-p^j} n(p[a])", j); });
    res.check(ctx.t_to_y(y) == S.variable(Chart::Y, j), [&] { return tag("t_to_y(Y_j) = Y_j", j); });
    res.check(ctx.y_to_t(S.variable(Chart::Y, j)) == y, [&] { return tag("y_to_t(Y_j) = Y_j(T)", j); });
  }
  {
    TSeries x = S.zero(Chart::T);
    for (auto& c : x.c) c = F.random(rng);
    res.check(ctx.y_to_t(ctx.t_to_y(x)) == x, [] { return Witness{{"check", "y_to_t(t_to_y(x)) = x"}}; });
  }

  // Torus: the generator of F_q^x and a few random elements.
  std::vector<FElem> torus{F.gen()};
  for (int k = 0; k < torus_samples; ++k) torus.push_back(F.random_nonzero(rng));
  for (FElem a : torus) {
    WittElem ta = W.teichmuller(a);
    auto ua = ctx.unit(ta);
    for (int j = 0; j < f; ++j) {
      FElem s = F.frob(a, j);
      TSeries want = S.scale(s, ctx.Yj(j));
      auto w = [&](const char* what) {
        Witness wt = tag(what, j);
        wt.push_back({"a", F.to_string(a)});
        return wt;
      };
      res.check(ua->image_T[j] == want, [&] { return w("[a](Y_j) by the group sum"); });
      res.check(S.compose(ctx.Yj(j), ua->sigma) == want, [&] { return w("[a](Y_j) by T-substitution"); });
      res.check(ua->image_Y[j] == S.scale(s, S.variable(Chart::Y, j)), [&] { return w("[a](Y_j) in the Y-chart"); });
    }
  }

  // Principal units.
  std::vector<WittElem> us;
  for (int k = 0; k < unit_samples; ++k) us.push_back(W.random_principal_unit(rng));
  for (std::size_t k = 0; k < us.size(); ++k) {
    auto ua = ctx.unit(us[k]);
    for (int j = 0; j < f; ++j) {
      auto w = [&](const char* what) {
        Witness wt = tag(what, j);
        wt.push_back({"u", W.to_string(us[k])});
        return wt;
      };
      res.check(ua->lead[j] == F.one(), [&] { return w("u(Y_j) = Y_j mod deg 2"); });
      AElement t = A.sub(ua->f_a[j], A.one());
      res.check(A.fdeg(t) >= p - 1, [&] {
        Witness wt = w("fdeg(f_{a,j} - 1) >= p-1");
        wt.push_back({"fdeg", std::to_string(A.fdeg(t))});
        return wt;
      });
      if (k == 0) {
        res.check(ctx.frobenius(ua->image_Y[j]) == S.pow(ua->image_Y[(j - 1 + f) % f], p),
                  [&] { return w("phi(u(Y_j)) = u(phi(Y_j))"); });
        res.check(S.compose(ctx.Yj(j), ua->sigma) == ua->image_T[j], [&] { return w("u(Y_j): substitution = group sum"); });
      }
    }
  }
  if (us.size() >= 2) {
    auto s1 = ctx.substitution(us[0]), s2 = ctx.substitution(us[1]);
    auto s12 = ctx.substitution(W.mul(us[0], us[1]));
    for (int i = 0; i < f; ++i)
      res.check(S.compose(s2[i], s1) == s12[i], [&] { return tag("u1(u2(T_i)) = (u1 u2)(T_i)", i); });
  }
  return res;
}

}  // namespace etale
