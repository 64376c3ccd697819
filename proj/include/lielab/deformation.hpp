#pragma once

#include "lielab/bch.hpp"
#include "lielab/grading.hpp"

#include <cmath>

namespace lielab {

/// Which contraction a grading drives: large scale (asymptotic) or small scale (tangent).
enum class Side { asymptotic, tangent };

inline std::string to_string(Side s) { return s == Side::asymptotic ? "asymptotic" : "tangent"; }

using NumericTensor = BasicTensor<double>;

namespace detail {

template <class C>
C from_rational(const Rational& r) {
  if constexpr (std::is_same_v<C, double>)
    return r.get_d();
  else
    return C(r);
}

/// Graded-coordinate tensor with coefficients mapped by f(coeff, exponent), written back
/// in the original coordinates.
template <class C, class F>
BasicTensor<C> rescale_graded(const StructureTensor& t, const Grading& g, Side side, F f) {
  const StructureTensor gt = g.graded_tensor(t);
  const auto& w = g.weights();
  const std::size_t n = t.dim();
  BasicTensor<C> scaled(n, t.names());
  for (const auto& e : gt.entries()) {
    const int expo = side == Side::asymptotic ? w[e.k] - w[e.i] - w[e.j]
                                              : w[e.i] + w[e.j] - w[e.k];
    if (expo < 0)
      throw Error("grading is not " + to_string(side) + " for this bracket: negative exponent");
    scaled.add(e.i, e.j, e.k, f(e.c, expo));
  }
  const Matrix& basis = g.basis();
  const Matrix& inv = g.inverse_basis();
  BasicTensor<C> out(n, t.names());
  auto col = [&](std::size_t i) {
    std::vector<C> v(n, C(0));
    for (std::size_t a = 0; a < n; ++a) v[a] = from_rational<C>(inv(a, i));
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = bracket(scaled, col(i), col(j));
      for (std::size_t k = 0; k < n; ++k) {
        C acc(0);
        for (std::size_t c = 0; c < n; ++c)
          if (basis(k, c) != 0 && !(v[c] == C(0))) acc += from_rational<C>(basis(k, c)) * v[c];
        if (!(acc == C(0))) out.add(i, j, k, acc);
      }
    }
  return out;
}

inline Rational rpow(const Rational& x, int e) {
  Rational r = 1;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

inline void require_kind(const StructureTensor& t, const Grading& g, Side side) {
  const bool ok = side == Side::asymptotic ? is_asymptotic(t, g) : is_tangent(t, g, g.layer(1));
  if (!ok) throw Error("grading is not " + to_string(side) + " for this algebra");
}

}  // namespace detail

/// One-parameter family of brackets obtained by conjugating with the dilations of a grading.
/// Asymptotic side: [x,y]^(eps) = delta_eps [delta_eps^-1 x, delta_eps^-1 y].
/// Tangent side: the same with eps replaced by 1/eps.
/// Both are polynomial in eps; eps = 0 gives the cone tensor and eps = 1 the base.
class DeformedFamily {
 public:
  DeformedFamily(StructureTensor base, Grading grading, Side side)
      : base_(std::move(base)), grading_(std::move(grading)), side_(side) {
    detail::require_kind(base_, grading_, side_);
    poly_ = detail::rescale_graded<Poly>(base_, grading_, side_, [](const Rational& c, int e) {
      return Poly::monomial(c, static_cast<std::size_t>(e));
    });
  }

  const StructureTensor& base() const { return base_; }
  const Grading& grading() const { return grading_; }
  Side side() const { return side_; }
  /// Structure constants as polynomials in eps.
  const PolyTensor& polynomial() const { return poly_; }

  StructureTensor at(const Rational& eps) const {
    if (eps < 0) throw Error("deformation parameter must be nonnegative");
    StructureTensor out(base_.dim(), base_.names());
    for (const auto& e : poly_.entries()) out.add(e.i, e.j, e.k, e.c(eps));
    return out;
  }
  NumericTensor at_numeric(double eps) const {
    if (eps < 0) throw Error("deformation parameter must be nonnegative");
    NumericTensor out(base_.dim(), base_.names());
    for (const auto& e : poly_.entries()) out.add(e.i, e.j, e.k, e.c(eps));
    return out;
  }
  StructureTensor cone() const { return at(0); }

 private:
  StructureTensor base_;
  Grading grading_;
  Side side_;
  PolyTensor poly_;
};

/// Limit bracket: for v in D_i, w in D_j it is the D_{i+j} component of [v, w].
inline StructureTensor cone_tensor(const StructureTensor& t, const Grading& g, Side side) {
  return DeformedFamily(t, g, side).cone();
}

inline NumericTensor to_numeric(const StructureTensor& t) {
  NumericTensor out(t.dim(), t.names());
  for (const auto& e : t.entries()) out.add(e.i, e.j, e.k, e.c.get_d());
  return out;
}

namespace detail {

/// Every left-iterated bracket [(x_{q1})_{p1}, ..., (x_{qk})_{pk}] of the original tensor,
/// split into layers, with the eps exponent attached. Multilinear expansion of x *_eps y.
inline std::map<int, Vec> layered_difference(const DeformedFamily& fam, const Vec& x,
                                             const Vec& y) {
  const auto& t = fam.base();
  const auto& g = fam.grading();
  const int s = g.depth();
  const auto step = nilpotency_step(t);
  if (!step) throw Error("product differences need a nilpotent algebra");
  const BchTable& table = bch_table(std::max(*step, 1));
  std::array<std::vector<Vec>, 2> comp;  // comp[letter][p-1]
  for (int p = 1; p <= s; ++p) {
    comp[0].push_back(g.component(x, p));
    comp[1].push_back(g.component(y, p));
  }
  // Tail cache keyed by (letters, layers).
  std::map<std::pair<Word, std::vector<int>>, Vec> cache;
  std::function<const Vec&(const Word&, const std::vector<int>&, std::size_t)> nested =
      [&](const Word& w, const std::vector<int>& p, std::size_t from) -> const Vec& {
    std::pair key{Word(w.begin() + from, w.end()), std::vector<int>(p.begin() + from, p.end())};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Vec& head = comp[w[from]][p[from] - 1];
    Vec v = from + 1 == w.size() ? head : bracket(t, head, nested(w, p, from + 1));
    return cache.emplace(std::move(key), std::move(v)).first->second;
  };
  std::map<int, Vec> out;
  for (const auto& [w, c] : table.terms()) {
    const std::size_t k = w.size();
    if (k < 2) continue;
    std::vector<int> p(k, 1);
    for (;;) {
      int total = 0;
      for (int v : p) total += v;
      const Vec& b = nested(w, p, 0);
      if (!is_zero(b)) {
        for (int j = 1; j <= s; ++j) {
          const int expo = fam.side() == Side::asymptotic ? j - total : total - j;
          if (expo <= 0) continue;
          Vec part = g.component(b, j);
          if (is_zero(part)) continue;
          auto [slot, fresh] = out.try_emplace(expo, zero_vec(t.dim()));
          slot->second = slot->second + c * part;
        }
      }
      std::size_t i = 0;
      while (i < k && p[i] == s) p[i++] = 1;
      if (i == k) break;
      ++p[i];
    }
  }
  std::erase_if(out, [](const auto& kv) { return is_zero(kv.second); });
  return out;
}

}  // namespace detail

/// x *_eps y - x *_0 y as a polynomial in eps: exponent -> coefficient vector.
inline std::map<int, Vec> product_difference_series(const DeformedFamily& fam, const Vec& x,
                                                    const Vec& y) {
  return detail::layered_difference(fam, x, y);
}

/// x *_eps y - x *_0 y evaluated at eps from the layered expansion.
inline Vec product_difference(const DeformedFamily& fam, const Vec& x, const Vec& y,
                              const Rational& eps) {
  Vec out = zero_vec(fam.base().dim());
  for (const auto& [e, v] : detail::layered_difference(fam, x, y))
    out = out + detail::rpow(eps, e) * v;
  return out;
}

}  // namespace lielab
