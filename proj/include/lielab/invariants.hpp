#pragma once

#include "lielab/deformation.hpp"

#include <bit>
#include <compare>

namespace lielab {

/// Positive integer or infinity. Infinity is its own state, never a large number.
class Extended {
 public:
  Extended(int v) : value_(v) {}
  static Extended infinity() {
    Extended e(0);
    e.value_.reset();
    return e;
  }
  bool is_infinite() const { return !value_; }
  int value() const {
    if (!value_) throw Error("infinite value has no integer");
    return *value_;
  }
  std::string str() const { return value_ ? std::to_string(*value_) : "inf"; }
  static Extended parse(std::string_view s) {
    if (s == "inf" || s == "infinity") return infinity();
    try {
      std::size_t used = 0;
      const int v = std::stoi(std::string(s), &used);
      if (used == s.size()) return Extended(v);
    } catch (const std::exception&) {
    }
    throw Error("expected an integer or 'inf', got '" + std::string(s) + "'");
  }
  friend bool operator==(const Extended&, const Extended&) = default;
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite())
      return a.is_infinite() <=> b.is_infinite();
    return *a.value_ <=> *b.value_;
  }

 private:
  std::optional<int> value_;
};

inline Extended min(const Extended& a, const Extended& b) { return b < a ? b : a; }

struct AlphaResult {
  Side side = Side::asymptotic;
  std::optional<Extended> alpha1_inf, alpha2_inf, alpha_inf;  // asymptotic side
  std::optional<Extended> alpha0;                             // tangent side
};

namespace detail {

/// Walks layer tuples p (length >= 2), calling visit(p, bracket subspace) for nonzero ones.
/// Zero tails prune all their extensions. `keep_going(k)` decides whether length k is needed.
template <class Visit, class More>
void for_each_layer_tuple(const StructureTensor& t, const Grading& g, Visit visit, More keep_going) {
  const int s = g.depth();
  // level holds (suffix tuple, subspace) with nonzero subspace.
  std::vector<std::pair<std::vector<int>, Subspace>> level;
  for (int p = 1; p <= s; ++p)
    if (!g.layer(p).is_zero()) level.push_back({{p}, g.layer(p)});
  for (int k = 2; keep_going(k) && !level.empty(); ++k) {
    std::vector<std::pair<std::vector<int>, Subspace>> next;
    for (int p = 1; p <= s; ++p) {
      if (g.layer(p).is_zero()) continue;
      for (const auto& [tail, sub] : level) {
        Subspace b = subspace_bracket(t, g.layer(p), sub);
        if (b.is_zero()) continue;
        std::vector<int> tuple{p};
        tuple.insert(tuple.end(), tail.begin(), tail.end());
        visit(tuple, b);
        next.push_back({std::move(tuple), std::move(b)});
      }
    }
    // Tails with equal weight and span have identical extensions.
    std::vector<std::pair<std::vector<int>, Subspace>> dedup;
    for (auto& item : next) {
      int w = 0;
      for (int v : item.first) w += v;
      bool seen = false;
      for (const auto& d : dedup) {
        int wd = 0;
        for (int v : d.first) wd += v;
        if (wd == w && d.second == item.second) {
          seen = true;
          break;
        }
      }
      if (!seen) dedup.push_back(std::move(item));
    }
    level = std::move(dedup);
  }
}

inline bool has_component(const Grading& g, const Subspace& s, int j) {
  for (const auto& v : s.basis())
    if (!is_zero(g.component(v, j))) return true;
  return false;
}

}  // namespace detail

/// alpha_(1,inf): largest j with every [V_p1, ..., V_pk] inside V_|p| + V_{>= |p|+j}.
inline Extended alpha1_inf(const StructureTensor& t, const Grading& g) {
  if (is_stratification(t, g)) return Extended::infinity();
  Extended best = Extended::infinity();
  detail::for_each_layer_tuple(
      t, g,
      [&](const std::vector<int>& p, const Subspace& b) {
        int total = 0;
        for (int v : p) total += v;
        for (int m = total + 1; m <= g.depth(); ++m)
          if (detail::has_component(g, b, m)) {
            best = min(best, Extended(m - total));
            break;
          }
      },
      [&](int k) { return k <= g.depth(); });
  return best;
}

/// alpha_(2,inf): largest j with v - pi_1(v) in g^(j+1) for every v in the distribution.
inline Extended alpha2_inf(const StructureTensor& t, const Grading& g, const Subspace& delta) {
  std::vector<Vec> off;
  for (const auto& v : delta.basis()) {
    Vec r = v - g.component(v, 1);
    if (!is_zero(r)) off.push_back(std::move(r));
  }
  if (off.empty()) return Extended::infinity();
  const Subspace d = Subspace::span(t.dim(), off);
  const auto lcs = lower_central_series(t);
  int j = 0;
  while (j + 1 < static_cast<int>(lcs.size()) && lcs[j + 1].contains(d)) ++j;
  if (j == 0) throw Error("distribution leaves the first layer modulo g^(2)");
  return Extended(j);
}

/// alpha_0: largest j with every [W_p1, ..., W_pk] inside W_|p| + W_{<= |p|-j}.
inline Extended alpha0(const StructureTensor& t, const Grading& g) {
  if (is_stratification(t, g)) return Extended::infinity();
  Extended best = Extended::infinity();
  const int s = g.depth();
  const int cap = static_cast<int>(t.dim()) + s + 1;
  detail::for_each_layer_tuple(
      t, g,
      [&](const std::vector<int>& p, const Subspace& b) {
        int total = 0;
        for (int v : p) total += v;
        for (int m = std::min(total - 1, s); m >= 1; --m)
          if (detail::has_component(g, b, m)) {
            best = min(best, Extended(total - m));
            break;
          }
      },
      // Any tuple of length k has |p| - m >= k - s; stop once that cannot lower the minimum.
      [&](int k) { return k <= cap && (best.is_infinite() || k - s < best.value()); });
  return best;
}

inline AlphaResult compute_alphas(const StructureTensor& t, const Grading& g, const Subspace& delta,
                                  Side side) {
  AlphaResult r;
  r.side = side;
  detail::require_kind(t, g, side);
  if (side == Side::asymptotic) {
    r.alpha1_inf = alpha1_inf(t, g);
    r.alpha2_inf = alpha2_inf(t, g, delta);
    r.alpha_inf = min(*r.alpha1_inf, *r.alpha2_inf);
  } else {
    if (!(g.layer(1) == delta)) throw Error("tangent grading must start with the distribution");
    r.alpha0 = alpha0(t, g);
  }
  return r;
}

/// Evidence for or against an ideal being a Carnot quotient ideal.
struct CqiCertificate {
  Subspace ideal;
  bool is_ideal = false;
  bool quotient_stratified = false;
  bool distribution_in_first = false;
  /// Quotient bracket on the complement basis, when the ideal condition holds.
  std::optional<StructureTensor> quotient;
  std::vector<Subspace> quotient_layers;
  std::vector<Vec> complement_basis;
  bool valid() const { return is_ideal && quotient_stratified && distribution_in_first; }
};

namespace detail {

/// Basis of a complement C of I, with coordinates mod I in that basis.
struct QuotientMap {
  std::vector<Vec> basis;
  Matrix inv;  // columns [C | I] inverted
  std::size_t m = 0;
  Vec project(const Vec& x) const {
    Vec all = inv.apply(x);
    return Vec(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
  }
};

inline QuotientMap quotient_map(const Subspace& ideal) {
  const std::size_t n = ideal.ambient_dim();
  QuotientMap q;
  q.basis = complement_within(ideal, Subspace::full(n)).basis();
  q.m = q.basis.size();
  std::vector<Vec> cols = q.basis;
  cols.insert(cols.end(), ideal.basis().begin(), ideal.basis().end());
  q.inv = inverse(Matrix::from_columns(cols, n));
  return q;
}

}  // namespace detail

inline StructureTensor quotient_tensor(const StructureTensor& t, const Subspace& ideal) {
  const auto q = detail::quotient_map(ideal);
  if (q.m == 0) return StructureTensor();
  StructureTensor out(q.m);
  for (std::size_t a = 0; a < q.m; ++a)
    for (std::size_t b = a + 1; b < q.m; ++b) {
      const Vec c = q.project(bracket(t, q.basis[a], q.basis[b]));
      for (std::size_t k = 0; k < q.m; ++k)
        if (c[k] != 0) out.add(a, b, k, c[k]);
    }
  return out;
}

inline bool is_ideal(const StructureTensor& t, const Subspace& s) {
  return s.contains(subspace_bracket(t, Subspace::full(t.dim()), s));
}

/// Quotient g/I is stratified by the images of the layers (zero top layers allowed).
inline bool quotient_is_stratified(const StructureTensor& t, const Grading& g, const Subspace& ideal,
                                   std::vector<Subspace>* layers_out = nullptr,
                                   std::optional<StructureTensor>* tensor_out = nullptr) {
  const auto q = detail::quotient_map(ideal);
  if (q.m == 0) {
    if (tensor_out) tensor_out->reset();
    return true;
  }
  const StructureTensor qt = quotient_tensor(t, ideal);
  std::vector<Subspace> layers;
  for (const auto& d : g.layers()) {
    std::vector<Vec> img;
    for (const auto& v : d.basis()) img.push_back(q.project(v));
    layers.push_back(Subspace::span(q.m, img));
  }
  if (layers_out) *layers_out = layers;
  if (tensor_out) *tensor_out = qt;
  if (!is_direct_sum(layers, q.m)) return false;
  const auto at = [&](std::size_t j) { return j < layers.size() ? layers[j] : Subspace(q.m); };
  for (std::size_t j = 0; j < layers.size(); ++j)
    if (!(subspace_bracket(qt, at(0), at(j)) == at(j + 1))) return false;
  return true;
}

inline CqiCertificate check_cqi(const StructureTensor& t, const Grading& g, const Subspace& delta,
                                const Subspace& ideal) {
  CqiCertificate c;
  c.ideal = ideal;
  c.is_ideal = is_ideal(t, ideal);
  c.distribution_in_first = sum(g.layer(1), ideal).contains(delta);
  c.complement_basis = detail::quotient_map(ideal).basis;
  if (c.is_ideal)
    c.quotient_stratified = quotient_is_stratified(t, g, ideal, &c.quotient_layers, &c.quotient);
  return c;
}

struct BetaResult {
  int beta_hat = 0;
  Subspace witness;
  /// True when the search provably covered every ideal; false means beta_hat is an upper bound.
  bool exhaustive = false;
};

enum class BetaStrategy { coordinate };

namespace detail {

/// Largest ideal of t inside `w` that is a sum of its intersections with the layers of g.
/// Alternates "keep the graded part" and "keep x with [e_i, x] inside" until stable.
inline Subspace largest_graded_ideal(const StructureTensor& t, const Grading& g, Subspace w) {
  const std::size_t n = t.dim();
  while (true) {
    std::vector<Vec> gens;
    for (const auto& layer : g.layers()) {
      const Subspace part = intersection(w, layer);
      gens.insert(gens.end(), part.basis().begin(), part.basis().end());
    }
    const Subspace graded = Subspace::span(n, gens);
    const Subspace ann = annihilator(graded);
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& phi : ann.basis()) {
        Vec row;
        for (const auto& b : graded.basis()) {
          const Vec image = bracket(t, unit_vec(n, i), b);
          Rational dot = 0;
          for (std::size_t a = 0; a < n; ++a) dot += phi[a] * image[a];
          row.push_back(dot);
        }
        rows.push_back(std::move(row));
      }
    std::vector<Vec> kept;
    for (const auto& c : null_space(rows, graded.dim())) {
      Vec x = zero_vec(n);
      for (std::size_t a = 0; a < c.size(); ++a) x = x + c[a] * graded.basis()[a];
      kept.push_back(std::move(x));
    }
    const Subspace next = Subspace::span(n, kept);
    if (next == w) return next;
    w = next;
  }
}

}  // namespace detail

/// Least k with a Carnot quotient ideal inside D_{<= k}.
/// Such ideals are dilation invariant, hence graded, and the property passes to larger graded
/// ideals, so it suffices to test the largest graded ideal inside D_{<= k}. The reported witness
/// is a span of graded basis vectors when one works at that k (larger spans first), and the
/// largest graded ideal otherwise.
inline BetaResult beta_search(const StructureTensor& t, const Grading& g, const Subspace& delta,
                              BetaStrategy = BetaStrategy::coordinate) {
  const std::size_t n = t.dim();
  const Matrix& basis = g.basis();
  const auto& w = g.weights();
  BetaResult r;
  for (int k = 0; k <= g.depth(); ++k) {
    std::vector<Vec> low;
    for (int j = 1; j <= k; ++j)
      for (const auto& v : g.layers()[static_cast<std::size_t>(j - 1)].basis()) low.push_back(v);
    const Subspace top = detail::largest_graded_ideal(t, g, Subspace::span(n, low));
    if (!check_cqi(t, g, delta, top).valid()) continue;
    r.beta_hat = k;
    r.witness = top;
    r.exhaustive = true;
    std::vector<std::size_t> pool, fresh;
    for (std::size_t a = 0; a < n; ++a)
      if (w[a] <= k) {
        pool.push_back(a);
        if (w[a] == k) fresh.push_back(a);
      }
    if (pool.size() > 20) return r;
    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 0; m < (1u << pool.size()); ++m) {
      bool uses_fresh = k == 0;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if ((m >> i) & 1u && w[pool[i]] == k) uses_fresh = true;
      if (uses_fresh) masks.push_back(m);
    }
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
      const int pa = std::popcount(a), pb = std::popcount(b);
      if (pa != pb) return pa > pb;
      return a < b;
    });
    for (auto m : masks) {
      std::vector<Vec> vs;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if ((m >> i) & 1u) vs.push_back(basis.column(pool[i]));
      const Subspace cand = Subspace::span(n, vs);
      if (check_cqi(t, g, delta, cand).valid()) {
        r.witness = cand;
        return r;
      }
    }
    return r;
  }
  throw Error("internal error: no Carnot quotient ideal found, not even the top layers");
}

/// Carnot quotient ideal facts along the deformation, at sampled parameters.
struct CqiLemmaReport {
  bool dilation_invariant = true;
  bool ideal_for_all = true;
  bool projection_matches = true;  // pi restricted to the deformed distribution equals pi o pi_1
  bool quotient_stratified = true;
  bool quotient_constant = true;
  bool all() const {
    return dilation_invariant && ideal_for_all && projection_matches && quotient_stratified &&
           quotient_constant;
  }
};

inline CqiLemmaReport cqi_lemmas(const DeformedFamily& fam, const Subspace& delta,
                                 const Subspace& ideal, std::span<const Rational> eps_samples) {
  CqiLemmaReport r;
  const auto& g = fam.grading();
  const StructureTensor q0 = quotient_tensor(fam.at(0), ideal);
  for (const auto& eps : eps_samples) {
    if (eps > 0 && !ideal.contains(g.dilate(eps, ideal))) r.dilation_invariant = false;
    const StructureTensor te = fam.at(eps);
    if (!is_ideal(te, ideal)) {
      r.ideal_for_all = false;
      continue;
    }
    if (!quotient_is_stratified(te, g, ideal)) r.quotient_stratified = false;
    if (!(quotient_tensor(te, ideal) == q0)) r.quotient_constant = false;
    if (eps > 0 && fam.side() == Side::asymptotic)
      for (const auto& v : delta.basis()) {
        const Vec u = g.dilate(eps, v);
        if (!ideal.contains(u - g.component(u, 1))) r.projection_matches = false;
      }
  }
  return r;
}

}  // namespace lielab
