#pragma once

#include "lielab/poly.hpp"
#include "lielab/subspace.hpp"

#include <array>
#include <map>

namespace lielab {

/// Structure constants [e_i, e_j] = sum_k c_ij^k e_k of a finite-dimensional Lie algebra.
/// Only i < j is stored; antisymmetry is applied on read.
template <class C>
class BasicTensor {
 public:
  struct Entry {
    std::size_t i, j, k;
    C c;
  };

  BasicTensor() = default;
  explicit BasicTensor(std::size_t dim, std::vector<std::string> names = {})
      : dim_(dim), names_(std::move(names)) {
    if (dim == 0) throw Error("a Lie algebra needs positive dimension");
    if (names_.empty())
      for (std::size_t i = 0; i < dim; ++i) names_.push_back("e" + std::to_string(i + 1));
    if (names_.size() != dim) throw Error("basis names do not match the dimension");
  }

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Adds c to the coefficient of e_k in [e_i, e_j].
  void add(std::size_t i, std::size_t j, std::size_t k, const C& c) {
    if (i >= dim_ || j >= dim_ || k >= dim_) throw Error("basis index out of range");
    if (i == j) throw Error("[" + names_[i] + ", " + names_[i] + "] must vanish");
    C val = c;
    if (i > j) {
      std::swap(i, j);
      val = -val;
    }
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->i == i && it->j == j && it->k == k) {
        it->c += val;
        if (it->c == C(0)) entries_.erase(it);
        return;
      }
    }
    if (val == C(0)) return;
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), std::array{i, j, k},
                                [](const Entry& e, const std::array<std::size_t, 3>& key) {
                                  return std::array{e.i, e.j, e.k} < key;
                                });
    entries_.insert(pos, Entry{i, j, k, val});
  }

  C coefficient(std::size_t i, std::size_t j, std::size_t k) const {
    if (i == j) return C(0);
    const bool flip = i > j;
    if (flip) std::swap(i, j);
    for (const auto& e : entries_)
      if (e.i == i && e.j == j && e.k == k) return flip ? C(-e.c) : e.c;
    return C(0);
  }

  bool is_abelian() const { return entries_.empty(); }

  bool operator==(const BasicTensor& o) const {
    if (dim_ != o.dim_ || entries_.size() != o.entries_.size()) return false;
    for (std::size_t n = 0; n < entries_.size(); ++n) {
      const auto& a = entries_[n];
      const auto& b = o.entries_[n];
      if (a.i != b.i || a.j != b.j || a.k != b.k || !(a.c == b.c)) return false;
    }
    return true;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> names_;
  std::vector<Entry> entries_;
};

using StructureTensor = BasicTensor<Rational>;
using PolyTensor = BasicTensor<Poly>;

/// [x, y] for coordinate vectors with any scalar type the coefficients multiply into.
template <class C, class S>
std::vector<S> bracket(const BasicTensor<C>& t, const std::vector<S>& x, const std::vector<S>& y) {
  std::vector<S> out(t.dim(), S(0));
  for (const auto& e : t.entries()) {
    S w = x[e.i] * y[e.j] - x[e.j] * y[e.i];
    if (w == S(0)) continue;
    out[e.k] += S(e.c) * w;
  }
  return out;
}

inline Vec basis_bracket(const StructureTensor& t, std::size_t i, std::size_t j) {
  return bracket(t, unit_vec(t.dim(), i), unit_vec(t.dim(), j));
}

/// Tensor of the same bracket written in a new basis: columns of `basis` are the new vectors.
inline StructureTensor change_basis(const StructureTensor& t, const Matrix& basis,
                                    std::vector<std::string> names = {}) {
  const std::size_t n = t.dim();
  const Matrix inv = inverse(basis);
  StructureTensor out(n, std::move(names));
  std::vector<Vec> cols;
  for (std::size_t a = 0; a < n; ++a) cols.push_back(basis.column(a));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec c = inv.apply(bracket(t, cols[a], cols[b]));
      for (std::size_t k = 0; k < n; ++k)
        if (c[k] != 0) out.add(a, b, k, c[k]);
    }
  return out;
}

inline Subspace subspace_bracket(const StructureTensor& t, const Subspace& a, const Subspace& b) {
  std::vector<Vec> out;
  for (const auto& u : a.basis())
    for (const auto& v : b.basis()) {
      Vec w = bracket(t, u, v);
      if (!is_zero(w)) out.push_back(std::move(w));
    }
  return Subspace::span(t.dim(), out);
}

struct AlgebraReport {
  bool jacobi_ok = true;
  std::vector<std::array<std::size_t, 3>> jacobi_failures;
  /// g^(1) = g, g^(k+1) = [g, g^(k)], ending at the first zero or repeated term.
  std::vector<Subspace> lower_central_series;
  /// Least s with g^(s+1) = 0; empty when the series stabilises above zero.
  std::optional<int> nilpotency_step;
};

inline std::vector<Subspace> lower_central_series(const StructureTensor& t) {
  std::vector<Subspace> lcs{Subspace::full(t.dim())};
  while (!lcs.back().is_zero()) {
    Subspace next = subspace_bracket(t, lcs.front(), lcs.back());
    if (next == lcs.back()) break;
    lcs.push_back(std::move(next));
  }
  return lcs;
}

inline std::optional<int> nilpotency_step(const StructureTensor& t) {
  const auto lcs = lower_central_series(t);
  if (!lcs.back().is_zero()) return std::nullopt;
  return static_cast<int>(lcs.size()) - 1;
}

template <class C>
std::vector<std::array<std::size_t, 3>> jacobi_failures(const BasicTensor<C>& t) {
  const std::size_t n = t.dim();
  std::vector<std::array<std::size_t, 3>> bad;
  auto e = [&](std::size_t i) {
    std::vector<C> v(n, C(0));
    v[i] = C(1);
    return v;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        auto s = bracket(t, e(a), bracket(t, e(b), e(c)));
        const auto s2 = bracket(t, e(b), bracket(t, e(c), e(a)));
        const auto s3 = bracket(t, e(c), bracket(t, e(a), e(b)));
        bool zero = true;
        for (std::size_t k = 0; k < n; ++k)
          if (!(s[k] + s2[k] + s3[k] == C(0))) zero = false;
        if (!zero) bad.push_back({a, b, c});
      }
  return bad;
}

inline AlgebraReport validate(const StructureTensor& t) {
  AlgebraReport r;
  r.jacobi_failures = jacobi_failures(t);
  r.jacobi_ok = r.jacobi_failures.empty();
  r.lower_central_series = lower_central_series(t);
  if (r.lower_central_series.back().is_zero())
    r.nilpotency_step = static_cast<int>(r.lower_central_series.size()) - 1;
  return r;
}

struct DeltaFiltration {
  /// powers[k-1] = Delta^k, cumulative[k-1] = Delta^[k]; stops once the sum stabilises.
  std::vector<Subspace> powers;
  std::vector<Subspace> cumulative;
  bool bracket_generating = false;
  int step() const { return static_cast<int>(cumulative.size()); }
};

inline DeltaFiltration delta_filtration(const StructureTensor& t, const Subspace& delta) {
  if (delta.ambient_dim() != t.dim()) throw Error("distribution lives in the wrong space");
  DeltaFiltration f;
  f.powers.push_back(delta);
  f.cumulative.push_back(delta);
  for (;;) {
    Subspace next = subspace_bracket(t, delta, f.powers.back());
    Subspace cum = sum(f.cumulative.back(), next);
    if (cum == f.cumulative.back()) break;
    f.powers.push_back(std::move(next));
    f.cumulative.push_back(std::move(cum));
  }
  f.bracket_generating = f.cumulative.back().is_full();
  return f;
}

}  // namespace lielab
