#pragma once

#include "lielab/rational.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>

namespace lielab {

/// Dense row-major rational matrix; only what the exact algebra needs.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Rational> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Rational(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Matrix from_columns(std::span<const Vec> columns, std::size_t n) {
    Matrix m(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
    return m;
  }

  Rational& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Vec column(std::size_t j) const {
    Vec v(rows);
    for (std::size_t i = 0; i < rows; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Vec apply(const Vec& x) const {
    Vec y = zero_vec(rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (x[j] != 0 && (*this)(i, j) != 0) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t k = 0; k < a.cols; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }
  bool operator==(const Matrix&) const = default;
};

/// Inverse by Gauss-Jordan; throws when singular.
inline Matrix inverse(Matrix a) {
  const std::size_t n = a.rows;
  if (a.cols != n) throw Error("inverse of a non-square matrix");
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw Error("singular matrix");
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    const Rational piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      const Rational f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

namespace detail {

/// Reduced row echelon form in place, visiting columns in `order`. Returns pivot columns.
inline std::vector<std::size_t> rref(std::vector<Vec>& rows, std::span<const std::size_t> order) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c : order) {
    if (r == rows.size()) break;
    std::size_t p = r;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const Rational piv = rows[r][c];
    if (piv != 1)
      for (auto& x : rows[r]) x /= piv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      const Rational f = rows[i][c];
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        if (rows[r][j] != 0) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

inline std::vector<std::size_t> natural_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), std::size_t{0});
  return o;
}

}  // namespace detail

/// A linear subspace of Q^n kept in canonical reduced row echelon form,
/// so two subspaces are equal exactly when their representations are.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::size_t ambient) : n_(ambient) {}

  static Subspace span(std::size_t ambient, std::span<const Vec> vectors) {
    Subspace s(ambient);
    for (const auto& v : vectors) {
      if (v.size() != ambient) throw Error("vector length does not match ambient dimension");
      if (!lielab::is_zero(v)) s.rows_.push_back(v);
    }
    s.pivots_ = detail::rref(s.rows_, detail::natural_order(ambient));
    return s;
  }
  static Subspace span(std::size_t ambient, std::initializer_list<Vec> vectors) {
    std::vector<Vec> v(vectors);
    return span(ambient, std::span<const Vec>(v));
  }
  static Subspace full(std::size_t n) {
    std::vector<Vec> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back(unit_vec(n, i));
    return span(n, e);
  }
  static Subspace coordinate(std::size_t n, std::span<const std::size_t> indices) {
    std::vector<Vec> e;
    for (auto i : indices) e.push_back(unit_vec(n, i));
    return span(n, e);
  }

  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<Vec>& basis() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  bool is_zero() const { return rows_.empty(); }
  bool is_full() const { return rows_.size() == n_; }

  /// Remainder of v after eliminating the pivot coordinates.
  Vec reduce(Vec v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rational f = v[pivots_[r]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (rows_[r][j] != 0) v[j] -= f * rows_[r][j];
    }
    return v;
  }
  bool contains(const Vec& v) const { return lielab::is_zero(reduce(v)); }
  bool contains(const Subspace& other) const {
    return std::all_of(other.rows_.begin(), other.rows_.end(),
                       [&](const Vec& v) { return contains(v); });
  }
  /// Coordinates of v in the canonical basis; nullopt when v is outside.
  std::optional<Vec> coordinates(const Vec& v) const {
    if (!contains(v)) return std::nullopt;
    Vec c(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) c[r] = v[pivots_[r]];
    return c;
  }

  bool operator==(const Subspace& o) const { return n_ == o.n_ && rows_ == o.rows_; }

 private:
  std::size_t n_ = 0;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

inline Subspace sum(const Subspace& a, const Subspace& b) {
  std::vector<Vec> all = a.basis();
  all.insert(all.end(), b.basis().begin(), b.basis().end());
  return Subspace::span(a.ambient_dim(), all);
}

/// Null space {x : M x = 0} for M given by rows of length n.
inline std::vector<Vec> null_space(const std::vector<Vec>& rows_in, std::size_t n) {
  std::vector<Vec> rows = rows_in;
  const auto piv = detail::rref(rows, detail::natural_order(n));
  std::vector<bool> is_pivot(n, false);
  for (auto p : piv) is_pivot[p] = true;
  std::vector<Vec> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec v = zero_vec(n);
    v[f] = 1;
    for (std::size_t r = 0; r < rows.size(); ++r) v[piv[r]] = -rows[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

inline Subspace annihilator(const Subspace& a) {
  return Subspace::span(a.ambient_dim(), null_space(a.basis(), a.ambient_dim()));
}

inline Subspace intersection(const Subspace& a, const Subspace& b) {
  if (a.contains(b)) return b;
  if (b.contains(a)) return a;
  return annihilator(sum(annihilator(a), annihilator(b)));
}

/// A complement C of `inner` inside `outer` (inner must lie in outer), spanned by
/// vectors of `outer` whose pivots come earliest in `preference`.
inline Subspace complement_within(const Subspace& inner, const Subspace& outer,
                                  std::span<const std::size_t> preference = {}) {
  const std::size_t n = outer.ambient_dim();
  if (!outer.contains(inner)) throw Error("complement_within: inner is not contained in outer");
  std::vector<std::size_t> order(preference.begin(), preference.end());
  if (order.empty()) order = detail::natural_order(n);
  if (order.size() != n) throw Error("basis preference must list every coordinate once");
  std::vector<Vec> rows = outer.basis();
  detail::rref(rows, order);
  Subspace acc = inner;
  std::vector<Vec> picked;
  for (const auto& r : rows) {
    if (acc.contains(r)) continue;
    picked.push_back(r);
    acc = sum(acc, Subspace::span(n, {r}));
  }
  return Subspace::span(n, picked);
}

/// Direct sum test for a family of subspaces.
inline bool is_direct_sum(std::span<const Subspace> parts, std::size_t n) {
  std::size_t total = 0;
  std::vector<Vec> all;
  for (const auto& p : parts) {
    total += p.dim();
    all.insert(all.end(), p.basis().begin(), p.basis().end());
  }
  return Subspace::span(n, all).dim() == total;
}

}  // namespace lielab
