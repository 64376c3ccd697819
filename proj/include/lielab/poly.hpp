#pragma once

#include "lielab/rational.hpp"

namespace lielab {

/// Polynomial in one variable with rational coefficients, lowest degree first.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c) : c_{c} { trim(); }
  Poly(int c) : Poly(Rational(c)) {}
  static Poly monomial(const Rational& c, std::size_t degree) {
    Poly p;
    p.c_.assign(degree + 1, Rational(0));
    p.c_[degree] = c;
    p.trim();
    return p;
  }

  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(std::size_t d) const { return d < c_.size() ? c_[d] : Rational(0); }
  bool is_zero() const { return c_.empty(); }
  /// Index of the lowest nonzero coefficient; -1 for the zero polynomial.
  int order() const {
    for (std::size_t d = 0; d < c_.size(); ++d)
      if (c_[d] != 0) return static_cast<int>(d);
    return -1;
  }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  Rational operator()(const Rational& t) const {
    Rational acc = 0;
    for (std::size_t d = c_.size(); d-- > 0;) acc = acc * t + c_[d];
    return acc;
  }
  double operator()(double t) const {
    double acc = 0;
    for (std::size_t d = c_.size(); d-- > 0;) acc = acc * t + c_[d].get_d();
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] += o.c_[d];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] -= o.c_[d];
    trim();
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Poly p;
    p.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) p.c_[i + j] += a.c_[i] * b.c_[j];
    p.trim();
    return p;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  bool operator==(const Poly&) const = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

using PolyVec = std::vector<Poly>;

inline PolyVec to_poly(const Vec& v) { return PolyVec(v.begin(), v.end()); }

inline Vec evaluate(const PolyVec& v, const Rational& t) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i](t);
  return out;
}

}  // namespace lielab
