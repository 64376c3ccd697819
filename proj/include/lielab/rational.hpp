#pragma once

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lielab {

using Rational = mpq_class;
using Vec = std::vector<Rational>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses "p", "p/q" or a finite decimal such as "-0.25" exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw Error("empty rational");
  auto bad = [&] { return Error("malformed rational '" + std::string(text) + "'"); };
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw bad();
  const auto dot = s.find('.');
  const auto slash = s.find('/');
  if (dot != std::string::npos && slash != std::string::npos) throw bad();
  for (std::size_t k = i; k < s.size(); ++k) {
    const char c = s[k];
    if (!std::isdigit(static_cast<unsigned char>(c)) && k != dot && k != slash) throw bad();
  }
  if (slash != std::string::npos) {
    if (slash == i || slash + 1 == s.size() || s.find('/', slash + 1) != std::string::npos)
      throw bad();
    Rational r;
    r.get_num() = mpz_class(s.substr(i, slash - i), 10);
    r.get_den() = mpz_class(s.substr(slash + 1), 10);
    if (r.get_den() == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    r.canonicalize();
    return s[0] == '-' ? Rational(-r) : r;
  }
  if (dot != std::string::npos) {
    if (s.find('.', dot + 1) != std::string::npos) throw bad();
    std::string digits = s.substr(i, dot - i) + s.substr(dot + 1);
    if (digits.empty()) throw bad();
    mpz_class den = 1;
    for (std::size_t k = dot + 1; k < s.size(); ++k) den *= 10;
    Rational r{mpz_class(digits, 10), den};
    r.canonicalize();
    return s[0] == '-' ? Rational(-r) : r;
  }
  Rational r{mpz_class(s.substr(i), 10)};
  return s[0] == '-' ? Rational(-r) : r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Vec zero_vec(std::size_t n) { return Vec(n, Rational(0)); }

inline Vec unit_vec(std::size_t n, std::size_t i) {
  Vec v = zero_vec(n);
  v.at(i) = 1;
  return v;
}

inline bool is_zero(const Vec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(const Rational& c, Vec a) {
  for (auto& x : a) x *= c;
  return a;
}

inline std::vector<double> to_double(const Vec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

}  // namespace lielab
