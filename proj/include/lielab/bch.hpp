#pragma once

#include "lielab/structure_tensor.hpp"

#include <functional>
#include <mutex>
#include <unordered_map>

namespace lielab {

/// Word over {0 = x, 1 = y}; letter i is the i-th entry of [x_{q1}, [x_{q2}, ..., x_{qk}]].
using Word = std::vector<std::uint8_t>;

/// Coefficients b_{k,q} of x*y = x + y + sum b_{k,q} [x_{q1}, ..., x_{qk}] up to a step.
class BchTable {
 public:
  int max_step() const { return max_step_; }
  /// All words of length 1..max_step with nonzero coefficient.
  const std::vector<std::pair<Word, Rational>>& terms() const { return terms_; }
  Rational coefficient(const Word& w) const {
    for (const auto& [word, c] : terms_)
      if (word == w) return c;
    return 0;
  }

  /// Builds the table from Dynkin's formula. Does not verify; see bch_table().
  static BchTable compute(int max_step) {
    if (max_step < 1 || max_step > 8) throw Error("BCH tables are available for steps 1..8");
    BchTable t;
    t.max_step_ = max_step;
    std::vector<Rational> fact{1};
    for (int i = 1; i <= max_step; ++i) fact.push_back(fact.back() * i);
    for (int k = 1; k <= max_step; ++k) {
      for (unsigned bits = 0; bits < (1u << k); ++bits) {
        Word w(k);
        for (int i = 0; i < k; ++i) w[i] = (bits >> (k - 1 - i)) & 1u;
        Rational total = 0;
        // Each cut pattern splits w into blocks x^r y^s with r + s > 0.
        for (unsigned cuts = 0; cuts < (1u << (k - 1)); ++cuts) {
          Rational denom = k;
          int blocks = 0;
          bool ok = true;
          int start = 0;
          for (int i = 0; i < k && ok; ++i) {
            const bool end = i == k - 1 || ((cuts >> i) & 1u);
            if (!end) continue;
            int r = 0, s = 0;
            for (int m = start; m <= i; ++m) {
              if (w[m] == 0) {
                if (s > 0) ok = false;
                ++r;
              } else {
                ++s;
              }
            }
            denom *= fact[r] * fact[s];
            ++blocks;
            start = i + 1;
          }
          if (!ok) continue;
          Rational c = Rational(1) / (denom * blocks);
          total += (blocks % 2 == 1) ? c : Rational(-c);
        }
        if (total != 0) t.terms_.emplace_back(std::move(w), total);
      }
    }
    return t;
  }

 private:
  int max_step_ = 0;
  std::vector<std::pair<Word, Rational>> terms_;
};

/// x * y by the table; vectors of any scalar type the tensor acts on.
template <class C, class S>
std::vector<S> dynkin_product(const BasicTensor<C>& t, const BchTable& table,
                              const std::vector<S>& x, const std::vector<S>& y) {
  // nested[w] = [x_{w1}, [..., x_{wk}]], shared between words with a common tail.
  std::map<Word, std::vector<S>> nested;
  std::function<const std::vector<S>&(const Word&)> get =
      [&](const Word& w) -> const std::vector<S>& {
    auto it = nested.find(w);
    if (it != nested.end()) return it->second;
    const auto& head = w[0] == 0 ? x : y;
    std::vector<S> v = w.size() == 1 ? head : bracket(t, head, get(Word(w.begin() + 1, w.end())));
    return nested.emplace(w, std::move(v)).first->second;
  };
  std::vector<S> out(t.dim(), S(0));
  for (const auto& [w, c] : table.terms()) {
    const auto& v = get(w);
    const S coef(c);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!(v[i] == S(0))) out[i] += coef * v[i];
  }
  return out;
}

namespace detail {

/// Element of the free associative algebra on three letters truncated above a degree.
/// Words are packed base 4 with a leading sentinel digit.
struct FreeAssoc {
  int max_degree;
  std::unordered_map<std::uint32_t, Rational> terms;

  static int degree(std::uint32_t code) {
    int d = 0;
    while (code > 1) {
      code >>= 2;
      ++d;
    }
    return d;
  }
  static std::uint32_t concat(std::uint32_t a, std::uint32_t b) {
    const int db = degree(b);
    return (a << (2 * db)) | (b & ((1u << (2 * db)) - 1u));
  }
  static FreeAssoc letter(int max_degree, int l) {
    FreeAssoc e{max_degree, {}};
    e.terms[(1u << 2) | static_cast<std::uint32_t>(l)] = 1;
    return e;
  }
  FreeAssoc& operator+=(const FreeAssoc& o) {
    for (const auto& [w, c] : o.terms) {
      auto& v = terms[w];
      v += c;
      if (v == 0) terms.erase(w);
    }
    return *this;
  }
  FreeAssoc scaled(const Rational& c) const {
    FreeAssoc e{max_degree, terms};
    for (auto& [w, v] : e.terms) v *= c;
    return e;
  }
  FreeAssoc bracket(const FreeAssoc& o) const {
    FreeAssoc e{max_degree, {}};
    for (const auto& [a, ca] : terms) {
      const int da = degree(a);
      for (const auto& [b, cb] : o.terms) {
        if (da + degree(b) > max_degree) continue;
        const Rational p = ca * cb;
        e.terms[concat(a, b)] += p;
        e.terms[concat(b, a)] -= p;
      }
    }
    std::erase_if(e.terms, [](const auto& kv) { return kv.second == 0; });
    return e;
  }
  bool operator==(const FreeAssoc& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (const auto& [w, c] : terms) {
      auto it = o.terms.find(w);
      if (it == o.terms.end() || it->second != c) return false;
    }
    return true;
  }
};

inline FreeAssoc free_product(const BchTable& table, const FreeAssoc& x, const FreeAssoc& y) {
  std::map<Word, FreeAssoc> nested;
  FreeAssoc out = x;
  out += y;
  std::function<const FreeAssoc&(const Word&)> get = [&](const Word& w) -> const FreeAssoc& {
    auto it = nested.find(w);
    if (it != nested.end()) return it->second;
    const FreeAssoc& head = w[0] == 0 ? x : y;
    FreeAssoc v = w.size() == 1 ? head : head.bracket(get(Word(w.begin() + 1, w.end())));
    return nested.emplace(w, std::move(v)).first->second;
  };
  for (const auto& [w, c] : table.terms())
    if (w.size() >= 2) out += get(w).scaled(c);
  return out;
}

}  // namespace detail

/// (x*y)*z == x*(y*z) on the generators of the free nilpotent algebra on three letters.
inline bool verify_associativity(const BchTable& table) {
  const int d = table.max_step();
  using detail::FreeAssoc;
  const auto x = FreeAssoc::letter(d, 0), y = FreeAssoc::letter(d, 1), z = FreeAssoc::letter(d, 2);
  const auto lhs = detail::free_product(table, detail::free_product(table, x, y), z);
  const auto rhs = detail::free_product(table, x, detail::free_product(table, y, z));
  return lhs == rhs;
}

/// Verified table for the given step, cached per process.
inline const BchTable& bch_table(int max_step) {
  static std::mutex mu;
  static std::map<int, BchTable> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(max_step);
  if (it != cache.end()) return it->second;
  BchTable t = BchTable::compute(max_step);
  if (!verify_associativity(t)) throw Error("BCH table failed the associativity check");
  return cache.emplace(max_step, std::move(t)).first->second;
}

/// Product on a nilpotent algebra using the table of its step.
inline Vec group_product(const StructureTensor& t, const Vec& x, const Vec& y) {
  const auto s = nilpotency_step(t);
  if (!s) throw Error("exact products need a nilpotent algebra; give a truncation step");
  return dynkin_product(t, bch_table(std::max(*s, 1)), x, y);
}

}  // namespace lielab
