#pragma once

#include "lielab/canned.hpp"
#include "lielab/flow.hpp"

#include <map>
#include <random>
#include <string>

namespace testing_support {

using namespace lielab;

inline Rational random_rational(std::mt19937_64& rng, int range = 5, int den = 4) {
  std::uniform_int_distribution<int> num(-range, range), d(1, den);
  Rational r(num(rng), d(rng));
  r.canonicalize();
  return r;
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, int range = 5, int den = 4) {
  Vec v(n);
  for (auto& x : v) x = random_rational(rng, range, den);
  return v;
}

/// Replaces each layer basis vector v by v + (random element of `lower`), keeping a complement.
inline Subspace perturb(std::mt19937_64& rng, const Subspace& layer, const Subspace& lower) {
  std::vector<Vec> out;
  for (const auto& v : layer.basis()) {
    Vec w = v;
    for (const auto& u : lower.basis()) w = w + random_rational(rng, 3, 3) * u;
    out.push_back(w);
  }
  return Subspace::span(layer.ambient_dim(), out);
}

/// Asymptotic grading with random rational complements to the lower central series.
inline Grading random_asymptotic(std::mt19937_64& rng, const StructureTensor& t) {
  const auto lcs = lower_central_series(t);
  const Grading base = build_asymptotic_grading(t);
  std::vector<Subspace> layers;
  for (int j = 1; j <= base.depth(); ++j) layers.push_back(perturb(rng, base.layer(j), lcs[j]));
  return Grading(layers);
}

/// Tangent grading with random rational complements along the distribution filtration.
inline Grading random_tangent(std::mt19937_64& rng, const StructureTensor& t, const Subspace& delta) {
  const auto f = delta_filtration(t, delta);
  const Grading base = build_tangent_grading(t, delta);
  std::vector<Subspace> layers{delta};
  for (int j = 2; j <= base.depth(); ++j) layers.push_back(perturb(rng, base.layer(j), f.cumulative[j - 2]));
  return Grading(layers);
}

/// Non-commutative polynomials in two letters, truncated at a degree.
struct Series {
  int max_degree;
  std::map<std::string, Rational> terms;

  static Series letter(int deg, char c) {
    Series s{deg, {}};
    s.terms[std::string(1, c)] = 1;
    return s;
  }
  Series operator+(const Series& o) const {
    Series r = *this;
    for (const auto& [w, c] : o.terms) r.terms[w] += c;
    r.clean();
    return r;
  }
  Series operator*(const Series& o) const {
    Series r{max_degree, {}};
    for (const auto& [a, ca] : terms)
      for (const auto& [b, cb] : o.terms)
        if (static_cast<int>(a.size() + b.size()) <= max_degree) r.terms[a + b] += ca * cb;
    r.clean();
    return r;
  }
  Series scaled(const Rational& k) const {
    Series r = *this;
    for (auto& [w, c] : r.terms) c *= k;
    r.clean();
    return r;
  }
  void clean() {
    for (auto it = terms.begin(); it != terms.end();) it = it->second == 0 ? terms.erase(it) : std::next(it);
  }
};

/// exp(a) for a series without constant term.
inline Series series_exp(const Series& a) {
  Series out{a.max_degree, {{"", Rational(1)}}}, power{a.max_degree, {{"", Rational(1)}}};
  Rational fact = 1;
  for (int k = 1; k <= a.max_degree; ++k) {
    power = power * a;
    fact *= k;
    out = out + power.scaled(Rational(1) / fact);
  }
  return out;
}

/// log(1 + z) where `u` = 1 + z.
inline Series series_log(const Series& u) {
  Series z = u;
  z.terms.erase("");
  Series out{u.max_degree, {}}, power{u.max_degree, {{"", Rational(1)}}};
  for (int k = 1; k <= u.max_degree; ++k) {
    power = power * z;
    out = out + power.scaled(Rational(k % 2 ? 1 : -1) / k);
  }
  return out;
}

/// Velocity of t -> x * (t u) at t = 0: sum of Bernoulli-weighted ad_x powers applied to u.
inline std::vector<double> left_translation(const NumericTensor& t, const std::vector<double>& x,
                                            const std::vector<double>& u, int order) {
  // B_k / k! with the convention that gives ad/(1 - exp(-ad)): 1, 1/2, 1/12, 0, -1/720, 0, 1/30240, 0, -1/1209600
  static const double coef[] = {1.0, 0.5, 1.0 / 12, 0.0, -1.0 / 720, 0.0, 1.0 / 30240, 0.0, -1.0 / 1209600};
  std::vector<double> term = u, out(u.size(), 0.0);
  for (int k = 0; k <= order && k < 9; ++k) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coef[k] * term[i];
    term = bracket(t, x, term);
  }
  return out;
}

/// RK4 integration of the left-invariant flow for a piecewise constant control.
inline std::vector<double> ode_flow(const NumericTensor& t, const Eigen::MatrixXd& velocity, std::vector<double> x,
                                    const ControlPath& p, int order, int steps_per_segment) {
  for (std::size_t s = 0; s < p.size(); ++s) {
    const Eigen::VectorXd v = velocity * p.controls[s];
    const std::vector<double> u(v.data(), v.data() + v.size());
    const double h = p.durations[s] / steps_per_segment;
    auto f = [&](const std::vector<double>& y) { return left_translation(t, y, u, order); };
    auto axpy = [](const std::vector<double>& a, double k, const std::vector<double>& b) {
      std::vector<double> r = a;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += k * b[i];
      return r;
    };
    for (int k = 0; k < steps_per_segment; ++k) {
      const auto k1 = f(x);
      const auto k2 = f(axpy(x, h / 2, k1));
      const auto k3 = f(axpy(x, h / 2, k2));
      const auto k4 = f(axpy(x, h, k3));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
  }
  return x;
}

inline std::vector<std::string> canned_names() {
  std::vector<std::string> out;
  for (const auto& c : canned_library()) out.emplace_back(c.name);
  return out;
}

}  // namespace testing_support
