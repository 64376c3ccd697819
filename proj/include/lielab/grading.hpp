#pragma once

#include "lielab/structure_tensor.hpp"

namespace lielab {

enum class GradingKind { unverified, asymptotic, tangent, stratification };

inline std::string to_string(GradingKind k) {
  switch (k) {
    case GradingKind::asymptotic: return "asymptotic";
    case GradingKind::tangent: return "tangent";
    case GradingKind::stratification: return "stratification";
    default: return "unverified";
  }
}

/// Direct sum decomposition g = D_1 + ... + D_s with layer j of weight j.
/// Layers may be zero. Holds the adapted basis and its inverse.
class Grading {
 public:
  Grading() = default;
  Grading(std::vector<Subspace> layers, GradingKind kind = GradingKind::unverified)
      : layers_(std::move(layers)), kind_(kind) {
    if (layers_.empty()) throw Error("a grading needs at least one layer");
    n_ = layers_.front().ambient_dim();
    if (!is_direct_sum(layers_, n_)) throw Error("grading layers are not independent");
    std::vector<Vec> cols;
    for (std::size_t j = 0; j < layers_.size(); ++j)
      for (const auto& v : layers_[j].basis()) {
        cols.push_back(v);
        weights_.push_back(static_cast<int>(j) + 1);
      }
    if (cols.size() != n_) throw Error("grading layers do not span the algebra");
    basis_ = Matrix::from_columns(cols, n_);
    inverse_ = inverse(basis_);
  }

  std::size_t ambient_dim() const { return n_; }
  /// Number of layers s, counting trailing zero layers.
  int depth() const { return static_cast<int>(layers_.size()); }
  const std::vector<Subspace>& layers() const { return layers_; }
  /// Layer j for 1 <= j; the zero space beyond the last layer.
  Subspace layer(int j) const {
    if (j >= 1 && j <= depth()) return layers_[j - 1];
    return Subspace(n_);
  }
  GradingKind kind() const { return kind_; }
  void set_kind(GradingKind k) { kind_ = k; }

  /// Adapted basis: columns are the layer bases in order.
  const Matrix& basis() const { return basis_; }
  const Matrix& inverse_basis() const { return inverse_; }
  const std::vector<int>& weights() const { return weights_; }

  Vec graded_coordinates(const Vec& x) const { return inverse_.apply(x); }
  Vec from_graded(const Vec& y) const { return basis_.apply(y); }

  /// (x)_j, the layer-j component.
  Vec component(const Vec& x, int j) const {
    Vec y = graded_coordinates(x);
    for (std::size_t a = 0; a < n_; ++a)
      if (weights_[a] != j) y[a] = 0;
    return from_graded(y);
  }

  /// delta_eps scales layer j by eps^j; eps = 0 gives the zero map.
  Vec dilate(const Rational& eps, const Vec& x) const {
    Vec y = graded_coordinates(x);
    for (std::size_t a = 0; a < n_; ++a) {
      Rational f = 1;
      for (int k = 0; k < weights_[a]; ++k) f *= eps;
      y[a] *= f;
    }
    return from_graded(y);
  }

  Subspace dilate(const Rational& eps, const Subspace& s) const {
    std::vector<Vec> out;
    for (const auto& v : s.basis()) out.push_back(dilate(eps, v));
    return Subspace::span(n_, out);
  }

  /// Subspace D_{<= k} (k <= 0 gives zero).
  Subspace up_to(int k) const {
    Subspace acc(n_);
    for (int j = 1; j <= std::min(k, depth()); ++j) acc = sum(acc, layers_[j - 1]);
    return acc;
  }
  Subspace from(int k) const {
    Subspace acc(n_);
    for (int j = std::max(k, 1); j <= depth(); ++j) acc = sum(acc, layers_[j - 1]);
    return acc;
  }

  /// Tensor expressed in the adapted basis.
  StructureTensor graded_tensor(const StructureTensor& t) const { return change_basis(t, basis_); }

  bool operator==(const Grading& o) const { return layers_ == o.layers_; }

 private:
  std::size_t n_ = 0;
  std::vector<Subspace> layers_;
  GradingKind kind_ = GradingKind::unverified;
  Matrix basis_, inverse_;
  std::vector<int> weights_;
};

inline Grading build_asymptotic_grading(const StructureTensor& t,
                                        std::span<const std::size_t> preference = {}) {
  const auto lcs = lower_central_series(t);
  if (!lcs.back().is_zero()) throw Error("asymptotic grading needs a nilpotent algebra");
  std::vector<Subspace> layers;
  for (std::size_t j = 0; j + 1 < lcs.size(); ++j)
    layers.push_back(complement_within(lcs[j + 1], lcs[j], preference));
  return Grading(std::move(layers), GradingKind::asymptotic);
}

inline Grading build_tangent_grading(const StructureTensor& t, const Subspace& delta,
                                     std::span<const std::size_t> preference = {}) {
  const auto f = delta_filtration(t, delta);
  if (!f.bracket_generating) throw Error("tangent grading needs a bracket-generating distribution");
  std::vector<Subspace> layers{delta};
  for (std::size_t j = 1; j < f.cumulative.size(); ++j)
    layers.push_back(complement_within(f.cumulative[j - 1], f.cumulative[j], preference));
  return Grading(std::move(layers), GradingKind::tangent);
}

struct KindReport {
  bool asymptotic = false;
  bool tangent = false;
  bool stratification = false;
};

inline bool is_stratification(const StructureTensor& t, const Grading& g) {
  for (int j = 1; j <= g.depth(); ++j)
    if (!(subspace_bracket(t, g.layer(1), g.layer(j)) == g.layer(j + 1))) return false;
  return true;
}

inline bool is_asymptotic(const StructureTensor& t, const Grading& g) {
  const auto lcs = lower_central_series(t);
  if (!lcs.back().is_zero()) return false;
  const int top = std::max(g.depth(), static_cast<int>(lcs.size()));
  auto term = [&](int j) {  // g^(j), zero beyond the series
    return j - 1 < static_cast<int>(lcs.size()) ? lcs[j - 1] : Subspace(t.dim());
  };
  for (int j = 1; j <= top; ++j) {
    const Subspace v = g.layer(j), next = term(j + 1);
    if (!intersection(v, next).is_zero() || !(sum(v, next) == term(j))) return false;
  }
  return true;
}

inline bool is_tangent(const StructureTensor& t, const Grading& g, const Subspace& delta) {
  if (!(g.layer(1) == delta)) return false;
  const auto f = delta_filtration(t, delta);
  if (!f.bracket_generating) return false;
  const int top = std::max(g.depth(), f.step());
  auto cum = [&](int j) {
    if (j <= 0) return Subspace(t.dim());
    return j <= f.step() ? f.cumulative[j - 1] : f.cumulative.back();
  };
  for (int j = 1; j <= top; ++j) {
    const Subspace w = g.layer(j), prev = cum(j - 1);
    if (!intersection(w, prev).is_zero() || !(sum(w, prev) == cum(j))) return false;
  }
  return true;
}

/// Checks each kind; the tangent check uses the first layer as distribution when none is given.
inline KindReport classify_grading(const StructureTensor& t, const Grading& g,
                                   const std::optional<Subspace>& delta = std::nullopt) {
  KindReport r;
  r.asymptotic = is_asymptotic(t, g);
  r.tangent = is_tangent(t, g, delta ? *delta : g.layer(1));
  r.stratification = is_stratification(t, g);
  return r;
}

/// Left-iterated bracket [S_1, [S_2, ..., S_k]] of subspaces.
inline Subspace iterated_bracket(const StructureTensor& t, std::span<const Subspace> parts) {
  Subspace acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = subspace_bracket(t, parts[i], acc);
  return acc;
}

/// The seven structural claims about linear gradings, each checked directly.
struct GradingProperties {
  bool tangent_filtered = true;         // [W_i, W_j] inside W_{<= i+j}
  bool tangent_strat_criterion = true;  // hypothesis on [W_1, W_j] forces a stratification
  bool tangent_depth_bound = true;      // q <= s
  bool lcs_recursion = true;            // g^(j) = Delta^j + g^(j+1)
  bool cumulative_fill = true;          // g = Delta^[j] + g^(j+1)
  bool asymptotic_filtered = true;      // [V_i, V_j] inside V_{>= i+j}
  bool asymptotic_strat_criterion = true;
  bool all() const {
    return tangent_filtered && tangent_strat_criterion && tangent_depth_bound && lcs_recursion &&
           cumulative_fill && asymptotic_filtered && asymptotic_strat_criterion;
  }
};

/// `asym` must be an asymptotic grading and `tang` a tangent grading for `delta`.
inline GradingProperties check_grading_properties(const StructureTensor& t, const Subspace& delta,
                                                  const Grading& asym, const Grading& tang) {
  GradingProperties p;
  const int q = tang.depth();
  for (int i = 1; i <= q; ++i)
    for (int j = 1; j <= q; ++j)
      if (!tang.up_to(i + j).contains(subspace_bracket(t, tang.layer(i), tang.layer(j))))
        p.tangent_filtered = false;
  bool hyp = subspace_bracket(t, tang.layer(1), tang.layer(q)).is_zero();
  for (int j = 1; j < q; ++j)
    hyp = hyp && tang.layer(j + 1).contains(subspace_bracket(t, tang.layer(1), tang.layer(j)));
  if (hyp && !is_stratification(t, tang)) p.tangent_strat_criterion = false;

  const auto lcs = lower_central_series(t);
  const bool nilpotent = lcs.back().is_zero();
  if (nilpotent) {
    const int s = static_cast<int>(lcs.size()) - 1;
    auto term = [&](int j) {
      return j - 1 < static_cast<int>(lcs.size()) ? lcs[j - 1] : Subspace(t.dim());
    };
    const auto f = delta_filtration(t, delta);
    // Iterated brackets [Delta, [Delta, ..., Delta]] keep going after the filtration fills up.
    std::vector<Subspace> powers{delta};
    while (static_cast<int>(powers.size()) < s) powers.push_back(subspace_bracket(t, delta, powers.back()));
    auto power = [&](int j) { return powers[j - 1]; };
    auto cum = [&](int j) { return j <= f.step() ? f.cumulative[j - 1] : f.cumulative.back(); };
    p.tangent_depth_bound = q <= s;
    for (int j = 1; j <= s; ++j) {
      if (!(sum(power(j), term(j + 1)) == term(j))) p.lcs_recursion = false;
      if (!sum(cum(j), term(j + 1)).is_full()) p.cumulative_fill = false;
    }
    const int sa = asym.depth();
    for (int i = 1; i <= sa; ++i)
      for (int j = 1; j <= sa; ++j)
        if (!asym.from(i + j).contains(subspace_bracket(t, asym.layer(i), asym.layer(j))))
          p.asymptotic_filtered = false;
    bool ahyp = true;
    for (int j = 1; j <= sa; ++j)
      ahyp = ahyp && asym.layer(j + 1).contains(subspace_bracket(t, asym.layer(1), asym.layer(j)));
    if (ahyp && !is_stratification(t, asym)) p.asymptotic_strat_criterion = false;
  }
  return p;
}

}  // namespace lielab
