#pragma once

#include "lielab/algebra_file.hpp"
#include "lielab/invariants.hpp"

namespace lielab {

enum class GradingSource { asymptotic, tangent, file };

struct SideReport {
  Side side = Side::asymptotic;
  Grading grading;
  KindReport kinds;
  AlphaResult alphas;
  BetaResult beta;
  /// Convergence rate exponent alpha/beta; nullopt when the side is exact (Carnot).
  std::optional<double> rate() const {
    const Extended a = side == Side::asymptotic ? *alphas.alpha_inf : *alphas.alpha0;
    if (a.is_infinite() || beta.beta_hat == 0) return std::nullopt;
    return static_cast<double>(a.value()) / beta.beta_hat;
  }
};

struct Analysis {
  std::string name;
  std::size_t dim = 0;
  AlgebraReport algebra;
  Subspace distribution;
  DeltaFiltration filtration;
  std::optional<SideReport> asymptotic;
  std::optional<SideReport> tangent;
  std::vector<std::string> notes;
  /// (key, expected, actual) for every expectation in the input.
  std::vector<std::tuple<std::string, std::string, std::string>> expectation_results;

  bool carnot() const {
    return asymptotic && asymptotic->alphas.alpha_inf && asymptotic->alphas.alpha_inf->is_infinite();
  }
  bool expectations_met() const {
    for (const auto& [k, e, a] : expectation_results)
      if (e != a) return false;
    return true;
  }
};

namespace detail {

inline SideReport analyze_side(const StructureTensor& t, const Subspace& delta, Grading g, Side side) {
  SideReport r;
  r.side = side;
  r.kinds = classify_grading(t, g, side == Side::tangent ? std::optional(delta) : std::nullopt);
  const bool ok = side == Side::asymptotic ? r.kinds.asymptotic : r.kinds.tangent;
  if (!ok) throw Error("grading is not " + to_string(side));
  g.set_kind(side == Side::asymptotic ? GradingKind::asymptotic : GradingKind::tangent);
  r.grading = std::move(g);
  r.alphas = compute_alphas(t, r.grading, delta, side);
  r.beta = beta_search(t, r.grading, delta);
  return r;
}

inline std::optional<std::string> actual_value(const Analysis& a, const std::string& key) {
  auto ext = [](const std::optional<Extended>& e) -> std::optional<std::string> {
    if (!e) return std::nullopt;
    return e->str();
  };
  if (key == "step")
    return a.algebra.nilpotency_step ? std::to_string(*a.algebra.nilpotency_step) : "none";
  if (key == "carnot") return a.asymptotic ? std::optional<std::string>(a.carnot() ? "true" : "false") : std::nullopt;
  if (a.asymptotic) {
    const auto& al = a.asymptotic->alphas;
    if (key == "alpha1_inf") return ext(al.alpha1_inf);
    if (key == "alpha2_inf") return ext(al.alpha2_inf);
    if (key == "alpha_inf") return ext(al.alpha_inf);
    if (key == "beta") return std::to_string(a.asymptotic->beta.beta_hat);
    if (key == "exhaustive") return a.asymptotic->beta.exhaustive ? "true" : "false";
  }
  if (a.tangent) {
    if (key == "alpha0") return ext(a.tangent->alphas.alpha0);
    if (key == "beta0") return std::to_string(a.tangent->beta.beta_hat);
  }
  return std::nullopt;
}

}  // namespace detail

inline Analysis analyze(const AlgebraFile& f, GradingSource source = GradingSource::asymptotic) {
  Analysis a;
  a.name = f.name;
  const auto& t = f.tensor;
  a.dim = t.dim();
  a.algebra = validate(t);
  if (!a.algebra.jacobi_ok) {
    const auto& b = a.algebra.jacobi_failures.front();
    throw Error("Jacobi identity fails on (" + t.names()[b[0]] + ", " + t.names()[b[1]] + ", " +
                t.names()[b[2]] + ")");
  }
  a.distribution = f.distribution ? *f.distribution : Subspace::full(t.dim());
  a.filtration = delta_filtration(t, a.distribution);
  if (!a.filtration.bracket_generating) throw Error("distribution is not bracket generating");
  const bool nilpotent = a.algebra.nilpotency_step.has_value();

  std::optional<Grading> file_grading;
  if (!f.grading.empty()) file_grading = Grading(f.grading);
  if (source == GradingSource::file && !file_grading) throw Error("input has no grading");

  if (source != GradingSource::tangent) {
    if (!nilpotent) {
      a.notes.push_back("algebra is not nilpotent: asymptotic side skipped");
    } else {
      std::optional<Grading> g;
      if (source == GradingSource::file && is_asymptotic(t, *file_grading)) g = file_grading;
      if (!g && file_grading && source == GradingSource::asymptotic &&
          is_asymptotic(t, *file_grading))
        g = file_grading;
      if (!g) g = build_asymptotic_grading(t);
      a.asymptotic = detail::analyze_side(t, a.distribution, *g, Side::asymptotic);
    }
  }
  std::optional<Grading> tg;
  if (source == GradingSource::file && is_tangent(t, *file_grading, a.distribution)) tg = file_grading;
  if (!tg) tg = build_tangent_grading(t, a.distribution);
  if (!nilpotent) a.notes.push_back("tangent side on a non-nilpotent algebra is best effort");
  a.tangent = detail::analyze_side(t, a.distribution, *tg, Side::tangent);
  if (source == GradingSource::file && !is_asymptotic(t, *file_grading) &&
      !is_tangent(t, *file_grading, a.distribution))
    throw Error("the grading in the file is neither asymptotic nor tangent");

  for (const auto& [k, v] : f.expectations) {
    const auto actual = detail::actual_value(a, k);
    a.expectation_results.emplace_back(k, v, actual ? *actual : "n/a");
  }
  return a;
}

}  // namespace lielab
