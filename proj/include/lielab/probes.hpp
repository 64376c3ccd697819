#pragma once

#include "lielab/distance.hpp"

#include <random>

namespace lielab {

/// Projection onto the first layer of the model's asymptotic grading, as an n x n matrix.
inline Eigen::MatrixXd first_layer_projection(const Grading& g) {
  const Eigen::MatrixXd gb = to_eigen(g.basis()), gi = to_eigen(g.inverse_basis());
  Eigen::VectorXd keep(gb.cols());
  for (Eigen::Index a = 0; a < keep.size(); ++a) keep(a) = g.weights()[a] == 1 ? 1.0 : 0.0;
  return gb * keep.asDiagonal() * gi;
}

/// x -> delta_t x for a grading, in the original coordinates.
inline std::vector<double> dilate(const Grading& g, double t, const std::vector<double>& x) {
  const Eigen::MatrixXd gb = to_eigen(g.basis()), gi = to_eigen(g.inverse_basis());
  Eigen::VectorXd y = gi * to_eigen(x);
  for (Eigen::Index a = 0; a < y.size(); ++a) y(a) *= std::pow(t, g.weights()[a]);
  const Eigen::VectorXd z = gb * y;
  return {z.data(), z.data() + z.size()};
}

/// Per-segment minimal lift of a first-layer path to the distribution at scale eps.
/// Returns distribution coordinates whose velocity projects onto the given ambient vectors.
inline ControlPath lift_control(const SubFinslerModel& model, double eps, const std::vector<double>& durations,
                                const std::vector<Eigen::VectorXd>& first_layer) {
  const Metric g = model.pansu(eps);
  const Eigen::MatrixXd proj = first_layer_projection(model.asymptotic().grading()) * g.velocity;
  ControlPath out;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    out.durations.push_back(durations[i]);
    out.controls.push_back(minimal_lift(g.norm, proj, first_layer[i]).control);
  }
  return out;
}

/// Norm on the first layer of the cone: the least norm of a distribution vector projecting onto v.
inline double limit_norm(const SubFinslerModel& model, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd proj = first_layer_projection(model.asymptotic().grading()) * model.norm().basis();
  return minimal_lift(model.norm(), proj, v).norm;
}

struct SubmetryReport {
  /// Largest |limit norm - 1| over sampled images of unit vectors that should be extreme.
  double boundary_error = 0;
  /// Largest excess of the limit norm over 1 on images of unit-ball points.
  double containment_error = 0;
  /// Largest gap between the limit norm from lifting and the gauge of the projected
  /// vertex hull (polytope norms only; exact facets).
  double vertex_error = 0;
  /// Largest change of the projected ball across the sampled eps.
  double eps_error = 0;
  bool ok(double tol = 1e-7) const {
    return boundary_error < tol && containment_error < tol && vertex_error < tol && eps_error < tol;
  }
};

/// First-layer projection maps the distribution unit ball onto the limit unit ball.
inline SubmetryReport check_submetry(const SubFinslerModel& model, const std::vector<double>& eps_samples,
                                     int samples = 64, std::uint64_t seed = 7) {
  SubmetryReport r;
  const auto& grading = model.asymptotic().grading();
  const Eigen::MatrixXd pi = first_layer_projection(grading);
  const DistributionNorm& norm = model.norm();
  const Eigen::MatrixXd proj = pi * norm.basis();
  const Eigen::Index m = static_cast<Eigen::Index>(norm.dim());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Eigen::VectorXd w(m);
    for (auto& x : w) x = normal(rng);
    return Eigen::VectorXd(w / norm(w));
  };
  for (int s = 0; s < samples; ++s) {
    // Image of a unit vector lies in the limit ball.
    const Eigen::VectorXd w = random_unit();
    const Eigen::VectorXd v = proj * w;
    if (v.norm() > 1e-12) r.containment_error = std::max(r.containment_error, limit_norm(model, v) - 1);
    // A limit-unit vector is the image of a distribution-unit vector.
    Eigen::VectorXd raw(pi.rows());
    for (auto& x : raw) x = normal(rng);
    const Eigen::VectorXd dir = pi * raw;
    if (dir.norm() < 1e-12) continue;
    const Lift lift = minimal_lift(norm, proj, dir);
    const Eigen::VectorXd target = dir / lift.norm;
    const Lift unit = minimal_lift(norm, proj, target);
    r.boundary_error = std::max({r.boundary_error, std::abs(unit.norm - 1), (proj * unit.control - target).norm()});
    // The deformed velocity projects the same way for every eps.
    for (double eps : eps_samples) {
      const Eigen::MatrixXd pe = pi * model.pansu(eps).velocity;
      r.eps_error = std::max(r.eps_error, (pe - proj).norm());
    }
  }
  if (!norm.polytope_vertices().empty()) {
    // Gauge of the projected hull, with exact facets, against the lifting norm.
    const auto& delta = model.distribution();
    const Matrix gi = grading.inverse_basis();
    std::vector<std::size_t> first;
    for (std::size_t a = 0; a < grading.weights().size(); ++a)
      if (grading.weights()[a] == 1) first.push_back(a);
    std::vector<Vec> projected;
    for (const auto& c : norm.polytope_vertices()) {
      Vec amb = zero_vec(delta.ambient_dim());
      for (std::size_t k = 0; k < c.size(); ++k) amb = amb + c[k] * delta.basis()[k];
      const Vec graded = gi.apply(amb);
      Vec v;
      for (auto a : first) v.push_back(graded[a]);
      projected.push_back(v);
    }
    const auto facets = polytope_facets(projected, first.size());
    const Eigen::MatrixXd gb = to_eigen(grading.basis());
    auto gauge = [&](const Eigen::VectorXd& y) {
      double best = 0;
      for (const auto& f : facets) best = std::max(best, to_eigen(f).dot(y));
      return best;
    };
    auto ambient = [&](const Eigen::VectorXd& y) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(gb.cols());
      for (std::size_t k = 0; k < first.size(); ++k) full(static_cast<Eigen::Index>(first[k])) = y(k);
      return Eigen::VectorXd(gb * full);
    };
    std::vector<Eigen::VectorXd> probes;
    for (const auto& v : projected) probes.push_back(to_eigen(v));
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(first.size()));
      for (auto& x : y) x = normal(rng);
      probes.push_back(y);
    }
    for (const auto& y : probes) {
      if (y.norm() < 1e-12) continue;
      r.vertex_error = std::max(r.vertex_error, std::abs(gauge(y) - limit_norm(model, ambient(y))));
    }
  }
  return r;
}

/// Fixed control with seeded random segment values in distribution coordinates.
inline ControlPath random_control(std::size_t segments, std::size_t m, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ControlPath p = ControlPath::uniform(segments, m);
  for (auto& c : p.controls)
    for (auto& x : c) x = scale * normal(rng);
  return p;
}

/// Endpoint gap |gamma_eps(1) - gamma_0(1)| for the same control at each eps.
/// On the asymptotic side the eps = 0 velocity is the first-layer part of the control.
inline std::vector<std::pair<double, double>> gronwall_probe(const SubFinslerModel& model, Side side,
                                                             const ControlPath& u,
                                                             const std::vector<double>& eps_grid) {
  const std::vector<double> origin(model.tensor().dim(), 0.0);
  const auto limit = flow(model.metric(side, 0.0), origin, u);
  std::vector<std::pair<double, double>> rows;
  for (double eps : eps_grid) {
    const auto end = flow(model.metric(side, eps), origin, u);
    rows.emplace_back(eps, (to_eigen(end) - to_eigen(limit)).norm());
  }
  return rows;
}

/// Points of homogeneous size `size` for a grading, spread over directions by a seed.
inline std::vector<std::vector<double>> spread_points(const Grading& g, std::size_t count, std::uint64_t seed,
                                                      const std::vector<double>& sizes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::MatrixXd gb = to_eigen(g.basis());
  Metric probe;
  probe.graded_basis = gb;
  probe.graded_inverse = to_eigen(g.inverse_basis());
  probe.weights = g.weights();
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::VectorXd y(gb.cols());
    for (auto& x : y) x = normal(rng);
    const Eigen::VectorXd z = gb * y;
    std::vector<double> x(z.data(), z.data() + z.size());
    // Homogeneous size is 1-homogeneous under dilation, so rescale by it.
    const double h = probe.homogeneous_size(x);
    if (h < 1e-9) continue;
    x = dilate(g, sizes[k % sizes.size()] / h, x);
    out.push_back(std::move(x));
  }
  return out;
}

struct BallBoxReport {
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0;
  /// Largest relative failure of d(0, delta_t x) = t d(0, x) on the cone.
  double homogeneity_error = 0;
  int samples = 0;
  bool ok() const { return samples > 0 && lower > 0 && std::isfinite(upper) && homogeneity_error < 0.02; }
};

/// Ratio of the cone distance from the origin to the homogeneous quasi-norm, on samples
/// of homogeneous size at most 1.
inline BallBoxReport ball_box(const SubFinslerModel& model, Side side, int samples, const DistanceOptions& opt,
                              std::uint64_t seed = 11) {
  BallBoxReport r;
  const Metric g = model.metric(side, 0.0);
  const Grading& grading = side == Side::asymptotic ? model.asymptotic().grading() : model.tangent().grading();
  const std::vector<double> origin(g.dim(), 0.0);
  const auto pts = spread_points(grading, static_cast<std::size_t>(samples), seed, {1.0, 0.7, 0.4});
  for (const auto& x : pts) {
    const auto d = estimate_distance(g, origin, x, opt);
    if (!d.ok()) continue;
    const double ratio = d.value / g.homogeneous_size(x);
    r.lower = std::min(r.lower, ratio);
    r.upper = std::max(r.upper, ratio);
    ++r.samples;
    const auto half = estimate_distance(g, origin, dilate(grading, 0.5, x), opt);
    if (half.ok()) r.homogeneity_error = std::max(r.homogeneity_error, std::abs(2 * half.value - d.value) / d.value);
  }
  return r;
}

/// Smallest C with rho_0/C - C eps <= rho_eps <= C rho_0 + C eps on the given values.
inline double guivarch_constant(double eps, double rho_eps, double rho_0) {
  double c = 1;
  c = std::max(c, rho_eps / (rho_0 + eps));
  if (eps > 0)
    c = std::max(c, (-rho_eps + std::sqrt(rho_eps * rho_eps + 4 * eps * rho_0)) / (2 * eps));
  else if (rho_eps > 0)
    c = std::max(c, rho_0 / rho_eps);
  return c;
}

}  // namespace lielab
