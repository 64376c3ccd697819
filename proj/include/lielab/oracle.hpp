#pragma once

#include "lielab/distance.hpp"

namespace lielab {

struct GridOracleOptions {
  int segments = 6;
  /// Cap on the number of alphabet words scanned per amplitude; fixes how many
  /// leading segment groups are enumerated.
  long long budget = 60000;
  /// Amplitudes tried for the {-a, 0, a} alphabet, as multiples of the target's homogeneous size.
  std::vector<double> amplitudes{1.0, 2.0, 4.0, 6.0};
  double final_step = 1e-7;
};

namespace detail {

/// Derivative-free pattern search (Hooke and Jeeves).
template <class F>
Eigen::VectorXd pattern_search(F&& f, Eigen::VectorXd x, double step, double final_step,
                               long long max_evals = 100000) {
  long long evals = 0;
  auto counted = [&](const Eigen::VectorXd& v) {
    ++evals;
    return f(v);
  };
  double fx = counted(x);
  auto explore = [&](Eigen::VectorXd base, double& fb) {
    for (Eigen::Index k = 0; k < base.size(); ++k) {
      for (double sgn : {1.0, -1.0}) {
        base(k) += sgn * step;
        const double v = counted(base);
        if (v < fb) {
          fb = v;
          break;
        }
        base(k) -= sgn * step;
      }
    }
    return base;
  };
  while (step > final_step && evals < max_evals) {
    double fn = fx;
    Eigen::VectorXd xn = explore(x, fn);
    if (fn < fx) {
      // Pattern moves along the improving direction while they keep helping.
      for (int moves = 0; moves < 1000 && evals < max_evals; ++moves) {
        double fp = fn;
        Eigen::VectorXd xp = explore(xn + (xn - x), fp);
        x = xn;
        fx = fn;
        if (!(fp < fn)) break;
        xn = xp;
        fn = fp;
      }
      x = xn;
      fx = fn;
    } else {
      step *= 0.5;
    }
  }
  return x;
}

}  // namespace detail

/// Independent brute-force distance bound: exhaustive search over a coarse control
/// alphabet, refined by pattern search under a penalty, then closed by a correction path.
/// Shares only the group law with estimate_distance.
inline DistanceEstimate grid_oracle(const Metric& g, const std::vector<double>& p, const std::vector<double>& q,
                                    const GridOracleOptions& opt = {}) {
  const int n = static_cast<int>(g.dim()), m = static_cast<int>(g.controls());
  const int segs = opt.segments;
  const double dt = 1.0 / segs;
  std::vector<double> inv_p = p;
  for (auto& v : inv_p) v = -v;
  const std::vector<double> gap = g.product(inv_p, q);
  const double size = std::max(1e-9, g.homogeneous_size(gap));
  std::vector<double> zero(n, 0.0);

  auto endpoint = [&](const Eigen::VectorXd& z) {
    std::vector<double> x = zero;
    for (int i = 0; i < segs; ++i) {
      const Eigen::VectorXd s = dt * (g.velocity * z.segment(i * m, m));
      x = g.product(x, std::vector<double>(s.data(), s.data() + n));
    }
    return x;
  };
  auto miss_of = [&](const Eigen::VectorXd& z) {
    std::vector<double> e = endpoint(z);
    for (auto& v : e) v = -v;
    return g.product(e, gap);
  };
  auto length = [&](const Eigen::VectorXd& z) {
    double l = 0;
    for (int i = 0; i < segs; ++i) l += dt * g.norm(z.segment(i * m, m));
    return l;
  };

  // Exhaustive stage: the first `ex` segments, each with duration segs/ex of the rest.
  int alphabet = 1;
  for (int a = 0; a < m; ++a) alphabet *= 3;
  int ex = 1;
  long long combos = alphabet;
  while (ex < segs && combos * alphabet <= opt.budget) {
    combos *= alphabet;
    ++ex;
  }
  Eigen::VectorXd best_z = Eigen::VectorXd::Zero(segs * m);
  double best_score = std::numeric_limits<double>::infinity();
  const int group = segs / ex;
  for (double amp : opt.amplitudes) {
    const double a = amp * size;
    for (long long code = 0; code < combos; ++code) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(segs * m);
      long long c = code;
      for (int i = 0; i < ex; ++i) {
        int letter = static_cast<int>(c % alphabet);
        c /= alphabet;
        Eigen::VectorXd u(m);
        for (int k = 0; k < m; ++k) {
          u(k) = a * ((letter % 3) - 1);
          letter /= 3;
        }
        const int hi = i + 1 == ex ? segs : (i + 1) * group;
        for (int s = i * group; s < hi; ++s) z.segment(s * m, m) = u;
      }
      const double score = length(z) + 10 * g.homogeneous_size(miss_of(z));
      if (score < best_score) {
        best_score = score;
        best_z = z;
      }
    }
  }

  // Pattern search on an augmented Lagrangian of the scaled mismatch.
  Eigen::VectorXd weights(n);
  for (int a = 0; a < n; ++a) weights(a) = std::pow(size, 1 - g.weights[a]);
  const Eigen::MatrixXd scaled = weights.asDiagonal() * g.graded_inverse;
  Eigen::VectorXd z = best_z, lambda = Eigen::VectorXd::Zero(n);
  double mu = 10 / size;
  for (int round = 0; round < 12; ++round) {
    auto f = [&](const Eigen::VectorXd& x) {
      const Eigen::VectorXd c = scaled * to_eigen(miss_of(x));
      return length(x) + lambda.dot(c) + 0.5 * mu * c.squaredNorm();
    };
    z = detail::pattern_search(f, z, (round == 0 ? 0.25 : 0.02) * size, opt.final_step * size);
    const Eigen::VectorXd c = scaled * to_eigen(miss_of(z));
    lambda += mu * c;
    if (c.norm() < 1e-12 * size) break;
    if (round % 3 == 2) mu *= 10;
  }

  DistanceEstimate out;
  const std::vector<double> miss = miss_of(z);
  out.mismatch = to_eigen(miss).norm();
  const Correction corr = correction_path(g, miss);
  if (!(corr.residual < 1e-9 * (1 + to_eigen(q).norm()))) return out;
  ControlPath path = ControlPath::uniform(static_cast<std::size_t>(segs), static_cast<std::size_t>(m));
  for (int i = 0; i < segs; ++i) path.controls[i] = z.segment(i * m, m);
  out.path_length = length(z);
  out.correction_length = corr.length;
  out.residual = corr.residual;
  out.value = out.path_length + corr.length;
  path.append(corr.path);
  out.path = std::move(path);
  out.best_start = 0;
  out.start_values = {out.value};
  return out;
}

}  // namespace lielab
