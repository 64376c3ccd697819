#pragma once

#include "lielab/model.hpp"

#include <random>

namespace lielab {

struct DistanceOptions {
  int segments = 32;
  int starts = 8;
  std::uint64_t seed = 1;
  /// Starts that get the Newton polish after the first stage.
  int polished = 3;
  int outer_iterations = 30;
  int inner_iterations = 2000;
  int polish_iterations = 15;
};

struct DistanceEstimate {
  /// Length of a path that reaches the target: an upper bound on the distance.
  double value = std::numeric_limits<double>::infinity();
  double path_length = 0;
  double correction_length = 0;
  /// Euclidean endpoint mismatch before and after the correction tail.
  double mismatch = 0;
  double residual = 0;
  ControlPath path;
  int best_start = -1;
  /// Final value of every start that produced a feasible path (inf otherwise).
  std::vector<double> start_values;
  bool ok() const { return std::isfinite(value); }
};

namespace detail {

/// Energy sum t_i |w_i|^2 and endpoint constraint for a fixed segment count.
class PathProblem {
 public:
  PathProblem(const Metric& g, std::vector<double> x0, std::vector<double> target, int segments)
      : g_(g), x0_(std::move(x0)), target_(std::move(target)), segs_(segments),
        m_(static_cast<int>(g.controls())), n_(static_cast<int>(g.dim())) {
    dt_ = 1.0 / segs_;
    states_.assign(static_cast<std::size_t>(segs_ + 1), std::vector<double>(n_));
    steps_.assign(static_cast<std::size_t>(segs_), std::vector<double>(n_));
    tapes_.assign(static_cast<std::size_t>(segs_), std::vector<double>(g.product.tape_size()));
    work_.resize(g.product.tape_size());
    // Constraint in graded coordinates with weight-j rows divided by scale^(j-1).
    std::vector<double> inv_x0 = x0_;
    for (auto& v : inv_x0) v = -v;
    scale_ = std::max(1e-6, g.homogeneous_size(g.product(inv_x0, target_)));
    Eigen::VectorXd d(n_);
    for (int a = 0; a < n_; ++a) d(a) = std::pow(scale_, 1 - g.weights[a]);
    constraint_map_ = d.asDiagonal() * g.graded_inverse;
  }

  int size() const { return segs_ * m_; }
  int constraints() const { return n_; }
  double scale() const { return scale_; }
  double tau = 1e-3;

  Eigen::Map<const Eigen::VectorXd> control(const Eigen::VectorXd& z, int i) const {
    return Eigen::Map<const Eigen::VectorXd>(z.data() + i * m_, m_);
  }

  /// Runs the flow; returns the scaled constraint value.
  Eigen::VectorXd constraint(const Eigen::VectorXd& z) {
    states_[0] = x0_;
    for (int i = 0; i < segs_; ++i) {
      const Eigen::VectorXd s = dt_ * (g_.velocity * control(z, i));
      std::copy(s.data(), s.data() + n_, steps_[i].begin());
      g_.product.forward(states_[i].data(), steps_[i].data(), states_[i + 1].data(), tapes_[i].data());
    }
    Eigen::VectorXd diff(n_);
    for (int k = 0; k < n_; ++k) diff(k) = states_[segs_][k] - target_[k];
    return constraint_map_ * diff;
  }

  const std::vector<double>& endpoint() const { return states_[segs_]; }

  /// Gradient of adjoint . constraint, using the last constraint() call.
  Eigen::VectorXd vjp(const Eigen::VectorXd& adjoint) {
    Eigen::VectorXd gp = constraint_map_.transpose() * adjoint;
    std::vector<double> gx(n_), gs(n_), cur(gp.data(), gp.data() + n_);
    Eigen::VectorXd out(size());
    for (int i = segs_; i-- > 0;) {
      std::fill(gx.begin(), gx.end(), 0.0);
      std::fill(gs.begin(), gs.end(), 0.0);
      g_.product.backward(states_[i].data(), steps_[i].data(), tapes_[i].data(), cur.data(), gx.data(),
                          gs.data(), work_.data());
      out.segment(i * m_, m_) = dt_ * (g_.velocity.transpose() * to_eigen(gs));
      cur = gx;
    }
    return out;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd&) {
    Eigen::MatrixXd j(n_, size());
    for (int k = 0; k < n_; ++k) j.row(k) = vjp(Eigen::VectorXd::Unit(n_, k)).transpose();
    return j;
  }

  double energy(const Eigen::VectorXd& z, Eigen::VectorXd* grad) const {
    double e = 0;
    if (grad) grad->resize(size());
    Eigen::VectorXd gi;
    for (int i = 0; i < segs_; ++i) {
      e += dt_ * g_.norm.smooth_square(control(z, i), tau, grad ? &gi : nullptr);
      if (grad) grad->segment(i * m_, m_) = dt_ * gi;
    }
    return e;
  }

  double length(const Eigen::VectorXd& z) const {
    double l = 0;
    for (int i = 0; i < segs_; ++i) l += dt_ * g_.norm(control(z, i));
    return l;
  }

  ControlPath path(const Eigen::VectorXd& z) const {
    ControlPath p = ControlPath::uniform(static_cast<std::size_t>(segs_), static_cast<std::size_t>(m_));
    for (int i = 0; i < segs_; ++i) p.controls[i] = control(z, i);
    return p;
  }

 private:
  const Metric& g_;
  std::vector<double> x0_, target_;
  int segs_, m_, n_;
  double dt_, scale_;
  Eigen::MatrixXd constraint_map_;
  std::vector<std::vector<double>> states_, steps_, tapes_;
  std::vector<double> work_;
};

/// Limited-memory BFGS with backtracking; f returns value and fills the gradient.
template <class F>
Eigen::VectorXd lbfgs(F&& f, Eigen::VectorXd x, int max_iter, double gtol) {
  const int mem = 10;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho;
  Eigen::VectorXd g;
  double fx = f(x, g);
  for (int it = 0; it < max_iter && g.lpNorm<Eigen::Infinity>() > gtol; ++it) {
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    double gamma = s_hist.empty() ? 1.0 / std::max(1.0, g.norm()) : s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Eigen::VectorXd d = -gamma * q;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho[k] * y_hist[k].dot(d);
      d += s_hist[k] * (-alpha[k] - beta);
    }
    double slope = g.dot(d);
    if (slope >= 0) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho.clear();
    }
    double step = 1;
    Eigen::VectorXd xn, gn;
    double fn = 0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * d;
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    const Eigen::VectorXd s = xn - x, y = gn - g;
    if (s.dot(y) > 1e-14 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho.push_back(1.0 / s.dot(y));
      if (static_cast<int>(s_hist.size()) > mem) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho.erase(rho.begin());
      }
    }
    const double change = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    if (change <= 1e-15 * (1 + std::abs(fx))) break;
  }
  return x;
}

struct StageResult {
  Eigen::VectorXd z, lambda;
  double violation = std::numeric_limits<double>::infinity();
};

/// Augmented Lagrangian continuation from a starting control.
inline StageResult augmented_lagrangian(PathProblem& pb, Eigen::VectorXd z, const DistanceOptions& opt) {
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(pb.constraints());
  double kappa = 10.0 / (pb.scale() * pb.scale());
  const double scale2 = pb.scale() * pb.scale();
  double prev = std::numeric_limits<double>::infinity();
  pb.tau = 0.05 * pb.scale();
  for (int outer = 0; outer < opt.outer_iterations; ++outer) {
    auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const Eigen::VectorXd c = pb.constraint(x);
      Eigen::VectorXd ge;
      const double e = pb.energy(x, &ge);
      const Eigen::VectorXd adj = lambda + kappa * c;
      g = ge + pb.vjp(adj);
      return e + lambda.dot(c) + 0.5 * kappa * c.squaredNorm();
    };
    z = lbfgs(f, z, opt.inner_iterations, 1e-9 * scale2);
    const Eigen::VectorXd c = pb.constraint(z);
    const double viol = c.lpNorm<Eigen::Infinity>();
    lambda += kappa * c;
    if (viol > 0.25 * prev) kappa *= 10;
    prev = viol;
    pb.tau = std::max(pb.tau * 0.2, 1e-5 * pb.scale());
    if (viol < 1e-9 * pb.scale() && outer >= 2) break;
  }
  StageResult r;
  r.z = z;
  r.lambda = lambda;
  r.violation = pb.constraint(z).lpNorm<Eigen::Infinity>();
  return r;
}

/// Newton iterations on the optimality system with a finite-difference Lagrangian Hessian.
inline StageResult newton_polish(PathProblem& pb, StageResult st, int iterations) {
  const int nv = pb.size(), nc = pb.constraints();
  Eigen::VectorXd z = st.z, lambda = st.lambda;
  double mu = 1;
  auto lagrangian_grad = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& lam) {
    pb.constraint(x);
    Eigen::VectorXd ge;
    pb.energy(x, &ge);
    return Eigen::VectorXd(ge + pb.vjp(lam));
  };
  auto merit = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd c = pb.constraint(x);
    return pb.energy(x, nullptr) + mu * c.lpNorm<1>();
  };
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd c = pb.constraint(z);
    const Eigen::MatrixXd jac = pb.jacobian(z);
    Eigen::VectorXd ge;
    pb.energy(z, &ge);
    Eigen::MatrixXd w(nv, nv);
    const double h = 1e-6 * std::max(1.0, z.lpNorm<Eigen::Infinity>());
    for (int k = 0; k < nv; ++k) {
      Eigen::VectorXd zp = z, zm = z;
      zp(k) += h;
      zm(k) -= h;
      w.col(k) = (lagrangian_grad(zp, lambda) - lagrangian_grad(zm, lambda)) / (2 * h);
    }
    w = 0.5 * (w + w.transpose()).eval();
    // Make the Hessian positive on the null space of the constraint Jacobian.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(jac.transpose());
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd zb = q.rightCols(nv - nc);
    double shift = 0;
    for (int tries = 0; tries < 60; ++tries) {
      const Eigen::MatrixXd red = zb.transpose() * (w + shift * Eigen::MatrixXd::Identity(nv, nv)) * zb;
      Eigen::LLT<Eigen::MatrixXd> llt(red);
      if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 1e-10) break;
      shift = shift == 0 ? 1e-8 * std::max(1.0, w.norm()) : shift * 4;
    }
    w += shift * Eigen::MatrixXd::Identity(nv, nv);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nv + nc, nv + nc);
    kkt.topLeftCorner(nv, nv) = w;
    kkt.topRightCorner(nv, nc) = jac.transpose();
    kkt.bottomLeftCorner(nc, nv) = jac;
    Eigen::VectorXd rhs(nv + nc);
    rhs.head(nv) = -ge;
    rhs.tail(nc) = -c;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    const Eigen::VectorXd d = sol.head(nv);
    const Eigen::VectorXd lam_new = sol.tail(nc);
    mu = std::max(mu, 2 * lam_new.lpNorm<Eigen::Infinity>() + 1e-6);
    const double m0 = merit(z);
    const double slope = ge.dot(d) - mu * c.lpNorm<1>();
    double step = 1;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const double m1 = merit(z + step * d);
      if (m1 <= m0 + 1e-4 * step * std::min(slope, 0.0) || (m1 <= m0 && step == 1)) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    z += step * d;
    lambda = step == 1 ? lam_new : Eigen::VectorXd(lambda + step * (lam_new - lambda));
    if (step == 1 && d.norm() < 1e-11 * (1 + z.norm())) break;
  }
  st.z = z;
  st.lambda = lambda;
  st.violation = pb.constraint(z).lpNorm<Eigen::Infinity>();
  return st;
}

inline ControlPath inverse_path(const ControlPath& p) {
  ControlPath r;
  for (std::size_t i = p.size(); i-- > 0;) {
    r.durations.push_back(p.durations[i]);
    r.controls.push_back(-p.controls[i]);
  }
  return r;
}

}  // namespace detail

struct Correction {
  ControlPath path;
  double length = 0;
  double residual = 0;
};

/// Path from the origin to `target` built from iterated group commutators of the
/// distribution directions, repeated until the endpoint matches to rounding.
/// Intended for small targets; its length scales like the homogeneous size.
inline Correction correction_path(const Metric& g, const std::vector<double>& target, int passes = 8) {
  const int n = static_cast<int>(g.dim()), m = static_cast<int>(g.controls());
  Correction out;
  std::vector<double> zero(n, 0.0);
  auto residual_of = [&](const ControlPath& p) {
    std::vector<double> e = p.size() ? flow(g, zero, p) : zero;
    for (auto& v : e) v = -v;
    return g.product(e, target);
  };
  std::vector<double> r = residual_of(out.path);
  const double tnorm = to_eigen(target).norm();
  if (to_eigen(r).norm() <= 1e-15 * (1 + tnorm)) {
    out.residual = to_eigen(r).norm();
    return out;
  }
  // Words [u_{a1}, [u_{a2}, ...]] whose values form a basis.
  std::vector<std::vector<int>> words;
  std::vector<std::vector<double>> values;
  std::vector<Eigen::VectorXd> ortho;
  auto try_add = [&](const std::vector<int>& w, const std::vector<double>& v) {
    Eigen::VectorXd x = to_eigen(v);
    const double norm0 = x.norm();
    if (norm0 < 1e-12) return;
    for (const auto& o : ortho) x -= o.dot(x) * o;
    if (x.norm() < 1e-9 * norm0) return;
    ortho.push_back(x.normalized());
    words.push_back(w);
    values.push_back(v);
  };
  std::vector<std::pair<std::vector<int>, std::vector<double>>> level;
  for (int a = 0; a < m; ++a) {
    const Eigen::VectorXd u = g.velocity.col(a);
    std::vector<double> v(u.data(), u.data() + n);
    try_add({a}, v);
    level.push_back({{a}, v});
  }
  for (int len = 2; static_cast<int>(words.size()) < n && len <= 12; ++len) {
    std::vector<std::pair<std::vector<int>, std::vector<double>>> next;
    for (int a = 0; a < m; ++a)
      for (const auto& [w, v] : level) {
        std::vector<int> nw{a};
        nw.insert(nw.end(), w.begin(), w.end());
        const Eigen::VectorXd u = g.velocity.col(a);
        auto b = g.product.bracket(std::vector<double>(u.data(), u.data() + n), v);
        if (to_eigen(b).norm() < 1e-12) continue;
        try_add(nw, b);
        next.push_back({nw, b});
      }
    level = std::move(next);
    if (level.size() > 4096) level.resize(4096);
  }
  if (static_cast<int>(words.size()) < n) throw Error("distribution does not generate the algebra numerically");
  Eigen::MatrixXd basis(n, n);
  for (int k = 0; k < n; ++k) basis.col(k) = to_eigen(values[k]);
  const auto lu = basis.fullPivLu();

  std::function<ControlPath(const std::vector<int>&, std::size_t, double, bool)> build =
      [&](const std::vector<int>& w, std::size_t from, double h, bool negate) {
        ControlPath leaf;
        leaf.durations.push_back(1.0);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
        c(w[from]) = negate ? -h : h;
        leaf.controls.push_back(c);
        if (from + 1 == w.size()) return leaf;
        const ControlPath rest = build(w, from + 1, h, false);
        ControlPath p = leaf;
        p.append(rest);
        p.append(detail::inverse_path(leaf));
        p.append(detail::inverse_path(rest));
        return p;
      };
  double best = to_eigen(r).norm();
  for (int pass = 0; pass < passes; ++pass) {
    const Eigen::VectorXd coef = lu.solve(to_eigen(r));
    ControlPath add;
    for (int k = 0; k < n; ++k) {
      if (coef(k) == 0) continue;
      const double len = static_cast<double>(words[k].size());
      add.append(build(words[k], 0, std::pow(std::abs(coef(k)), 1.0 / len), coef(k) < 0));
    }
    ControlPath trial = out.path;
    trial.append(add);
    const auto rn = residual_of(trial);
    const double rnorm = to_eigen(rn).norm();
    if (!(rnorm < best)) break;
    out.path = std::move(trial);
    r = rn;
    best = rnorm;
    if (best <= 1e-15 * (1 + tnorm)) break;
  }
  out.length = path_length(g, out.path);
  out.residual = best;
  return out;
}

/// Upper bound on the distance from p to q: multi-start optimisation over piecewise
/// constant controls, then an explicit correction tail so the path truly reaches q.
inline DistanceEstimate estimate_distance(const Metric& g, const std::vector<double>& p,
                                          const std::vector<double>& q, const DistanceOptions& opt = {}) {
  if (g.radius > 0 && (to_eigen(p).norm() > g.radius || to_eigen(q).norm() > g.radius))
    throw Error("points lie outside the neighbourhood where the truncated group law is used");
  DistanceEstimate best;
  detail::PathProblem pb(g, p, q, opt.segments);
  const int nv = pb.size();
  const int m = static_cast<int>(g.controls());
  std::vector<double> inv_p = p;
  for (auto& v : inv_p) v = -v;
  const Eigen::VectorXd gap = to_eigen(g.product(inv_p, q));
  if (gap.norm() == 0) {
    best.value = 0;
    best.start_values = {0};
    best.best_start = 0;
    best.path = ControlPath::uniform(0, g.controls());
    return best;
  }
  const Eigen::VectorXd straight =
      g.velocity.completeOrthogonalDecomposition().pseudoInverse() * gap;
  std::vector<detail::StageResult> stage;
  for (int s = 0; s < opt.starts; ++s) {
    std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(nv);
    for (int k = 0; k < nv; ++k) z(k) = normal(rng);
    if (s == 0) {
      z *= 1e-2 * pb.scale();
      for (int i = 0; i < opt.segments; ++i) z.segment(i * m, m) += straight;
    } else {
      z *= pb.scale() * (0.5 + 0.5 * s / std::max(1, opt.starts - 1));
    }
    stage.push_back(detail::augmented_lagrangian(pb, z, opt));
  }
  std::vector<int> order(stage.size());
  std::iota(order.begin(), order.end(), 0);
  auto rank = [&](int k) {
    const double v = stage[k].violation;
    return pb.length(stage[k].z) + (v < 1e-4 ? 0.0 : 1e6 * (1 + v));
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rank(a) < rank(b); });
  best.start_values.assign(stage.size(), std::numeric_limits<double>::infinity());
  // Closes the remaining gap of a candidate; returns false when it is too far off.
  struct Closed {
    double length = 0, mismatch = 0;
    Correction corr;
  };
  auto close = [&](const Eigen::VectorXd& z) -> std::optional<Closed> {
    pb.constraint(z);
    std::vector<double> inv_end = pb.endpoint();
    for (auto& v : inv_end) v = -v;
    const std::vector<double> miss = g.product(inv_end, q);
    Closed c;
    c.mismatch = to_eigen(miss).norm();
    if (!(c.mismatch < 1e-2 * (1 + to_eigen(q).norm()))) return std::nullopt;
    c.corr = correction_path(g, miss);
    if (!(c.corr.residual < 1e-9 * (1 + to_eigen(q).norm()))) return std::nullopt;
    c.length = pb.length(z);
    return c;
  };
  for (int rank_pos = 0; rank_pos < static_cast<int>(order.size()); ++rank_pos) {
    const int k = order[rank_pos];
    Eigen::VectorXd z = stage[k].z;
    auto closed = close(z);
    if (rank_pos < opt.polished) {
      // The polish can trade feasibility for length; keep whichever closes shorter.
      const detail::StageResult pol = detail::newton_polish(pb, stage[k], opt.polish_iterations);
      auto alt = close(pol.z);
      if (alt && (!closed || alt->length + alt->corr.length < closed->length + closed->corr.length)) {
        closed = alt;
        z = pol.z;
      }
    }
    if (!closed) continue;
    const double value = closed->length + closed->corr.length;
    best.start_values[k] = value;
    if (value < best.value) {
      best.value = value;
      best.path_length = closed->length;
      best.correction_length = closed->corr.length;
      best.mismatch = closed->mismatch;
      best.residual = closed->corr.residual;
      best.best_start = k;
      best.path = pb.path(z);
      best.path.append(closed->corr.path);
    }
  }
  return best;
}

}  // namespace lielab
