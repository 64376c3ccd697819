#pragma once

#include "lielab/algebra_file.hpp"
#include "lielab/lp.hpp"

#include <Eigen/Dense>

namespace lielab {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j).get_d();
  return out;
}

inline Eigen::VectorXd to_eigen(const Vec& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i].get_d();
  return out;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Facet normals {a : max over vertices of a.v = 1} of the symmetric hull of `points`
/// in R^m, found by brute force over m-subsets. Exact arithmetic.
inline std::vector<Vec> polytope_facets(const std::vector<Vec>& points_in, std::size_t m) {
  std::vector<Vec> pts;
  for (const auto& p : points_in) {
    if (is_zero(p)) continue;
    pts.push_back(p);
    pts.push_back(Rational(-1) * p);
  }
  if (Subspace::span(m, pts).dim() != m) throw Error("polytope vertices do not span the distribution");
  std::vector<Vec> facets;
  std::vector<std::size_t> idx(m);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
    if (depth == m) {
      Matrix a(m, m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) a(r, c) = pts[idx[r]][c];
      Matrix inv;
      try {
        inv = inverse(a);
      } catch (const Error&) {
        return;
      }
      Vec normal = inv.apply(Vec(m, Rational(1)));
      for (const auto& p : pts) {
        Rational d = 0;
        for (std::size_t c = 0; c < m; ++c) d += normal[c] * p[c];
        if (d > 1) return;
      }
      if (std::find(facets.begin(), facets.end(), normal) == facets.end()) facets.push_back(normal);
      return;
    }
    for (std::size_t i = start; i < pts.size(); ++i) {
      idx[depth] = i;
      rec(depth + 1, i + 1);
    }
  };
  rec(0, 0);
  return facets;
}

/// A norm on distribution coordinates w (the ambient vector is B w).
/// Quadratic kinds use a Gram matrix; the others are maxima of linear functionals.
class DistributionNorm {
 public:
  DistributionNorm() = default;
  DistributionNorm(const NormSpec& spec, const Subspace& delta) {
    const std::size_t m = delta.dim(), n = delta.ambient_dim();
    basis_ = Eigen::MatrixXd(n, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t i = 0; i < n; ++i) basis_(i, a) = delta.basis()[a][i].get_d();
    switch (spec.kind) {
      case NormKind::euclidean:
        quadratic_ = true;
        gram_ = basis_.transpose() * basis_;
        break;
      case NormKind::form: {
        const std::size_t k = spec.form.size();
        Eigen::MatrixXd q(k, k);
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c) q(r, c) = spec.form[r][c].get_d();
        if (k == n && k != m)
          q = basis_.transpose() * q * basis_;
        else if (k != m)
          throw Error("form(...) must be square of the distribution or algebra dimension");
        if ((q - q.transpose()).norm() > 1e-12) throw Error("form(...) must be symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(q);
        if (llt.info() != Eigen::Success) throw Error("form(...) must be positive definite");
        quadratic_ = true;
        gram_ = q;
        break;
      }
      case NormKind::l1: {
        for (unsigned s = 0; s < (1u << n); ++s) {
          Eigen::VectorXd sign(n);
          for (std::size_t i = 0; i < n; ++i) sign(i) = (s >> i) & 1u ? -1.0 : 1.0;
          functionals_.push_back(basis_.transpose() * sign);
        }
        break;
      }
      case NormKind::linf:
        for (std::size_t i = 0; i < n; ++i) {
          functionals_.push_back(basis_.row(i).transpose());
          functionals_.push_back(-basis_.row(i).transpose());
        }
        break;
      case NormKind::polytope: {
        std::vector<Vec> coords;
        for (const auto& v : spec.vertices) {
          auto c = delta.coordinates(v);
          if (!c) throw Error("polytope vertex lies outside the distribution");
          coords.push_back(*c);
        }
        for (const auto& f : polytope_facets(coords, m)) {
          functionals_.push_back(to_eigen(f));
          exact_facets_.push_back(f);
        }
        vertices_ = coords;
        break;
      }
    }
  }

  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  bool quadratic() const { return quadratic_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const std::vector<Eigen::VectorXd>& functionals() const { return functionals_; }
  const std::vector<Vec>& polytope_vertices() const { return vertices_; }

  double operator()(const Eigen::VectorXd& w) const {
    if (quadratic_) return std::sqrt(std::max(0.0, w.dot(gram_ * w)));
    double best = 0;
    for (const auto& f : functionals_) best = std::max(best, f.dot(w));
    return best;
  }

  /// Smooth surrogate of the squared norm and its gradient. tau > 0 softens the maximum.
  double smooth_square(const Eigen::VectorXd& w, double tau, Eigen::VectorXd* grad) const {
    if (quadratic_) {
      const Eigen::VectorXd qw = gram_ * w;
      if (grad) *grad = 2 * qw;
      return w.dot(qw);
    }
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(functionals_.size());
    for (std::size_t f = 0; f < functionals_.size(); ++f) {
      vals[f] = functionals_[f].dot(w) / tau;
      top = std::max(top, vals[f]);
    }
    double z = 0;
    for (auto& v : vals) z += (v = std::exp(v - top));
    const double value = tau * (top + std::log(z));
    if (grad) {
      grad->setZero(w.size());
      for (std::size_t f = 0; f < functionals_.size(); ++f) *grad += (vals[f] / z) * functionals_[f];
      *grad *= 2 * value;
    }
    return value * value;
  }

 private:
  Eigen::MatrixXd basis_;
  bool quadratic_ = false;
  Eigen::MatrixXd gram_;
  std::vector<Eigen::VectorXd> functionals_;
  std::vector<Vec> exact_facets_;
  std::vector<Vec> vertices_;
};

struct Lift {
  Eigen::VectorXd control;  // distribution coordinates
  double norm = 0;
};

/// Least-norm w with P w = v, where P maps distribution coordinates to some target space.
inline Lift minimal_lift(const DistributionNorm& norm, const Eigen::MatrixXd& p, const Eigen::VectorXd& v) {
  const Eigen::Index m = p.cols();
  // Reduce to independent equations.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-12 * std::max(1.0, sv(0))) ++r;
  const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd pr = u.transpose() * p;
  const Eigen::VectorXd vr = u.transpose() * v;
  if ((u * vr - v).norm() > 1e-9 * (1 + v.norm())) throw Error("lift target is outside the image");
  Lift out;
  if (norm.quadratic()) {
    const Eigen::MatrixXd qi = norm.gram().inverse();
    const Eigen::MatrixXd k = pr * qi * pr.transpose();
    out.control = qi * pr.transpose() * k.ldlt().solve(vr);
  } else {
    // Variables: w+ (m), w- (m), t, slacks (one per functional). min t.
    const auto& fs = norm.functionals();
    const Eigen::Index nf = static_cast<Eigen::Index>(fs.size());
    const Eigen::Index nv = 2 * m + 1 + nf;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r + nf, nv);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(r + nf);
    a.block(0, 0, r, m) = pr;
    a.block(0, m, r, m) = -pr;
    b.head(r) = vr;
    for (Eigen::Index f = 0; f < nf; ++f) {
      a.block(r + f, 0, 1, m) = fs[f].transpose();
      a.block(r + f, m, 1, m) = -fs[f].transpose();
      a(r + f, 2 * m) = -1;
      a(r + f, 2 * m + 1 + f) = 1;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c(2 * m) = 1;
    auto x = solve_lp(a, b, c);
    if (!x) throw Error("lift linear program failed");
    out.control = x->head(m) - x->segment(m, m);
  }
  out.norm = norm(out.control);
  return out;
}

}  // namespace lielab
