#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>

namespace lielab {

/// min c.x subject to A x = b, x >= 0, by two-phase dense simplex with Bland's rule.
/// Sized for the handful of variables a norm lift needs.
inline std::optional<Eigen::VectorXd> solve_lp(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in,
                                               const Eigen::VectorXd& c, double tol = 1e-11) {
  const int m = static_cast<int>(a_in.rows()), n = static_cast<int>(a_in.cols());
  Eigen::MatrixXd a = a_in;
  Eigen::VectorXd b = b_in;
  for (int i = 0; i < m; ++i)
    if (b(i) < 0) {
      a.row(i) *= -1;
      b(i) *= -1;
    }
  // Tableau columns: n originals, m artificials, rhs.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = b;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  auto pivot = [&](int r, int col) {
    t.row(r) /= t(r, col);
    for (int i = 0; i <= m; ++i)
      if (i != r && std::abs(t(i, col)) > 0) t.row(i) -= t(i, col) * t.row(r);
    basis[r] = col;
  };
  auto run = [&](int allowed) {
    for (int iter = 0; iter < 5000; ++iter) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j)
        if (t(m, j) < -tol) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i)
        if (t(i, enter) > tol) {
          const double ratio = t(i, n + m) / t(i, enter);
          if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    return false;
  };
  // Phase one: minimise the sum of artificials.
  t.row(m).setZero();
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (int j = n; j < n + m; ++j) t(m, j) = 0;
  if (!run(n + m)) return std::nullopt;
  if (-t(m, n + m) > 1e-8 * (1 + b.cwiseAbs().maxCoeff())) return std::nullopt;  // infeasible
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n)
      for (int j = 0; j < n; ++j)
        if (std::abs(t(i, j)) > tol) {
          pivot(i, j);
          break;
        }
  // Phase two.
  t.row(m).setZero();
  t.row(m).head(n) = c.transpose();
  for (int i = 0; i < m; ++i)
    if (basis[i] < n && std::abs(t(m, basis[i])) > 0) t.row(m) -= t(m, basis[i]) * t.row(i);
  for (int j = n; j < n + m; ++j) t(m, j) = 0;
  if (!run(n)) return std::nullopt;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) x(basis[i]) = t(i, n + m);
  return x;
}

}  // namespace lielab
