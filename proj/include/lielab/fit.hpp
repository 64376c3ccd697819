#pragma once

#include "lielab/rational.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace lielab {

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  /// Root mean square of the log-log residuals.
  double residual = 0;
  std::size_t used = 0;
};

/// Least squares of log(err) on log(eps). Rows with err below `floor` (or eps <= 0) are dropped.
inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& rows, double floor = 1e-9) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [eps, err] : rows)
    if (eps > 0 && std::isfinite(err) && err >= floor) pts.emplace_back(std::log(eps), std::log(err));
  if (pts.size() < 4) throw Error("exponent fit needs at least 4 usable rows, got " + std::to_string(pts.size()));
  const double k = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) throw Error("exponent fit needs distinct epsilon values");
  ExponentFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : pts) ss += std::pow(y - f.intercept - f.slope * x, 2);
  f.residual = std::sqrt(ss / k);
  f.used = pts.size();
  return f;
}

}  // namespace lielab
