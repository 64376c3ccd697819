#pragma once

#include "lielab/analyze.hpp"
#include "lielab/fit.hpp"
#include "lielab/probes.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace lielab {

enum class Mode { pansu, mitchell, gronwall };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::pansu: return "pansu";
    case Mode::mitchell: return "mitchell";
    case Mode::gronwall: return "gronwall";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "pansu") return Mode::pansu;
  if (s == "mitchell") return Mode::mitchell;
  if (s == "gronwall") return Mode::gronwall;
  throw Error("unknown mode '" + std::string(s) + "'");
}

/// lo:hi:n[:log|lin]
inline std::vector<double> parse_eps_grid(std::string_view spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() < 3 || parts.size() > 4) throw Error("eps grid must look like lo:hi:n[:log|lin]");
  double lo, hi;
  int n;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw Error("malformed eps grid '" + std::string(spec) + "'");
  }
  const bool log = parts.size() < 4 || parts[3] == "log";
  if (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin") throw Error("eps grid spacing must be log or lin");
  if (!(lo > 0) || !(hi <= 1) || !(lo <= hi) || n < 1) throw Error("eps grid needs 0 < lo <= hi <= 1 and n >= 1");
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    out.push_back(log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return out;
}

struct ExperimentConfig {
  Mode mode = Mode::pansu;
  /// Side probed in gronwall mode.
  Side gronwall_side = Side::asymptotic;
  std::vector<double> eps_grid = parse_eps_grid("0.05:1:8:log");
  /// Explicit point pairs; empty means the default spread points.
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  int pair_count = 4;
  DistanceOptions solver;
  std::uint64_t seed = 1;
  double slack = 0.15;
  /// Relative error counted as zero when the theory predicts exact agreement.
  double zero_tolerance = 1e-6;
  /// Fraction of failed rows above which the experiment is unusable.
  double failure_budget = 0.2;
  unsigned threads = 0;
};

struct ExperimentRow {
  double eps = 0;
  std::vector<double> p, q;
  double err = 0;
  bool ok = true;
  std::string note;
};

enum class Verdict { pass, fail, unusable };

struct ExperimentResult {
  Mode mode = Mode::pansu;
  std::vector<ExperimentRow> rows;
  /// Largest error over point pairs at each eps.
  std::vector<std::pair<double, double>> aggregated;
  std::optional<ExponentFit> fit;
  /// Predicted exponent; nullopt when the errors should vanish identically.
  std::optional<double> theory;
  std::string theory_label;
  Verdict verdict = Verdict::fail;
  std::size_t failed_rows = 0;
  std::string message;
};

inline unsigned worker_count(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIE_LAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, n);
}

/// Runs fn(i) for i in [0, count) on a small pool; fn must only touch its own slot.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < count;) fn(i);
  };
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (k <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < k; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

namespace detail {

inline std::vector<std::pair<std::vector<double>, std::vector<double>>> default_pairs(const Grading& g, int count,
                                                                                      std::uint64_t seed) {
  const auto targets = spread_points(g, static_cast<std::size_t>(count) * 2, seed, {1.0, 0.6, 0.8, 0.4});
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  for (int k = 0; k < count && 2 * k + 1 < static_cast<int>(targets.size()); ++k) {
    // Even pairs start at the origin; odd pairs start at a smaller dilated point.
    std::vector<double> p(g.weights().size(), 0.0);
    if (k % 2 == 1) p = dilate(g, 0.4, targets[2 * k + 1]);
    out.emplace_back(p, targets[2 * k]);
  }
  return out;
}

inline void finish(ExperimentResult& r, const ExperimentConfig& cfg) {
  const std::size_t total = r.rows.size();
  for (const auto& row : r.rows)
    if (!row.ok) ++r.failed_rows;
  std::map<double, double> worst;
  for (const auto& row : r.rows) {
    if (!row.ok) continue;
    auto [it, fresh] = worst.emplace(row.eps, row.err);
    if (!fresh) it->second = std::max(it->second, row.err);
  }
  r.aggregated.assign(worst.begin(), worst.end());
  if (total == 0 || static_cast<double>(r.failed_rows) > cfg.failure_budget * static_cast<double>(total)) {
    r.verdict = Verdict::unusable;
    r.message = std::to_string(r.failed_rows) + " of " + std::to_string(total) + " rows failed";
    return;
  }
  if (!r.theory) {
    double largest = 0;
    for (const auto& [eps, err] : r.aggregated) largest = std::max(largest, err);
    r.verdict = largest <= cfg.zero_tolerance ? Verdict::pass : Verdict::fail;
    r.message = "exact case: largest error " + std::to_string(largest);
    return;
  }
  try {
    r.fit = fit_exponent(r.aggregated);
  } catch (const Error& e) {
    // Errors below the floor at almost every eps: faster than any power law we can fit.
    std::size_t tiny = 0;
    for (const auto& [eps, err] : r.aggregated)
      if (err < 1e-9) ++tiny;
    if (tiny + 3 >= r.aggregated.size() && !r.aggregated.empty()) {
      r.verdict = Verdict::pass;
      r.message = "errors at the numerical floor";
    } else {
      r.verdict = Verdict::unusable;
      r.message = e.what();
    }
    return;
  }
  r.verdict = r.fit->slope >= *r.theory - cfg.slack ? Verdict::pass : Verdict::fail;
  r.message = "slope " + std::to_string(r.fit->slope) + " vs theory " + std::to_string(*r.theory) + " - " +
              std::to_string(cfg.slack);
}

}  // namespace detail

/// Measures how fast the eps-family of metrics (or flows) approaches its eps = 0 limit
/// and fits the log-log slope.
inline ExperimentResult run_experiment(const AlgebraFile& file, const ExperimentConfig& cfg) {
  const Analysis an = analyze(file, file.grading.empty() ? GradingSource::asymptotic : GradingSource::file);
  const SubFinslerModel model = SubFinslerModel::from_file(file);
  const bool nilpotent = an.algebra.nilpotency_step.has_value();
  ExperimentResult r;
  r.mode = cfg.mode;
  const unsigned threads = worker_count(cfg.threads);

  if (cfg.mode == Mode::gronwall) {
    const Side side = cfg.gronwall_side;
    if (side == Side::asymptotic && !nilpotent) throw Error("gronwall on the asymptotic side needs a nilpotent algebra");
    const SideReport& rep = side == Side::asymptotic ? *an.asymptotic : *an.tangent;
    const Extended a = side == Side::asymptotic ? *rep.alphas.alpha_inf : *rep.alphas.alpha0;
    if (!a.is_infinite()) r.theory = static_cast<double>(a.value());
    r.theory_label = side == Side::asymptotic ? "alpha_inf" : "alpha0";
    const ControlPath u = random_control(8, model.norm().dim(), cfg.seed);
    const auto table = gronwall_probe(model, side, u, cfg.eps_grid);
    const std::vector<double> origin(model.tensor().dim(), 0.0);
    const auto limit = flow(model.metric(side, 0.0), origin, u);
    for (const auto& [eps, gap] : table) {
      ExperimentRow row;
      row.eps = eps;
      row.p = origin;
      row.q = limit;
      row.err = gap;
      row.ok = std::isfinite(gap);
      r.rows.push_back(row);
    }
    detail::finish(r, cfg);
    return r;
  }

  const Side side = cfg.mode == Mode::pansu ? Side::asymptotic : Side::tangent;
  if (side == Side::asymptotic && !nilpotent) throw Error("pansu mode needs a nilpotent algebra");
  if (side == Side::tangent && !nilpotent)
    throw Error("mitchell mode is limited to nilpotent algebras, where the group law is exact");
  const SideReport& rep = side == Side::asymptotic ? *an.asymptotic : *an.tangent;
  r.theory = rep.rate();
  r.theory_label = side == Side::asymptotic ? "alpha_inf/beta" : "alpha0/beta";
  const Grading& grading = side == Side::asymptotic ? model.asymptotic().grading() : model.tangent().grading();
  const auto pairs = cfg.pairs.empty() ? detail::default_pairs(grading, cfg.pair_count, cfg.seed) : cfg.pairs;
  for (const auto& [p, q] : pairs)
    if (p.size() != model.tensor().dim() || q.size() != model.tensor().dim())
      throw Error("point dimension does not match the algebra");

  // Slot 0 of each pair is eps = 0; the rest follow the grid.
  std::vector<double> eps_all{0.0};
  eps_all.insert(eps_all.end(), cfg.eps_grid.begin(), cfg.eps_grid.end());
  const std::size_t ne = eps_all.size(), np = pairs.size();
  std::vector<DistanceEstimate> est(ne * np);
  std::vector<std::string> errors(ne * np);
  std::vector<Metric> metrics;
  for (double eps : eps_all) metrics.push_back(model.metric(side, eps));
  parallel_for(ne * np, threads, [&](std::size_t idx) {
    const std::size_t e = idx / np, k = idx % np;
    DistanceOptions opt = cfg.solver;
    opt.seed = cfg.seed * 7919 + k;
    try {
      est[idx] = estimate_distance(metrics[e], pairs[k].first, pairs[k].second, opt);
    } catch (const std::exception& ex) {
      errors[idx] = ex.what();
    }
  });
  for (std::size_t e = 1; e < ne; ++e)
    for (std::size_t k = 0; k < np; ++k) {
      ExperimentRow row;
      row.eps = eps_all[e];
      row.p = pairs[k].first;
      row.q = pairs[k].second;
      const auto& base = est[k];
      const auto& cur = est[e * np + k];
      row.ok = base.ok() && cur.ok();
      if (row.ok) {
        row.err = std::abs(cur.value - base.value);
        if (!r.theory) row.err /= std::max(base.value, 1e-12);
      } else {
        row.err = std::numeric_limits<double>::quiet_NaN();
        row.note = !errors[e * np + k].empty() ? errors[e * np + k]
                   : !errors[k].empty()        ? errors[k]
                                               : "solver found no feasible path";
      }
      r.rows.push_back(std::move(row));
    }
  detail::finish(r, cfg);
  return r;
}

inline std::string format_point(const std::vector<double>& x) {
  std::string s;
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g", x[i]);
    if (i) s += ';';
    s += buf;
  }
  return s;
}

/// CSV with header mode,epsilon,p,q,err,slope,theory; points are ';'-joined coordinates.
inline std::string experiment_csv(const ExperimentResult& r) {
  std::vector<const ExperimentRow*> rows;
  for (const auto& row : r.rows) rows.push_back(&row);
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow* a, const ExperimentRow* b) {
    if (a->eps != b->eps) return a->eps < b->eps;
    if (a->p != b->p) return a->p < b->p;
    return a->q < b->q;
  });
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  std::string out = "mode,epsilon,p,q,err,slope,theory\n";
  const std::string slope = r.fit ? num(r.fit->slope) : "";
  const std::string theory = r.theory ? num(*r.theory) : "inf";
  for (const auto* row : rows) {
    out += to_string(r.mode) + "," + num(row->eps) + "," + format_point(row->p) + "," + format_point(row->q) + "," +
           (row->ok ? num(row->err) : std::string("nan")) + "," + slope + "," + theory + "\n";
  }
  return out;
}

}  // namespace lielab
