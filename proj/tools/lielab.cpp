#include "lielab/canned.hpp"
#include "lielab/oracle.hpp"
#include "lielab/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace lielab;

constexpr int exit_ok = 0;
constexpr int exit_verdict = 2;
constexpr int exit_input = 3;
constexpr int exit_solver = 4;

/// A path, or canned:NAME for a built-in example.
AlgebraFile load_input(const std::string& source) {
  if (source.rfind("canned:", 0) == 0) return canned(source.substr(7));
  return load_algebra(source);
}

std::vector<double> parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> out;
  for (const auto& part : detail::split(text, ',')) {
    const auto t = detail::trim(part);
    if (t.empty()) continue;
    out.push_back(parse_rational(t).get_d());
  }
  if (out.size() != dim)
    throw Error("point '" + text + "' has " + std::to_string(out.size()) + " coordinates, expected " +
                std::to_string(dim));
  return out;
}

std::pair<std::vector<double>, std::vector<double>> parse_pair(const std::string& text, std::size_t dim) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error("point pair '" + text + "' must look like p1,p2,...:q1,q2,...");
  return {parse_point(text.substr(0, colon), dim), parse_point(text.substr(colon + 1), dim)};
}

Side parse_side(const std::string& s) {
  if (s == "asymptotic") return Side::asymptotic;
  if (s == "tangent") return Side::tangent;
  throw Error("side must be asymptotic or tangent");
}

int write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return exit_ok;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-Finsler nilpotent Lie group laboratory: invariants, deformations and metric convergence"};
  app.require_subcommand(1);

  std::string input, grading = "asymptotic", beta_strategy = "coordinate";
  bool json = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Gradings, alpha and beta invariants; checks expect lines");
  analyze_cmd->add_option("input", input, "Algebra file or canned:NAME")->required();
  analyze_cmd->add_option("--grading", grading, "asymptotic, tangent or file")
      ->check(CLI::IsMember({"asymptotic", "tangent", "file"}));
  analyze_cmd->add_option("--beta-strategy", beta_strategy, "Search for the quotient ideal")
      ->check(CLI::IsMember({"coordinate"}));
  analyze_cmd->add_flag("--json", json, "Machine-readable output");

  std::string mode = "pansu", eps_grid = "0.05:1:8:log", out_path, side_name = "asymptotic";
  std::vector<std::string> points;
  int segments = 32, starts = 8, pair_count = 4;
  std::uint64_t seed = 1;
  double slack = 0.15;
  unsigned threads = 0;
  auto* converge_cmd = app.add_subcommand("converge", "Fit the rate at which the eps-metrics reach their limit");
  converge_cmd->add_option("input", input, "Algebra file or canned:NAME")->required();
  converge_cmd->add_option("--mode", mode, "pansu, mitchell or gronwall")
      ->check(CLI::IsMember({"pansu", "mitchell", "gronwall"}));
  converge_cmd->add_option("--eps-grid", eps_grid, "lo:hi:n[:log|lin]");
  converge_cmd->add_option("--points", points, "Point pair p1,...,pn:q1,...,qn (repeatable)");
  converge_cmd->add_option("--pairs", pair_count, "Number of default point pairs")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--segments", segments, "Control segments per path")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--starts", starts, "Optimizer starts per distance")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--seed", seed, "Seed for starts, points and gronwall controls");
  converge_cmd->add_option("--slack", slack, "Allowed shortfall of the fitted slope");
  converge_cmd->add_option("--side", side_name, "Side probed by gronwall mode")
      ->check(CLI::IsMember({"asymptotic", "tangent"}));
  converge_cmd->add_option("--threads", threads, "Worker threads (LIE_LAB_THREADS caps this)");
  converge_cmd->add_option("--out", out_path, "CSV destination (default: summary only)");

  double eps = 1;
  std::string p_text, q_text;
  bool oracle = false;
  auto* distance_cmd = app.add_subcommand("distance", "Upper bound on one distance with its witness length");
  distance_cmd->add_option("input", input, "Algebra file or canned:NAME")->required();
  distance_cmd->add_option("--eps", eps, "Scale in [0, 1]")->check(CLI::Range(0.0, 1.0));
  distance_cmd->add_option("--side", side_name, "asymptotic (contracted) or tangent (dilated)")
      ->check(CLI::IsMember({"asymptotic", "tangent"}));
  distance_cmd->add_option("-p", p_text, "Start point, comma separated (default origin)");
  distance_cmd->add_option("-q", q_text, "End point, comma separated")->required();
  distance_cmd->add_option("--segments", segments, "Control segments")->check(CLI::PositiveNumber);
  distance_cmd->add_option("--starts", starts, "Optimizer starts")->check(CLI::PositiveNumber);
  distance_cmd->add_option("--seed", seed, "Seed for starts");
  distance_cmd->add_flag("--oracle", oracle, "Also run the grid oracle");

  std::string fit_path;
  auto* fit_cmd = app.add_subcommand("fit", "Log-log slope of an epsilon,err table (CSV with a header)");
  fit_cmd->add_option("csv", fit_path, "File with epsilon and err columns")->required();

  std::string canned_name;
  auto* canned_cmd = app.add_subcommand("canned", "List built-in examples, or print one as an algebra file");
  canned_cmd->add_option("name", canned_name, "Example to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*analyze_cmd) {
      const AlgebraFile f = load_input(input);
      const GradingSource src = grading == "file"      ? GradingSource::file
                                : grading == "tangent" ? GradingSource::tangent
                                                       : GradingSource::asymptotic;
      const Analysis a = analyze(f, src);
      if (json)
        std::cout << analysis_json(a, f).dump(2) << "\n";
      else
        std::cout << analysis_text(a, f);
      return a.expectations_met() ? exit_ok : exit_verdict;
    }
    if (*converge_cmd) {
      const AlgebraFile f = load_input(input);
      ExperimentConfig cfg;
      cfg.mode = parse_mode(mode);
      cfg.gronwall_side = parse_side(side_name);
      cfg.eps_grid = parse_eps_grid(eps_grid);
      for (const auto& text : points) cfg.pairs.push_back(parse_pair(text, f.tensor.dim()));
      cfg.pair_count = pair_count;
      cfg.solver.segments = segments;
      cfg.solver.starts = starts;
      cfg.seed = seed;
      cfg.slack = slack;
      cfg.threads = threads;
      const ExperimentResult r = run_experiment(f, cfg);
      if (!out_path.empty()) write_output(out_path, experiment_csv(r));
      (out_path == "-" ? std::cerr : std::cout) << experiment_text(r);
      switch (r.verdict) {
        case Verdict::pass: return exit_ok;
        case Verdict::fail: return exit_verdict;
        case Verdict::unusable: return exit_solver;
      }
    }
    if (*distance_cmd) {
      const AlgebraFile f = load_input(input);
      const SubFinslerModel model = SubFinslerModel::from_file(f);
      const std::size_t n = f.tensor.dim();
      const auto p = p_text.empty() ? std::vector<double>(n, 0.0) : parse_point(p_text, n);
      const auto q = parse_point(q_text, n);
      const Metric g = model.metric(parse_side(side_name), eps);
      DistanceOptions opt;
      opt.segments = segments;
      opt.starts = starts;
      opt.seed = seed;
      const auto d = estimate_distance(g, p, q, opt);
      if (!d.ok()) {
        std::cerr << "no feasible path found\n";
        return exit_solver;
      }
      std::cout << "distance <= " << d.value << " (path " << d.path_length << ", correction " << d.correction_length
                << ", best start " << d.best_start << ")\n";
      if (oracle) {
        const auto o = grid_oracle(g, p, q);
        if (o.ok())
          std::cout << "grid oracle " << o.value << ", relative gap " << (o.value - d.value) / d.value << "\n";
        else
          std::cout << "grid oracle found no feasible path\n";
      }
      return exit_ok;
    }
    if (*fit_cmd) {
      std::ifstream in(fit_path);
      if (!in) throw Error("cannot read " + fit_path);
      std::string line;
      std::getline(in, line);
      const auto header = detail::split(line, ',');
      std::size_t ce = header.size(), cr = header.size();
      for (std::size_t i = 0; i < header.size(); ++i) {
        const auto h = detail::trim(header[i]);
        if (h == "epsilon" || h == "eps") ce = i;
        if (h == "err") cr = i;
      }
      if (ce == header.size() || cr == header.size()) throw Error("CSV header needs epsilon and err columns");
      std::vector<std::pair<double, double>> rows;
      while (std::getline(in, line)) {
        const auto cells = detail::split(line, ',');
        if (cells.size() <= std::max(ce, cr)) continue;
        try {
          rows.emplace_back(std::stod(cells[ce]), std::stod(cells[cr]));
        } catch (const std::exception&) {
        }
      }
      const ExponentFit fit = fit_exponent(rows);
      std::cout << "slope " << fit.slope << "\nintercept " << fit.intercept << "\nresidual " << fit.residual
                << "\nrows " << fit.used << "\n";
      return exit_ok;
    }
    if (*canned_cmd) {
      if (canned_name.empty()) {
        for (const auto& c : canned_library()) std::cout << c.name << "\n";
      } else {
        std::cout << serialize_algebra(canned(canned_name));
      }
      return exit_ok;
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_ok;
}
