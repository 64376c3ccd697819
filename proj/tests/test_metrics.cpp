#include "lielab/oracle.hpp"
#include "lielab/probes.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lielab;
using namespace testing_support;

namespace {

DistanceOptions quick(int segments = 16, int starts = 4) {
  DistanceOptions o;
  o.segments = segments;
  o.starts = starts;
  o.polished = 2;
  return o;
}

}  // namespace

TEST(Lp, SmallProgram) {
  // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
  Eigen::MatrixXd a(2, 4);
  a << 1, 2, 1, 0, 3, 1, 0, 1;
  Eigen::VectorXd b(2), c(4);
  b << 4, 6;
  c << -1, -1, 0, 0;
  const auto x = solve_lp(a, b, c);
  ASSERT_TRUE(x);
  EXPECT_NEAR((*x)(0), 1.6, 1e-10);
  EXPECT_NEAR((*x)(1), 1.2, 1e-10);
}

TEST(Lp, InfeasibleProgram) {
  Eigen::MatrixXd a(2, 1);
  a << 1, 1;
  Eigen::VectorXd b(2), c(1);
  b << 1, 2;
  c << 1;
  EXPECT_FALSE(solve_lp(a, b, c));
}

TEST(Norm, KindsEvaluate) {
  const auto delta = Subspace::full(2);
  Eigen::Vector2d w(3, -4);
  EXPECT_NEAR(DistributionNorm({NormKind::euclidean, {}, {}}, delta)(w), 5, 1e-12);
  EXPECT_NEAR(DistributionNorm({NormKind::l1, {}, {}}, delta)(w), 7, 1e-12);
  EXPECT_NEAR(DistributionNorm({NormKind::linf, {}, {}}, delta)(w), 4, 1e-12);
  NormSpec form{NormKind::form, {{4, 0}, {0, 1}}, {}};
  EXPECT_NEAR(DistributionNorm(form, delta)(w), std::sqrt(36 + 16), 1e-12);
  // Square with vertices (+-1, +-1): the linf ball.
  NormSpec square{NormKind::polytope, {}, {{1, 1}, {1, -1}}};
  EXPECT_NEAR(DistributionNorm(square, delta)(w), 4, 1e-12);
}

TEST(Norm, SmoothSquareApproachesNorm) {
  const DistributionNorm n({NormKind::l1, {}, {}}, Subspace::full(3));
  Eigen::Vector3d w(0.3, -1.2, 0.5);
  Eigen::VectorXd g;
  const double exact = n(w);
  EXPECT_NEAR(std::sqrt(n.smooth_square(w, 1e-6, &g)), exact, 1e-4);
  // Gradient against central differences at a moderate smoothing.
  const double tau = 0.1, h = 1e-6;
  n.smooth_square(w, tau, &g);
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d p = w, m = w;
    p(k) += h;
    m(k) -= h;
    EXPECT_NEAR(g(k), (n.smooth_square(p, tau, nullptr) - n.smooth_square(m, tau, nullptr)) / (2 * h), 1e-6);
  }
}

TEST(Norm, PolytopeFacetsOfHexagon) {
  const std::vector<Vec> pts{{1, 0}, {0, 1}, {1, 1}};
  const auto facets = polytope_facets(pts, 2);
  EXPECT_EQ(facets.size(), 6u);
}

TEST(Norm, MinimalLiftExamples) {
  // Riemannian Heisenberg: lifting e1 through the first-layer projection gives e1.
  const auto model = SubFinslerModel::from_file(canned("heis_riem"));
  const Eigen::MatrixXd proj = first_layer_projection(model.asymptotic().grading()) * model.norm().basis();
  const Lift l = minimal_lift(model.norm(), proj, Eigen::Vector3d(1, 0, 0));
  EXPECT_NEAR((l.control - Eigen::Vector3d(1, 0, 0)).norm(), 0, 1e-12);
  EXPECT_NEAR(l.norm, 1, 1e-12);
  // Polyhedral norm lift through the same projection: the LP drops the e3 part.
  auto f = canned("heis_riem");
  f.norm.kind = NormKind::l1;
  const auto m1 = SubFinslerModel::from_file(f);
  const Lift l1 = minimal_lift(m1.norm(), proj, Eigen::Vector3d(0.5, -0.25, 0));
  EXPECT_NEAR(l1.norm, 0.75, 1e-10);
}

TEST(Flow, PlanMatchesExactDynkinProduct) {
  std::mt19937_64 rng(6);
  for (const char* name : {"n522", "n521", "heis_x_n522"}) {
    const auto f = canned(name);
    const ProductPlan plan(to_numeric(f.tensor), bch_table(*nilpotency_step(f.tensor)));
    const std::size_t n = f.tensor.dim();
    const Vec x = random_vec(rng, n), y = random_vec(rng, n);
    const Vec exact = group_product(f.tensor, x, y);
    std::vector<double> xd, yd;
    for (std::size_t i = 0; i < n; ++i) {
      xd.push_back(x[i].get_d());
      yd.push_back(y[i].get_d());
    }
    const auto got = plan(xd, yd);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], exact[i].get_d(), 1e-12) << name;
  }
}

TEST(Flow, ReverseModeMatchesFiniteDifferences) {
  const auto f = canned("n522");
  const ProductPlan plan(to_numeric(f.tensor), bch_table(3));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> x(5), y(5), gout(5);
  for (auto* v : {&x, &y, &gout})
    for (auto& e : *v) e = normal(rng);
  std::vector<double> out(5), tape(plan.tape_size()), work(plan.tape_size()), gx(5, 0.0), gy(5, 0.0);
  plan.forward(x.data(), y.data(), out.data(), tape.data());
  plan.backward(x.data(), y.data(), tape.data(), gout.data(), gx.data(), gy.data(), work.data());
  auto dot_out = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const auto o = plan(a, b);
    double s = 0;
    for (int i = 0; i < 5; ++i) s += o[i] * gout[i];
    return s;
  };
  const double h = 1e-6;
  for (int k = 0; k < 5; ++k) {
    auto xp = x, xm = x, yp = y, ym = y;
    xp[k] += h;
    xm[k] -= h;
    yp[k] += h;
    ym[k] -= h;
    EXPECT_NEAR(gx[k], (dot_out(xp, y) - dot_out(xm, y)) / (2 * h), 1e-7);
    EXPECT_NEAR(gy[k], (dot_out(x, yp) - dot_out(x, ym)) / (2 * h), 1e-7);
  }
}

TEST(Flow, AgreesWithIndependentOdeIntegration) {
  for (const char* name : {"heis_riem", "n522", "filiform_v1_v3"}) {
    const auto model = SubFinslerModel::from_file(canned(name));
    const int step = *nilpotency_step(model.tensor());
    for (double eps : {1.0, 0.5, 0.0}) {
      const Metric g = model.pansu(eps);
      const ControlPath u = random_control(5, g.controls(), 3, 0.8);
      const std::vector<double> x0(g.dim(), 0.1);
      const auto exact = flow(g, x0, u);
      const auto ode = ode_flow(model.asymptotic().at_numeric(eps), g.velocity, x0, u, step, 400);
      const double scale = to_eigen(exact).norm();
      EXPECT_LT((to_eigen(exact) - to_eigen(ode)).norm() / scale, 1e-9) << name << " eps " << eps;
    }
  }
}

TEST(Flow, HeisenbergSquareReachesCenter) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const Metric g = model.pansu(1);
  ControlPath p;
  for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}) {
    p.durations.push_back(1);
    p.controls.push_back(Eigen::Vector2d(a, b));
  }
  const auto end = flow(g, {0, 0, 0}, p);
  EXPECT_NEAR(end[0], 0, 1e-15);
  EXPECT_NEAR(end[1], 0, 1e-15);
  EXPECT_NEAR(end[2], 1, 1e-15);
  EXPECT_EQ(flow(g, {1, 2, 3}, ControlPath::uniform(3, 2)), (std::vector<double>{1, 2, 3}));
}

TEST(Distance, AbelianIsStraightLine) {
  const auto model = SubFinslerModel::from_file(canned("abelian"));
  const Metric g = model.pansu(1);
  const auto d = estimate_distance(g, {1, 0, 2}, {0, 2, 0}, quick(8, 2));
  ASSERT_TRUE(d.ok());
  EXPECT_NEAR(d.value, 3, 1e-6);
}

TEST(Distance, ValueIsTheLengthOfAWitnessThatArrives) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const Metric g = model.pansu(1);
  const std::vector<double> p{0.2, -0.1, 0.3}, q{-0.3, 0.4, -0.2};
  const auto d = estimate_distance(g, p, q, quick());
  ASSERT_TRUE(d.ok());
  EXPECT_NEAR(path_length(g, d.path), d.value, 1e-12);
  const auto end = flow(g, p, d.path);
  EXPECT_LT((to_eigen(end) - to_eigen(q)).norm(), 1e-9);
}

TEST(Distance, HeisenbergCenterNearIsoperimetricValue) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const auto d = estimate_distance(model.pansu(0), {0, 0, 0}, {0, 0, 1}, quick(32, 4));
  // Shortest loop enclosing area 1 has length sqrt(4 pi); a 32-gon is slightly longer.
  EXPECT_GT(d.value, std::sqrt(4 * M_PI) - 1e-9);
  EXPECT_LT(d.value, std::sqrt(4 * M_PI) * 1.003);
}

TEST(Distance, SymmetryTriangleAndLeftInvariance) {
  const auto model = SubFinslerModel::from_file(canned("heis_riem"));
  const Metric g = model.pansu(0.5);
  const std::vector<double> a{0, 0, 0}, b{0.4, -0.2, 0.5}, c{-0.3, 0.3, -0.1};
  const DistanceOptions o = quick();
  const double ab = estimate_distance(g, a, b, o).value, ba = estimate_distance(g, b, a, o).value;
  const double bc = estimate_distance(g, b, c, o).value, ac = estimate_distance(g, a, c, o).value;
  const double tol = 2e-3;
  EXPECT_NEAR(ab, ba, tol * ab);
  EXPECT_LE(ac, ab + bc + tol);
  std::vector<double> inv_b = b;
  for (auto& x : inv_b) x = -x;
  const double moved = estimate_distance(g, a, g.product(inv_b, c), o).value;
  EXPECT_NEAR(moved, bc, tol * bc);
}

TEST(Distance, CorrectionPathReachesSmallTargets) {
  for (const char* name : {"carnot_heis", "n522", "n521"}) {
    const auto model = SubFinslerModel::from_file(canned(name));
    const Metric g = model.pansu(1);
    std::vector<double> target(g.dim(), 0.0);
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = 1e-3 * (static_cast<double>(i % 3) - 0.7);
    const Correction c = correction_path(g, target);
    const auto end = flow(g, std::vector<double>(g.dim(), 0.0), c.path);
    EXPECT_LT((to_eigen(end) - to_eigen(target)).norm(), 1e-12) << name;
    EXPECT_NEAR(c.length, path_length(g, c.path), 1e-15);
    // Its length scales like the homogeneous size.
    EXPECT_LT(c.length, 60 * g.homogeneous_size(target)) << name;
  }
}

TEST(Distance, CarnotMetricDoesNotDependOnEps) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const std::vector<double> q{0.3, 0.2, 0.4};
  const double d1 = estimate_distance(model.pansu(1), {0, 0, 0}, q, quick()).value;
  for (double eps : {0.0, 0.25, 0.5}) {
    const double d = estimate_distance(model.pansu(eps), {0, 0, 0}, q, quick()).value;
    EXPECT_NEAR(d, d1, 1e-6 * d1);
  }
}

TEST(Distance, GridOracleAgrees) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const Metric g = model.pansu(1);
  const std::vector<double> q{0.5, -0.3, 0.6};
  const auto d = estimate_distance(g, {0, 0, 0}, q, quick(6, 6));
  const auto o = grid_oracle(g, {0, 0, 0}, q);
  ASSERT_TRUE(d.ok() && o.ok());
  EXPECT_LT(std::abs(o.value - d.value) / d.value, 0.05);
}

TEST(Probes, LiftMatchesLimitNorm) {
  const auto model = SubFinslerModel::from_file(canned("heis_riem"));
  const std::vector<Eigen::VectorXd> v{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.3, -0.4, 0)};
  const auto lifted = lift_control(model, 0.5, {0.5, 0.5}, v);
  for (std::size_t i = 0; i < v.size(); ++i)
    EXPECT_NEAR(model.norm()(lifted.controls[i]), limit_norm(model, v[i]), 1e-12);
  EXPECT_NEAR((lifted.controls[0] - Eigen::Vector3d(1, 0, 0)).norm(), 0, 1e-12);
}

TEST(Probes, LiftIsIdentityWhenDistributionIsFirstLayer) {
  const auto model = SubFinslerModel::from_file(canned("n522"));
  const Eigen::MatrixXd b = model.norm().basis();
  const Eigen::VectorXd w = Eigen::Vector3d(0.2, -0.5, 1.0);
  const auto lifted = lift_control(model, 1, {1.0}, {Eigen::VectorXd(b * w)});
  EXPECT_NEAR((lifted.controls[0] - w).norm(), 0, 1e-10);
}

TEST(Probes, SubmetryHoldsForSeveralNorms) {
  for (auto kind : {NormKind::euclidean, NormKind::l1, NormKind::linf}) {
    auto f = canned("heis_riem");
    f.norm.kind = kind;
    const auto model = SubFinslerModel::from_file(f);
    const auto r = check_submetry(model, {0.0, 0.5, 1.0}, 16);
    EXPECT_TRUE(r.ok()) << static_cast<int>(kind) << " " << r.boundary_error << " " << r.containment_error;
  }
  auto f = parse_algebra("dim = 3\nbracket e1 e2 = e3\ndistribution = all\n"
                         "norm = polytope(e1 + e3; e2 - e3; e1 + e2 + e3; e3)\n");
  const auto r = check_submetry(SubFinslerModel::from_file(f), {0.0, 0.5, 1.0}, 16);
  EXPECT_TRUE(r.ok()) << r.vertex_error;
}

TEST(Probes, GronwallGapVanishesForCarnotAndAtZero) {
  const auto model = SubFinslerModel::from_file(canned("carnot_heis"));
  const ControlPath u = random_control(6, 2, 5);
  for (const auto& [eps, gap] : gronwall_probe(model, Side::asymptotic, u, {0.0, 0.25, 1.0}))
    EXPECT_NEAR(gap, 0, 1e-15) << eps;
  const auto n522 = SubFinslerModel::from_file(canned("n522"));
  EXPECT_EQ(gronwall_probe(n522, Side::asymptotic, random_control(6, 3, 5), {0.0})[0].second, 0);
}

TEST(Probes, GuivarchConstant) {
  EXPECT_DOUBLE_EQ(guivarch_constant(0, 2, 2), 1);
  EXPECT_DOUBLE_EQ(guivarch_constant(0.5, 3, 1), 2);
  const double c = guivarch_constant(0.5, 0.1, 2);
  EXPECT_NEAR(2 / c - c * 0.5, 0.1, 1e-12);
}

TEST(Probes, SpreadPointsHaveRequestedSize) {
  const auto model = SubFinslerModel::from_file(canned("n522"));
  const Metric g = model.pansu(0);
  for (const auto& x : spread_points(model.asymptotic().grading(), 6, 3, {1.0, 0.5}))
    EXPECT_TRUE(std::abs(g.homogeneous_size(x) - 1.0) < 1e-9 || std::abs(g.homogeneous_size(x) - 0.5) < 1e-9);
}
