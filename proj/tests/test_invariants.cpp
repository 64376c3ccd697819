#include "lielab/analyze.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lielab;
using namespace testing_support;

namespace {

Subspace delta_of(const AlgebraFile& f) { return f.distribution ? *f.distribution : Subspace::full(f.tensor.dim()); }

}  // namespace

TEST(Grading, BuiltGradingsClassifyCorrectly) {
  for (const auto& name : canned_names()) {
    const auto f = canned(name);
    const auto d = delta_of(f);
    const Grading a = build_asymptotic_grading(f.tensor);
    const Grading t = build_tangent_grading(f.tensor, d);
    EXPECT_TRUE(is_asymptotic(f.tensor, a)) << name;
    EXPECT_TRUE(is_tangent(f.tensor, t, d)) << name;
    EXPECT_TRUE(check_grading_properties(f.tensor, d, a, t).all()) << name;
  }
}

TEST(Grading, RandomComplementsKeepAllProperties) {
  std::mt19937_64 rng(17);
  const auto names = canned_names();
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = canned(names[trial % names.size()]);
    const auto d = delta_of(f);
    const Grading a = random_asymptotic(rng, f.tensor);
    const Grading t = random_tangent(rng, f.tensor, d);
    ASSERT_TRUE(is_asymptotic(f.tensor, a)) << f.name;
    ASSERT_TRUE(is_tangent(f.tensor, t, d)) << f.name;
    EXPECT_TRUE(check_grading_properties(f.tensor, d, a, t).all()) << f.name << " trial " << trial;
  }
}

TEST(Grading, DilationIsMultiplicativeAndLayerwise) {
  const auto f = canned("n522");
  const Grading g = build_asymptotic_grading(f.tensor);
  std::mt19937_64 rng(2);
  const Vec x = random_vec(rng, 5);
  const Rational a(1, 3), b(2, 5);
  EXPECT_EQ(g.dilate(a, g.dilate(b, x)), g.dilate(a * b, x));
  Vec parts = zero_vec(5);
  for (int j = 1; j <= g.depth(); ++j) parts = parts + g.component(x, j);
  EXPECT_EQ(parts, x);
}

TEST(Grading, StratificationOfCarnotHeisenberg) {
  const auto f = canned("carnot_heis");
  const Grading g = build_tangent_grading(f.tensor, *f.distribution);
  EXPECT_TRUE(is_stratification(f.tensor, g));
  const auto k = classify_grading(f.tensor, g, f.distribution);
  EXPECT_TRUE(k.asymptotic && k.tangent && k.stratification);
}

TEST(Invariants, CannedExpectationsHold) {
  for (const auto& name : canned_names()) {
    const auto f = canned(name);
    const auto a = analyze(f, f.grading.empty() ? GradingSource::asymptotic : GradingSource::file);
    for (const auto& [k, e, v] : a.expectation_results) EXPECT_EQ(e, v) << name << " " << k;
  }
}

TEST(Invariants, HeisenbergRiemannian) {
  const auto a = analyze(canned("heis_riem"));
  ASSERT_TRUE(a.asymptotic);
  EXPECT_TRUE(a.asymptotic->alphas.alpha1_inf->is_infinite());
  EXPECT_EQ(a.asymptotic->alphas.alpha2_inf->value(), 1);
  EXPECT_EQ(a.asymptotic->alphas.alpha_inf->value(), 1);
  EXPECT_EQ(a.asymptotic->beta.beta_hat, 2);
  EXPECT_DOUBLE_EQ(*a.asymptotic->rate(), 0.5);
}

TEST(Invariants, ProductWitnessIsTheFirstFactor) {
  const auto f = canned("n522_x_n521");
  const auto a = analyze(f, GradingSource::file);
  EXPECT_EQ(a.asymptotic->beta.beta_hat, 3);
  std::vector<std::size_t> idx{0, 1, 2, 3, 4};
  EXPECT_TRUE(a.asymptotic->beta.witness == Subspace::coordinate(10, idx));
}

TEST(Invariants, FiliformPolarizations) {
  for (int k = 2; k <= 4; ++k) {
    const auto a = analyze(canned("filiform_v1_v" + std::to_string(k)));
    EXPECT_EQ(a.asymptotic->alphas.alpha_inf->value(), k - 1);
    EXPECT_EQ(a.asymptotic->beta.beta_hat, 4);
    EXPECT_DOUBLE_EQ(*a.asymptotic->rate(), (k - 1) / 4.0);
  }
}

TEST(Invariants, AlphaBelowBetaForNonCarnot) {
  for (const auto& name : canned_names()) {
    const auto a = analyze(canned(name));
    if (!a.asymptotic || a.carnot()) continue;
    EXPECT_LT(a.asymptotic->alphas.alpha_inf->value(), a.asymptotic->beta.beta_hat) << name;
  }
}

TEST(Invariants, CarnotQuotientCertificatesAreValid) {
  const Rational samples[] = {0, Rational(1, 7), Rational(1, 3), Rational(1, 2), 1};
  for (const auto& name : canned_names()) {
    const auto f = canned(name);
    const auto a = analyze(f, f.grading.empty() ? GradingSource::asymptotic : GradingSource::file);
    const auto d = delta_of(f);
    for (const SideReport* side : {a.asymptotic ? &*a.asymptotic : nullptr, &*a.tangent}) {
      if (!side) continue;
      const auto cert = check_cqi(f.tensor, side->grading, d, side->beta.witness);
      EXPECT_TRUE(cert.valid()) << name;
      const DeformedFamily fam(f.tensor, side->grading, side->side);
      const auto lemmas = cqi_lemmas(fam, d, side->beta.witness, samples);
      EXPECT_TRUE(lemmas.all()) << name << " " << to_string(side->side);
    }
  }
}

TEST(Invariants, NonIdealIsRejected) {
  const auto f = canned("heis_riem");
  const auto s = Subspace::span(3, {unit_vec(3, 0)});
  EXPECT_FALSE(is_ideal(f.tensor, s));
  EXPECT_FALSE(check_cqi(f.tensor, build_asymptotic_grading(f.tensor), *f.distribution, s).valid());
}

TEST(Invariants, ExtendedOrderingAndText) {
  EXPECT_LT(Extended(3), Extended::infinity());
  EXPECT_EQ(Extended::parse("inf"), Extended::infinity());
  EXPECT_EQ(Extended::parse("2").value(), 2);
  EXPECT_EQ(Extended::infinity().str(), "inf");
  EXPECT_EQ(min(Extended(4), Extended(2)).value(), 2);
}

TEST(Invariants, AnalysisIsDeterministicUnderRandomCoordinates) {
  // Same algebra written in a random rational basis: invariants do not change.
  std::mt19937_64 rng(9);
  const auto f = canned("n522");
  Matrix b(5, 5);
  do {
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) b(i, j) = random_rational(rng, 2, 1);
  } while ([&] {
    try {
      inverse(b);
      return false;
    } catch (const Error&) {
      return true;
    }
  }());
  // New basis columns: first three span the distribution, so the distribution stays coordinate.
  Matrix basis = Matrix::identity(5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) basis(i, j) = b(i, j) + (i == j ? 10 : 0);
  AlgebraFile g = f;
  g.tensor = change_basis(f.tensor, basis, f.tensor.names());
  g.distribution = Subspace::coordinate(5, std::vector<std::size_t>{0, 1, 2});
  const auto a1 = analyze(f), a2 = analyze(g);
  EXPECT_EQ(a1.asymptotic->alphas.alpha_inf, a2.asymptotic->alphas.alpha_inf);
  EXPECT_EQ(a1.asymptotic->beta.beta_hat, a2.asymptotic->beta.beta_hat);
  EXPECT_EQ(a1.tangent->alphas.alpha0, a2.tangent->alphas.alpha0);
}
