#include "support.hpp"

#include <gtest/gtest.h>

using namespace lielab;
using namespace testing_support;

namespace {

Vec v(std::initializer_list<int> xs) {
  Vec out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST(Rational, ParsesIntegersFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational(" -2.5 "), Rational(-5, 2));
}

TEST(Rational, RejectsMalformedInput) {
  for (const char* bad : {"", "1/0", "1/", "/2", "1.2.3", "1/2.0", "abc", "--1", "1e3"})
    EXPECT_THROW(parse_rational(bad), Error) << bad;
}

TEST(Subspace, SpanIsCanonical) {
  const auto a = Subspace::span(3, {v({1, 1, 0}), v({0, 1, 1})});
  const auto b = Subspace::span(3, {v({1, 2, 1}), v({1, 0, -1})});
  EXPECT_EQ(a.dim(), 2u);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a.contains(v({2, 3, 1})));
  EXPECT_FALSE(a.contains(v({1, 0, 0})));
}

TEST(Subspace, LatticeOperationsAgreeWithDimensionFormula) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6;
    std::vector<Vec> ga, gb;
    const int da = trial % 4 + 1, db = (trial / 4) % 4 + 1;
    for (int i = 0; i < da; ++i) ga.push_back(random_vec(rng, n, 2, 1));
    for (int i = 0; i < db; ++i) gb.push_back(random_vec(rng, n, 2, 1));
    const auto a = Subspace::span(n, ga), b = Subspace::span(n, gb);
    const auto s = sum(a, b), i = intersection(a, b);
    EXPECT_EQ(s.dim() + i.dim(), a.dim() + b.dim());
    EXPECT_TRUE(a.contains(i) && b.contains(i));
    EXPECT_TRUE(s.contains(a) && s.contains(b));
    const auto c = complement_within(i, a);
    const std::vector<Subspace> parts{c, i};
    EXPECT_TRUE(is_direct_sum(parts, n));
    EXPECT_TRUE(sum(c, i) == a);
  }
}

TEST(Subspace, CoordinatesRoundTrip) {
  const auto s = Subspace::span(4, {v({1, 0, 2, 0}), v({0, 1, 0, -1})});
  const Vec x = Rational(3) * s.basis()[0] + Rational(-1, 2) * s.basis()[1];
  const auto c = s.coordinates(x);
  ASSERT_TRUE(c);
  EXPECT_EQ((*c)[0], Rational(3));
  EXPECT_EQ((*c)[1], Rational(-1, 2));
  EXPECT_FALSE(s.coordinates(v({1, 0, 0, 0})));
}

TEST(Matrix, InverseIsExact) {
  std::mt19937_64 rng(5);
  const std::size_t n = 5;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = random_rational(rng);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 20;
  const Matrix p = a * inverse(a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(p(i, j), Rational(i == j ? 1 : 0));
}

TEST(Poly, ArithmeticAndEvaluation) {
  const Poly p = Poly(1) + Poly::monomial(2, 1);   // 1 + 2t
  const Poly q = Poly::monomial(Rational(1, 2), 2);  // t^2 / 2
  const Poly r = p * q;
  EXPECT_EQ(r.order(), 2);
  EXPECT_EQ(r.degree(), 3);
  EXPECT_EQ(r(Rational(2)), Rational(10));
  EXPECT_TRUE((p - p).is_zero());
}

TEST(Structure, HeisenbergSeriesAndStep) {
  const auto f = canned("heis_riem");
  const auto lcs = lower_central_series(f.tensor);
  ASSERT_EQ(lcs.size(), 3u);
  EXPECT_EQ(lcs[1].dim(), 1u);
  EXPECT_EQ(nilpotency_step(f.tensor), 2);
}

TEST(Structure, NonNilpotentAlgebraHasNoStep) {
  StructureTensor t(2);
  t.add(0, 1, 1, 1);  // [x, y] = y
  EXPECT_FALSE(nilpotency_step(t));
  EXPECT_TRUE(jacobi_failures(t).empty());
}

TEST(Structure, DistributionFiltration) {
  const auto f = canned("n522");
  const auto filt = delta_filtration(f.tensor, *f.distribution);
  EXPECT_TRUE(filt.bracket_generating);
  // [e1, e2] = e4 and [e2, e3] = e5 already fill the complement.
  EXPECT_EQ(filt.step(), 2);
  ASSERT_EQ(filt.cumulative.size(), 2u);
  EXPECT_EQ(filt.cumulative[0].dim(), 3u);
  EXPECT_EQ(filt.cumulative[1].dim(), 5u);
}

TEST(AlgebraFile, ParsesN522Example) {
  const auto f = parse_algebra(
      "dim = 5\n"
      "bracket e1 e2 = e4\n"
      "bracket e1 e4 = e5\n"
      "bracket e2 e3 = e5\n"
      "distribution = span(e1, e2, e3)\n");
  EXPECT_EQ(nilpotency_step(f.tensor), 3);
  EXPECT_EQ(f.tensor.coefficient(1, 0, 3), Rational(-1));
}

TEST(AlgebraFile, CombinationsWithRationals) {
  const auto f = parse_algebra("dim = 3\nbasis = x y z\nbracket x y = 1/2*z - 0.5*z + 3/4*z\n");
  EXPECT_EQ(f.tensor.coefficient(0, 1, 2), Rational(3, 4));
}

TEST(AlgebraFile, RejectsBadInputWithLineNumbers) {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"dim = 3\nbracket e1 e1 = e3\n", "line 2"},
      {"dim = 3\ncolour = red\n", "line 2: unknown key"},
      {"dim = 3\nbracket e1 e2 = 1/0*e3\n", "line 2"},
      {"dim = 3\nbracket e1 e2 = e9\n", "line 2: unknown basis element"},
      {"dim = 2\nbasis = a, a\n", "line 2: duplicate"},
      {"bracket e1 e2 = e3\n", "missing 'dim'"},
      {"dim = 3\nexpect colour = 1\n", "line 2: unknown expectation"},
      {"dim = 3\ngrading V2 = span(e1)\n", "numbered 1..s"},
      {"dim = 3\nnorm = hexagonal\n", "line 2: unknown norm"},
      {"dim = 3\nbracket e1 e2 = e2\nbracket e1 e3 = e1\nbracket e2 e3 = e3\n", "Jacobi"},
  };
  for (const auto& c : cases) {
    try {
      parse_algebra(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(c.needle), std::string::npos) << e.what();
    }
  }
}

TEST(AlgebraFile, RoundTripOnCanonicalFiles) {
  for (const auto& name : canned_names()) {
    const auto f = canned(name);
    const std::string once = serialize_algebra(f);
    const auto g = parse_algebra(once);
    EXPECT_EQ(serialize_algebra(g), once) << name;
    EXPECT_TRUE(g.tensor == f.tensor) << name;
    EXPECT_EQ(g.expectations, f.expectations) << name;
  }
}

TEST(AlgebraFile, NormsParse) {
  const auto f = parse_algebra("dim = 3\nbracket e1 e2 = e3\ndistribution = span(e1, e2)\n"
                               "norm = polytope(e1; e2; e1 + e2)\n");
  EXPECT_EQ(f.norm.kind, NormKind::polytope);
  EXPECT_EQ(f.norm.vertices.size(), 3u);
  const auto g = parse_algebra("dim = 2\nnorm = form(2 0; 0 1/2)\n");
  EXPECT_EQ(g.norm.form[1][1], Rational(1, 2));
  const auto h = parse_algebra(serialize_algebra(f));
  EXPECT_EQ(h.norm.vertices, f.norm.vertices);
}
