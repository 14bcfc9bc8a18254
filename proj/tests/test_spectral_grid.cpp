#include "hm/spectral_grid.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hm;

namespace {

const GridSpec g32{two_pi, 32};

double max_sample_diff(const RealField &a, const RealField &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i) d = std::max(d, std::abs(a.samples()[i] - b.samples()[i]));
  return d;
}

} // namespace

TEST(GridSpec, DealiasRadiusIsLargestKWithThreeKBelowN) {
  EXPECT_EQ((GridSpec{two_pi, 32}).dealias_radius(), 10);
  EXPECT_EQ((GridSpec{two_pi, 16}).dealias_radius(), 5);
  EXPECT_EQ((GridSpec{two_pi, 128}).dealias_radius(), 42);
  for (int n = 4; n <= 256; n += 2) {
    const int K = GridSpec{1.0, n}.dealias_radius();
    EXPECT_LT(3 * K, n) << n;
    EXPECT_GE(3 * (K + 1), n) << n;
  }
}

TEST(GridSpec, ValidationNamesTheOffendingKey) {
  try {
    GridSpec{two_pi, 33}.validate();
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.path(), "grid.n");
  }
  try {
    GridSpec{-1.0, 32}.validate();
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.path(), "domain.L");
  }
}

TEST(Lattice, WaveIndexRoundTrip) {
  for (int n : {4, 16, 32})
    for (int i = 0; i < n; ++i) EXPECT_EQ(index_of(wave_of(i, n), n), i);
  EXPECT_EQ(wave_of(16, 32), 16);
  EXPECT_EQ(wave_of(17, 32), -15);
}

TEST(Lattice, EigenvalueGrowsWithWaveNumber) {
  EXPECT_DOUBLE_EQ(eigenvalue({0, 1}, two_pi), 2.0);
  EXPECT_DOUBLE_EQ(eigenvalue({0, 0}, 3.0), 1.0);
  EXPECT_LT(eigenvalue({1, 1}, 2.0), eigenvalue({0, 2}, 2.0));
  EXPECT_LT(eigenvalue({2, 1}, 2.0), eigenvalue({2, 2}, 2.0));
}

TEST(ForwardTransform, ConstantFieldHasOnlyTheMean) {
  const RealField f = RealField::from_function(g32, [](double, double) { return 3.0; });
  const SpectralField F = forward_transform(f);
  EXPECT_NEAR(F.at({0, 0}).real(), 3.0 * g32.L, 1e-12);
  double rest = 0.0;
  for_each_mode(g32, [&](int ix, int iy, WaveIndex xi) {
    if (!(xi == WaveIndex{})) rest = std::max(rest, std::abs(F(ix, iy)));
  });
  EXPECT_LT(rest, 1e-13);
}

TEST(ForwardTransform, CosineMatchesQuadratureOracle) {
  const double L = 2.5;
  const GridSpec g{L, 16};
  const RealField f = RealField::from_function(g, [&](double x, double) { return std::cos(two_pi * x / L); });
  const SpectralField F = forward_transform(f);
  EXPECT_NEAR(std::abs(F.at({1, 0}) - L / 2), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(F.at({-1, 0}) - L / 2), 0.0, 1e-13);
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for_each_mode(g, [&](int ix, int iy, WaveIndex xi) {
    EXPECT_NEAR(std::abs(F(ix, iy) - oracle::project_coefficient(s, L, 16, xi)), 0.0, 1e-13);
  });
}

TEST(InverseTransform, MirrorsForwardExamples) {
  SpectralField F(g32);
  F.at({0, 0}) = g32.L;
  const RealField one = inverse_transform(F);
  for (double v : one.samples()) EXPECT_NEAR(v, 1.0, 1e-14);

  const RealField c = inverse_transform(cosine_mode(g32, {1, 0}, 1.0));
  const RealField ref = RealField::from_function(g32, [](double x, double) { return std::cos(x); });
  EXPECT_LT(max_sample_diff(c, ref), 1e-14);
}

TEST(InverseTransform, RejectsNonHermitianCoefficients) {
  SpectralField F(g32);
  F.at({1, 2}) = complex(1.0, 0.5);
  EXPECT_THROW(inverse_transform(F), HermitianSymmetryError);
}

TEST(Transforms, RandomRoundTrip) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    RealField f(g32);
    for (double &v : f.samples()) v = u(gen);
    const RealField back = inverse_transform(forward_transform(f));
    EXPECT_LE(max_sample_diff(f, back), 1e-12 * linf_norm(f));
  }
}

TEST(Transforms, PairTransformsMatchSingleOnes) {
  std::mt19937_64 gen(2);
  const SpectralField a = oracle::random_field(g32, 15, gen), b = oracle::random_field(g32, 15, gen);
  auto [ra, rb] = inverse_transform(a, b);
  EXPECT_LT(max_sample_diff(ra, inverse_transform(a)), 1e-14);
  EXPECT_LT(max_sample_diff(rb, inverse_transform(b)), 1e-14);
  auto [fa, fb] = forward_transform(ra, rb);
  EXPECT_LT(oracle::max_abs_diff(fa, a), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(fb, b), 1e-12);
  EXPECT_EQ(hermitian_defect(fa), 0.0);
  EXPECT_EQ(hermitian_defect(fb), 0.0);
}

TEST(Transforms, ParsevalAgainstQuadrature) {
  std::mt19937_64 gen(3);
  const SpectralField f = oracle::random_field(g32, 12, gen);
  const double q = oracle::quadrature_l2_squared(f, 32);
  EXPECT_NEAR(l2_norm(f) * l2_norm(f), q, 1e-10 * q);
}

TEST(Project, FullRadiusIsIdentityAndSelfAdjoint) {
  std::mt19937_64 gen(4);
  const SpectralField u = oracle::random_field(g32, 15, gen), v = oracle::random_field(g32, 15, gen);
  EXPECT_EQ(project(u, g32.n / 2), u);
  for (int M : {0, 3, 7, 12}) {
    const double lhs = inner(project(u, M), v), rhs = inner(u, project(v, M));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    EXPECT_EQ(project(project(u, M), M), project(u, M));
    for (int m = 0; m <= 3; ++m) EXPECT_LE(sobolev_norm(project(u, M), m), sobolev_norm(u, m));
  }
  EXPECT_THROW(project(u, -1), Error);
}

TEST(Derivative, ExamplesAndNyquist) {
  SpectralField c(g32);
  c.at({0, 0}) = 5.0;
  EXPECT_EQ(max_abs_coeff(derivative(c, Axis::x)), 0.0);

  const double L = 3.0;
  const GridSpec g{L, 16};
  const RealField s = RealField::from_function(g, [&](double, double y) { return std::sin(two_pi * y / L); });
  const RealField ds = inverse_transform(derivative(forward_transform(s), Axis::y));
  const RealField ref =
      RealField::from_function(g, [&](double, double y) { return two_pi / L * std::cos(two_pi * y / L); });
  EXPECT_LT(max_sample_diff(ds, ref), 1e-13);

  SpectralField nyq(g32);
  nyq.at({16, 3}) = 1.0;
  nyq.at({16, -3}) = 1.0;
  EXPECT_EQ(max_abs_coeff(derivative(nyq, Axis::y)), 0.0);
}

TEST(Derivative, MixedPartialsCommuteAndMatchOracle) {
  std::mt19937_64 gen(5);
  const SpectralField f = oracle::random_field(g32, 10, gen);
  const SpectralField xy = derivative(derivative(f, Axis::x), Axis::y);
  const SpectralField yx = derivative(derivative(f, Axis::y), Axis::x);
  EXPECT_LE(oracle::max_abs_diff(xy, yx), 1e-14 * max_abs_coeff(xy));
  EXPECT_EQ(hermitian_defect(derivative(f, Axis::x, 3)), 0.0);

  const auto ref = oracle::samples(f, 32, 2, 0);
  const RealField d2 = inverse_transform(derivative(f, Axis::x, 2));
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    err = std::max(err, std::abs(ref[i] - d2.samples()[i]));
    scale = std::max(scale, std::abs(ref[i]));
  }
  EXPECT_LT(err, 1e-12 * scale);
}

TEST(SobolevNorm, BasisModeAndQuadrature) {
  const WaveIndex xi{2, -3};
  const SpectralField phi = basis_mode(g32, xi) + basis_mode(g32, -xi);
  for (int m = 0; m <= 3; ++m)
    EXPECT_NEAR(sobolev_norm(phi, m), std::sqrt(2.0) * std::pow(eigenvalue(xi, g32.L), 0.5 * m), 1e-12);
  EXPECT_EQ(sobolev_norm(SpectralField(g32), 2), 0.0);

  // cos(x) on [0, 2 pi]^2: ||f||^2 = ||grad f||^2 = 2 pi^2.
  const SpectralField c = cosine_mode(g32, {1, 0}, 1.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(std::pow(sobolev_norm(c, 1), 2), 4.0 * pi2, 1e-10);
  EXPECT_NEAR(std::pow(sobolev_norm(c, 1), 2), oracle::quadrature_h1_squared(c, 32), 1e-10);

  std::mt19937_64 gen(6);
  const SpectralField r = oracle::random_field(g32, 12, gen);
  const double q = oracle::quadrature_h1_squared(r, 40);
  EXPECT_NEAR(std::pow(sobolev_norm(r, 1), 2), q, 1e-10 * q);
}

TEST(LinfNorm, Examples) {
  EXPECT_EQ(linf_norm(RealField::from_function(g32, [](double, double) { return 3.0; })), 3.0);
  EXPECT_EQ(linf_norm(RealField(g32)), 0.0);
  EXPECT_NEAR(linf_norm(inverse_transform(cosine_mode(g32, {0, 2}, 0.7))), 0.7, 1e-12);
  // Extremum off the grid is recovered by oversampling.
  const SpectralField shifted = cosine_mode(GridSpec{two_pi, 8}, {3, 0}, 1.0, 0.3);
  EXPECT_LT(linf_norm(inverse_transform(shifted)), 0.99);
  EXPECT_GT(linf_norm_oversampled(shifted, 4), linf_norm(inverse_transform(shifted)));
}

TEST(Regrid, PreservesCoefficientsAndRoundTrips) {
  std::mt19937_64 gen(7);
  const SpectralField f = oracle::random_field(g32, 10, gen);
  const GridSpec fine{two_pi, 64};
  const SpectralField up = regrid(f, fine);
  EXPECT_EQ(up.at({10, -7}), f.at({10, -7}));
  EXPECT_EQ(regrid(up, g32), f);
  EXPECT_NEAR(l2_norm(up), l2_norm(f), 1e-13);
}

TEST(SpectralField, ArithmeticAndGridChecks) {
  std::mt19937_64 gen(8);
  const SpectralField a = oracle::random_field(g32, 5, gen), b = oracle::random_field(g32, 5, gen);
  SpectralField c = a;
  c.axpy(2.0, b);
  EXPECT_LT(oracle::max_abs_diff(c, a + 2.0 * b), 1e-15);
  EXPECT_THROW(a + SpectralField(GridSpec{two_pi, 16}), GridMismatchError);
}
