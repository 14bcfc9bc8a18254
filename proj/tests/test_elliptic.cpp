#include "hm/elliptic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hm;

namespace {
const GridSpec g32{two_pi, 32};
}

TEST(SolveElliptic, ZeroAndConstant) {
  EXPECT_EQ(solve_elliptic(SpectralField(g32)), SpectralField(g32));
  SpectralField c(g32);
  c.at({0, 0}) = 7.0 * g32.L;
  EXPECT_EQ(solve_elliptic(c), c);
}

TEST(SolveElliptic, CosinePlusConstant) {
  // w = cos x + 5 on [0, 2 pi]^2 gives u = cos(x)/2 + 5.
  const SpectralField w = cosine_mode(g32, {1, 0}, 1.0) + cosine_mode(g32, {0, 0}, 5.0);
  const RealField u = inverse_transform(solve_elliptic(w));
  const RealField ref = RealField::from_function(g32, [](double x, double) { return 0.5 * std::cos(x) + 5.0; });
  for (std::size_t i = 0; i < u.samples().size(); ++i) EXPECT_NEAR(u.samples()[i], ref.samples()[i], 1e-13);
}

TEST(SolveElliptic, SatisfiesPdeByQuadrature) {
  // -Laplacian(u) + u = w checked sample-wise with derivatives from direct sums.
  std::mt19937_64 gen(11);
  const GridSpec g{3.0, 24};
  const SpectralField w = oracle::random_field(g, 8, gen);
  const SpectralField u = solve_elliptic(w);
  const auto v = oracle::samples(u, 24), uxx = oracle::samples(u, 24, 2, 0), uyy = oracle::samples(u, 24, 0, 2);
  const auto ws = oracle::samples(w, 24);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    err = std::max(err, std::abs(-uxx[i] - uyy[i] + v[i] - ws[i]));
    scale = std::max(scale, std::abs(ws[i]));
  }
  EXPECT_LT(err, 1e-12 * scale);
}

TEST(SolveElliptic, InvertsHelmholtz) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField w = oracle::random_field(g32, 15, gen);
    EXPECT_LE(oracle::max_abs_diff(apply_helmholtz(solve_elliptic(w)), w), 1e-13 * max_abs_coeff(w));
    EXPECT_LE(oracle::max_abs_diff(solve_elliptic(apply_helmholtz(w)), w), 1e-13 * max_abs_coeff(w));
  }
}

TEST(SolveElliptic, IsContractiveInEveryNorm) {
  std::mt19937_64 gen(13);
  const SpectralField w = oracle::random_field(g32, 15, gen);
  for (int m = 0; m <= 3; ++m) EXPECT_LE(sobolev_norm(solve_elliptic(w), m), sobolev_norm(w, m));
}

TEST(RegularityIdentity, HoldsForRandomFields) {
  std::mt19937_64 gen(14);
  for (int m = 0; m <= 3; ++m) {
    const SpectralField w = oracle::random_field(g32, 10, gen);
    const RegularityIdentity r = regularity_identity_check(w, m);
    EXPECT_NEAR(r.lhs, r.rhs, 1e-12 * r.rhs) << m;
  }
  EXPECT_THROW(regularity_identity_check(SpectralField(g32), 4), Error);
}
