#pragma once

/// Exact Fourier-diagonal solver for -Laplacian(u) + u = w.

#include "hm/spectral_grid.hpp"

#include <utility>

namespace hm {

/// u = E(w): coeff_u(xi) = coeff_w(xi) / lambda(xi). Never singular since lambda >= 1.
inline SpectralField solve_elliptic(SpectralField w) {
  const double L = w.grid().L;
  for_each_mode(w.grid(), [&](int ix, int iy, WaveIndex xi) { w(ix, iy) /= eigenvalue(xi, L); });
  return w;
}

/// w = (I - Laplacian) u.
inline SpectralField apply_helmholtz(SpectralField u) {
  const double L = u.grid().L;
  for_each_mode(u.grid(), [&](int ix, int iy, WaveIndex xi) { u(ix, iy) *= eigenvalue(xi, L); });
  return u;
}

struct RegularityIdentity {
  double lhs; ///< |||E(w)|||_{m+2}
  double rhs; ///< |||w|||_m
};

/// Both sides of |||E(w)|||_{m+2} = |||w|||_m; equal up to round-off.
inline RegularityIdentity regularity_identity_check(const SpectralField &w, int m) {
  if (m < 0 || m > 3) throw Error("regularity check supports m in 0..3");
  return {sobolev_norm(solve_elliptic(w), m + 2), sobolev_norm(w, m)};
}

} // namespace hm
