#pragma once

/// The transport half w_t + V(u).grad(w) = k u_y: drift velocity, the
/// dealiased bracket, the Galerkin matrix of the spectral ODE system, and a
/// transform-free convolution used as an independent reference.

#include "hm/elliptic.hpp"
#include "hm/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

namespace hm {

/// V(u) = (-u_y, u_x).
struct VelocityField {
  SpectralField vx;
  SpectralField vy;
};

inline VelocityField velocity(const SpectralField &u) {
  return {-1.0 * derivative(u, Axis::y), derivative(u, Axis::x)};
}

inline SpectralField divergence(const VelocityField &v) {
  return derivative(v.vx, Axis::x) + derivative(v.vy, Axis::y);
}

/// Drift velocity frozen in physical space, reused across many advections of
/// different w (corrector sub-iterations).
class FrozenVelocity {
public:
  explicit FrozenVelocity(const SpectralField &u) : grid_(u.grid()) {
    const SpectralField up = project_dealiased(u);
    auto [uy, ux] = inverse_transform(derivative(up, Axis::y), derivative(up, Axis::x));
    vx_ = std::move(uy);
    for (double &s : vx_.samples()) s = -s;
    vy_ = std::move(ux);
  }

  /// P_K[V . grad(P_K w)] with K the dealias radius.
  SpectralField advect(const SpectralField &w) const {
    if (!(w.grid() == grid_)) throw GridMismatchError("advect: u and w live on different grids");
    const SpectralField wp = project_dealiased(w);
    auto [wx, wy] = inverse_transform(derivative(wp, Axis::x), derivative(wp, Axis::y));
    RealField prod(grid_);
    std::span<double> p = prod.samples();
    std::span<const double> a = vx_.samples(), b = vy_.samples(), cx = wx.samples(), cy = wy.samples();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] * cx[i] + b[i] * cy[i];
    return project_dealiased(forward_transform(prod));
  }

private:
  GridSpec grid_;
  RealField vx_;
  RealField vy_;
};

/// V(u).grad(w) = -u_y w_x + u_x w_y with 2/3-rule dealiasing: inputs and the
/// collocation product are truncated to the dealias radius, so the result is
/// the exact Galerkin bracket on E_K.
inline SpectralField advect(const SpectralField &u, const SpectralField &w) {
  if (!(u.grid() == w.grid())) throw GridMismatchError("advect: u and w live on different grids");
  return FrozenVelocity(u).advect(w);
}

inline SpectralField rhs(const SpectralField &u, const SpectralField &w, double k) {
  SpectralField r = derivative(u, Axis::y);
  r *= k;
  return r -= advect(u, w);
}

inline constexpr int max_oracle_radius = 8;

/// Direct double-sum convolution of -u_y w_x + u_x w_y in coefficient space,
/// truncated to E_M. No transforms involved; cost O(M^2 n^2).
inline SpectralField convolution_oracle(const SpectralField &u, const SpectralField &w, int radius) {
  if (!(u.grid() == w.grid())) throw GridMismatchError("oracle: u and w live on different grids");
  if (radius < 0 || radius > max_oracle_radius)
    throw OracleSizeError("convolution oracle radius must lie in [0, 8], got " + std::to_string(radius));
  const GridSpec &g = u.grid();
  const int n = g.n;
  const int nyq = g.nyquist();
  const double L = g.L;

  struct Term {
    WaveIndex xi;
    complex c;
  };
  std::vector<Term> support;
  for_each_mode(g, [&](int ix, int iy, WaveIndex xi) {
    if (xi.x == nyq || xi.y == nyq) return;
    if (u(ix, iy) != complex{}) support.push_back({xi, u(ix, iy)});
  });

  SpectralField out(g);
  for (int cx = -radius; cx <= radius; ++cx) {
    for (int cy = -radius; cy <= radius; ++cy) {
      complex acc{};
      for (const Term &t : support) {
        const WaveIndex b{cx - t.xi.x, cy - t.xi.y};
        if (!representable(b.x, n) || !representable(b.y, n) || b.x == nyq || b.y == nyq) continue;
        const complex wb = w.at(b);
        if (wb == complex{}) continue;
        const double factor = wavenumber(t.xi.y, L) * wavenumber(b.x, L) -
                              wavenumber(t.xi.x, L) * wavenumber(b.y, L);
        acc += t.c * wb * factor;
      }
      out.at({cx, cy}) = acc / L;
    }
  }
  return out;
}

/// How the quadratic term is evaluated during time stepping.
enum class Nonlinearity {
  dealiased,       ///< transform product on the grid, truncated to the dealias radius
  galerkin_oracle, ///< exact Galerkin truncation to E_M through convolution_oracle
};

struct AdvectionModel {
  Nonlinearity mode = Nonlinearity::dealiased;
  int radius = 0; ///< E_M radius, galerkin_oracle only

  static AdvectionModel galerkin(int m) { return {Nonlinearity::galerkin_oracle, m}; }

  /// Radius of the space the state is kept in.
  int state_radius(const GridSpec &g) const {
    return mode == Nonlinearity::dealiased ? g.dealias_radius() : radius;
  }
};

/// Advection operator with the velocity frozen at construction.
class FrozenAdvection {
public:
  FrozenAdvection(const AdvectionModel &model, const SpectralField &u) : model_(model) {
    if (model.mode == Nonlinearity::dealiased)
      dealiased_.emplace(u);
    else
      u_ = project(u, model.radius);
  }

  SpectralField operator()(const SpectralField &w) const {
    if (model_.mode == Nonlinearity::dealiased) return dealiased_->advect(w);
    return convolution_oracle(u_, project(w, model_.radius), model_.radius);
  }

private:
  AdvectionModel model_;
  std::optional<FrozenVelocity> dealiased_;
  SpectralField u_;
};

inline SpectralField advect(const AdvectionModel &model, const SpectralField &u,
                            const SpectralField &w) {
  return FrozenAdvection(model, u)(w);
}

inline SpectralField rhs(const AdvectionModel &model, const SpectralField &u,
                         const SpectralField &w, double k) {
  SpectralField r = project(derivative(u, Axis::y), model.state_radius(u.grid()));
  r *= k;
  return r -= advect(model, u, w);
}

/// Real orthonormal basis of E_M: the constant 1/L, then for each wave xi in
/// the upper half plane sqrt(2) cos(2 pi x.xi/L)/L and sqrt(2) sin(2 pi x.xi/L)/L.
/// Ordered by increasing eigenvalue, lexicographic (xi_x, xi_y) within a shell.
class RealBasis {
public:
  enum class Kind { constant, cosine, sine };
  struct Element {
    WaveIndex xi;
    Kind kind;
  };

  explicit RealBasis(int radius) : radius_(radius) {
    std::vector<WaveIndex> half;
    for (int x = 0; x <= radius; ++x)
      for (int y = -radius; y <= radius; ++y)
        if (x > 0 || y > 0) half.push_back({x, y});
    std::sort(half.begin(), half.end(), [](WaveIndex a, WaveIndex b) {
      return std::tuple(a.norm2(), a.x, a.y) < std::tuple(b.norm2(), b.x, b.y);
    });
    elements_.push_back({{0, 0}, Kind::constant});
    for (WaveIndex xi : half) {
      elements_.push_back({xi, Kind::cosine});
      elements_.push_back({xi, Kind::sine});
    }
  }

  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Element> &elements() const { return elements_; }

  /// Complex components q of psi = sum q_b phi_b (one or two terms).
  static std::vector<std::pair<WaveIndex, complex>> components(const Element &e) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (e.kind) {
    case Kind::constant: return {{e.xi, 1.0}};
    case Kind::cosine: return {{e.xi, r}, {-e.xi, r}};
    case Kind::sine: return {{e.xi, complex(0.0, -r)}, {-e.xi, complex(0.0, r)}};
    }
    return {};
  }

  /// Real coordinates <f, psi_j> of a real field.
  std::vector<double> coordinates(const SpectralField &f) const {
    std::vector<double> c(size());
    for (std::size_t j = 0; j < size(); ++j) {
      complex s{};
      for (auto [xi, q] : components(elements_[j])) s += f.at(xi) * std::conj(q);
      c[j] = s.real();
    }
    return c;
  }

  SpectralField field(std::span<const double> coords, const GridSpec &grid) const {
    SpectralField f(grid);
    for (std::size_t j = 0; j < size(); ++j)
      for (auto [xi, q] : components(elements_[j])) f.at(xi) += coords[j] * q;
    return f;
  }

private:
  int radius_;
  std::vector<Element> elements_;
};

/// Coefficient matrices of the spectral ODE system on E_M.
struct GalerkinSystem {
  RealBasis basis;
  std::vector<double> A; ///< row-major, A[i*N+j] = <V(u).grad psi_i, psi_j>
  std::vector<double> F; ///< F[j] = k <u_y, psi_j>

  std::size_t dim() const { return basis.size(); }
  double a(std::size_t i, std::size_t j) const { return A[i * dim() + j]; }

  /// dC/dt for w = sum C_i psi_i: testing against psi_j gives
  /// C_j' = -sum_i A_ij C_i + F_j.
  std::vector<double> drift(std::span<const double> c) const {
    const std::size_t N = dim();
    std::vector<double> out(F);
    for (std::size_t i = 0; i < N; ++i) {
      const double ci = c[i];
      if (ci == 0.0) continue;
      const double *row = &A[i * N];
      for (std::size_t j = 0; j < N; ++j) out[j] -= row[j] * ci;
    }
    return out;
  }
};

/// Builds A and F from the closed form
///   <V(u).grad phi_b, phi_c> = u_hat(c - b) (kx_b ky_c - ky_b kx_c) / L
/// mapped to the real basis. Rows are filled in a fixed order.
inline GalerkinSystem assemble_galerkin(const SpectralField &u, int radius, double k) {
  const GridSpec &g = u.grid();
  const int n = g.n;
  const int nyq = g.nyquist();
  const double L = g.L;
  GalerkinSystem sys{RealBasis(radius), {}, {}};
  const std::size_t N = sys.basis.size();
  sys.A.assign(N * N, 0.0);
  sys.F.assign(N, 0.0);

  auto u_at = [&](WaveIndex a) -> complex {
    if (!representable(a.x, n) || !representable(a.y, n) || a.x == nyq || a.y == nyq) return 0.0;
    return u.at(a);
  };
  auto pairing = [&](WaveIndex b, WaveIndex c) -> complex {
    const complex ua = u_at(c - b);
    if (ua == complex{}) return 0.0;
    return ua * (wavenumber(b.x, L) * wavenumber(c.y, L) - wavenumber(b.y, L) * wavenumber(c.x, L)) / L;
  };

  const auto &el = sys.basis.elements();
  std::vector<std::vector<std::pair<WaveIndex, complex>>> comps(N);
  for (std::size_t i = 0; i < N; ++i) comps[i] = RealBasis::components(el[i]);

  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      complex s{};
      for (auto [b, qb] : comps[i])
        for (auto [c, qc] : comps[j]) s += qb * std::conj(qc) * pairing(b, c);
      sys.A[i * N + j] = s.real();
    }
    complex f{};
    for (auto [c, qc] : comps[i]) f += std::conj(qc) * complex(0.0, wavenumber(c.y, L)) * u_at(c);
    sys.F[i] = k * f.real();
  }
  return sys;
}

} // namespace hm
