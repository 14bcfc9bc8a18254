#pragma once

/// Periodic square domain, the Fourier eigenbasis of I - Laplacian, and the
/// transforms, projections and norms built on it.
///
/// Coefficients are stored against the L2-orthonormal basis
///   phi_xi(x) = exp(2 pi i x.xi / L) / L,
/// so coeff(xi) = <f, phi_xi> and Parseval holds without scale factors.
/// Storage is the full n x n complex lattice in FFT order: storage index
/// i in [0, n) maps to wave number i for i <= n/2 and i - n otherwise.

#include "hm/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hm {

using complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridSpec {
  double L = two_pi;
  int n = 32;
  double dealias_fraction = 2.0 / 3.0;

  void validate() const {
    if (!(L > 0.0) || !std::isfinite(L))
      throw ConfigError("domain.L", "domain length must be positive and finite");
    if (n < 4 || n % 2 != 0)
      throw ConfigError("grid.n", "grid size must be an even integer >= 4");
    if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
      throw ConfigError("grid.dealias_fraction", "must lie in (0, 1]");
  }

  /// Largest retained radius K for products: K < dealias_fraction * n / 2.
  /// With the default 2/3 this is the largest K with 3K < n, which makes the
  /// collocation product of two E_K fields exact after truncation to E_K.
  int dealias_radius() const {
    const int r = static_cast<int>(std::ceil(dealias_fraction * n / 2.0 - 1e-12)) - 1;
    return std::clamp(r, 0, n / 2 - 1);
  }

  int nyquist() const { return n / 2; }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  double spacing() const { return L / n; }

  bool operator==(const GridSpec &) const = default;
};

struct WaveIndex {
  int x = 0;
  int y = 0;

  int norm2() const { return x * x + y * y; }
  int max_abs() const { return std::max(std::abs(x), std::abs(y)); }
  WaveIndex operator-() const { return {-x, -y}; }
  friend WaveIndex operator+(WaveIndex a, WaveIndex b) { return {a.x + b.x, a.y + b.y}; }
  friend WaveIndex operator-(WaveIndex a, WaveIndex b) { return {a.x - b.x, a.y - b.y}; }
  bool operator==(const WaveIndex &) const = default;
};

/// lambda(xi) = 1 + 4 pi^2 |xi|^2 / L^2, the eigenvalue of I - Laplacian on phi_xi.
inline double eigenvalue(WaveIndex xi, double L) {
  return 1.0 + two_pi * two_pi * static_cast<double>(xi.norm2()) / (L * L);
}

/// Physical wavenumber 2 pi xi / L along one axis.
inline double wavenumber(int xi, double L) { return two_pi * xi / L; }

inline int wave_of(int index, int n) { return index <= n / 2 ? index : index - n; }
inline int index_of(int wave, int n) { return ((wave % n) + n) % n; }

/// True when `wave` has its own storage slot, i.e. lies in [-n/2+1, n/2].
inline bool representable(int wave, int n) { return wave > -n / 2 && wave <= n / 2; }

enum class Axis { x, y };

class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec &grid) : grid_(grid), c_(grid.size(), complex{}) {}

  const GridSpec &grid() const { return grid_; }
  int n() const { return grid_.n; }

  complex &operator()(int ix, int iy) { return c_[static_cast<std::size_t>(ix) * grid_.n + iy]; }
  const complex &operator()(int ix, int iy) const {
    return c_[static_cast<std::size_t>(ix) * grid_.n + iy];
  }

  complex &at(WaveIndex xi) { return (*this)(index_of(xi.x, grid_.n), index_of(xi.y, grid_.n)); }
  const complex &at(WaveIndex xi) const {
    return (*this)(index_of(xi.x, grid_.n), index_of(xi.y, grid_.n));
  }

  WaveIndex wave(int ix, int iy) const { return {wave_of(ix, grid_.n), wave_of(iy, grid_.n)}; }

  std::span<complex> coeffs() { return c_; }
  std::span<const complex> coeffs() const { return c_; }

  SpectralField &operator+=(const SpectralField &o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  SpectralField &operator-=(const SpectralField &o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  SpectralField &operator*=(double s) {
    for (auto &v : c_) v *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField &b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField &b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  /// a*x + y, in place on *this (this = y).
  SpectralField &axpy(double a, const SpectralField &x) {
    check_same(x);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * x.c_[i];
    return *this;
  }

  void check_same(const SpectralField &o) const {
    if (!(grid_ == o.grid_)) throw GridMismatchError("spectral fields live on different grids");
  }

  bool operator==(const SpectralField &) const = default;

private:
  GridSpec grid_{};
  std::vector<complex> c_;
};

/// Single complex exponential amp * phi_xi (real only when xi = 0).
inline SpectralField basis_mode(const GridSpec &grid, WaveIndex xi, complex amp = 1.0) {
  SpectralField f(grid);
  f.at(xi) = amp;
  return f;
}

/// Real mode a*cos(2 pi xi.x / L + phase): coefficients a L e^{+-i phase} / 2 at +-xi.
inline SpectralField cosine_mode(const GridSpec &grid, WaveIndex xi, double amplitude,
                                 double phase = 0.0) {
  SpectralField f(grid);
  if (xi == WaveIndex{}) {
    f.at(xi) = amplitude * grid.L * std::cos(phase);
    return f;
  }
  f.at(xi) += 0.5 * amplitude * grid.L * std::polar(1.0, phase);
  f.at(-xi) += 0.5 * amplitude * grid.L * std::polar(1.0, -phase);
  return f;
}

template <class F> void for_each_mode(const GridSpec &grid, F &&f) {
  for (int ix = 0; ix < grid.n; ++ix)
    for (int iy = 0; iy < grid.n; ++iy) f(ix, iy, WaveIndex{wave_of(ix, grid.n), wave_of(iy, grid.n)});
}

/// Real L2 inner product of two real fields: Re sum F conj(G).
inline double inner(const SpectralField &f, const SpectralField &g) {
  f.check_same(g);
  double s = 0.0;
  auto a = f.coeffs();
  auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

inline double max_abs_coeff(const SpectralField &f) {
  double m = 0.0;
  for (auto v : f.coeffs()) m = std::max(m, std::norm(v));
  return std::sqrt(m);
}

/// max |coeff(-xi) - conj(coeff(xi))| over the lattice.
inline double hermitian_defect(const SpectralField &f) {
  const int n = f.n();
  double d = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    const int jx = ix == 0 ? 0 : n - ix;
    for (int iy = 0; iy < n; ++iy) {
      const int jy = iy == 0 ? 0 : n - iy;
      d = std::max(d, std::norm(f(jx, jy) - std::conj(f(ix, iy))));
    }
  }
  return std::sqrt(d);
}

/// Samples on the uniform collocation grid; sample (i, j) sits at (iL/n, jL/n).
class RealField {
public:
  RealField() = default;
  explicit RealField(const GridSpec &grid) : grid_(grid), s_(grid.size(), 0.0) {}
  RealField(const GridSpec &grid, std::vector<double> samples) : grid_(grid), s_(std::move(samples)) {
    if (s_.size() != grid.size()) throw GridMismatchError("sample count does not match grid");
  }

  template <class F> static RealField from_function(const GridSpec &grid, F &&f) {
    RealField r(grid);
    const double h = grid.spacing();
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) r(i, j) = f(i * h, j * h);
    return r;
  }

  const GridSpec &grid() const { return grid_; }
  double &operator()(int i, int j) { return s_[static_cast<std::size_t>(i) * grid_.n + j]; }
  double operator()(int i, int j) const { return s_[static_cast<std::size_t>(i) * grid_.n + j]; }
  std::span<double> samples() { return s_; }
  std::span<const double> samples() const { return s_; }

  bool all_finite() const {
    return std::all_of(s_.begin(), s_.end(), [](double v) { return std::isfinite(v); });
  }

private:
  GridSpec grid_{};
  std::vector<double> s_;
};

namespace detail {

/// Cached out-of-place 2D complex plans. Creation is serialized; execution via
/// the new-array interface is thread-safe.
class FftPlans {
public:
  static std::pair<fftw_plan, fftw_plan> get(int n) {
    static FftPlans cache;
    std::lock_guard lock(cache.mutex_);
    auto it = cache.plans_.find(n);
    if (it != cache.plans_.end()) return it->second;
    auto *in = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    auto *out = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    return cache.plans_[n] = {fwd, bwd};
  }

  FftPlans(const FftPlans &) = delete;
  FftPlans &operator=(const FftPlans &) = delete;

private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto &[n, p] : plans_) {
      fftw_destroy_plan(p.first);
      fftw_destroy_plan(p.second);
    }
  }

  std::mutex mutex_;
  std::map<int, std::pair<fftw_plan, fftw_plan>> plans_;
};

inline void fft(int n, bool forward, const complex *in, complex *out) {
  auto [fwd, bwd] = FftPlans::get(n);
  // fftw's new-array interface takes non-const input pointers but does not
  // write to them for out-of-place plans.
  fftw_execute_dft(forward ? fwd : bwd,
                   reinterpret_cast<fftw_complex *>(const_cast<complex *>(in)),
                   reinterpret_cast<fftw_complex *>(out));
}

inline void check_hermitian(const SpectralField &f) {
  const double scale = max_abs_coeff(f);
  if (scale == 0.0) return;
  const double defect = hermitian_defect(f);
  if (defect > 1e-12 * scale)
    throw HermitianSymmetryError("coefficients are not Hermitian-symmetric (relative defect " +
                                 std::to_string(defect / scale) + ")");
}

/// Split Z = FFT(a + i b) of two real fields into the transforms of a and b.
/// Each output is exactly Hermitian.
inline void split_pair(const GridSpec &grid, const std::vector<complex> &z, SpectralField &a,
                       SpectralField &b) {
  const int n = grid.n;
  const double scale = grid.L / static_cast<double>(grid.size());
  a = SpectralField(grid);
  b = SpectralField(grid);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const complex zp = z[static_cast<std::size_t>(ix) * n + iy];
      const complex zm = std::conj(z[static_cast<std::size_t>((n - ix) % n) * n + (n - iy) % n]);
      a(ix, iy) = 0.5 * scale * (zp + zm);
      b(ix, iy) = complex(0.0, -0.5) * scale * (zp - zm);
    }
  }
}

} // namespace detail

/// Expansion coefficients <f, phi_xi>; exactly Hermitian-symmetric.
inline SpectralField forward_transform(const RealField &f) {
  const GridSpec &g = f.grid();
  std::vector<complex> in(g.size()), out(g.size());
  auto s = f.samples();
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = s[i];
  detail::fft(g.n, true, in.data(), out.data());
  SpectralField a, b;
  detail::split_pair(g, out, a, b);
  return a;
}

/// Transforms two real fields with one complex FFT.
inline std::pair<SpectralField, SpectralField> forward_transform(const RealField &f,
                                                                 const RealField &h) {
  if (!(f.grid() == h.grid())) throw GridMismatchError("real fields live on different grids");
  const GridSpec &g = f.grid();
  std::vector<complex> in(g.size()), out(g.size());
  auto a = f.samples();
  auto b = h.samples();
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = complex(a[i], b[i]);
  detail::fft(g.n, true, in.data(), out.data());
  std::pair<SpectralField, SpectralField> r;
  detail::split_pair(g, out, r.first, r.second);
  return r;
}

/// Throws HermitianSymmetryError when the coefficients do not describe a real field.
inline RealField inverse_transform(const SpectralField &f) {
  detail::check_hermitian(f);
  const GridSpec &g = f.grid();
  std::vector<complex> out(g.size());
  detail::fft(g.n, false, f.coeffs().data(), out.data());
  RealField r(g);
  auto s = r.samples();
  const double inv_l = 1.0 / g.L;
  for (std::size_t i = 0; i < out.size(); ++i) s[i] = out[i].real() * inv_l;
  return r;
}

inline std::pair<RealField, RealField> inverse_transform(const SpectralField &f,
                                                         const SpectralField &h) {
  f.check_same(h);
  detail::check_hermitian(f);
  detail::check_hermitian(h);
  const GridSpec &g = f.grid();
  std::vector<complex> in(g.size()), out(g.size());
  auto a = f.coeffs();
  auto b = h.coeffs();
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = a[i] + complex(0.0, 1.0) * b[i];
  detail::fft(g.n, false, in.data(), out.data());
  std::pair<RealField, RealField> r{RealField(g), RealField(g)};
  auto s1 = r.first.samples();
  auto s2 = r.second.samples();
  const double inv_l = 1.0 / g.L;
  for (std::size_t i = 0; i < out.size(); ++i) {
    s1[i] = out[i].real() * inv_l;
    s2[i] = out[i].imag() * inv_l;
  }
  return r;
}

/// Orthogonal projection onto E_M = span{phi_xi : max(|xi_x|, |xi_y|) <= M}.
inline SpectralField project(SpectralField f, int radius) {
  if (radius < 0) throw Error("truncation radius must be nonnegative");
  for_each_mode(f.grid(), [&](int ix, int iy, WaveIndex xi) {
    if (xi.max_abs() > radius) f(ix, iy) = 0.0;
  });
  return f;
}

inline SpectralField project_dealiased(SpectralField f) {
  const int k = f.grid().dealias_radius();
  return project(std::move(f), k);
}

/// Multiplies coeff(xi) by (2 pi i xi_axis / L)^order. Nyquist rows and
/// columns are zeroed afterwards since they have no Hermitian partner.
inline SpectralField derivative(SpectralField f, Axis axis, int order = 1) {
  if (order < 1) throw Error("derivative order must be >= 1");
  const GridSpec &g = f.grid();
  const int n = g.n;
  const int nyq = g.nyquist();
  // i^order as an exact unit.
  static constexpr complex units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const complex unit = units[order % 4];
  std::vector<complex> factor(n);
  for (int i = 0; i < n; ++i) {
    const int wave = wave_of(i, n);
    if (wave == nyq) continue;
    const double kappa = wavenumber(wave, g.L);
    double p = kappa;
    for (int o = 1; o < order; ++o) p *= kappa;
    factor[i] = unit * p;
  }
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      complex &c = f(ix, iy);
      if (ix == nyq || iy == nyq)
        c = 0.0;
      else
        c *= factor[axis == Axis::x ? ix : iy];
    }
  return f;
}

/// |||f|||_m = sqrt(sum lambda^m |coeff|^2); m = 0 is the L2 norm, m = 1 the H1 norm.
inline double sobolev_norm(const SpectralField &f, int m) {
  if (m < 0) throw Error("Sobolev order must be nonnegative");
  const GridSpec &g = f.grid();
  double s = 0.0;
  for_each_mode(g, [&](int ix, int iy, WaveIndex xi) {
    const double lam = eigenvalue(xi, g.L);
    double w = 1.0;
    for (int p = 0; p < m; ++p) w *= lam;
    s += w * std::norm(f(ix, iy));
  });
  return std::sqrt(s);
}

inline double l2_norm(const SpectralField &f) { return sobolev_norm(f, 0); }

/// Collocation approximation of the sup-norm: max |sample|.
inline double linf_norm(const RealField &f) {
  double m = 0.0;
  for (double v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

/// Moves coefficients onto another lattice size; coeff(xi) is grid independent.
/// Modes that do not fit are dropped; a Nyquist mode is split evenly between
/// +-n/2 when refining and folded back when coarsening.
inline SpectralField regrid(const SpectralField &f, const GridSpec &target) {
  SpectralField r(target);
  const int ns = f.n();
  const int nt = target.n;
  auto targets = [&](int wave) {
    std::vector<std::pair<int, double>> out;
    if (std::abs(wave) == ns / 2 && nt > ns) {
      out.push_back({ns / 2, 0.5});
      out.push_back({-ns / 2, 0.5});
    } else if (std::abs(wave) <= nt / 2) {
      out.push_back({wave, 1.0});
    }
    return out;
  };
  for_each_mode(f.grid(), [&](int ix, int iy, WaveIndex xi) {
    const complex c = f(ix, iy);
    if (c == complex{}) return;
    for (auto [wx, ax] : targets(xi.x))
      for (auto [wy, ay] : targets(xi.y)) r.at({wx, wy}) += ax * ay * c;
  });
  return r;
}

/// Sup-norm estimate from an oversampled grid (factor x n points per side).
inline double linf_norm_oversampled(const SpectralField &f, int factor = 4) {
  GridSpec fine = f.grid();
  fine.n = f.n() * factor;
  return linf_norm(inverse_transform(regrid(f, fine)));
}

} // namespace hm
