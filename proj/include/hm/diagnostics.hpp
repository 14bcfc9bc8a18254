#pragma once

/// Per-step scalar diagnostics, the a priori estimates checked along
/// trajectories, the existence-window formulas, and single-mode dispersion.
///
/// All Sobolev norms are the lambda-weighted |||.|||_m, in which the elliptic
/// regularity constant is exactly 1. Sup-norms are collocation maxima.

#include "hm/spectral_grid.hpp"
#include "hm/time_integration.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hm {

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;    ///< |||u|||_1^2
  double enstrophy = 0.0; ///< ||w||^2
  double l2_w = 0.0;
  double h1_w = 0.0;
  double linf_w = 0.0; ///< grid sup-norm
  int corrector_iters = 0;
  double residual = 0.0;
};

inline DiagnosticsRecord record(const State &s, const StepStats &stats = {}) {
  DiagnosticsRecord r;
  r.t = s.t;
  const double e = sobolev_norm(s.u, 1);
  r.energy = e * e;
  r.l2_w = l2_norm(s.w);
  r.enstrophy = r.l2_w * r.l2_w;
  r.h1_w = sobolev_norm(s.w, 1);
  r.linf_w = linf_norm(inverse_transform(s.w));
  r.corrector_iters = stats.corrector_iters;
  r.residual = stats.residual;
  return r;
}

/// Trajectory quantities the a priori estimates are built from.
struct TrajectorySummary {
  double t0 = 0.0;
  double horizon = 0.0; ///< T = t_last - t0
  std::size_t samples = 0;
  double w0_l2 = 0.0;
  double w0_linf = 0.0;
  double w0_h1 = 0.0;
  double u_l2_h1 = 0.0; ///< (int |||u|||_1^2 dt)^(1/2)
  double u_l2_h3 = 0.0; ///< (int |||u|||_3^2 dt)^(1/2)
  double sup_w_l2 = 0.0;
  double sup_w_linf = 0.0;
  double sup_w_h1 = 0.0;
  double dwdt_l2_l2 = 0.0; ///< (int ||w'||^2 dt)^(1/2), w' by centered differences
};

/// Streams states in time order; integrals use the trapezoid rule and w' the
/// centered difference of neighbouring snapshots (one-sided at the ends).
class EstimateAccumulator {
public:
  void push(const State &s) {
    const double h1 = sobolev_norm(s.u, 1);
    const double h3 = sobolev_norm(s.u, 3);
    const double wl2 = l2_norm(s.w);
    const double winf = linf_norm(inverse_transform(s.w));
    const double wh1 = sobolev_norm(s.w, 1);
    if (count_ == 0) {
      sum_.t0 = s.t;
      sum_.w0_l2 = wl2;
      sum_.w0_linf = winf;
      sum_.w0_h1 = wh1;
    } else {
      const double dt = s.t - t_.back();
      int_h1_ += 0.5 * dt * (h1_prev_ * h1_prev_ + h1 * h1);
      int_h3_ += 0.5 * dt * (h3_prev_ * h3_prev_ + h3 * h3);
    }
    sum_.sup_w_l2 = std::max(sum_.sup_w_l2, wl2);
    sum_.sup_w_linf = std::max(sum_.sup_w_linf, winf);
    sum_.sup_w_h1 = std::max(sum_.sup_w_h1, wh1);
    h1_prev_ = h1;
    h3_prev_ = h3;

    // Derivative at the middle sample becomes available once its right
    // neighbour arrives.
    w_.push_back(s.w);
    t_.push_back(s.t);
    if (w_.size() == 2) {
      add_derivative_sample(t_[0], rate(0, 1));
    } else if (w_.size() == 3) {
      add_derivative_sample(t_[1], rate(0, 2));
      w_.erase(w_.begin());
      t_.erase(t_.begin());
    }
    ++count_;
    last_t_ = s.t;
  }

  TrajectorySummary summary() const {
    TrajectorySummary s = sum_;
    s.samples = count_;
    s.horizon = count_ > 0 ? last_t_ - sum_.t0 : 0.0;
    s.u_l2_h1 = std::sqrt(int_h1_);
    s.u_l2_h3 = std::sqrt(int_h3_);
    double dw = int_dw_;
    if (w_.size() == 2) {
      const double d_end = rate(0, 1);
      dw += 0.5 * (t_[1] - last_dw_t_) * (last_dw_ * last_dw_ + d_end * d_end);
    }
    s.dwdt_l2_l2 = std::sqrt(dw);
    return s;
  }

private:
  double rate(std::size_t a, std::size_t b) const {
    return l2_norm(w_[b] - w_[a]) / (t_[b] - t_[a]);
  }

  void add_derivative_sample(double t, double d) {
    if (have_dw_) int_dw_ += 0.5 * (t - last_dw_t_) * (last_dw_ * last_dw_ + d * d);
    have_dw_ = true;
    last_dw_ = d;
    last_dw_t_ = t;
  }

  TrajectorySummary sum_;
  std::size_t count_ = 0;
  double last_t_ = 0.0;
  double int_h1_ = 0.0, int_h3_ = 0.0, h1_prev_ = 0.0, h3_prev_ = 0.0;
  std::vector<SpectralField> w_;
  std::vector<double> t_;
  bool have_dw_ = false;
  double last_dw_ = 0.0, last_dw_t_ = 0.0, int_dw_ = 0.0;
};

inline TrajectorySummary summarize(std::span<const State> traj) {
  EstimateAccumulator acc;
  for (const State &s : traj) acc.push(s);
  return acc.summary();
}

struct EstimateConstants {
  double c_e = 1.0;   ///< elliptic regularity constant
  double c_inf = 1.0; ///< embedding constant of H^2 into L-infinity
};

/// Margin RHS - LHS of sup_t ||w|| <= |k| T^(1/2) ||u||_{L2(H1)} + ||(I - Laplacian) u0||.
inline double check_estimate1(const TrajectorySummary &s, double k,
                              std::optional<double> T = std::nullopt) {
  const double horizon = T.value_or(s.horizon);
  return std::abs(k) * std::sqrt(horizon) * s.u_l2_h1 + s.w0_l2 - s.sup_w_l2;
}

struct EstimateMargins23 {
  double linf;  ///< sup-norm bound
  double h1;    ///< H1 bound
};

/// Margins of
///   sup ||w||_inf <= 2|k| T^(1/2) C_inf ||u||_{L2(H3)} + 2||w0||_inf
///   sup ||w||_H1  <= (16|k| T^(1/2) C_inf ||u||_{L2(H3)} + 16||w0||_inf + 2|k|) T^(1/2) ||u||_{L2(H3)} + ||w0||_H1
/// Negative margins are reported, not thrown: they usually mean C_inf is too small.
inline EstimateMargins23 check_estimate2_3(const TrajectorySummary &s, double k,
                                           const EstimateConstants &c,
                                           std::optional<double> T = std::nullopt) {
  const double rt = std::sqrt(T.value_or(s.horizon));
  const double ak = std::abs(k);
  const double rhs2 = 2.0 * ak * rt * c.c_inf * s.u_l2_h3 + 2.0 * s.w0_linf;
  const double rhs3 =
      (16.0 * ak * rt * c.c_inf * s.u_l2_h3 + 16.0 * s.w0_linf + 2.0 * ak) * rt * s.u_l2_h3 + s.w0_h1;
  return {rhs2 - s.sup_w_linf, rhs3 - s.sup_w_h1};
}

/// Margin of ||w'||_{L2(L2)} <= (4 C_inf sup ||w||_H1 + |k|) ||u||_{L2(H3)}.
inline double check_estimate4(const TrajectorySummary &s, double k, double c_inf) {
  return (4.0 * c_inf * s.sup_w_h1 + std::abs(k)) * s.u_l2_h3 - s.dwdt_l2_l2;
}

enum class WindowVariant {
  H3, ///< u0 in H^3 with w0 in L-infinity
  H2, ///< weak data u0 in H^2
};

inline const char *to_string(WindowVariant v) { return v == WindowVariant::H3 ? "H3" : "H2"; }

struct WindowInputs {
  double k = 0.0;
  double c_e = 1.0;
  double c_inf = 1.0;
  double w0_linf = 0.0;
  double w0_h1 = 0.0;
  double u0_h2 = 0.0;
};

struct WindowReport {
  WindowVariant variant = WindowVariant::H3;
  WindowInputs inputs;
  double A_const = 0.0;
  double B_const = 0.0;
  double C_const = 0.0;
  double T_max = 0.0; ///< supremum of the open existence interval
  double T_eval = std::numeric_limits<double>::quiet_NaN();
  double C_X = std::numeric_limits<double>::quiet_NaN(); ///< at T_eval, NaN when T_eval is outside
  bool T_eval_exceeds = false;
};

/// A = 16|k| C_inf C_E, B = 2 C_E (|k| + 8||w0||_inf) + 1, C = C_E ||w0||_H1.
/// H3: T < 1 / (B + 2 sqrt(AC)), C_X = C T^(1/2) / (1 - BT) for k = 0 and
///     (1 - BT) / (2 A T^(3/2)) otherwise.
/// H2: T < 1 / (C_E |k| + 1), C_X = 3 C_E T^(1/2) ||u0||_H2 / (1 - C_E |k| T).
inline WindowReport existence_window(const WindowInputs &in, WindowVariant variant,
                                     std::optional<double> T_eval = std::nullopt) {
  WindowReport r;
  r.variant = variant;
  r.inputs = in;
  const double ak = std::abs(in.k);
  r.A_const = 16.0 * ak * in.c_inf * in.c_e;
  r.B_const = 2.0 * in.c_e * (ak + 8.0 * in.w0_linf) + 1.0;
  r.C_const = in.c_e * in.w0_h1;
  if (variant == WindowVariant::H3)
    r.T_max = 1.0 / (r.B_const + 2.0 * std::sqrt(r.A_const * r.C_const));
  else
    r.T_max = 1.0 / (in.c_e * ak + 1.0);

  if (T_eval) {
    const double T = *T_eval;
    r.T_eval = T;
    r.T_eval_exceeds = !(T < r.T_max);
    if (T > 0.0 && !r.T_eval_exceeds) {
      if (variant == WindowVariant::H2)
        r.C_X = 3.0 * in.c_e * std::sqrt(T) * in.u0_h2 / (1.0 - in.c_e * ak * T);
      else if (in.k == 0.0)
        r.C_X = r.C_const * std::sqrt(T) / (1.0 - r.B_const * T);
      else
        r.C_X = (1.0 - r.B_const * T) / (2.0 * r.A_const * T * std::sqrt(T));
    }
  }
  return r;
}

/// Norms of the initial data, with ||w0||_inf taken on a 4x oversampled grid.
inline WindowInputs window_inputs(const SpectralField &w0, const SpectralField &u0, double k,
                                  const EstimateConstants &c) {
  return {k, c.c_e, c.c_inf, linf_norm_oversampled(w0, 4), sobolev_norm(w0, 1), sobolev_norm(u0, 2)};
}

inline WindowReport existence_window(const SpectralField &w0, const SpectralField &u0, double k,
                                     const EstimateConstants &c, WindowVariant variant,
                                     std::optional<double> T_eval = std::nullopt) {
  return existence_window(window_inputs(w0, u0, k, c), variant, T_eval);
}

/// omega = -k (2 pi xi_y / L) / lambda(xi), for modes evolving as exp(-i omega t).
inline double analytic_frequency(WaveIndex xi, double k, double L) {
  return -k * wavenumber(xi.y, L) / eigenvalue(xi, L);
}

/// Least-squares slope of the unwrapped phase of c(t); returns omega with
/// c ~ exp(-i omega t).
inline double measure_frequency(std::span<const double> t, std::span<const complex> c) {
  if (t.size() != c.size() || t.size() < 2) throw Error("frequency fit needs at least two samples");
  std::vector<double> phase(t.size());
  double offset = 0.0;
  double prev = std::arg(c[0]);
  phase[0] = prev;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double a = std::arg(c[i]);
    double d = a - prev;
    if (d > std::numbers::pi) offset -= two_pi;
    if (d < -std::numbers::pi) offset += two_pi;
    prev = a;
    phase[i] = a + offset;
  }
  double tm = 0.0, pm = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    pm += phase[i];
  }
  tm /= static_cast<double>(t.size());
  pm /= static_cast<double>(t.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - tm) * (phase[i] - pm);
    sxx += (t[i] - tm) * (t[i] - tm);
  }
  return -sxy / sxx;
}

/// Grid sup-norm of grad w. Observational only: no estimate bounds it.
inline double gradient_linf(const SpectralField &w) {
  auto [wx, wy] = inverse_transform(derivative(w, Axis::x), derivative(w, Axis::y));
  double m = 0.0;
  auto a = wx.samples(), b = wy.samples();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::hypot(a[i], b[i]));
  return m;
}

/// ||P_M u||_inf / ||u||_inf on 4x oversampled grids (0 for u = 0).
inline double projection_linf_ratio(const SpectralField &u, int radius) {
  const double full = linf_norm_oversampled(u, 4);
  return full > 0.0 ? linf_norm_oversampled(project(u, radius), 4) / full : 0.0;
}

/// Relative error against the analytic dispersion relation (absolute when omega = 0).
inline double dispersion_check(WaveIndex xi, double k, double L, double measured) {
  const double omega = analytic_frequency(xi, k, L);
  return omega == 0.0 ? std::abs(measured) : std::abs(measured - omega) / std::abs(omega);
}

} // namespace hm
