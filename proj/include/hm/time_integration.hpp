#pragma once

/// Time advancement of the coupled pair (u, w): the implicit Crank-Nicolson
/// predictor-corrector step, the fixed-point construction u -> E(H_N(u)) on
/// E_M, and an explicit RK4 reference step.

#include "hm/elliptic.hpp"
#include "hm/errors.hpp"
#include "hm/hyperbolic.hpp"
#include "hm/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace hm {

/// Time-stamped pair with w = (I - Laplacian) u.
struct State {
  double t = 0.0;
  SpectralField u;
  SpectralField w;

  static State from_u(double t, SpectralField u) {
    SpectralField w = apply_helmholtz(u);
    return {t, std::move(u), std::move(w)};
  }
  static State from_w(double t, SpectralField w) {
    SpectralField u = solve_elliptic(w);
    return {t, std::move(u), std::move(w)};
  }

  /// ||(I - Laplacian) u - w|| / ||w|| (absolute when w = 0).
  double coupling_defect() const {
    const double d = l2_norm(apply_helmholtz(u) - w);
    const double s = l2_norm(w);
    return s > 0.0 ? d / s : d;
  }
};

/// Which W enters the implicit advection term of the CN step.
enum class Centering {
  paper_form,  ///< W(t+tau) with velocity from U(t+tau) + U(t)
  symmetric_w, ///< (W(t+tau) + W(t)) / 2
};

struct SchemeParams {
  double tau = 1e-3;
  double corrector_tol = 1e-10; ///< L2 residual relative to ||w||
  int max_correctors = 50;
  Centering centering = Centering::paper_form;
  AdvectionModel model{};

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time.dt", "time step must be positive");
    if (!(corrector_tol > 0.0)) throw ConfigError("solver.tol", "tolerance must be positive");
    if (max_correctors < 1) throw ConfigError("solver.max_iters", "must be >= 1");
  }
};

struct StepStats {
  int corrector_iters = 0;
  int inner_iters = 0;
  double residual = 0.0;
};

struct StepResult {
  State state;
  StepStats stats;
};

namespace detail {

inline double residual_scale(const SpectralField &w_old) {
  const double s = l2_norm(w_old);
  return s > 0.0 ? s : 1.0;
}

inline SpectralField centered_w(Centering c, const SpectralField &w_new, const SpectralField &w_old) {
  if (c == Centering::paper_form) return w_new;
  SpectralField m = w_new + w_old;
  return m *= 0.5;
}

} // namespace detail

/// One Crank-Nicolson step of
///   W' = W - (tau/2) V(U' + U).grad(W*) + (tau k / 2) d_y(U' + U),  U' = E(W'),
/// with W* per `p.centering`. The predictor extrapolates linearly from
/// `u_older` (taken `tau_prev` before s.t) or copies U when none is given.
/// Each corrector pass freezes the velocity sum and solves the linear implicit
/// advection for W' by Picard sub-iteration, then re-solves U' = E(W').
inline StepResult cn_step(const State &s, const SchemeParams &p, double k,
                          const SpectralField *u_older = nullptr, double tau_prev = 0.0) {
  p.validate();
  const GridSpec &g = s.u.grid();
  const int radius = p.model.state_radius(g);
  const double tau = p.tau;
  const SpectralField &u_old = s.u;
  const SpectralField &w_old = s.w;

  SpectralField u = u_old;
  if (u_older != nullptr && tau_prev > 0.0) u.axpy(tau / tau_prev, u_old - *u_older);
  u = project(std::move(u), radius);
  SpectralField w = apply_helmholtz(u);

  const double scale = detail::residual_scale(w_old);
  auto k_term = [&](const SpectralField &u_new) {
    SpectralField d = project(derivative(u_new + u_old, Axis::y), radius);
    return d *= 0.5 * tau * k;
  };

  StepStats stats;
  std::optional<FrozenAdvection> adv;
  adv.emplace(p.model, u + u_old);
  for (int pass = 1; pass <= p.max_correctors; ++pass) {
    const SpectralField forcing = w_old + k_term(u);
    for (int j = 0; j < p.max_correctors; ++j) {
      SpectralField next = forcing;
      next.axpy(-0.5 * tau, (*adv)(detail::centered_w(p.centering, w, w_old)));
      next = project(std::move(next), radius);
      const double change = l2_norm(next - w) / scale;
      w = std::move(next);
      ++stats.inner_iters;
      if (change <= 0.1 * p.corrector_tol) break;
    }
    u = solve_elliptic(w);

    adv.emplace(p.model, u + u_old);
    SpectralField r = w - w_old;
    r.axpy(0.5 * tau, (*adv)(detail::centered_w(p.centering, w, w_old)));
    r -= k_term(u);
    stats.corrector_iters = pass;
    stats.residual = l2_norm(r) / scale;
    if (!std::isfinite(stats.residual)) break;
    if (stats.residual <= p.corrector_tol) return {{s.t + tau, std::move(u), std::move(w)}, stats};
  }
  throw NonConvergenceError("CN corrector did not converge (last residual " +
                                std::to_string(stats.residual) + "); the time step is likely too large",
                            stats.residual, stats.corrector_iters);
}

/// Keeps the history the CN predictor needs.
class CnIntegrator {
public:
  CnIntegrator(State initial, SchemeParams params, double k)
      : state_(std::move(initial)), params_(params), k_(k) {}

  const State &state() const { return state_; }
  const SchemeParams &params() const { return params_; }

  StepStats step(double tau) {
    SchemeParams p = params_;
    p.tau = tau;
    StepResult r = cn_step(state_, p, k_, u_prev_ ? &*u_prev_ : nullptr, tau_prev_);
    u_prev_ = std::move(state_.u);
    tau_prev_ = tau;
    state_ = std::move(r.state);
    return r.stats;
  }
  StepStats step() { return step(params_.tau); }

private:
  State state_;
  SchemeParams params_;
  double k_;
  std::optional<SpectralField> u_prev_;
  double tau_prev_ = 0.0;
};

/// Classical four-stage step on w_t = rhs(E(w), w, k).
inline State rk4_step(const State &s, double tau, double k, const AdvectionModel &model = {}) {
  const int radius = model.state_radius(s.w.grid());
  auto f = [&](const SpectralField &w) { return rhs(model, solve_elliptic(w), w, k); };
  const SpectralField k1 = f(s.w);
  const SpectralField k2 = f(SpectralField(s.w).axpy(0.5 * tau, k1));
  const SpectralField k3 = f(SpectralField(s.w).axpy(0.5 * tau, k2));
  const SpectralField k4 = f(SpectralField(s.w).axpy(tau, k3));
  SpectralField w = s.w;
  w.axpy(tau / 6.0, k1).axpy(tau / 3.0, k2).axpy(tau / 3.0, k3).axpy(tau / 6.0, k4);
  return State::from_w(s.t + tau, project(std::move(w), radius));
}

/// Samples of a field at increasing times, linearly interpolated in between.
struct FieldSeries {
  std::vector<double> t;
  std::vector<SpectralField> f;

  std::size_t size() const { return t.size(); }

  SpectralField at(double time) const {
    if (t.empty()) throw Error("empty field series");
    if (time <= t.front()) return f.front();
    if (time >= t.back()) return f.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t hi = static_cast<std::size_t>(it - t.begin());
    const std::size_t lo = hi - 1;
    const double a = (time - t[lo]) / (t[hi] - t[lo]);
    if (a == 0.0) return f[lo];
    SpectralField r = f[lo];
    r *= 1.0 - a;
    return r.axpy(a, f[hi]);
  }
};

namespace detail {

inline int step_count(double T, double h, const char *what) {
  if (!(h > 0.0)) throw Error(std::string(what) + ": step must be positive");
  const double ratio = T / h;
  const long long steps = std::llround(ratio);
  if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    throw Error(std::string(what) + ": horizon must be an integer multiple of the step");
  return static_cast<int>(steps);
}

} // namespace detail

/// Spectral solution operator H_N: integrates C' = -A(t)^T C + F(t) on E_M
/// with classical RK4 at step tau_ode, with A and F assembled from u(t)
/// interpolated linearly between the samples of u_traj. Output sampled at
/// every ODE step.
inline FieldSeries hn_solve(const FieldSeries &u_traj, int radius, double k, const SpectralField &w0,
                            double T, double tau_ode) {
  const int steps = detail::step_count(T, tau_ode, "hn_solve");
  const GridSpec &g = w0.grid();
  const RealBasis basis(radius);
  std::vector<double> c = basis.coordinates(project(w0, radius));
  const std::size_t N = c.size();

  FieldSeries out;
  out.t.reserve(steps + 1);
  out.f.reserve(steps + 1);
  out.t.push_back(0.0);
  out.f.push_back(basis.field(c, g));

  auto system_at = [&](double t) { return assemble_galerkin(u_traj.at(t), radius, k); };
  GalerkinSystem s0 = system_at(0.0);
  std::vector<double> tmp(N);
  for (int i = 0; i < steps; ++i) {
    const double t = i * tau_ode;
    const GalerkinSystem s_half = system_at(t + 0.5 * tau_ode);
    GalerkinSystem s1 = system_at(t + tau_ode);
    const auto k1 = s0.drift(c);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = c[j] + 0.5 * tau_ode * k1[j];
    const auto k2 = s_half.drift(tmp);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = c[j] + 0.5 * tau_ode * k2[j];
    const auto k3 = s_half.drift(tmp);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = c[j] + tau_ode * k3[j];
    const auto k4 = s1.drift(tmp);
    for (std::size_t j = 0; j < N; ++j) {
      c[j] += tau_ode / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(c[j])) throw DivergenceError("hn_solve: coefficients overflowed");
    }
    s0 = std::move(s1);
    out.t.push_back(i + 1 == steps ? T : (i + 1) * tau_ode);
    out.f.push_back(basis.field(c, g));
  }
  return out;
}

struct PicardParams {
  double tau = 1e-2; ///< trajectory sampling step, also the ODE step
  double tol = 1e-10; ///< on sup_t |||u^(m+1) - u^(m)|||_1
  int max_iters = 50;
};

struct PicardResult {
  FieldSeries u;
  FieldSeries w;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Fixed point of u -> E(H_N(u)) on C([0,T], E_M), starting from u(t) = P_M u0.
inline PicardResult picard_fixed_point(const SpectralField &u0, int radius, double k, double T,
                                       const PicardParams &p) {
  const int steps = detail::step_count(T, p.tau, "picard_fixed_point");
  const SpectralField u_start = project(u0, radius);
  const SpectralField w_start = apply_helmholtz(u_start);

  PicardResult r;
  r.u.t.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) r.u.t[i] = i == steps ? T : i * p.tau;
  r.u.f.assign(steps + 1, u_start);

  for (int m = 1; m <= p.max_iters; ++m) {
    FieldSeries w = hn_solve(r.u, radius, k, w_start, T, p.tau);
    double diff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      SpectralField next = solve_elliptic(w.f[i]);
      diff = std::max(diff, sobolev_norm(next - r.u.f[i], 1));
      r.u.f[i] = std::move(next);
    }
    r.w = std::move(w);
    r.iterations = m;
    r.residual_history.push_back(diff);
    if (diff <= p.tol) return r;
  }
  throw NonConvergenceError("fixed-point iteration did not converge; T or N too large for contraction",
                            r.residual_history.back(), r.iterations);
}

} // namespace hm
