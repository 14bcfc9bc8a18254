#pragma once

/// Run driver: initial conditions, stepping with any solver mode, on-disk
/// outputs (diagnostics CSV, snapshots, MANIFEST), and the study drivers
/// (time/space convergence, dispersion, window, sweep).

#include "hm/config.hpp"
#include "hm/diagnostics.hpp"
#include "hm/snapshot.hpp"
#include "hm/time_integration.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace hm {

// ---------------------------------------------------------------- initial data

/// Fourier coefficients of the periodized Gaussian a exp(-|x - c|^2 / (2 s^2)):
/// <u, phi_xi> = (2 pi a s^2 / L) exp(-s^2 |kappa|^2 / 2) exp(-i kappa.c).
inline SpectralField gaussian_vortex(const GridSpec &g, double amplitude, double width, double cx,
                                     double cy) {
  SpectralField f(g);
  const double pre = two_pi * amplitude * width * width / g.L;
  const int nyq = g.nyquist();
  for_each_mode(g, [&](int ix, int iy, WaveIndex xi) {
    if (xi.x == nyq || xi.y == nyq) return;
    const double kx = wavenumber(xi.x, g.L), ky = wavenumber(xi.y, g.L);
    const double mag = pre * std::exp(-0.5 * width * width * (kx * kx + ky * ky));
    f(ix, iy) = std::polar(mag, -(kx * cx + ky * cy));
  });
  return f;
}

/// Random Hermitian spectrum on E_radius with |coeff| = amplitude (L/2) (1 + |xi|^2)^(-p/2)
/// and uniform phases; the mean is zero. All random numbers come from one
/// mt19937_64 seeded with `seed`, drawn in a fixed mode order.
inline SpectralField random_spectrum(const GridSpec &g, double amplitude, double decay_exponent,
                                     std::uint64_t seed, int radius) {
  std::mt19937_64 gen(seed);
  auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  SpectralField f(g);
  for (int x = 0; x <= radius; ++x) {
    for (int y = -radius; y <= radius; ++y) {
      if (x == 0 && y <= 0) continue;
      const WaveIndex xi{x, y};
      const double mag = amplitude * 0.5 * g.L * std::pow(1.0 + xi.norm2(), -0.5 * decay_exponent);
      const complex c = std::polar(mag, two_pi * uniform());
      f.at(xi) = c;
      f.at(-xi) = std::conj(c);
    }
  }
  return f;
}

/// u0 for the configured initial condition, before projection.
inline SpectralField initial_u(const SimConfig &cfg) {
  const GridSpec g = cfg.grid();
  const IcParams &p = cfg.ic;
  switch (cfg.ic_type) {
  case IcType::single_mode:
    return cosine_mode(g, {p.xi_x, p.xi_y}, p.amplitude);
  case IcType::gaussian_vortex:
    return gaussian_vortex(g, p.amplitude, p.width, 0.5 * g.L, 0.5 * g.L);
  case IcType::random_spectrum:
    return random_spectrum(g, p.amplitude, p.decay_exponent, *p.seed, g.dealias_radius());
  case IcType::from_file: {
    Snapshot s;
    try {
      s = read_snapshot(p.path);
    } catch (const SnapshotError &e) {
      throw ConfigError("ic.params.path", e.what());
    }
    if (static_cast<int>(s.n) != g.n || std::abs(s.L - g.L) > 1e-12 * g.L)
      throw ConfigError("ic.params.path", "snapshot grid does not match domain.L / grid.n");
    return forward_transform(RealField(g, s.u));
  }
  }
  throw ConfigError("ic.type", "unknown initial condition");
}

/// Radius of the space the solver state is kept in.
inline int state_radius(const SimConfig &cfg) {
  if (cfg.mode == SolverMode::picard_galerkin) return cfg.picard_radius();
  return cfg.advection().state_radius(cfg.grid());
}

/// u(0) = P u0 and w(0) = (I - Laplacian) P u0.
inline State build_initial_state(const SimConfig &cfg) {
  cfg.validate();
  return State::from_u(0.0, project(initial_u(cfg), state_radius(cfg)));
}

// ---------------------------------------------------------------- stepping

/// Step sizes covering [0, T]: full steps of dt, the last one shortened when
/// T is not a multiple of dt.
inline std::vector<double> step_sizes(double T, double dt) {
  std::vector<double> h;
  if (T <= 0.0) return h;
  const double ratio = T / dt;
  long long full = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(full)) > 1e-9 * std::max(1.0, ratio))
    full = static_cast<long long>(std::floor(ratio));
  h.assign(static_cast<std::size_t>(full), dt);
  const double rest = T - static_cast<double>(full) * dt;
  if (rest > 1e-9 * dt) h.push_back(rest);
  return h;
}

using StepObserver = std::function<void(const State &, const StepStats &, std::size_t step)>;

/// Advances the configured initial state to T, calling `observe` for the
/// initial state (step 0) and after every step. Solver failures propagate.
inline State simulate(const SimConfig &cfg, const StepObserver &observe) {
  State s = build_initial_state(cfg);
  observe(s, {}, 0);
  const std::vector<double> h = step_sizes(cfg.T, cfg.dt);
  const double k = cfg.k;

  switch (cfg.mode) {
  case SolverMode::cn: {
    CnIntegrator integ(std::move(s), cfg.scheme(), k);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const StepStats st = integ.step(h[i]);
      if (i + 1 == h.size()) {
        State last = integ.state();
        last.t = cfg.T;
        observe(last, st, i + 1);
        return last;
      }
      observe(integ.state(), st, i + 1);
    }
    return integ.state();
  }
  case SolverMode::rk4: {
    const AdvectionModel model = cfg.advection();
    for (std::size_t i = 0; i < h.size(); ++i) {
      s = rk4_step(s, h[i], k, model);
      if (i + 1 == h.size()) s.t = cfg.T;
      if (!std::isfinite(l2_norm(s.w))) throw DivergenceError("rk4: solution overflowed");
      observe(s, {}, i + 1);
    }
    return s;
  }
  case SolverMode::picard_galerkin: {
    if (h.empty()) return s;
    if (h.size() > 1 && h.back() != h.front())
      throw ConfigError("time.T", "picard_galerkin needs T to be an integer multiple of time.dt");
    PicardParams pp{cfg.dt, cfg.tol, cfg.max_iters};
    const PicardResult r = picard_fixed_point(s.u, cfg.picard_radius(), k, cfg.T, pp);
    StepStats st{r.iterations, 0, r.residual_history.back()};
    State cur = s;
    for (std::size_t i = 1; i < r.w.size(); ++i) {
      cur = State::from_w(r.w.t[i], r.w.f[i]);
      observe(cur, st, i);
    }
    return cur;
  }
  }
  return s;
}

// ---------------------------------------------------------------- run

enum class RunStatus { completed, nonconvergence, divergence };

inline const char *to_string(RunStatus s) {
  switch (s) {
  case RunStatus::completed: return "complete";
  case RunStatus::nonconvergence: return "truncated: solver did not converge";
  case RunStatus::divergence: return "truncated: solution diverged";
  }
  return "?";
}

struct EstimateReport {
  double estimate1 = 0.0;
  double estimate2 = 0.0;
  double estimate3 = 0.0;
  double estimate4 = 0.0;
};

inline EstimateReport estimate_margins(const TrajectorySummary &s, double k, const EstimateConstants &c) {
  const auto m23 = check_estimate2_3(s, k, c);
  return {check_estimate1(s, k), m23.linf, m23.h1, check_estimate4(s, k, c.c_inf)};
}

struct RunReport {
  RunStatus status = RunStatus::completed;
  std::string message;
  std::size_t steps_planned = 0;
  std::size_t steps_completed = 0;
  double final_t = 0.0;
  TrajectorySummary summary;
  EstimateReport margins;
  EstimateConstants constants;
  double max_energy_drift = 0.0;    ///< max_t |E(t) - E(0)| / E(0)
  double max_enstrophy_drift = 0.0; ///< same for ||w||^2
  double sup_grad_w_linf = 0.0;     ///< observational series maximum
  double wall_seconds = 0.0;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// The fixed-point construction is only known to contract below the H3
/// existence window; running past it is allowed but flagged.
inline std::vector<std::string> run_warnings(const SimConfig &cfg) {
  std::vector<std::string> out;
  if (cfg.mode != SolverMode::picard_galerkin) return out;
  const State s = build_initial_state(cfg);
  const WindowReport w = existence_window(s.w, s.u, cfg.k, cfg.constants(), WindowVariant::H3, cfg.T);
  if (w.T_eval_exceeds)
    out.push_back("time.T = " + std::to_string(cfg.T) + " is not below the existence window T_max = " +
                  std::to_string(w.T_max) + "; the fixed-point iteration may fail to converge");
  return out;
}

namespace detail {

inline std::string csv_row(const DiagnosticsRecord &r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n", r.t, r.energy,
                r.enstrophy, r.l2_w, r.h1_w, r.linf_w, r.corrector_iters, r.residual);
  return buf;
}

inline std::string snapshot_name(std::size_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_%06zu.hmsnap", step);
  return buf;
}

inline double relative_change(double now, double ref) {
  return ref != 0.0 ? std::abs(now - ref) / std::abs(ref) : std::abs(now - ref);
}

} // namespace detail

inline constexpr const char *diagnostics_header = "t,energy,enstrophy,l2_w,h1_w,linf_w,corrector_iters,residual";

/// Collects the per-step bookkeeping shared by run() and the studies.
class RunMonitor {
public:
  explicit RunMonitor(const SimConfig &cfg) : cfg_(cfg) {}

  void observe(const State &s, const StepStats &st) {
    acc_.push(s);
    const DiagnosticsRecord r = record(s, st);
    if (records_.empty()) {
      e0_ = r.energy;
      z0_ = r.enstrophy;
    }
    grad_w_ = std::max(grad_w_, gradient_linf(s.w));
    energy_drift_ = std::max(energy_drift_, detail::relative_change(r.energy, e0_));
    enstrophy_drift_ = std::max(enstrophy_drift_, detail::relative_change(r.enstrophy, z0_));
    records_.push_back(r);
  }

  const std::vector<DiagnosticsRecord> &records() const { return records_; }
  TrajectorySummary summary() const { return acc_.summary(); }
  double energy_drift() const { return energy_drift_; }
  double enstrophy_drift() const { return enstrophy_drift_; }

  void fill(RunReport &rep) const {
    rep.summary = summary();
    rep.constants = cfg_.constants();
    rep.margins = estimate_margins(rep.summary, cfg_.k, rep.constants);
    rep.max_energy_drift = energy_drift_;
    rep.max_enstrophy_drift = enstrophy_drift_;
    rep.sup_grad_w_linf = grad_w_;
  }

private:
  SimConfig cfg_;
  EstimateAccumulator acc_;
  std::vector<DiagnosticsRecord> records_;
  double e0_ = 0.0, z0_ = 0.0, energy_drift_ = 0.0, enstrophy_drift_ = 0.0, grad_w_ = 0.0;
};

/// Steps without touching the disk; solver failures end the run early and are
/// reported through the status.
inline RunReport run_in_memory(const SimConfig &cfg, State *final_state = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.steps_planned = step_sizes(cfg.T, cfg.dt).size();
  rep.warnings = run_warnings(cfg);
  RunMonitor mon(cfg);
  try {
    State last = simulate(cfg, [&](const State &s, const StepStats &st, std::size_t step) {
      mon.observe(s, st);
      rep.steps_completed = step;
      rep.final_t = s.t;
    });
    if (final_state) *final_state = std::move(last);
  } catch (const NonConvergenceError &e) {
    rep.status = RunStatus::nonconvergence;
    rep.message = e.what();
  } catch (const DivergenceError &e) {
    rep.status = RunStatus::divergence;
    rep.message = e.what();
  }
  mon.fill(rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline nlohmann::json to_json(const RunReport &r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  j["steps_planned"] = r.steps_planned;
  j["steps_completed"] = r.steps_completed;
  j["final_t"] = r.final_t;
  j["estimates"]["c_e"] = r.constants.c_e;
  j["estimates"]["c_inf"] = r.constants.c_inf;
  j["estimates"]["estimate1_margin"] = r.margins.estimate1;
  j["estimates"]["estimate2_margin"] = r.margins.estimate2;
  j["estimates"]["estimate3_margin"] = r.margins.estimate3;
  j["estimates"]["estimate4_margin"] = r.margins.estimate4;
  j["max_energy_drift"] = r.max_energy_drift;
  j["max_enstrophy_drift"] = r.max_enstrophy_drift;
  j["sup_grad_w_linf"] = r.sup_grad_w_linf;
  j["wall_seconds"] = r.wall_seconds;
  j["files"] = r.files;
  j["warnings"] = r.warnings;
  return j;
}

/// Full run with outputs in `out_dir` (cfg.output.dir when empty):
/// diagnostics.csv with one row per stored state, a snapshot at step 0, every
/// output.every steps and at the end, and MANIFEST.json. On solver failure the
/// files written so far are kept and the MANIFEST records the truncation.
inline RunReport run(const SimConfig &cfg, std::string out_dir = {}) {
  namespace fs = std::filesystem;
  if (out_dir.empty()) out_dir = cfg.output_dir;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  const std::size_t planned = step_sizes(cfg.T, cfg.dt).size();
  rep.steps_planned = planned;
  rep.warnings = run_warnings(cfg);

  std::ofstream csv(dir / "diagnostics.csv", std::ios::binary | std::ios::trunc);
  if (!csv) throw Error("cannot write " + (dir / "diagnostics.csv").string());
  csv << diagnostics_header << '\n';
  rep.files.push_back("diagnostics.csv");

  RunMonitor mon(cfg);
  auto observe = [&](const State &s, const StepStats &st, std::size_t step) {
    mon.observe(s, st);
    csv << detail::csv_row(mon.records().back());
    csv.flush();
    if (step % static_cast<std::size_t>(cfg.output_every) == 0 || step == planned) {
      const std::string name = detail::snapshot_name(step);
      write_snapshot((dir / name).string(), make_snapshot(s, cfg.k));
      rep.files.push_back(name);
    }
    rep.steps_completed = step;
    rep.final_t = s.t;
  };

  try {
    simulate(cfg, observe);
  } catch (const NonConvergenceError &e) {
    rep.status = RunStatus::nonconvergence;
    rep.message = e.what();
  } catch (const DivergenceError &e) {
    rep.status = RunStatus::divergence;
    rep.message = e.what();
  }
  csv.close();
  mon.fill(rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest = to_json(rep);
  manifest["config"] = to_json(cfg);
  manifest["seed"] = cfg.ic.seed ? nlohmann::json(*cfg.ic.seed) : nlohmann::json(nullptr);
  manifest["truncated"] = rep.status != RunStatus::completed;
  std::ofstream(dir / "MANIFEST.json", std::ios::trunc) << manifest.dump(2) << '\n';
  return rep;
}

// ---------------------------------------------------------------- studies

struct OrderReport {
  std::string parameter;            ///< "dt" or "n"
  std::vector<double> resolutions;  ///< coarse to fine
  std::vector<double> errors;       ///< L2 of w against the finest run (last entry 0)
  std::vector<double> differences;  ///< L2 of w between neighbouring runs
  std::vector<double> orders;       ///< observed orders
  std::vector<RunReport> runs;      ///< one per resolution, same order
};

namespace detail {

inline void check_resolutions(std::vector<double> values, const char *what) {
  if (values.size() < 3) throw StudyError(std::string(what) + ": need at least 3 resolutions");
  std::sort(values.begin(), values.end());
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i] == values[i + 1]) throw StudyError(std::string(what) + ": resolutions must be distinct");
  for (double v : values)
    if (!(v > 0.0)) throw StudyError(std::string(what) + ": resolutions must be positive");
}

/// Order p solving d0/d1 = (h0^p - h1^p) / (h1^p - h2^p) for h0 > h1 > h2:
/// the Richardson estimate from three runs without a reference solution.
inline double richardson_order(double d0, double d1, double h0, double h1, double h2) {
  if (!(d0 > 0.0) || !(d1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double target = std::log(d0 / d1);
  auto g = [&](double p) {
    return std::log((std::pow(h0, p) - std::pow(h1, p)) / (std::pow(h1, p) - std::pow(h2, p))) - target;
  };
  double lo = 1e-3, hi = 20.0;
  if (g(lo) > 0.0 || g(hi) < 0.0) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline void require_completed(const RunReport &r, const std::string &label) {
  if (r.status != RunStatus::completed) throw StudyError(label + ": " + r.message);
}

} // namespace detail

/// Runs cfg at each dt (coarse to fine) to T and compares final w.
inline OrderReport converge_time(const SimConfig &cfg, std::vector<double> taus) {
  detail::check_resolutions(taus, "converge-time");
  std::sort(taus.begin(), taus.end(), std::greater<>());
  OrderReport rep;
  rep.parameter = "dt";
  rep.resolutions = taus;
  std::vector<SpectralField> finals;
  for (double tau : taus) {
    SimConfig c = cfg;
    c.dt = tau;
    c.validate();
    State last;
    rep.runs.push_back(run_in_memory(c, &last));
    detail::require_completed(rep.runs.back(), "converge-time dt=" + std::to_string(tau));
    finals.push_back(std::move(last.w));
  }
  for (const auto &f : finals) rep.errors.push_back(l2_norm(f - finals.back()));
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) rep.differences.push_back(l2_norm(finals[i] - finals[i + 1]));
  for (std::size_t i = 0; i + 2 < finals.size(); ++i)
    rep.orders.push_back(detail::richardson_order(rep.differences[i], rep.differences[i + 1], taus[i],
                                                  taus[i + 1], taus[i + 2]));
  return rep;
}

/// Runs cfg at each n (coarse to fine) and compares final w against the
/// finest grid after spectral regridding. `orders` holds successive
/// log(e_i / e_{i+1}) / log(n_{i+1} / n_i) over the non-reference runs.
inline OrderReport converge_space(const SimConfig &cfg, std::vector<int> ns) {
  detail::check_resolutions(std::vector<double>(ns.begin(), ns.end()), "converge-space");
  std::sort(ns.begin(), ns.end());
  OrderReport rep;
  rep.parameter = "n";
  std::vector<State> finals;
  for (int n : ns) {
    SimConfig c = cfg;
    c.n = n;
    try {
      c.validate();
    } catch (const ConfigError &e) {
      throw StudyError(std::string("converge-space: ") + e.what());
    }
    State last;
    rep.runs.push_back(run_in_memory(c, &last));
    detail::require_completed(rep.runs.back(), "converge-space n=" + std::to_string(n));
    rep.resolutions.push_back(n);
    finals.push_back(std::move(last));
  }
  const SpectralField &ref = finals.back().w;
  for (const State &s : finals) rep.errors.push_back(l2_norm(regrid(s.w, ref.grid()) - ref));
  for (std::size_t i = 0; i + 1 < finals.size(); ++i)
    rep.differences.push_back(l2_norm(regrid(finals[i].w, ref.grid()) - regrid(finals[i + 1].w, ref.grid())));
  for (std::size_t i = 0; i + 2 < finals.size(); ++i)
    rep.orders.push_back(std::log(rep.errors[i] / rep.errors[i + 1]) /
                         std::log(rep.resolutions[i + 1] / rep.resolutions[i]));
  return rep;
}

struct DispersionReport {
  WaveIndex xi;
  double k = 0.0;
  double L = 0.0;
  double measured = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
  RunReport run;
};

/// Single-mode run; the frequency is regressed from the phase of u's
/// coefficient at xi over all steps.
inline DispersionReport dispersion(const SimConfig &cfg) {
  if (cfg.ic_type != IcType::single_mode) throw StudyError("dispersion: needs ic.type = single_mode");
  const WaveIndex xi{cfg.ic.xi_x, cfg.ic.xi_y};
  if (xi == WaveIndex{}) throw StudyError("dispersion: the mean mode has no phase");
  const auto start = std::chrono::steady_clock::now();
  DispersionReport rep;
  rep.xi = xi;
  rep.k = cfg.k;
  rep.L = cfg.L;
  rep.run.steps_planned = step_sizes(cfg.T, cfg.dt).size();
  std::vector<double> t;
  std::vector<complex> c;
  RunMonitor mon(cfg);
  simulate(cfg, [&](const State &s, const StepStats &st, std::size_t step) {
    mon.observe(s, st);
    t.push_back(s.t);
    c.push_back(s.u.at(xi));
    rep.run.steps_completed = step;
    rep.run.final_t = s.t;
  });
  if (t.size() < 2) throw StudyError("dispersion: needs at least one step");
  mon.fill(rep.run);
  rep.measured = measure_frequency(t, c);
  rep.analytic = analytic_frequency(xi, cfg.k, cfg.L);
  rep.rel_error = dispersion_check(xi, cfg.k, cfg.L, rep.measured);
  rep.run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

struct WindowStudy {
  WindowReport h3;
  WindowReport h2;
  int radius = 0;                ///< truncation radius of the configured solver
  double projection_ratio = 0.0; ///< ||P u0||_inf / ||u0||_inf, informational
  std::vector<std::string> warnings;
};

/// Both window variants for the configured initial data, evaluated at time.T.
inline WindowStudy window(const SimConfig &cfg) {
  const State s = build_initial_state(cfg);
  WindowStudy r;
  r.h3 = existence_window(s.w, s.u, cfg.k, cfg.constants(), WindowVariant::H3, cfg.T);
  r.h2 = existence_window(s.w, s.u, cfg.k, cfg.constants(), WindowVariant::H2, cfg.T);
  r.radius = state_radius(cfg);
  r.projection_ratio = projection_linf_ratio(initial_u(cfg), r.radius);
  for (const WindowReport *w : {&r.h3, &r.h2})
    if (w->T_eval_exceeds)
      r.warnings.push_back(std::string("warning: time.T exceeds T_max of the ") + to_string(w->variant) +
                           " window");
  return r;
}

struct SweepEntry {
  std::string config;
  std::string out_dir;
  int exit_code = 0;
  std::string message;
};

/// Worker count for sweeps: HM_THREADS when set, otherwise the hardware concurrency.
inline unsigned sweep_workers() {
  if (const char *env = std::getenv("HM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Exit code convention shared with the CLI.
inline int exit_code(const RunReport &r) {
  return r.status == RunStatus::completed ? 0 : r.status == RunStatus::nonconvergence ? 3 : 1;
}

/// Runs every *.json in `dir` (sorted by name), each into
/// <output.dir>/<file stem>, on up to `workers` threads.
inline std::vector<SweepEntry> sweep(const std::string &dir, unsigned workers = sweep_workers()) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw StudyError("sweep: not a directory: " + dir);
  std::vector<fs::path> configs;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw StudyError("sweep: no *.json configs in " + dir);

  std::vector<SweepEntry> out(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      SweepEntry &e = out[i];
      e.config = configs[i].string();
      try {
        const SimConfig cfg = load_config(e.config);
        e.out_dir = (fs::path(cfg.output_dir) / configs[i].stem()).string();
        const RunReport r = run(cfg, e.out_dir);
        e.exit_code = exit_code(r);
        e.message = to_string(r.status);
      } catch (const ConfigError &ex) {
        e.exit_code = 2;
        e.message = ex.what();
      } catch (const std::exception &ex) {
        e.exit_code = 1;
        e.message = ex.what();
      }
    }
  };
  const unsigned n = std::min<unsigned>(std::max(1u, workers), static_cast<unsigned>(configs.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  return out;
}

} // namespace hm
