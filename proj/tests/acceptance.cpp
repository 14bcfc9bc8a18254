// Acceptance checks. Prints one PASS/FAIL line per criterion (plus indented
// detail lines) and exits non-zero when any criterion fails.

#include "hm/hm.hpp"
#include "oracles.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hm;

namespace {

int failures = 0;
std::vector<RunReport> estimate1_runs;   // criteria 5-9
std::vector<RunReport> single_mode_runs; // criterion 5

void verdict(int id, const char *name, bool ok, const std::string &detail) {
  std::printf("criterion %2d %s: %s -- %s\n", id, ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A> std::string fmt(const char *f, A... a) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

void info(const std::string &s) {
  std::printf("    %s\n", s.c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SimConfig random_config(int n, double T, double dt, std::uint64_t seed) {
  SimConfig c;
  c.n = n;
  c.k = 1.0;
  c.T = T;
  c.dt = dt;
  c.ic_type = IcType::random_spectrum;
  c.ic.amplitude = 1.0;
  c.ic.decay_exponent = 4.0;
  c.ic.seed = seed;
  return c;
}

void c1_elliptic() {
  std::mt19937_64 gen(1001);
  const GridSpec g{two_pi, 32};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SpectralField w = oracle::random_field(g, g.n / 2 - 1, gen);
    for (int m = 0; m <= 3; ++m) {
      const auto r = regularity_identity_check(w, m);
      worst = std::max(worst, rel(r.lhs, r.rhs));
    }
  }
  verdict(1, "elliptic exactness", worst <= 1e-11, fmt("max relative defect %.3e (tol 1e-11)", worst));
}

void c2_skew() {
  std::mt19937_64 gen(1002);
  const GridSpec g{two_pi, 32};
  const int K = g.dealias_radius();
  double worst1 = 0.0, worst2 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SpectralField u = oracle::random_field(g, K, gen);
    const SpectralField v = oracle::random_field(g, K, gen);
    const SpectralField w = oracle::random_field(g, K, gen);
    const SpectralField auw = advect(u, w), auv = advect(u, v);
    worst1 = std::max(worst1, std::abs(inner(auw, w)) / (l2_norm(auw) * l2_norm(w)));
    const double scale2 = l2_norm(auv) * l2_norm(w) + l2_norm(auw) * l2_norm(v);
    worst2 = std::max(worst2, std::abs(inner(auv, w) + inner(auw, v)) / scale2);
  }
  verdict(2, "skew identities", std::max(worst1, worst2) <= 1e-11,
          fmt("<N(u)w,w> %.3e, <N(u)v,w>+<N(u)w,v> %.3e relative to natural scale (tol 1e-11)", worst1, worst2));
}

void c3_oracle() {
  std::mt19937_64 gen(1003);
  const GridSpec g{two_pi, 32};
  const int M = 8;
  double worst = 0.0, worst_quad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField u = oracle::random_field(g, M, gen);
    const SpectralField w = oracle::random_field(g, M, gen);
    const SpectralField fast = project(advect(u, w), M);
    const SpectralField conv = convolution_oracle(u, w, M);
    const double scale = max_abs_coeff(conv);
    worst = std::max(worst, oracle::max_abs_diff(fast, conv) / scale);
    if (trial < 3)
      worst_quad = std::max(worst_quad, oracle::max_abs_diff(oracle::bracket(u, w, M, 3 * M + 2), conv) / scale);
  }
  verdict(3, "oracle equivalence", worst <= 1e-12,
          fmt("max |dealiased - convolution| / max|coeff| = %.3e on E_8 (tol 1e-12)", worst));
  info(fmt("convolution vs physical quadrature: %.3e", worst_quad));
}

void c4_galerkin() {
  std::mt19937_64 gen(1004);
  const GridSpec g{two_pi, 32};
  double skew = 0.0, quad = 0.0, force = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const SpectralField u = oracle::random_field(g, 6, gen);
    for (int M = 0; M <= 6; ++M) {
      const GalerkinSystem s = assemble_galerkin(u, M, 1.3);
      const auto q = oracle::galerkin_quadrature(u, M, 1.3, 32);
      const std::size_t N = s.dim();
      // Entries are O(1) or larger; the floor only matters for M = 0.
      double scale = 1.0;
      for (double a : s.A) scale = std::max(scale, std::abs(a));
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
          skew = std::max(skew, std::abs(s.a(i, j) + s.a(j, i)) / scale);
          quad = std::max(quad, std::abs(s.a(i, j) - q.A[i * N + j]) / scale);
        }
      double fscale = 1.0;
      for (double f : q.F) fscale = std::max(fscale, std::abs(f));
      for (std::size_t j = 0; j < N; ++j) force = std::max(force, std::abs(s.F[j] - q.F[j]) / fscale);
    }
  }
  verdict(4, "Galerkin matrix", skew <= 1e-12 && quad <= 1e-12,
          fmt("max |A + A^T| %.3e, max |A - quadrature| %.3e relative to max|A| (tol 1e-12), M = 0..6", skew, quad));
  info(fmt("forcing vector vs quadrature: %.3e", force));
}

void c5_dispersion() {
  SimConfig c;
  c.n = 32;
  c.k = 1.0;
  c.dt = 1e-3;
  c.T = 10.0;
  c.ic_type = IcType::single_mode;
  c.ic.amplitude = 1e-2;
  c.ic.xi_x = 0;
  c.ic.xi_y = 1;
  c.mode = SolverMode::cn;
  const DispersionReport cn = dispersion(c);
  c.mode = SolverMode::rk4;
  const DispersionReport rk = dispersion(c);
  for (const auto *r : {&cn, &rk}) {
    estimate1_runs.push_back(r->run);
    single_mode_runs.push_back(r->run);
  }
  verdict(5, "dispersion", cn.rel_error <= 1e-5 && rk.rel_error <= 1e-9,
          fmt("cn omega %.15f (rel err %.3e, tol 1e-5); rk4 omega %.15f (rel err %.3e, tol 1e-9); exact -0.5",
              cn.measured, cn.rel_error, rk.measured, rk.rel_error));
}

struct Drift {
  double energy, enstrophy;
};

Drift drift_run(Centering centering, double dt, bool keep) {
  SimConfig c = random_config(32, 5.0, dt, 20261014);
  c.centering = centering;
  const RunReport r = run_in_memory(c);
  if (r.status != RunStatus::completed) info("run failed: " + r.message);
  if (keep) estimate1_runs.push_back(r);
  return {r.max_energy_drift, r.max_enstrophy_drift};
}

void c6_conservation() {
  const Drift a = drift_run(Centering::paper_form, 1e-3, true);
  const Drift b = drift_run(Centering::paper_form, 5e-4, true);
  const double fe = a.energy / b.energy, fz = a.enstrophy / b.enstrophy;
  const bool small = a.energy <= 1e-6 && a.enstrophy <= 1e-6;
  const bool factor = fe >= 3.5 && fe <= 4.5 && fz >= 3.5 && fz <= 4.5;
  verdict(6, "conservation", small && factor,
          fmt("cn (default centering) drift at dt=1e-3: energy %.3e, enstrophy %.3e (tol 1e-6); "
              "halving factors: energy %.3f, enstrophy %.3f (need [3.5, 4.5])",
              a.energy, a.enstrophy, fe, fz));
  const Drift s1 = drift_run(Centering::symmetric_w, 1e-3, false);
  const Drift s2 = drift_run(Centering::symmetric_w, 5e-4, false);
  info(fmt("symmetric_w centering: drift at dt=1e-3 energy %.3e, enstrophy %.3e; halving factors %.3f, %.3f",
           s1.energy, s1.enstrophy, s1.energy / s2.energy, s1.enstrophy / s2.enstrophy));
}

void c7_order() {
  const std::vector<double> taus{4e-3, 2e-3, 1e-3};
  SimConfig c = random_config(32, 1.0, 1e-3, 20261014);
  const OrderReport cn = converge_time(c, taus);
  SimConfig r = c;
  r.mode = SolverMode::rk4;
  const OrderReport rk = converge_time(r, taus);
  for (const auto *rep : {&cn, &rk})
    for (const auto &run : rep->runs) estimate1_runs.push_back(run);
  const double pc = cn.orders.at(0), pr = rk.orders.at(0);
  verdict(7, "temporal order", pc >= 1.8 && pc <= 2.2 && pr >= 3.6 && pr <= 4.4,
          fmt("cn (default centering) order %.4f (need [1.8, 2.2]); rk4 order %.4f (need [3.6, 4.4])", pc, pr));
  SimConfig s = c;
  s.centering = Centering::symmetric_w;
  const OrderReport sym = converge_time(s, taus);
  info(fmt("symmetric_w centering: order %.4f", sym.orders.at(0)));
}

void c8_space() {
  SimConfig c;
  c.k = 1.0;
  c.dt = 1e-4;
  c.T = 0.5;
  c.mode = SolverMode::rk4;
  c.ic_type = IcType::gaussian_vortex;
  c.ic.amplitude = 1.0;
  c.ic.width = c.L / 6.0;
  const OrderReport rep = converge_space(c, {16, 32, 128});
  for (const auto &run : rep.runs) estimate1_runs.push_back(run);
  const double ratio = rep.errors[1] / rep.errors[0];
  verdict(8, "spatial spectral accuracy", ratio <= 1e-2,
          fmt("error(32) %.3e / error(16) %.3e = %.3e against n=128 (tol 1e-2)", rep.errors[1], rep.errors[0], ratio));
}

void c9_modes() {
  SimConfig c = random_config(32, 0.015, 1e-3, 11);
  c.galerkin_radius = 6;
  const State s0 = build_initial_state(c);
  const WindowReport win = existence_window(s0.w, s0.u, c.k, c.constants(), WindowVariant::H3, c.T);

  auto trajectory = [&](SolverMode mode, RunReport &rep) {
    SimConfig cc = c;
    cc.mode = mode;
    std::vector<SpectralField> w;
    RunMonitor mon(cc);
    simulate(cc, [&](const State &s, const StepStats &st, std::size_t) {
      mon.observe(s, st);
      w.push_back(s.w);
    });
    mon.fill(rep);
    return w;
  };
  RunReport rp, rc;
  const auto wp = trajectory(SolverMode::picard_galerkin, rp);
  const auto wc = trajectory(SolverMode::cn, rc);
  estimate1_runs.push_back(rp);
  estimate1_runs.push_back(rc);
  double sup = 0.0;
  for (std::size_t i = 0; i < std::min(wp.size(), wc.size()); ++i) sup = std::max(sup, l2_norm(wp[i] - wc[i]));
  const double bound = 10.0 * (c.dt * c.dt + c.tol);
  const bool ok = wp.size() == wc.size() && !win.T_eval_exceeds && sup <= bound;
  verdict(9, "mode agreement", ok,
          fmt("sup_t ||w_picard - w_cn|| %.3e on E_6 (bound %.3e); T = %g < T_max = %.6f", sup, bound, c.T, win.T_max));

  SimConfig s = c;
  s.centering = Centering::symmetric_w;
  std::vector<SpectralField> ws;
  simulate(s, [&](const State &st, const StepStats &, std::size_t) { ws.push_back(st.w); });
  double sup_s = 0.0;
  for (std::size_t i = 0; i < std::min(wp.size(), ws.size()); ++i) sup_s = std::max(sup_s, l2_norm(wp[i] - ws[i]));
  info(fmt("symmetric_w centering: sup_t discrepancy %.3e", sup_s));
}

void c10_bounds() {
  double worst1 = 1e300, worst234 = 1e300;
  for (const auto &r : estimate1_runs) worst1 = std::min(worst1, r.margins.estimate1);
  for (const auto &r : single_mode_runs)
    worst234 = std::min({worst234, r.margins.estimate2, r.margins.estimate3, r.margins.estimate4});
  verdict(10, "a priori bounds", worst1 >= -1e-6 && worst234 >= -1e-6,
          fmt("min estimate1 margin %.3e over %zu runs; min estimate2-4 margin %.3e on single-mode runs (tol -1e-6)",
              worst1, estimate1_runs.size(), worst234));
  for (const auto &r : single_mode_runs)
    info(fmt("single-mode margins: %.4e %.4e %.4e %.4e", r.margins.estimate1, r.margins.estimate2,
             r.margins.estimate3, r.margins.estimate4));
}

void c11_window() {
  SimConfig c;
  c.L = 1.0;
  c.n = 16;
  c.k = 0.0;
  c.T = 0.05;
  c.ic_type = IcType::single_mode;
  c.ic.amplitude = 1.0;
  c.ic.xi_x = 0;
  c.ic.xi_y = 0;
  const WindowStudy ws = window(c);
  info(fmt("H3 window: ||w0||_inf = %.17g, ||w0||_H1 = %.17g, B = %.17g, T_max = %.17g", ws.h3.inputs.w0_linf,
           ws.h3.inputs.w0_h1, ws.h3.B_const, ws.h3.T_max));
  SimConfig c2 = c;
  c2.k = 1.0;
  const WindowStudy ws2 = window(c2);
  info(fmt("H2 window with k = 1: T_max = %.17g", ws2.h2.T_max));
  const bool ok = ws.h3.inputs.w0_linf == 1.0 && ws.h3.inputs.w0_h1 == 1.0 && ws.h3.T_max == 1.0 / 17.0 &&
                  ws2.h2.T_max == 0.5;
  verdict(11, "existence window", ok,
          fmt("T_max = %.17g (1/17 = %.17g); H2 T_max = %.17g (expected 0.5)", ws.h3.T_max, 1.0 / 17.0,
              ws2.h2.T_max));
}

std::vector<char> slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void c12_determinism() {
  char tmpl[] = "/tmp/hm_acceptance_XXXXXX";
  const char *root = mkdtemp(tmpl);
  if (root == nullptr) {
    verdict(12, "determinism", false, "cannot create a temporary directory");
    return;
  }
  SimConfig c = random_config(32, 0.1, 1e-3, 424242);
  c.output_every = 10;
  const fs::path a = fs::path(root) / "a", b = fs::path(root) / "b";
  run(c, a.string());
  run(c, b.string());
  std::size_t compared = 0, differ = 0;
  for (const auto &e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    if (name == "MANIFEST.json") continue;
    ++compared;
    if (!fs::exists(b / name) || slurp(e.path()) != slurp(b / name)) ++differ;
  }
  fs::remove_all(root);
  verdict(12, "determinism", compared > 1 && differ == 0,
          fmt("%zu output files compared byte-for-byte, %zu differ", compared, differ));
}

} // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  void (*criteria[])() = {c1_elliptic, c2_skew,  c3_oracle, c4_galerkin, c5_dispersion, c6_conservation,
                          c7_order,    c8_space, c9_modes,  c10_bounds,  c11_window,    c12_determinism};
  int id = 0;
  for (auto f : criteria) {
    ++id;
    const auto s = clock::now();
    try {
      f();
    } catch (const std::exception &e) {
      std::printf("criterion %2d FAIL: exception: %s\n", id, e.what());
      ++failures;
    }
    info(fmt("(%.1f s)", std::chrono::duration<double>(clock::now() - s).count()));
  }
  std::printf("%d criteria failed; total %.1f s\n", failures,
              std::chrono::duration<double>(clock::now() - t0).count());
  return failures == 0 ? 0 : 1;
}
