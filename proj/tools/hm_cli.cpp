// Command-line front end: run, window, converge-time, converge-space,
// dispersion, sweep.

#include "hm/hm.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, nonconvergence = 3, study_error = 4 };

void print_margins(const hm::RunReport &r) {
  std::printf("estimates (C_E = %g, C_inf = %g): margin1 %.6e  margin2 %.6e  margin3 %.6e  margin4 %.6e\n",
              r.constants.c_e, r.constants.c_inf, r.margins.estimate1, r.margins.estimate2,
              r.margins.estimate3, r.margins.estimate4);
}

void print_window(const hm::WindowReport &w) {
  if (w.variant == hm::WindowVariant::H3)
    std::printf("[%s] A = %.17g  B = %.17g  C = %.17g\n", hm::to_string(w.variant), w.A_const, w.B_const,
                w.C_const);
  std::printf("[%s] T_max = %.17g", hm::to_string(w.variant), w.T_max);
  if (!std::isnan(w.T_eval)) std::printf("  C_X(T = %g) = %.17g", w.T_eval, w.C_X);
  std::printf("\n");
}

void print_orders(const hm::OrderReport &r) {
  std::printf("%-12s %-24s %-24s %s\n", r.parameter.c_str(), "error_vs_finest", "diff_to_next", "order");
  for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
    std::printf("%-12.6g %-24.17g ", r.resolutions[i], r.errors[i]);
    if (i < r.differences.size())
      std::printf("%-24.17g ", r.differences[i]);
    else
      std::printf("%-24s ", "-");
    if (i < r.orders.size())
      std::printf("%.6f", r.orders[i]);
    else
      std::printf("-");
    std::printf("\n");
  }
}

int guarded(const std::function<int()> &body) {
  try {
    return body();
  } catch (const hm::ConfigError &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const hm::NonConvergenceError &e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return nonconvergence;
  } catch (const hm::StudyError &e) {
    std::fprintf(stderr, "study error: %s\n", e.what());
    return study_error;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Hasegawa-Mima pseudo-spectral simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<double> taus;
  std::vector<int> ns;
  std::string sweep_dir;

  auto *run = app.add_subcommand("run", "Integrate a configuration and write outputs");
  run->add_option("config", config_path, "JSON configuration")->required();
  run->add_option("-o,--out", out_dir, "Output directory (defaults to output.dir)");

  auto *win = app.add_subcommand("window", "Evaluate the existence window for the configured data");
  win->add_option("config", config_path, "JSON configuration")->required();

  auto *ct = app.add_subcommand("converge-time", "Temporal convergence study");
  ct->add_option("config", config_path, "JSON configuration")->required();
  ct->add_option("--taus", taus, "Time steps")->required();

  auto *cs = app.add_subcommand("converge-space", "Spatial convergence study");
  cs->add_option("config", config_path, "JSON configuration")->required();
  cs->add_option("--ns", ns, "Grid sizes")->required();

  auto *disp = app.add_subcommand("dispersion", "Measure the frequency of a single-mode run");
  disp->add_option("config", config_path, "JSON configuration")->required();

  auto *sw = app.add_subcommand("sweep", "Run every *.json config in a directory");
  sw->add_option("dir", sweep_dir, "Directory of configurations")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded([&] {
      const hm::SimConfig cfg = hm::load_config(config_path);
      const hm::RunReport r = hm::run(cfg, out_dir);
      for (const auto &line : r.warnings) std::fprintf(stderr, "warning: %s\n", line.c_str());
      std::printf("status: %s\n", hm::to_string(r.status));
      if (!r.message.empty()) std::printf("message: %s\n", r.message.c_str());
      std::printf("steps: %zu / %zu  t = %.17g\n", r.steps_completed, r.steps_planned, r.final_t);
      print_margins(r);
      std::printf("max relative drift: energy %.3e  enstrophy %.3e\n", r.max_energy_drift,
                  r.max_enstrophy_drift);
      std::printf("sup |grad w|_inf (observational): %.6e\n", r.sup_grad_w_linf);
      std::printf("wall time: %.3f s\n", r.wall_seconds);
      return hm::exit_code(r);
    });
  }
  if (*win) {
    return guarded([&] {
      const hm::SimConfig cfg = hm::load_config(config_path);
      const hm::WindowStudy w = hm::window(cfg);
      std::printf("C_E = %g  C_inf = %g  k = %g\n", cfg.c_e, cfg.c_inf, cfg.k);
      std::printf("||w0||_inf = %.17g  ||w0||_H1 = %.17g  ||u0||_H2 = %.17g\n", w.h3.inputs.w0_linf,
                  w.h3.inputs.w0_h1, w.h3.inputs.u0_h2);
      print_window(w.h3);
      print_window(w.h2);
      std::printf("||P u0||_inf / ||u0||_inf = %.17g (radius %d)\n", w.projection_ratio, w.radius);
      for (const auto &line : w.warnings) std::printf("%s\n", line.c_str());
      return int(ok);
    });
  }
  if (*ct) {
    return guarded([&] {
      print_orders(hm::converge_time(hm::load_config(config_path), taus));
      return int(ok);
    });
  }
  if (*cs) {
    return guarded([&] {
      print_orders(hm::converge_space(hm::load_config(config_path), ns));
      return int(ok);
    });
  }
  if (*disp) {
    return guarded([&] {
      const hm::DispersionReport d = hm::dispersion(hm::load_config(config_path));
      std::printf("xi = (%d, %d)  k = %g  L = %.17g\n", d.xi.x, d.xi.y, d.k, d.L);
      std::printf("omega measured = %.17g  analytic = %.17g  relative error = %.3e\n", d.measured,
                  d.analytic, d.rel_error);
      print_margins(d.run);
      return int(ok);
    });
  }
  if (*sw) {
    return guarded([&] {
      int worst = ok;
      for (const auto &e : hm::sweep(sweep_dir)) {
        std::printf("%s -> %s [%d] %s\n", e.config.c_str(), e.out_dir.c_str(), e.exit_code, e.message.c_str());
        if (worst == ok) worst = e.exit_code;
      }
      return worst;
    });
  }
  return ok;
}
