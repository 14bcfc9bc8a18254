#pragma once

/// Declarative run description parsed from JSON. Keys are grouped by dots
/// (`time.dt`, `ic.params.seed`, ...) and may be written either nested or
/// flat; unknown keys are rejected.

#include "hm/diagnostics.hpp"
#include "hm/errors.hpp"
#include "hm/spectral_grid.hpp"
#include "hm/time_integration.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace hm {

enum class IcType { single_mode, gaussian_vortex, random_spectrum, from_file };
enum class SolverMode { cn, picard_galerkin, rk4 };

struct IcParams {
  double amplitude = 1.0;
  int xi_x = 0;
  int xi_y = 1;
  double width = 0.5;
  std::optional<std::uint64_t> seed;
  double decay_exponent = 4.0;
  std::string path;
};

struct SimConfig {
  double L = two_pi;
  int n = 32;
  double dealias_fraction = 2.0 / 3.0;
  double k = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  IcType ic_type = IcType::single_mode;
  IcParams ic;
  SolverMode mode = SolverMode::cn;
  double tol = 1e-10;
  int max_iters = 50;
  Centering centering = Centering::paper_form;
  std::optional<int> galerkin_radius; ///< E_M radius for oracle-mode cn and picard_galerkin
  std::string output_dir = "out";
  int output_every = 100;
  double c_e = 1.0;
  double c_inf = 1.0;

  GridSpec grid() const { return {L, n, dealias_fraction}; }
  EstimateConstants constants() const { return {c_e, c_inf}; }

  AdvectionModel advection() const {
    if (galerkin_radius && mode != SolverMode::picard_galerkin) return AdvectionModel::galerkin(*galerkin_radius);
    return {};
  }

  SchemeParams scheme() const {
    SchemeParams p;
    p.tau = dt;
    p.corrector_tol = tol;
    p.max_correctors = max_iters;
    p.centering = centering;
    p.model = advection();
    return p;
  }

  /// Radius of E_M that picard_galerkin works on.
  int picard_radius() const { return galerkin_radius.value_or(grid().dealias_radius()); }

  void validate() const {
    grid().validate();
    if (!std::isfinite(k)) throw ConfigError("physics.k", "must be finite");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt", "must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("time.T", "must be nonnegative");
    if (!(tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    if (max_iters < 1) throw ConfigError("solver.max_iters", "must be >= 1");
    if (output_every < 1) throw ConfigError("output.every", "must be >= 1");
    if (!(c_e > 0.0)) throw ConfigError("estimates.c_e", "must be positive");
    if (!(c_inf > 0.0)) throw ConfigError("estimates.c_inf", "must be positive");
    if (galerkin_radius) {
      if (*galerkin_radius < 0 || *galerkin_radius > grid().dealias_radius())
        throw ConfigError("solver.galerkin_radius", "must lie within the dealias radius of the grid");
      if (mode != SolverMode::picard_galerkin && *galerkin_radius > max_oracle_radius)
        throw ConfigError("solver.galerkin_radius", "oracle-mode stepping supports radius <= 8");
    }
    if (ic_type == IcType::random_spectrum && !ic.seed)
      throw ConfigError("ic.params.seed", "required for random_spectrum");
    if (ic_type == IcType::from_file && ic.path.empty())
      throw ConfigError("ic.params.path", "required for from_file");
    if (ic_type == IcType::gaussian_vortex && !(ic.width > 0.0))
      throw ConfigError("ic.params.width", "must be positive");
    const int nyq = n / 2;
    if (ic_type == IcType::single_mode &&
        (std::abs(ic.xi_x) >= nyq || std::abs(ic.xi_y) >= nyq))
      throw ConfigError("ic.params.xi_x", "mode does not fit the grid");
  }
};

inline const char *to_string(IcType t) {
  switch (t) {
  case IcType::single_mode: return "single_mode";
  case IcType::gaussian_vortex: return "gaussian_vortex";
  case IcType::random_spectrum: return "random_spectrum";
  case IcType::from_file: return "from_file";
  }
  return "?";
}
inline const char *to_string(SolverMode m) {
  switch (m) {
  case SolverMode::cn: return "cn";
  case SolverMode::picard_galerkin: return "picard_galerkin";
  case SolverMode::rk4: return "rk4";
  }
  return "?";
}
inline const char *to_string(Centering c) {
  return c == Centering::paper_form ? "paper_form" : "symmetric_w";
}

namespace detail {

using json = nlohmann::json;

inline void flatten(const json &j, const std::string &prefix, std::map<std::string, json> &out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      flatten(*it, key, out);
    else if (!out.emplace(key, *it).second)
      throw ConfigError(key, "key given twice");
  }
}

class ConfigReader {
public:
  explicit ConfigReader(const json &j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    flatten(j, "", values_);
  }

  void number(const std::string &key, double &out) {
    if (auto *v = take(key)) {
      if (!v->is_number()) throw ConfigError(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int> void integer(const std::string &key, Int &out) {
    if (auto *v = take(key)) {
      if (!v->is_number_integer()) {
        if (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>()) {
          out = static_cast<Int>(v->get<double>());
          return;
        }
        throw ConfigError(key, "expected an integer");
      }
      out = v->get<Int>();
    }
  }

  void text(const std::string &key, std::string &out) {
    if (auto *v = take(key)) {
      if (!v->is_string()) throw ConfigError(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <class E> void choice(const std::string &key, E &out, const std::map<std::string, E> &options) {
    std::string s;
    if (!has(key)) return;
    text(key, s);
    auto it = options.find(s);
    if (it == options.end()) {
      std::string allowed;
      for (auto &[name, e] : options) allowed += (allowed.empty() ? "" : ", ") + name;
      throw ConfigError(key, "unknown value '" + s + "' (expected one of: " + allowed + ")");
    }
    out = it->second;
  }

  bool has(const std::string &key) const { return values_.count(key) > 0; }

  void finish() const {
    if (!values_.empty()) throw ConfigError(values_.begin()->first, "unknown configuration key");
  }

private:
  const json *take(const std::string &key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    taken_ = it->second;
    values_.erase(it);
    return &taken_;
  }

  std::map<std::string, json> values_;
  json taken_;
};

} // namespace detail

inline SimConfig parse_config(const nlohmann::json &j) {
  detail::ConfigReader r(j);
  SimConfig c;
  r.number("domain.L", c.L);
  r.integer("grid.n", c.n);
  r.number("grid.dealias_fraction", c.dealias_fraction);
  r.number("physics.k", c.k);
  r.number("time.dt", c.dt);
  r.number("time.T", c.T);
  r.choice("ic.type", c.ic_type,
           {{"single_mode", IcType::single_mode},
            {"gaussian_vortex", IcType::gaussian_vortex},
            {"random_spectrum", IcType::random_spectrum},
            {"from_file", IcType::from_file}});
  r.number("ic.params.amplitude", c.ic.amplitude);
  r.integer("ic.params.xi_x", c.ic.xi_x);
  r.integer("ic.params.xi_y", c.ic.xi_y);
  r.number("ic.params.width", c.ic.width);
  if (r.has("ic.params.seed")) {
    std::uint64_t seed = 0;
    r.integer("ic.params.seed", seed);
    c.ic.seed = seed;
  }
  r.number("ic.params.decay_exponent", c.ic.decay_exponent);
  r.text("ic.params.path", c.ic.path);
  r.choice("solver.mode", c.mode,
           {{"cn", SolverMode::cn}, {"picard_galerkin", SolverMode::picard_galerkin}, {"rk4", SolverMode::rk4}});
  r.number("solver.tol", c.tol);
  r.integer("solver.max_iters", c.max_iters);
  r.choice("solver.centering", c.centering,
           {{"paper_form", Centering::paper_form}, {"symmetric_w", Centering::symmetric_w}});
  if (r.has("solver.galerkin_radius")) {
    int m = 0;
    r.integer("solver.galerkin_radius", m);
    c.galerkin_radius = m;
  }
  r.text("output.dir", c.output_dir);
  r.integer("output.every", c.output_every);
  r.number("estimates.c_e", c.c_e);
  r.number("estimates.c_inf", c.c_inf);
  r.finish();
  c.validate();
  return c;
}

inline SimConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("", std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return parse_config(j);
}

inline nlohmann::json to_json(const SimConfig &c) {
  nlohmann::json j;
  j["domain"]["L"] = c.L;
  j["grid"]["n"] = c.n;
  j["grid"]["dealias_fraction"] = c.dealias_fraction;
  j["physics"]["k"] = c.k;
  j["time"]["dt"] = c.dt;
  j["time"]["T"] = c.T;
  j["ic"]["type"] = to_string(c.ic_type);
  auto &p = j["ic"]["params"];
  p["amplitude"] = c.ic.amplitude;
  p["xi_x"] = c.ic.xi_x;
  p["xi_y"] = c.ic.xi_y;
  p["width"] = c.ic.width;
  if (c.ic.seed) p["seed"] = *c.ic.seed;
  p["decay_exponent"] = c.ic.decay_exponent;
  if (!c.ic.path.empty()) p["path"] = c.ic.path;
  j["solver"]["mode"] = to_string(c.mode);
  j["solver"]["tol"] = c.tol;
  j["solver"]["max_iters"] = c.max_iters;
  j["solver"]["centering"] = to_string(c.centering);
  if (c.galerkin_radius) j["solver"]["galerkin_radius"] = *c.galerkin_radius;
  j["output"]["dir"] = c.output_dir;
  j["output"]["every"] = c.output_every;
  j["estimates"]["c_e"] = c.c_e;
  j["estimates"]["c_inf"] = c.c_inf;
  return j;
}

} // namespace hm
