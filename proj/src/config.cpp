#include "cht/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cht/errors.hpp"
#include "cht/presets.hpp"

namespace cht {

namespace {

std::string describe(int line, const std::string& section, const std::string& key, const std::string& reason) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  if (!section.empty()) out += "[" + section + "]";
  if (!key.empty()) out += (section.empty() ? "" : " ") + key;
  if (!out.empty()) out += ": ";
  return out + reason;
}

}  // namespace

ConfigError::ConfigError(int line, std::string section, std::string key, const std::string& reason)
    : std::runtime_error(describe(line, section, key, reason)),
      line_(line),
      section_(std::move(section)),
      key_(std::move(key)) {}

const char* to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::ConstantSteady: return "constant_steady";
    case PresetKind::GaussianBump: return "gaussian_bump";
    case PresetKind::PerturbedEquilibrium: return "perturbed_equilibrium";
  }
  return "unknown";
}

std::optional<PresetKind> parse_preset_kind(std::string_view text) {
  for (auto k : {PresetKind::ConstantSteady, PresetKind::GaussianBump, PresetKind::PerturbedEquilibrium})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

namespace {

struct Raw {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;

  [[noreturn]] void fail(const std::string& reason) const { throw ConfigError(line, section, key, reason); }
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const Raw& r, const std::string& text, bool allow_inf = false) {
  const std::string t = trim(text);
  if (t.empty()) r.fail("expected a number");
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) r.fail("'" + t + "' is not a number");
  if (std::isnan(x) || (!allow_inf && !std::isfinite(x))) r.fail("'" + t + "' is not a finite number");
  return x;
}

template <class Int>
Int to_int(const Raw& r, const std::string& text) {
  const std::string t = trim(text);
  Int x{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) r.fail("'" + t + "' is not an integer");
  return x;
}

std::vector<std::string> split_list(const Raw& r) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(r.value);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  if (items.empty() || std::any_of(items.begin(), items.end(), [](auto& s) { return s.empty(); }))
    r.fail("expected a comma-separated list");
  return items;
}

std::vector<double> to_double_list(const Raw& r) {
  std::vector<double> out;
  for (const auto& item : split_list(r)) out.push_back(to_double(r, item));
  return out;
}

bool to_bool(const Raw& r) {
  if (r.value == "true") return true;
  if (r.value == "false") return false;
  r.fail("expected true or false");
}

double positive(const Raw& r, bool allow_inf = false) {
  const double x = to_double(r, r.value, allow_inf);
  if (!(x > 0.0)) r.fail("must be > 0");
  return x;
}

double nonnegative(const Raw& r) {
  const double x = to_double(r, r.value);
  if (x < 0.0) r.fail("must be >= 0");
  return x;
}

double unit_interval(const Raw& r) {
  const double x = to_double(r, r.value);
  if (!(x > 0.0 && x <= 1.0)) r.fail("must lie in (0, 1]");
  return x;
}

using Apply = std::function<void(RunConfig&, const Raw&)>;

struct KeySpec {
  bool required = false;
  Apply apply;
};

const std::map<std::string, std::map<std::string, KeySpec>>& schema() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, KeySpec>> t;
    auto& grid = t["grid"];
    grid["dim"] = {true, [](RunConfig& c, const Raw& r) {
                     c.dim = to_int<int>(r, r.value);
                     if (c.dim != 1 && c.dim != 2) r.fail("must be 1 or 2");
                   }};
    grid["extents"] = {false, [](RunConfig& c, const Raw& r) {
                         const auto v = to_double_list(r);
                         if (v.size() > 2) r.fail("at most two extents");
                         for (double x : v)
                           if (!(x > 0.0)) r.fail("extents must be > 0");
                         c.extents = {v[0], v.size() > 1 ? v[1] : 1.0};
                       }};
    grid["cells"] = {true, [](RunConfig& c, const Raw& r) {
                       std::vector<int> v;
                       for (const auto& item : split_list(r)) v.push_back(to_int<int>(r, item));
                       if (v.size() > 2) r.fail("at most two cell counts");
                       for (int n : v)
                         if (n < 1) r.fail("cell counts must be >= 1");
                       c.cells = {v[0], v.size() > 1 ? v[1] : 1};
                     }};
    grid["analysis_n"] = {false, [](RunConfig& c, const Raw& r) {
                            c.analysis_n = to_int<int>(r, r.value);
                            if (c.analysis_n < 2 || c.analysis_n > 4) r.fail("must be 2, 3 or 4");
                          }};

    auto& diff = t["diffusion"];
    diff["delta"] = {false, [](RunConfig& c, const Raw& r) { c.diffusion.delta = positive(r); }};
    diff["m"] = {true, [](RunConfig& c, const Raw& r) {
                   c.diffusion.m = to_double(r, r.value);
                   if (!(c.diffusion.m >= 1.0)) r.fail("must be >= 1");
                 }};
    diff["offset"] = {false, [](RunConfig& c, const Raw& r) { c.diffusion.offset = nonnegative(r); }};
    diff["epsilon"] = {false, [](RunConfig& c, const Raw& r) { c.diffusion.epsilon = nonnegative(r); }};

    auto& params = t["params"];
    params["chi"] = {true, [](RunConfig& c, const Raw& r) { c.params.chi = nonnegative(r); }};
    params["xi"] = {true, [](RunConfig& c, const Raw& r) { c.params.xi = nonnegative(r); }};
    params["mu"] = {true, [](RunConfig& c, const Raw& r) { c.params.mu = nonnegative(r); }};

    auto& ctl = t["controls"];
    ctl["cfl_diff"] = {false, [](RunConfig& c, const Raw& r) { c.controls.cfl_diff = unit_interval(r); }};
    ctl["cfl_adv"] = {false, [](RunConfig& c, const Raw& r) { c.controls.cfl_adv = unit_interval(r); }};
    ctl["dt_max"] = {false, [](RunConfig& c, const Raw& r) { c.controls.dt_max = positive(r, true); }};
    ctl["t_end"] = {false, [](RunConfig& c, const Raw& r) { c.controls.t_end = positive(r); }};
    ctl["sample_every"] = {false, [](RunConfig& c, const Raw& r) { c.controls.sample_every = positive(r); }};
    ctl["blowup_threshold"] = {false,
                               [](RunConfig& c, const Raw& r) { c.controls.blowup_threshold = nonnegative(r); }};
    ctl["diffusion_scheme"] = {false, [](RunConfig& c, const Raw& r) {
                                 const auto s = parse_diffusion_scheme(r.value);
                                 if (!s) r.fail("expected explicit or implicit");
                                 c.controls.scheme = *s;
                               }};
    ctl["store_snapshots"] = {false, [](RunConfig& c, const Raw& r) { c.controls.store_snapshots = to_bool(r); }};

    auto& init = t["initial"];
    init["preset"] = {false, [](RunConfig& c, const Raw& r) {
                        const auto k = parse_preset_kind(r.value);
                        if (!k) r.fail("expected constant_steady, gaussian_bump or perturbed_equilibrium");
                        c.initial.kind = *k;
                      }};
    init["w0"] = {false, [](RunConfig& c, const Raw& r) { c.initial.w0 = positive(r); }};
    init["amplitude"] = {false, [](RunConfig& c, const Raw& r) { c.initial.amplitude = positive(r); }};
    init["width"] = {false, [](RunConfig& c, const Raw& r) { c.initial.width = positive(r); }};
    init["center_x"] = {false, [](RunConfig& c, const Raw& r) { c.initial.center_x = to_double(r, r.value); }};
    init["center_y"] = {false, [](RunConfig& c, const Raw& r) { c.initial.center_y = to_double(r, r.value); }};
    init["mass"] = {false, [](RunConfig& c, const Raw& r) { c.initial.mass = nonnegative(r); }};
    init["w0_perturbation"] = {false, [](RunConfig& c, const Raw& r) {
                                 c.initial.w0_perturbation = to_double(r, r.value);
                                 if (!(std::abs(c.initial.w0_perturbation) < 1.0)) r.fail("must lie in (-1, 1)");
                               }};
    init["rho"] = {false, [](RunConfig& c, const Raw& r) {
                     c.initial.rho = nonnegative(r);
                     if (!(c.initial.rho < 1.0)) r.fail("must lie in [0, 1)");
                   }};
    init["seed"] = {false, [](RunConfig& c, const Raw& r) { c.initial.seed = to_int<std::uint64_t>(r, r.value); }};
    init["w_level"] = {false, [](RunConfig& c, const Raw& r) { c.initial.w_level = positive(r); }};

    auto& mon = t["monitor"];
    mon["p_list"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.p_list = to_double_list(r); }};
    mon["q_list"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.q_list = to_double_list(r); }};
    mon["s_list"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.s_list = to_double_list(r); }};
    mon["theta"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.theta = nonnegative(r); }};
    mon["tolerance"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.tolerance = nonnegative(r); }};
    mon["window_fraction"] = {false, [](RunConfig& c, const Raw& r) {
                                c.monitor.window_fraction = to_double(r, r.value);
                                if (!(c.monitor.window_fraction > 0.0 && c.monitor.window_fraction < 1.0))
                                  r.fail("must lie in (0, 1)");
                              }};
    mon["growth_tolerance"] = {false, [](RunConfig& c, const Raw& r) { c.monitor.growth_tolerance = nonnegative(r); }};

    t["output"]["directory"] = {false, [](RunConfig& c, const Raw& r) {
                                  if (r.value.empty()) r.fail("must not be empty");
                                  c.output_directory = r.value;
                                }};
    return t;
  }();
  return table;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s;
}

}  // namespace

ParsedConfig parse_config(std::string_view text) {
  const auto& table = schema();
  std::map<std::pair<std::string, std::string>, Raw> seen;
  std::map<std::string, int> section_lines;
  std::string section;
  int line_no = 0;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(line_no, "", "", "malformed section header '" + t + "'");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!table.contains(section)) throw ConfigError(line_no, section, "", "unknown section");
      if (section_lines.contains(section)) throw ConfigError(line_no, section, "", "duplicate section");
      section_lines[section] = line_no;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, section, "", "expected 'key = value', got '" + t + "'");
    Raw raw{section, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)), line_no};
    if (section.empty()) raw.fail("key outside of any section");
    if (raw.key.empty()) raw.fail("empty key");
    if (!table.at(section).contains(raw.key)) raw.fail("unknown key");
    if (seen.contains({section, raw.key})) raw.fail("duplicate key");
    seen.emplace(std::pair{section, raw.key}, std::move(raw));
  }

  ParsedConfig out;
  RunConfig& c = out.config;
  for (const auto& [sec, keys] : table)
    for (const auto& [key, spec] : keys) {
      const auto it = seen.find({sec, key});
      if (it == seen.end()) {
        if (spec.required) throw ConfigError(section_lines.contains(sec) ? section_lines[sec] : 0, sec, key,
                                             "missing required key");
        continue;
      }
      spec.apply(c, it->second);
    }

  auto raw_of = [&](const char* sec, const char* key) -> Raw {
    const auto it = seen.find({sec, key});
    if (it != seen.end()) return it->second;
    return Raw{sec, key, "", section_lines.contains(sec) ? section_lines[sec] : 0};
  };

  // Cross-key consistency.
  {
    const auto cells = split_list(raw_of("grid", "cells"));
    if (static_cast<int>(cells.size()) != c.dim)
      raw_of("grid", "cells").fail("expected " + std::to_string(c.dim) + " cell count(s) for dim " +
                                   std::to_string(c.dim));
    if (seen.contains({"grid", "extents"})) {
      const Raw r = raw_of("grid", "extents");
      if (static_cast<int>(split_list(r).size()) != c.dim)
        r.fail("expected " + std::to_string(c.dim) + " extent(s) for dim " + std::to_string(c.dim));
    }
    if (c.dim == 1) {
      c.cells[1] = 1;
      c.extents[1] = 1.0;
    }
  }
  if (c.controls.sample_every > c.controls.t_end)
    raw_of("controls", "sample_every").fail("must not exceed t_end");
  if (c.monitor.p_list.has_value() != c.monitor.q_list.has_value())
    raw_of("monitor", c.monitor.p_list ? "q_list" : "p_list").fail("p_list and q_list must be given together");

  try {
    validate(c.initial);
  } catch (const DomainError& e) {
    raw_of("initial", "preset").fail(e.what());
  }
  MonitorConfig monitor;
  try {
    monitor = resolve_monitor(c);
    validate(monitor);
  } catch (const DomainError& e) {
    throw ConfigError(section_lines.contains("monitor") ? section_lines["monitor"] : 0, "monitor", "", e.what());
  }

  // Advisory diagnostics.
  const RegimeVerdict regime = validate_regime(c.diffusion, c.analysis_n);
  if (!regime.within_theorem) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "regime: m = %g does not exceed 2 - 2/n = %g for analysis_n = %d; boundedness is not covered",
                  c.diffusion.m, regime.threshold, c.analysis_n);
    out.warnings.emplace_back(buf);
  }
  const double transport = 2.0 * c.dim * c.controls.cfl_adv;
  const double budget = c.controls.scheme == DiffusionScheme::Explicit ? c.controls.cfl_diff + transport : transport;
  if (budget > 1.0)
    out.warnings.push_back("controls: CFL factors sum to " + fmt(budget) +
                           " > 1; positivity of the cell density is not guaranteed");
  if (monitor.theta > 0.0 && !(monitor.theta > std::max(1.0, 0.5 * c.diffusion.m)))
    out.warnings.push_back("monitor: theta = " + fmt(monitor.theta) + " does not exceed max(1, m/2)");
  const double s_cap = static_cast<double>(c.analysis_n) / (c.analysis_n - 1);
  for (double s : monitor.s_list)
    if (!(s >= 1.0 && s < s_cap))
      out.warnings.push_back("monitor: s = " + fmt(s) + " is outside [1, n/(n-1)) = [1, " + fmt(s_cap) + ")");
  return out;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[grid]\n";
  o << "dim = " << c.dim << "\n";
  if (c.dim == 1) {
    o << "extents = " << fmt(c.extents[0]) << "\n";
    o << "cells = " << c.cells[0] << "\n";
  } else {
    o << "extents = " << fmt(c.extents[0]) << ", " << fmt(c.extents[1]) << "\n";
    o << "cells = " << c.cells[0] << ", " << c.cells[1] << "\n";
  }
  o << "analysis_n = " << c.analysis_n << "\n\n";

  o << "[diffusion]\n";
  o << "delta = " << fmt(c.diffusion.delta) << "\n";
  o << "m = " << fmt(c.diffusion.m) << "\n";
  o << "offset = " << fmt(c.diffusion.offset) << "\n";
  o << "epsilon = " << fmt(c.diffusion.epsilon) << "\n\n";

  o << "[params]\n";
  o << "chi = " << fmt(c.params.chi) << "\n";
  o << "xi = " << fmt(c.params.xi) << "\n";
  o << "mu = " << fmt(c.params.mu) << "\n\n";

  o << "[controls]\n";
  o << "cfl_diff = " << fmt(c.controls.cfl_diff) << "\n";
  o << "cfl_adv = " << fmt(c.controls.cfl_adv) << "\n";
  o << "dt_max = " << fmt(c.controls.dt_max) << "\n";
  o << "t_end = " << fmt(c.controls.t_end) << "\n";
  o << "sample_every = " << fmt(c.controls.sample_every) << "\n";
  o << "blowup_threshold = " << fmt(c.controls.blowup_threshold) << "\n";
  o << "diffusion_scheme = " << to_string(c.controls.scheme) << "\n";
  o << "store_snapshots = " << (c.controls.store_snapshots ? "true" : "false") << "\n\n";

  const PresetSpec& p = c.initial;
  o << "[initial]\n";
  o << "preset = " << to_string(p.kind) << "\n";
  o << "w0 = " << fmt(p.w0) << "\n";
  o << "amplitude = " << fmt(p.amplitude) << "\n";
  o << "width = " << fmt(p.width) << "\n";
  o << "center_x = " << fmt(p.center_x) << "\n";
  o << "center_y = " << fmt(p.center_y) << "\n";
  o << "mass = " << fmt(p.mass) << "\n";
  o << "w0_perturbation = " << fmt(p.w0_perturbation) << "\n";
  o << "rho = " << fmt(p.rho) << "\n";
  o << "seed = " << p.seed << "\n";
  o << "w_level = " << fmt(p.w_level) << "\n\n";

  const MonitorOverrides& m = c.monitor;
  o << "[monitor]\n";
  if (m.p_list) o << "p_list = " << fmt_list(*m.p_list) << "\n";
  if (m.q_list) o << "q_list = " << fmt_list(*m.q_list) << "\n";
  if (m.s_list) o << "s_list = " << fmt_list(*m.s_list) << "\n";
  if (m.theta) o << "theta = " << fmt(*m.theta) << "\n";
  o << "tolerance = " << fmt(m.tolerance) << "\n";
  o << "window_fraction = " << fmt(m.window_fraction) << "\n";
  o << "growth_tolerance = " << fmt(m.growth_tolerance) << "\n\n";

  o << "[output]\n";
  o << "directory = " << c.output_directory << "\n";
  return o.str();
}

Grid make_grid(const RunConfig& c) { return Grid(c.dim, c.extents, c.cells); }

MonitorConfig resolve_monitor(const RunConfig& c) {
  MonitorConfig m = default_monitor_config(c.diffusion, c.analysis_n);
  if (c.monitor.p_list) m.p_list = *c.monitor.p_list;
  if (c.monitor.q_list) m.q_list = *c.monitor.q_list;
  if (c.monitor.s_list) m.s_list = *c.monitor.s_list;
  if (c.monitor.theta) m.theta = *c.monitor.theta;
  m.tolerance = c.monitor.tolerance;
  m.window_fraction = c.monitor.window_fraction;
  m.growth_tolerance = c.monitor.growth_tolerance;
  return m;
}

Simulation make_simulation(const RunConfig& c) {
  Grid g = make_grid(c);
  InitialData init = make_initial_data(c.initial, g);
  return Simulation{std::move(g), std::move(init), c.params, c.diffusion, c.controls};
}

}  // namespace cht
