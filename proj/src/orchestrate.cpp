#include "cht/orchestrate.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "cht/degenerate.hpp"
#include "cht/errors.hpp"
#include "cht/parallel.hpp"
#include "cht/selftest.hpp"
#include "cht/snapshot.hpp"

namespace cht {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(RunStatus status, const InvariantReport& report) {
  switch (status) {
    case RunStatus::BlowUpSuspected: return kExitBlowUp;
    case RunStatus::SolverFailure: return kExitSolverFailure;
    case RunStatus::PositivityViolation: return kExitInvariantFailure;
    case RunStatus::Completed: break;
  }
  return report.all_pass() ? kExitOk : kExitInvariantFailure;
}

RunResult execute(const RunConfig& config) {
  const Simulation sim = make_simulation(config);
  RunResult r;
  Monitor& monitor = r.monitor.emplace(resolve_monitor(config), sim.init, sim.params, sim.diffusion,
                                       config.analysis_n, sim.grid);
  const SampleHook hooks[] = {monitor.hook()};
  r.trajectory = cht::advance(sim, hooks);
  r.report = monitor.report(r.trajectory);
  r.verdicts = monitor.verdicts();
  r.exit_code = exit_code_for(r.trajectory.status, r.report);
  return r;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json report_json(const RunConfig& config, const RunResult& r, std::span<const std::string> warnings) {
  const Monitor& m = *r.monitor;
  json checks = json::array();
  for (const auto& e : r.report.entries)
    checks.push_back({{"check", e.check},
                      {"pass", e.pass},
                      {"worst_slack", finite_or_null(e.worst_slack)},
                      {"t_worst", e.t_worst},
                      {"bound", finite_or_null(e.bound)},
                      {"tolerance", e.tolerance},
                      {"details", e.details}});
  json verdicts = json::object();
  for (const auto& v : r.verdicts) verdicts[v.series] = to_string(v.verdict);
  const auto& st = r.trajectory.stats;
  json out = {
      {"status", to_string(r.trajectory.status)},
      {"message", r.trajectory.message},
      {"exit_code", r.exit_code},
      {"checks", checks},
      {"verdicts", verdicts},
      {"regime",
       {{"analysis_n", config.analysis_n},
        {"m", config.diffusion.m},
        {"threshold", m.regime().threshold},
        {"margin", m.regime().margin},
        {"within_theorem", m.regime().within_theorem}}},
      {"K", m.K()},
      {"m_star", m.m_star()},
      {"blowup_threshold", r.trajectory.blowup_threshold},
      {"steps", st.steps},
      {"min_dt", finite_or_null(st.min_dt)},
      {"max_dt", st.max_dt},
      {"preset", to_string(config.initial.kind)},
      {"warnings", json(std::vector<std::string>(warnings.begin(), warnings.end()))},
  };
  for (const auto& w : m.warnings()) out["warnings"].push_back(w);
  if (config.initial.kind == PresetKind::PerturbedEquilibrium) out["seed"] = config.initial.seed;
  return out;
}

void write_state(const fs::path& dir, const State& s, std::size_t index) {
  make_dirs(dir);
  for (auto [name, field] : {std::pair{"u", &s.u}, std::pair{"v", &s.v}, std::pair{"w", &s.w}}) {
    try {
      save_snapshot_csv(dir, Snapshot{name, s.t, *field}, index);
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
  }
}

void log_warnings(std::ostream& log, std::span<const std::string> warnings) {
  for (const auto& w : warnings) log << "warning: " << w << "\n";
}

void log_report(std::ostream& log, const RunResult& r) {
  for (const auto& e : r.report.entries)
    log << (e.pass ? "  pass  " : "  FAIL  ") << e.check << "  worst_slack=" << short_fmt(e.worst_slack)
        << " at t=" << short_fmt(e.t_worst) << "\n";
  for (const auto& v : r.verdicts) log << "  verdict " << v.series << ": " << to_string(v.verdict) << "\n";
  log << "status: " << to_string(r.trajectory.status);
  if (!r.trajectory.message.empty()) log << " (" << r.trajectory.message << ")";
  log << ", exit " << r.exit_code << "\n";
}

double max_of(const Trajectory& t, double SampleRecord::*field) {
  double m = 0.0;
  for (const auto& s : t.samples) m = std::max(m, s.*field);
  return m;
}

std::string verdict_of(const std::vector<Monitor::NamedVerdict>& v, std::string_view prefix) {
  for (const auto& nv : v)
    if (nv.series.starts_with(prefix)) return to_string(nv.verdict);
  return "";
}

std::string summary_header() {
  return "parameter,status,exit_code,within_theorem,max_linf_u,max_l2_gradv,verdict_linf_u,verdict_gradv,"
         "verdict_y,verdict_theta,all_bounded,verdicts\n";
}

std::string summary_row(double parameter, const Trajectory& t, int exit_code, bool within,
                        const std::vector<Monitor::NamedVerdict>& verdicts) {
  bool all_bounded = !verdicts.empty();
  std::string joined;
  for (const auto& v : verdicts) {
    all_bounded = all_bounded && v.verdict == Verdict::Bounded;
    joined += (joined.empty() ? "" : ";") + v.series + "=" + to_string(v.verdict);
  }
  std::ostringstream o;
  o << fmt(parameter) << "," << to_string(t.status) << "," << exit_code << "," << (within ? "true" : "false") << ","
    << fmt(max_of(t, &SampleRecord::linf_u)) << "," << fmt(max_of(t, &SampleRecord::l2_gradv)) << ","
    << verdict_of(verdicts, "linf_u") << "," << verdict_of(verdicts, "gradv_") << "," << verdict_of(verdicts, "y_")
    << "," << verdict_of(verdicts, "u_pow_") << "," << (all_bounded ? "true" : "false") << "," << joined << "\n";
  return o.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  close_out(out, path);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Monitor& monitor) {
  const auto& samples = traj.samples;
  out << "t,dt,step,mass,linf_u,linf_v,linf_w,l2_gradv";
  for (std::size_t k = 0; k < monitor.y_series().size(); ++k) out << "," << monitor.y_label(k);
  for (std::size_t k = 0; k < monitor.gradv_series().size(); ++k) out << "," << monitor.gradv_label(k);
  const bool theta = !monitor.theta_series().empty();
  if (theta) out << "," << monitor.theta_label();
  out << ",neg_lap_w_slack\n";
  auto at = [](const TimeSeries& s, std::size_t i) { return i < s.size() ? fmt(s[i].value) : std::string(); };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    out << fmt(s.t) << "," << fmt(s.dt) << "," << s.step << "," << fmt(s.mass) << "," << fmt(s.linf_u) << ","
        << fmt(s.linf_v) << "," << fmt(s.linf_w) << "," << fmt(s.l2_gradv);
    for (const auto& y : monitor.y_series()) out << "," << at(y, i);
    for (const auto& g : monitor.gradv_series()) out << "," << at(g, i);
    if (theta) out << "," << at(monitor.theta_series(), i);
    out << "," << at(monitor.neg_laplacian_slack(), i) << "\n";
  }
}

void write_run_outputs(const fs::path& dir, const RunConfig& config, const RunResult& result,
                       std::span<const std::string> warnings) {
  make_dirs(dir);
  write_text(dir / "config.ini", serialize_config(config));
  {
    const fs::path path = dir / "trajectory.csv";
    auto out = open_out(path);
    write_trajectory_csv(out, result.trajectory, *result.monitor);
    close_out(out, path);
  }
  write_text(dir / "report.json", report_json(config, result, warnings).dump(2) + "\n");
  const auto& traj = result.trajectory;
  if (traj.final_state) write_state(dir / "final", *traj.final_state, traj.samples.empty() ? 0 : traj.samples.size() - 1);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) write_state(dir / "snapshots", traj.snapshots[k], k);
}

unsigned workers_from_env() {
  const char* text = std::getenv("CHTSIM_WORKERS");
  if (!text) return 0;
  char* end = nullptr;
  const long n = std::strtol(text, &end, 10);
  return (end != text && *end == '\0' && n > 0) ? static_cast<unsigned>(n) : 0;
}

int run_command(const ParsedConfig& parsed, std::ostream& log) {
  log_warnings(log, parsed.warnings);
  RunResult r;
  try {
    r = execute(parsed.config);
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  log_report(log, r);
  try {
    write_run_outputs(parsed.config.output_directory, parsed.config, r, parsed.warnings);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return r.exit_code;
}

int sweep_m_command(const ParsedConfig& parsed, std::span<const double> values, unsigned workers,
                    std::ostream& log) {
  if (values.size() < 2) {
    log << "error: sweep-m needs at least two values of m\n";
    return kExitUsage;
  }
  for (double m : values)
    if (!(std::isfinite(m) && m >= 1.0)) {
      log << "error: sweep-m values must be >= 1, got " << short_fmt(m) << "\n";
      return kExitUsage;
    }
  log_warnings(log, parsed.warnings);
  const fs::path root = parsed.config.output_directory;

  struct Member {
    RunConfig config;
    RunResult result;
    int exit_code = kExitOk;
    std::string error;
  };
  std::vector<Member> members(values.size());
  parallel_for(values.size(), workers, [&](std::size_t k) {
    Member& mem = members[k];
    mem.config = parsed.config;
    mem.config.diffusion.m = values[k];
    mem.config.output_directory = (root / ("m_" + short_fmt(values[k]))).string();
    try {
      mem.result = execute(mem.config);
      mem.exit_code = mem.result.exit_code;
      write_run_outputs(mem.config.output_directory, mem.config, mem.result, {});
    } catch (const IoError& e) {
      mem.exit_code = kExitIo;
      mem.error = e.what();
    } catch (const DomainError& e) {
      mem.exit_code = kExitUsage;
      mem.error = e.what();
    }
  });

  int code = kExitOk;
  std::string summary = summary_header();
  for (std::size_t k = 0; k < members.size(); ++k) {
    const Member& mem = members[k];
    log << "m = " << short_fmt(values[k]) << ":\n";
    if (!mem.error.empty()) log << "  error: " << mem.error << "\n";
    if (mem.result.monitor) {
      log_report(log, mem.result);
      summary += summary_row(values[k], mem.result.trajectory, mem.exit_code,
                             mem.result.monitor->regime().within_theorem, mem.result.verdicts);
    }
    if (mem.exit_code != kExitOk && code == kExitOk) code = mem.exit_code;
  }
  try {
    make_dirs(root);
    write_text(root / "summary.csv", summary);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return code;
}

int sweep_eps_command(const ParsedConfig& parsed, std::span<const double> values, unsigned workers,
                      std::ostream& log) {
  if (values.size() < 3) {
    log << "error: sweep-eps needs at least three values of epsilon\n";
    return kExitUsage;
  }
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!(std::isfinite(values[k]) && values[k] > 0.0) || (k && values[k] > values[k - 1])) {
      log << "error: sweep-eps values must be positive and nonincreasing\n";
      return kExitUsage;
    }
  log_warnings(log, parsed.warnings);
  const RunConfig& base = parsed.config;
  SweepReport sweep;
  try {
    const Simulation sim = make_simulation(base);
    const MonitorConfig monitor = resolve_monitor(base);
    sweep = epsilon_sweep(sim, values, base.analysis_n, workers, 0.1, &monitor);
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path root = base.output_directory;
  int code = kExitOk;
  json members = json::array();
  std::string summary = summary_header();
  try {
    for (const auto& mem : sweep.members) {
      RunConfig cfg = base;
      cfg.diffusion = regularize(base.diffusion, mem.epsilon);
      cfg.controls.store_snapshots = true;
      cfg.output_directory = (root / "sweep" / short_fmt(mem.epsilon)).string();
      RunResult r{mem.trajectory, mem.report, mem.verdicts, mem.monitor, exit_code_for(mem.trajectory.status, mem.report)};
      write_run_outputs(cfg.output_directory, cfg, r, {});
      log << "epsilon = " << short_fmt(mem.epsilon) << ":\n";
      log_report(log, r);
      if (r.exit_code != kExitOk && code == kExitOk) code = r.exit_code;
      json verdicts = json::object();
      for (const auto& v : mem.verdicts) verdicts[v.series] = to_string(v.verdict);
      members.push_back({{"epsilon", mem.epsilon},
                         {"status", to_string(mem.trajectory.status)},
                         {"exit_code", r.exit_code},
                         {"invariants_pass", mem.report.all_pass()},
                         {"max_linf_u", mem.max_linf_u},
                         {"verdicts", verdicts}});
      summary += summary_row(mem.epsilon, mem.trajectory, r.exit_code, mem.monitor->regime().within_theorem,
                             mem.verdicts);
    }
    json distances = json::array();
    for (double d : sweep.distances) distances.push_back(finite_or_null(d));
    const json report = {{"epsilons", sweep.epsilons},
                         {"distances", distances},
                         {"slack", sweep.slack},
                         {"slack_note", "monotonicity slack is an empirical calibration, not a proven rate"},
                         {"cauchy_pass", sweep.cauchy_pass},
                         {"members", members}};
    write_text(root / "sweep_report.json", report.dump(2) + "\n");
    write_text(root / "summary.csv", summary);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  }
  for (std::size_t k = 0; k < sweep.distances.size(); ++k)
    log << "d_" << k << " = " << short_fmt(sweep.distances[k]) << "\n";
  log << "cauchy verdict: " << (sweep.cauchy_pass ? "pass" : "FAIL") << "\n";
  if (code == kExitOk && !sweep.cauchy_pass) code = kExitInvariantFailure;
  return code;
}

int verify_command(const ParsedConfig& parsed, std::ostream& log) {
  log_warnings(log, parsed.warnings);
  std::vector<SelfTestResult> results;
  try {
    results = run_self_tests(parsed.config);
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    log << (r.pass ? "pass  " : "FAIL  ") << r.name << "  value=" << short_fmt(r.value)
        << " threshold=" << short_fmt(r.threshold);
    if (!r.detail.empty()) log << "  " << r.detail;
    log << "\n";
  }
  return all ? kExitOk : kExitInvariantFailure;
}

}  // namespace cht
