#include "wave_esc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "wave_esc/config.hpp"
#include "wave_esc/errors.hpp"
#include "wave_esc/verification.hpp"

namespace wave_esc {
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string() +
                      (ec ? ": " + ec.message() : ""));
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigError("cannot write " + path.string());
}

struct Outcome {
  int code = exit_code::ok;
  std::string status = "ok";
  std::string message;
  bool has_bounds = false;
  BoundsReport bounds;
};

Outcome execute_run(const SimConfig& config, const fs::path& dir) {
  prepare_dir(dir);
  write_file(dir / "config.resolved", format_config(config));
  Outcome o;
  SimTrace trace;
  const auto start = std::chrono::steady_clock::now();
  try {
    trace = run_closed_loop(config);
  } catch (const ClosedLoopBlowup& e) {
    trace = e.partial();
    o.code = exit_code::blowup;
    o.status = "blowup";
    o.message = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream f(dir / "trace.csv", std::ios::binary);
    write_trace_csv(trace, f);
    if (!f) throw ConfigError("cannot write " + (dir / "trace.csv").string());
  }
  if (o.code == exit_code::ok) {
    o.bounds = ultimate_bounds_report(trace, config);
    o.has_bounds = true;
  }
  write_file(dir / "report.txt",
             format_report(trace, config, o.status, seconds, o.message));
  return o;
}

}  // namespace

SweepAxis parse_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("sweep axis '" + std::string(spec) +
                      "' must look like section.key=v1,v2");
  }
  SweepAxis axis;
  axis.key = trim(spec.substr(0, eq));
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), axis.key) == keys.end()) {
    throw ConfigError("sweep axis names unknown key '" + axis.key + "'");
  }
  std::string_view rest = spec.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    std::string v = trim(rest.substr(0, comma));
    if (v.empty()) {
      throw ConfigError("sweep axis '" + axis.key + "' has an empty value");
    }
    axis.values.push_back(std::move(v));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return axis;
}

SimConfig manifest_config(const RunManifest& manifest) {
  SimConfig config =
      manifest.config_path.empty() ? parse_config("") : load_config(manifest.config_path);
  if (manifest.seed) config.seed = *manifest.seed;
  return config;
}

void write_trace_csv(const SimTrace& trace, std::ostream& os) {
  os << "t,y,theta,Theta,U,G_hat,H_hat,vartheta,Omega,V\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << num(trace.t[i]) << ',' << num(trace.y[i]) << ',' << num(trace.theta[i])
       << ',' << num(trace.Theta[i]) << ',' << num(trace.U[i]) << ','
       << num(trace.G_hat[i]) << ',' << num(trace.H_hat[i]) << ','
       << num(trace.vartheta[i]) << ',' << num(trace.Omega[i]) << ','
       << num(trace.V[i]) << '\n';
  }
}

std::string format_report(const SimTrace& trace, const SimConfig& config,
                          const std::string& status, double runtime_seconds,
                          const std::string& message) {
  std::ostringstream os;
  const Grid grid = config.grid();
  const ProbeDesign probe = config.probe();
  const double dx = grid.spacing();
  os << "status=" << status << '\n';
  if (!message.empty()) os << "message=" << message << '\n';
  os << "config_hash=" << hex(trace.config_hash) << '\n'
     << "steps=" << trace.steps << '\n'
     << "stride=" << trace.stride << '\n'
     << "rows=" << trace.size() << '\n'
     << "dt=" << num(trace.dt) << '\n'
     << "dx=" << num(dx) << '\n'
     << "probe_coefficient=" << num(probe.coefficient()) << '\n'
     << "s_amplitude=" << num(std::abs(probe.boundary_amplitude())) << '\n'
     << "cot_abs=" << num(check_frequency(probe.omega(), probe.domain_length()).cot_abs)
     << '\n';
  if (trace.size() > 0) {
    const std::size_t last = trace.size() - 1;
    os << "final_t=" << num(trace.t[last]) << '\n'
       << "final_y=" << num(trace.y[last]) << '\n'
       << "final_theta=" << num(trace.theta[last]) << '\n'
       << "final_Theta=" << num(trace.Theta[last]) << '\n';
  }
  if (status == "ok" && trace.size() > 0) {
    const BoundsReport b = ultimate_bounds_report(trace, config);
    os << "window_start=" << num(b.window_start) << '\n'
       << "sup_theta_err=" << num(b.sup_theta) << '\n'
       << "sup_Theta_err=" << num(b.sup_Theta) << '\n'
       << "sup_y_err=" << num(b.sup_y) << '\n'
       << "sup_vartheta=" << num(b.sup_vartheta) << '\n'
       << "envelope_theta=" << num(b.envelope_theta) << '\n'
       << "envelope_Theta=" << num(b.envelope_Theta) << '\n'
       << "envelope_y=" << num(b.envelope_y) << '\n'
       << "c1=" << num(b.c1) << '\n'
       << "c2=" << num(b.c2) << '\n'
       << "c3=" << num(b.c3) << '\n';
  }
  os << "max_vartheta_gap=" << num(trace.max_vartheta_gap) << '\n'
     << "vartheta_gap_limit=" << num(5.0 * dx * dx) << '\n'
     << "max_boundary_gap=" << num(trace.max_boundary_gap) << '\n'
     << "boundary_gap_constant=" << num(trace.max_boundary_gap / (dx * dx)) << '\n'
     << "max_boundary_error=" << num(trace.max_boundary_error) << '\n'
     << "runtime_seconds=" << num(runtime_seconds) << '\n';
  return os.str();
}

std::size_t sweep_thread_count(std::size_t points) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WAVE_ESC_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw ConfigError(std::string("WAVE_ESC_THREADS must be a positive integer, got '") +
                        env + "'");
    }
    n = std::min(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, points));
}

std::vector<std::vector<std::pair<std::string, std::string>>> sweep_points(
    const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<std::pair<std::string, std::string>>> out(1);
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& prefix : out) {
      for (const auto& v : axis.values) {
        auto p = prefix;
        p.emplace_back(axis.key, v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  const SimConfig config = manifest_config(manifest);
  const Outcome o = execute_run(config, manifest.out_dir);
  if (o.code == exit_code::blowup) {
    err << "blowup: " << o.message << '\n';
  } else {
    out << "wrote " << (manifest.out_dir / "trace.csv").string() << '\n';
  }
  return o.code;
}

int cmd_sweep(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  if (manifest.axes.empty()) throw ConfigError("sweep needs at least one --axis");
  for (std::size_t i = 0; i < manifest.axes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (manifest.axes[i].key == manifest.axes[j].key) {
        throw ConfigError("sweep axis '" + manifest.axes[i].key + "' given twice");
      }
    }
  }
  const SimConfig base = manifest_config(manifest);
  const auto points = sweep_points(manifest.axes);

  // Every point is validated before any run starts.
  std::vector<SimConfig> configs;
  for (const auto& point : points) {
    SimConfig c = base;
    std::string where;
    for (const auto& [k, v] : point) {
      apply_setting(c, k, v);
      where += (where.empty() ? "" : " ") + k + "=" + v;
    }
    try {
      configs.push_back(parse_config(format_config(c)));
    } catch (const ConfigError& e) {
      // Line numbers refer to generated text, not to a user file.
      std::string what = e.what();
      if (e.line() > 0) what = what.substr(what.find(": ") + 2);
      throw ConfigError("sweep point " + where + ": " + what);
    }
  }

  prepare_dir(manifest.out_dir);
  std::vector<Outcome> results(points.size());
  std::vector<std::string> names(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%03zu", i);
    names[i] = buf;
  }
  const std::size_t workers = sweep_thread_count(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = execute_run(configs[i], manifest.out_dir / names[i]);
      } catch (const std::exception& e) {
        results[i].code = exit_code::config_error;
        results[i].status = "error";
        results[i].message = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::ostringstream csv;
  csv << "point";
  for (const auto& axis : manifest.axes) csv << ',' << axis.key;
  csv << ",status,sup_theta_err,sup_Theta_err,sup_y_err,sup_vartheta,"
         "envelope_theta,envelope_Theta,envelope_y,c1,c2,c3\n";
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  int code = exit_code::ok;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Outcome& o = results[i];
    csv << names[i];
    for (const auto& kv : points[i]) csv << ',' << kv.second;
    csv << ',' << o.status;
    if (o.has_bounds) {
      const BoundsReport& b = o.bounds;
      for (double v : {b.sup_theta, b.sup_Theta, b.sup_y, b.sup_vartheta,
                       b.envelope_theta, b.envelope_Theta, b.envelope_y, b.c1,
                       b.c2, b.c3}) {
        csv << ',' << num(v);
      }
      c1 = std::max(c1, b.c1);
      c2 = std::max(c2, b.c2);
      c3 = std::max(c3, b.c3);
    } else {
      csv << ",,,,,,,,,,";
      err << names[i] << ": " << o.status << ": " << o.message << '\n';
    }
    csv << '\n';
    if (o.code == exit_code::config_error) code = exit_code::config_error;
    else if (o.code == exit_code::blowup && code == exit_code::ok) code = exit_code::blowup;
  }
  write_file(manifest.out_dir / "sweep.csv", csv.str());
  std::ostringstream cal;
  cal << "points=" << points.size() << '\n'
      << "c1=" << num(c1) << '\n'
      << "c2=" << num(c2) << '\n'
      << "c3=" << num(c3) << '\n';
  write_file(manifest.out_dir / "calibration.txt", cal.str());
  out << "wrote " << (manifest.out_dir / "sweep.csv").string() << " (" << points.size()
      << " points, " << workers << " workers)\n";
  return code;
}

int cmd_verify(const RunManifest& manifest, std::ostream& out, std::ostream& /*err*/) {
  const SimConfig config = manifest_config(manifest);
  const auto checks = run_verification(config, manifest.verify_groups);
  out << format_checks(checks);
  const bool all = std::all_of(checks.begin(), checks.end(),
                               [](const Check& c) { return c.passed; });
  return all ? exit_code::ok : exit_code::checks_failed;
}

}  // namespace wave_esc
