#include "wave_esc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wave_esc/errors.hpp"

namespace wave_esc {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view key, std::string_view text, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError(std::string(key) + ": expected a real number, got '" +
                          std::string(text) + "'",
                      line);
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text,
                             int line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": expected a nonnegative integer, got '" +
                          std::string(text) + "'",
                      line);
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

double user_hessian(const MapParams& m) {
  return m.minimization ? -m.hessian : m.hessian;
}
double user_optimum(const MapParams& m) {
  return m.minimization ? -m.optimum : m.optimum;
}

void rebuild_map(SimConfig& c, double H, double opt, double y, int line,
                 std::string_view key) {
  try {
    c.map = MapParams::make(H, opt, y);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string(key) + ": " + e.what(), line);
  }
}

struct KeySpec {
  std::string name;
  std::function<void(SimConfig&, std::string_view, int)> set;
  std::function<std::string(const SimConfig&)> get;
};

KeySpec real_key(std::string name, double SimConfig::*member) {
  return {name,
          [name, member](SimConfig& c, std::string_view v, int line) {
            c.*member = parse_real(name, v, line);
          },
          [member](const SimConfig& c) { return format_real(c.*member); }};
}

KeySpec control_key(std::string name, double ControllerSettings::*member) {
  return {name,
          [name, member](SimConfig& c, std::string_view v, int line) {
            c.control.*member = parse_real(name, v, line);
          },
          [member](const SimConfig& c) { return format_real(c.control.*member); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"map.hessian",
                 [](SimConfig& c, std::string_view v, int line) {
                   rebuild_map(c, parse_real("map.hessian", v, line), c.map.optimizer,
                               user_optimum(c.map), line, "map.hessian");
                 },
                 [](const SimConfig& c) { return format_real(user_hessian(c.map)); }});
    t.push_back({"map.optimizer",
                 [](SimConfig& c, std::string_view v, int line) {
                   rebuild_map(c, user_hessian(c.map), parse_real("map.optimizer", v, line),
                               user_optimum(c.map), line, "map.optimizer");
                 },
                 [](const SimConfig& c) { return format_real(c.map.optimizer); }});
    t.push_back({"map.optimum",
                 [](SimConfig& c, std::string_view v, int line) {
                   rebuild_map(c, user_hessian(c.map), c.map.optimizer,
                               parse_real("map.optimum", v, line), line, "map.optimum");
                 },
                 [](const SimConfig& c) { return format_real(user_optimum(c.map)); }});
    t.push_back(real_key("grid.domain_length", &SimConfig::domain_length));
    t.push_back({"grid.nodes",
                 [](SimConfig& c, std::string_view v, int line) {
                   c.nodes = static_cast<std::size_t>(parse_unsigned("grid.nodes", v, line));
                 },
                 [](const SimConfig& c) { return std::to_string(c.nodes); }});
    t.push_back(real_key("probe.amplitude", &SimConfig::amplitude));
    t.push_back(real_key("probe.frequency", &SimConfig::frequency));
    t.push_back({"probe.discretization",
                 [](SimConfig& c, std::string_view v, int line) {
                   if (v == "grid") {
                     c.probe_mode = ProbeMode::grid;
                   } else if (v == "continuum") {
                     c.probe_mode = ProbeMode::continuum;
                   } else {
                     throw ConfigError("probe.discretization must be grid or continuum, got '" +
                                           std::string(v) + "'",
                                       line);
                   }
                 },
                 [](const SimConfig& c) { return std::string(to_string(c.probe_mode)); }});
    t.push_back(control_key("control.gain_K", &ControllerSettings::gain_K));
    t.push_back(control_key("control.filter_c", &ControllerSettings::filter_c));
    t.push_back(control_key("control.c0", &ControllerSettings::c0));
    t.push_back(control_key("control.theta_hat0", &ControllerSettings::theta_hat0));
    t.push_back({"control.estimator",
                 [](SimConfig& c, std::string_view v, int line) {
                   try {
                     c.control.estimator = parse_estimator_mode(std::string(v));
                   } catch (const ConfigError& e) {
                     throw ConfigError(std::string("control.") + e.what(), line);
                   }
                 },
                 [](const SimConfig& c) { return std::string(to_string(c.control.estimator)); }});
    t.push_back({"lyapunov.delta",
                 [](SimConfig& c, std::string_view v, int line) {
                   c.lyapunov.delta = parse_real("lyapunov.delta", v, line);
                 },
                 [](const SimConfig& c) { return format_real(c.lyapunov.delta); }});
    t.push_back({"time.dt",
                 [](SimConfig& c, std::string_view v, int line) {
                   if (v == "auto") {
                     c.time_step = 0.0;
                     return;
                   }
                   const double dt = parse_real("time.dt", v, line);
                   if (!(dt > 0.0)) throw ConfigError("time.dt must be positive", line);
                   c.time_step = dt;
                 },
                 [](const SimConfig& c) {
                   return c.time_step > 0.0 ? format_real(c.time_step) : std::string("auto");
                 }});
    t.push_back(real_key("time.horizon", &SimConfig::horizon));
    t.push_back({"time.record_stride",
                 [](SimConfig& c, std::string_view v, int line) {
                   c.record_stride =
                       static_cast<std::size_t>(parse_unsigned("time.record_stride", v, line));
                 },
                 [](const SimConfig& c) { return std::to_string(c.record_stride); }});
    t.push_back({"plant.initial_state",
                 [](SimConfig& c, std::string_view v, int line) {
                   if (v == "probe") {
                     c.initial_state = InitialState::probe;
                   } else if (v == "rest") {
                     c.initial_state = InitialState::rest;
                   } else {
                     throw ConfigError("plant.initial_state must be probe or rest, got '" +
                                           std::string(v) + "'",
                                       line);
                   }
                 },
                 [](const SimConfig& c) { return std::string(to_string(c.initial_state)); }});
    t.push_back({"verify.seed",
                 [](SimConfig& c, std::string_view v, int line) {
                   c.seed = parse_unsigned("verify.seed", v, line);
                 },
                 [](const SimConfig& c) { return std::to_string(c.seed); }});
    return t;
  }();
  return table;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : key_table()) {
    if (k.name == key) return &k;
  }
  return nullptr;
}

// Wraps non-config errors from validation so the message names a key.
void validate_with_keys(const SimConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const KernelSingularity& e) {
    throw ConfigError(std::string("control.c0 / control.gain_K: ") + e.what());
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.find("probe amplitude") != std::string::npos) {
      throw ConfigError("probe.amplitude: " + msg);
    }
    if (msg.find("probe frequency") != std::string::npos ||
        msg.find("domain length") != std::string::npos) {
      throw ConfigError("probe.frequency: " + msg + " (grid.domain_length = " +
                        format_real(c.domain_length) + ")");
    }
    if (msg.find("effective gain") != std::string::npos) {
      throw ConfigError("map.hessian / control.gain_K: " + msg);
    }
    throw ConfigError(msg);
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& spec : key_table()) k.push_back(spec.name);
    return k;
  }();
  return keys;
}

void apply_setting(SimConfig& config, std::string_view key,
                   std::string_view value, int line) {
  const KeySpec* spec = find_key(key);
  if (!spec) {
    throw ConfigError("unknown key '" + std::string(key) + "'", line);
  }
  spec->set(config, value, line);
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'section.key = value'", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.find('.') == std::string_view::npos) {
      throw ConfigError("key '" + std::string(key) + "' must have the form section.key",
                        line_no);
    }
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError("duplicate key '" + std::string(key) + "' (first set on line " +
                            std::to_string(it->second) + ")",
                        line_no);
    }
    apply_setting(config, key, value, line_no);
    seen.emplace(std::string(key), line_no);
  }

  try {
    validate_with_keys(config);
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    const std::string msg = e.what();
    std::size_t best = std::string::npos;
    int best_line = 0;
    for (const auto& [key, line] : seen) {
      const auto at = msg.find(key);
      if (at != std::string::npos && at < best) {
        best = at;
        best_line = line;
      }
    }
    throw ConfigError(msg, best_line);
  }
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const SimConfig& config) {
  std::string out;
  for (const auto& spec : key_table()) {
    out += spec.name + " = " + spec.get(config) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const SimConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : format_config(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace wave_esc
