#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wave_esc/simulation.hpp"

namespace wave_esc {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int blowup = 2;
inline constexpr int checks_failed = 3;
}  // namespace exit_code

/// One sweep dimension: a config key and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses `section.key=v1,v2,...`. Throws ConfigError for an unknown key or
/// an empty value list.
SweepAxis parse_axis(std::string_view spec);

enum class Command { run, sweep, verify };

struct RunManifest {
  Command command = Command::run;
  std::filesystem::path config_path;  ///< empty selects the defaults
  std::filesystem::path out_dir;
  std::vector<SweepAxis> axes;
  std::vector<std::string> verify_groups;
  std::optional<std::uint64_t> seed;  ///< overrides verify.seed
};

/// Loads the manifest's config (or defaults) and applies the seed override.
SimConfig manifest_config(const RunManifest& manifest);

/// trace.csv: header line then one row per record, 12 significant digits.
void write_trace_csv(const SimTrace& trace, std::ostream& os);

/// key=value report of a finished (or partial) run.
std::string format_report(const SimTrace& trace, const SimConfig& config,
                          const std::string& status, double runtime_seconds,
                          const std::string& message = {});

/// Worker count for `points` sweep runs: hardware concurrency, capped by
/// WAVE_ESC_THREADS when set. Throws ConfigError for a malformed value.
std::size_t sweep_thread_count(std::size_t points);

/// Every point of the Cartesian product of the axes, first axis outermost,
/// each as (key, value) pairs.
std::vector<std::vector<std::pair<std::string, std::string>>> sweep_points(
    const std::vector<SweepAxis>& axes);

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunManifest& manifest, std::ostream& out,
              std::ostream& err);
int cmd_verify(const RunManifest& manifest, std::ostream& out,
               std::ostream& err);

}  // namespace wave_esc
