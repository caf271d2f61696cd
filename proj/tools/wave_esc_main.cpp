#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wave_esc/cli.hpp"
#include "wave_esc/errors.hpp"

int main(int argc, char** argv) {
  using namespace wave_esc;
  CLI::App app{"Extremum seeking through a wave-equation actuator"};
  app.require_subcommand(1);

  RunManifest m;
  std::vector<std::string> axes;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "simulate the closed loop");
  run->add_option("--config", m.config_path, "config file")->check(CLI::ExistingFile);
  run->add_option("--out", m.out_dir, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "run the Cartesian product of axes");
  sweep->add_option("--config", m.config_path, "base config file")->check(CLI::ExistingFile);
  sweep->add_option("--axis", axes, "key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--out", m.out_dir, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "run the property battery");
  verify->add_option("groups", m.verify_groups,
                     "kernels, trajectory, wave, averaging, average_system");
  verify->add_option("--config", m.config_path, "config file")->check(CLI::ExistingFile);
  auto* seed_opt = verify->add_option("--seed", seed, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::config_error;
  }

  try {
    if (*seed_opt) m.seed = seed;
    if (*run) {
      m.command = Command::run;
      return cmd_run(m, std::cout, std::cerr);
    }
    if (*sweep) {
      m.command = Command::sweep;
      for (const auto& a : axes) m.axes.push_back(parse_axis(a));
      return cmd_sweep(m, std::cout, std::cerr);
    }
    m.command = Command::verify;
    return cmd_verify(m, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const NumericalBlowup& e) {
    std::cerr << "blowup: " << e.what() << '\n';
    return exit_code::blowup;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::config_error;
  }
}
