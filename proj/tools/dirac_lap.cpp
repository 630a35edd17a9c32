#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "diraclap/config.hpp"
#include "diraclap/parallel.hpp"
#include "diraclap/runner.hpp"

int main(int argc, char** argv) {
  using namespace diraclap;
  CLI::App app{"Weighted resolvent, threshold and dispersive experiments for the free and perturbed Dirac operator"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  for (const auto& name : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (created if missing)")->required();
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  set_default_threads(threads);
  const std::string subcommand = app.get_subcommands().front()->get_name();
  const RunReport rep = run_file(config_path, subcommand, out_dir, std::cerr);
  return rep.exit_status;
}
