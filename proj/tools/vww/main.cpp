#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral wave experiments with distributional potentials"};
  app.require_subcommand(1, 1);

  vww::cli::RunOptions options;
  bool selftest = false;
  for (const char* name : {"eigs", "solve", "forced", "estimates", "veryweak"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config, "JSON experiment config");
    sub->add_option("--out", options.out, "Output directory");
    sub->add_flag("--selftest", selftest, "Run the built-in closed-form checks and exit");
    sub->add_option("--threads", options.threads, "Worker threads (default: VWW_THREADS or 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (selftest) return vww::cli::run_selftest(command, std::cout);
  if (options.config.empty() || options.out.empty()) {
    std::cerr << "vww " << command << ": --config and --out are required\n";
    return 2;
  }
  return vww::cli::run_command(command, options, std::cerr);
}
