#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "nlch/error.hpp"
#include "nlch/harness/commands.hpp"
#include "nlch/harness/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlch: nonlocal Cahn-Hilliard state, adjoint and velocity-control laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  const char* commands[][2] = {
      {"simulate", "run the state system and write the trajectory and diagnostics CSV"},
      {"optimize", "projected gradient descent on the reduced cost"},
      {"grad-check", "compare the adjoint gradient with central differences"},
      {"verify", "run the invariant suite of every module"},
      {"make-targets", "synthesize tracking targets from a reference control"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI problem description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "random seed (overrides [output] seed)");
    sub->add_option("--threads", threads, "worker threads (default: NLCH_THREADS or 1)")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();

  nlch::ProblemConfig cfg;
  try {
    cfg = nlch::load_config(config_path);
  } catch (const nlch::ConfigError& e) {
    std::cout << "config error: " << e.what() << "\n";
    std::cerr << nlch::failure_line("config", std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()) << "\n";
    return 2;
  }
  if (sub->count("--out")) cfg.output_dir = out_dir;
  if (sub->count("--seed")) cfg.seed = seed;

  nlch::CommandOptions opts;
  opts.threads = 1;
  if (threads > 0) {
    opts.threads = threads;
  } else if (const char* env = std::getenv("NLCH_THREADS")) {
    try {
      opts.threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed NLCH_THREADS='" << env << "'\n";
    }
  }
  return nlch::run_command(command, cfg, opts, std::cout, std::cerr);
}
