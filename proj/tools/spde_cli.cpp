#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spde/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"semilinear stochastic evolution equation studies"};
  app.require_subcommand(1);

  std::string cfg_path, out_dir = "out", report_dir;
  std::size_t paths_override = 0, threads = 1;
  std::uint64_t seed_override = 0;
  bool have_seed = false, dump_states = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--paths", paths_override, "override path count");
    sub->add_option("--seed", seed_override, "override master seed")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--threads", threads, "worker pool size");
    sub->add_flag("--dump-states", dump_states,
                  "persist per-path binary state dumps");
  };

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check a config against the "
                                     "hypothesis regimes");
  validate_cmd->add_option("config", cfg_path, "config file")->required();

  CLI::App* run_cmd = app.add_subcommand("run", "execute the configured study");
  run_cmd->add_option("config", cfg_path, "config file")->required();
  run_cmd->add_option("-o,--out", out_dir, "output directory");
  add_common(run_cmd);

  CLI::App* report_cmd =
      app.add_subcommand("report", "summarize a run directory");
  report_cmd->add_option("dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) {
      const auto cfg = spde::ExperimentConfig::parse_file(cfg_path);
      const spde::RegimeReport rep = spde::validate(cfg);
      std::cout << "config " << cfg.digest() << "\n"
                << "strongest regime: " << rep.strongest << "\n"
                << "strict_mild " << (rep.strict_mild ? "yes" : "no")
                << ", generalized " << (rep.generalized ? "yes" : "no")
                << ", mild " << (rep.mild ? "yes" : "no") << "\n";
      for (const auto& n : rep.notes) std::cout << n << "\n";
      return 0;
    }
    if (run_cmd->parsed()) {
      auto cfg = spde::ExperimentConfig::parse_file(cfg_path);
      if (paths_override > 0)
        cfg.set("paths", std::to_string(paths_override));
      if (have_seed) cfg.set("seed", std::to_string(seed_override));
      spde::RunOptions opts;
      opts.threads = threads;
      opts.dump_states = dump_states;
      return spde::run_experiment(cfg, out_dir, std::cout, opts);
    }
    return spde::report_directory(report_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
