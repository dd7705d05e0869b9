#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "nanorod/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nanorod: layer-potential solver and resonance asymptotics for elastic nanorods"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
  bool strict = false;

  struct Sub {
    const char* name;
    const char* help;
    std::optional<nanorod::Task> task;
  };
  const Sub subs[] = {
      {"run", "run the task named in the config", std::nullopt},
      {"validate", "kernel, field, jump and rigid-motion invariant suites", nanorod::Task::Validate},
      {"kernels-check", "finite-difference and series checks of the kernels", nanorod::Task::KernelsCheck},
      {"oracle-compare", "Nystrom oracle against the asymptotic scattered field", nanorod::Task::OracleCompare},
      {"scan", "resonance blow-up scan with log-log slope fit", nanorod::Task::Scan},
      {"probe", "near-axis singularity probe of the line operators", nanorod::Task::Probe},
      {"mesh-dump", "surface mesh CSV and optional operator dump", nanorod::Task::MeshDump},
  };
  std::vector<std::pair<CLI::App*, std::optional<nanorod::Task>>> cmds;
  for (const Sub& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    c->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "output directory (overrides the config)");
    c->add_option("--threads", threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", seed, "seed of the randomized suites");
    c->add_flag("--strict", strict, "reject unknown config keys");
    cmds.emplace_back(c, s.task);
  }

  CLI11_PARSE(app, argc, argv);

  nanorod::CliOverrides ov{out, threads, seed};
  for (const auto& [cmd, task] : cmds)
    if (cmd->parsed()) return nanorod::run_config(config, strict, task, ov, std::cout, std::cerr);
  return nanorod::kExitConfig;
}
