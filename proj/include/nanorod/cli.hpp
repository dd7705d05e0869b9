#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "nanorod/config.hpp"

namespace nanorod {

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
};

enum ExitCode : int { kExitOk = 0, kExitTolerance = 1, kExitConfig = 2, kExitRuntime = 3 };

// Runs the configured task, writes its artifacts and prints one summary line to `out`.
// Diagnostics go to `err`.
int run_task(RunConfig rc, const CliOverrides& ov, std::ostream& out, std::ostream& err);

// Loads the file, optionally checks that it names `expected`, then runs it.
int run_config(const std::string& path, bool strict, std::optional<Task> expected, const CliOverrides& ov,
               std::ostream& out, std::ostream& err);

}  // namespace nanorod
