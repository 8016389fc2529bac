#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qxfer {

struct CliOptions {
  std::string config_path;
  std::string out_prefix;
  std::optional<std::uint64_t> seed;  // overrides manifest seeds
  int threads = 1;
};

// Loads a JSON run manifest, executes the requested command and writes the
// declared outputs. Throws ConfigError (exit 2) / NumericError (exit 3);
// output files are only written after the whole computation succeeded.
void run_manifest(const CliOptions& options);

}  // namespace qxfer
