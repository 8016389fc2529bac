#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "qxfer/error.hpp"
#include "qxfer/manifest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qxfer: tunable-coupler state-transfer simulator"};
  qxfer::CliOptions opt;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", opt.config_path, "JSON run manifest")->required();
  app.add_option("--out", opt.out_prefix, "output path prefix")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the manifest seed");
  app.add_option("--threads", threads, "worker threads for sweeps");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) opt.seed = seed;
  if (threads <= 0) {
    if (const char* env = std::getenv("QXFER_THREADS")) threads = std::atoi(env);
  }
  opt.threads = threads > 0 ? threads : 1;

  try {
    qxfer::run_manifest(opt);
  } catch (const qxfer::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
