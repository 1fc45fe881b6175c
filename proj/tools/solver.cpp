#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "deltashell/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"delta-shell Dirac spectral solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--threads", threads, "worker thread count (default: SOLVER_THREADS or 1)");
    sub->add_option("--out-dir", out_dir, "output directory");
  };
  CLI::App* validate = app.add_subcommand("validate", "check a configuration without computing");
  CLI::App* run = app.add_subcommand("run", "execute the configured experiment");
  add_common(validate);
  add_common(run);

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("SOLVER_THREADS")) threads = std::atoi(env);
    if (threads <= 0) threads = 1;
  }
  // the numerical kernels are single-threaded; cap the BLAS backend as well
  setenv("OPENBLAS_NUM_THREADS", std::to_string(threads).c_str(), 0);

  dsh::RunConfig cfg;
  try {
    cfg = dsh::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (validate->parsed()) {
    const auto diags = dsh::validate_config(cfg);
    if (diags.empty()) {
      std::cout << "OK\n";
    } else {
      for (const auto& d : diags) std::cout << d << "\n";
    }
    return 0;
  }
  return dsh::run_experiment(cfg, out_dir);
}
