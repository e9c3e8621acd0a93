#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qtypology/config.hpp"
#include "qtypology/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Question typology pipeline"};
  std::string config_path, workdir, stage;
  int workers = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "pipeline config (JSON)")->required();
  app.add_option("--workdir", workdir, "artifact directory (overrides config and QTYPOLOGY_WORKDIR)");
  app.add_option("stage,--stage", stage, "ingest | fragments | motifs | space | fit | assign | analyze | report | run-all");
  app.add_option("--workers", workers, "worker cap")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", verbose, "progress on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (stage.empty()) {
    std::cerr << "error: no stage given (use --stage)\n";
    return 2;
  }

  try {
    auto cfg = qtypology::load_config(config_path);
    if (const char* env = std::getenv("QTYPOLOGY_WORKDIR"); env && *env) cfg.workdir = env;
    if (!workdir.empty()) cfg.workdir = workdir;
    qtypology::RunOptions opt;
    opt.workers = workers;
    opt.verbose = verbose;
    qtypology::run_stage(stage, cfg, opt);
  } catch (const qtypology::Error& e) {
    std::cerr << "error (" << qtypology::to_string(e.kind()) << "): " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
