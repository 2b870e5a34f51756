#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "cpt/config.hpp"
#include "cpt/error.hpp"
#include "cpt/parallel.hpp"
#include "cpt/presets.hpp"
#include "cpt/runner.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct RunArgs {
  std::string preset;
  std::string config_path;
  std::string out;
  std::string engine;
  std::string format;
  int threads = 0;
  std::optional<int> n;
};

int run(const RunArgs& args) {
  cpt::config::RunConfig cfg = args.preset.empty() ? cpt::config::load_file(args.config_path)
                                                   : cpt::presets::get(args.preset);
  if (!args.engine.empty()) cfg.engine = args.engine;
  if (!args.format.empty()) cfg.output.format = args.format;
  if (!args.out.empty()) cfg.output.dir = args.out;
  if (args.n) {
    cfg.sequence.n_pulses = *args.n;
    cfg.n_list = std::vector<int>{*args.n};
  }
  cpt::set_thread_count(args.threads);

  const cpt::runner::RunResult result = cpt::runner::execute(cfg);
  cpt::runner::write(result, cfg.output.dir);
  for (const auto& f : result.files) std::cout << cfg.output.dir << '/' << f.name << '\n';
  std::cout << cfg.output.dir << "/manifest.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed coherent-population-trapping simulator"};
  app.set_version_flag("--version", std::string(CPT_VERSION));
  app.require_subcommand(1);

  RunArgs args;
  auto* run_cmd = app.add_subcommand("run", "Run a preset or a JSON configuration");
  auto* preset_opt = run_cmd->add_option("--preset", args.preset, "Named preset (see 'presets')");
  auto* config_opt =
      run_cmd->add_option("--config", args.config_path, "JSON run configuration or manifest")
          ->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  config_opt->excludes(preset_opt);
  run_cmd->add_option("--out", args.out, "Output directory (default: config output.dir)");
  run_cmd->add_option("--engine", args.engine, "Transmission engine")
      ->check(CLI::IsMember({"analytic", "numeric", "both"}));
  run_cmd->add_option("--threads", args.threads, "OpenMP worker threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  run_cmd->add_option("--n", args.n, "Override the number of pulses")->check(CLI::PositiveNumber);

  app.add_subcommand("presets", "List the shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (app.got_subcommand("presets")) {
      std::cout << cpt::presets::format_table();
      return 0;
    }
    if (args.preset.empty() && args.config_path.empty()) {
      std::cerr << "error: run needs --preset or --config\n";
      return kExitValidation;
    }
    return run(args);
  } catch (const cpt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
