// rsma: run one experiment described by a JSON config and write
// <out-dir>/<id>.csv plus <out-dir>/<id>_summary.json.
//
// Exit codes: 0 success, 2 config error, 3 more than 10% of solves failed,
// 4 I/O error.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rsma/config.h"
#include "rsma/csv.h"
#include "rsma/experiment.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolves = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool record_timing = false;
};

int run(const std::string& command, const Options& opt) {
  rsma::ExperimentConfig config;
  try {
    config = rsma::parse_config(opt.config);
    if (opt.seed) config.seed = *opt.seed;
    if (opt.record_timing) config.record_timing = true;
    if (command != "validate" && command != rsma::keyword(config.kind)) {
      throw rsma::ConfigError(opt.config + ": kind is '" + rsma::keyword(config.kind) +
                              "' but the command is '" + command + "'");
    }
  } catch (const rsma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (command == "validate") {
    std::cout << opt.config << ": ok (" << rsma::keyword(config.kind) << ")\n";
    return 0;
  }

  const rsma::ExperimentResult result = rsma::run_experiment(config, opt.jobs);
  if (result.resampled > 0) {
    std::cerr << "note: resampled " << result.resampled << " rank-deficient channel draws\n";
  }
  const auto dir = std::filesystem::path(opt.out_dir);
  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw rsma::IoError("cannot create " + dir.string() + ": " + ec.message());
    rsma::emit_csv(result.rows, (dir / (config.id + ".csv")).string());
    rsma::emit_summary(config, result, (dir / (config.id + "_summary.json")).string());
  } catch (const rsma::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& f : result.fits) {
    std::cout << f.scheme << ": slope " << f.estimate.slope << " (predicted " << f.predicted
              << ", r2 " << f.estimate.r2 << ")\n";
  }
  std::cout << result.rows.size() << " rows, " << result.failures << "/" << result.solves
            << " solves failed\n";
  if (result.solves > 0 && 10 * result.failures > result.solves) return kExitSolves;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust rate-splitting precoder design experiments"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  for (const char* name : {"maxmin", "minpower", "dof", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "JSON experiment config")->required();
    if (std::string(name) == "validate") continue;
    sub->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--record-timing", opt.record_timing, "fill wall_time_ms");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() != "validate" && sub->count("--seed") > 0) opt.seed = seed;
  try {
    return run(sub->get_name(), opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
