// qdatabus <experiment> --config cfg.json --out dir [--seed N] [--format csv|json]
//
// Exit codes: 0 ok, 2 bad config or arguments, 3 numerical failure.

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "qdatabus/experiment_config.hpp"
#include "qdatabus/experiments.hpp"
#include "qdatabus/output.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum data bus experiments"};
  app.set_version_flag("--version", qdatabus::kVersion);

  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  bool stamp = false;
  bool quiet = false;

  std::vector<std::string> names;
  for (const auto& [kind, name] : qdatabus::kExperimentNames) names.emplace_back(name);
  app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--stamp", stamp, "Record a UTC timestamp in the metadata (breaks byte equality)");
  app.add_flag("-q,--quiet", quiet, "Do not list written files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    auto cfg = qdatabus::load_config(config_path);
    if (qdatabus::parse_experiment_kind(experiment) != cfg.experiment)
      throw qdatabus::ConfigError("config describes '" + qdatabus::to_string(cfg.experiment) +
                                  "' but '" + experiment + "' was requested");
    if (seed) cfg.seed = *seed;
    // --out only picks the directory; the echoed config stays location-independent
    // so reruns elsewhere are byte-identical.
    const auto result = qdatabus::run_experiment(cfg);
    const auto files = qdatabus::write_result(
        result, out_dir, format == "json" ? qdatabus::OutputFormat::json : qdatabus::OutputFormat::csv,
        stamp);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    if (!quiet)
      for (const auto& f : files) std::cout << f.string() << "\n";
  } catch (const qdatabus::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const qdatabus::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return 0;
}
