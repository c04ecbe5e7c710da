#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nullcollapse/commands.hpp"

namespace nc = nullcollapse;

int main(int argc, char** argv) {
  CLI::App app{"Null-lattice collapse model: decoherence functionals, identity checks, trajectory sampling"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> tolerance;
  std::string out_dir;
  std::optional<std::string> functional;
  std::optional<int> extent;
  std::optional<int> steps;
  std::optional<std::uint64_t> count;
  std::optional<std::uint64_t> seed;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--tolerance", tolerance, "Override every check tolerance");
  app.add_option("--out", out_dir, "Output directory");

  auto* verify = app.add_subcommand("verify", "Run the identity and axiom checks; exit 0 iff all pass");
  auto* table = app.add_subcommand("table", "Write a decoherence table as CSV and JSON");
  table->add_option("--functional", functional, "q, c, qc, qtilde or qe");
  table->add_option("--extent", extent, "Time extent n");
  auto* sample = app.add_subcommand("sample", "Sample collapse-model trajectories");
  sample->add_option("--steps", steps, "Vertices per trajectory");
  sample->add_option("--count", count, "Number of trajectories");
  sample->add_option("--seed", seed, "Ensemble seed");
  verify->add_option("--extent", extent, "Time extent n");
  verify->add_option("--seed", seed, "Seed for randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    nc::json doc = nc::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        doc = nc::json::parse(in);
      } catch (const nc::json::parse_error& e) {
        std::cerr << "config parse error: " << e.what() << '\n';
        return 2;
      }
    }
    if (tolerance) doc["tolerance"] = *tolerance;
    if (functional) doc["functional"] = *functional;
    if (extent) doc["extent"] = *extent;
    if (steps) doc["steps"] = *steps;
    if (count) doc["count"] = *count;
    if (seed) doc["seed"] = *seed;
    const nc::RunConfig config = nc::parse_config(doc);
    nc::build_models(config);

    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = std::filesystem::path(out_dir);

    if (verify->parsed()) return nc::cmd_verify(config, out, std::cout);
    const auto dir = out.value_or(std::filesystem::path("."));
    const auto written = table->parsed() ? nc::cmd_table(config, dir) : nc::cmd_sample(config, dir);
    for (const auto& p : written) std::cout << p.string() << '\n';
    return 0;
  } catch (const nc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
