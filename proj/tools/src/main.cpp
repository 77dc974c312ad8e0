#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fairweight/cli/commands.hpp"
#include "fairweight/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

void diagnose(const std::string& code, const std::string& message) {
  nlohmann::json doc = {{"error", code}, {"message", message}};
  std::cerr << doc.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = fairweight::cli;

  CLI::App app{"fairweight: train classifiers under group-fairness constraints"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string epsilons;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Seed (overrides the config seed)");
  };

  CLI::App* audit = app.add_subcommand("audit", "Report every metric for an unconstrained model");
  add_common(audit);
  CLI::App* train = app.add_subcommand("train", "Train under the configured constraints");
  add_common(train);
  CLI::App* sweep = app.add_subcommand("sweep", "Trade-off table over a list of epsilons");
  add_common(sweep);
  sweep->add_option("--epsilons", epsilons, "Comma-separated epsilons (overrides sweep.epsilons)");
  CLI::App* grid = app.add_subcommand("compare-grid", "Hill-climbing against grid search");
  add_common(grid);

  cli::SynthOptions synth;
  std::string synth_out = "synth.csv";
  CLI::App* gen = app.add_subcommand("gen-synth", "Write a planted-bias synthetic CSV");
  gen->add_option("--out", synth_out, "Output CSV path");
  gen->add_option("--n", synth.n, "Number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--sp-gap", synth.sp_gap, "Planted statistical-parity gap")
      ->check(CLI::Range(0.0, 0.999));
  gen->add_option("--noise-a", synth.noise_a, "Label noise sd in group a")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--noise-b", synth.noise_b, "Label noise sd in group b")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", synth.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (gen->parsed()) {
      cli::cmd_gen_synth(synth, synth_out);
      std::cout << synth_out << "\n";
      return kExitOk;
    }

    cli::RunConfig config = cli::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) config.set_seed(*seed);

    if (audit->parsed()) {
      cli::cmd_audit(config);
    } else if (train->parsed()) {
      const auto report = cli::cmd_train(config);
      std::cout << "satisfied: " << (report["result"]["satisfied"].get<bool>() ? "yes" : "no")
                << "\n";
    } else if (sweep->parsed()) {
      const auto list = epsilons.empty() ? config.sweep_epsilons : cli::parse_number_list(epsilons);
      std::cout << cli::cmd_sweep(config, list);
    } else if (grid->parsed()) {
      cli::cmd_compare_grid(config);
    }
    std::cout << "wrote " << config.output_dir.string() << "\n";
    return kExitOk;
  } catch (const fairweight::Error& e) {
    diagnose(std::string(fairweight::to_string(e.code())), e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    diagnose("Internal", e.what());
    return kExitInternal;
  }
}
