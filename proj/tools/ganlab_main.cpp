#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ganlab/experiments.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

ganlab::ExperimentSpec build_spec(const std::string& name,
                                  const std::string& config_file,
                                  const std::vector<std::string>& sets,
                                  const std::vector<std::uint64_t>& seeds,
                                  const std::string& seed_list,
                                  const std::string& out_dir) {
  ganlab::ExperimentSpec spec;
  spec.name = name;
  if (!config_file.empty())
    spec.overrides = ganlab::KeyValueConfig::parse_file(config_file);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got " + kv);
    spec.overrides.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  spec.seeds = seeds;
  if (!seed_list.empty())
    for (const std::string& s : split_csv(seed_list))
      spec.seeds.push_back(std::stoull(s));
  if (spec.seeds.empty()) spec.seeds.push_back(0);
  spec.out_dir = out_dir;
  return spec;
}

void print_manifest_outcome(const ganlab::RunManifest& manifest) {
  for (const auto& a : manifest.assertions)
    std::printf("[%s] %-48s seed=%llu  %s\n", a.pass ? "PASS" : "FAIL",
                a.name.c_str(), static_cast<unsigned long long>(a.seed),
                a.detail.c_str());
  std::printf("%s\n", manifest.all_passed() ? "all assertions passed"
                                            : "ASSERTION FAILURES");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ganlab: adversarial training-dynamics laboratory"};
  app.require_subcommand(1);

  std::string name, out_dir = "out", config_file, seed_list, sweep_key,
              sweep_values;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> sets;
  bool as_json = false;

  CLI::App* list = app.add_subcommand("list", "list available experiments");
  list->add_flag("--json", as_json, "machine-readable catalog");

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", name, "experiment name")->required();
  run->add_option("--seed", seeds, "seed (repeatable)");
  run->add_option("--seeds", seed_list, "comma-separated seed list");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--set", sets, "override key=value (repeatable)");
  run->add_option("--config", config_file, "key=value config file");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("experiment", name, "experiment name")->required();
  sweep->add_option("key", sweep_key, "config key to sweep")->required();
  sweep->add_option("values", sweep_values, "comma-separated values")
      ->required();
  sweep->add_option("--seed", seeds, "seed (repeatable)");
  sweep->add_option("--seeds", seed_list, "comma-separated seed list");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--set", sets, "override key=value (repeatable)");
  sweep->add_option("--config", config_file, "key=value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      const auto& catalog = ganlab::experiment_catalog();
      if (as_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& e : catalog)
          j.push_back({{"name", e.name},
                       {"checks", e.claim},
                       {"default_runtime", e.default_runtime},
                       {"assertions", e.assertion_names},
                       {"config_keys", e.config_keys}});
        std::cout << j.dump(2) << "\n";
      } else {
        for (const auto& e : catalog)
          std::printf("%-20s %-9s %s\n", e.name.c_str(),
                      e.default_runtime.c_str(), e.claim.c_str());
      }
      return 0;
    }

    if (run->parsed()) {
      auto spec =
          build_spec(name, config_file, sets, seeds, seed_list, out_dir);
      ganlab::RunManifest manifest = ganlab::run_experiment(spec);
      print_manifest_outcome(manifest);
      return manifest.all_passed() ? 0 : 1;
    }

    if (sweep->parsed()) {
      auto spec =
          build_spec(name, config_file, sets, seeds, seed_list, out_dir);
      ganlab::RunManifest manifest =
          ganlab::sweep_experiment(spec, sweep_key, split_csv(sweep_values));
      print_manifest_outcome(manifest);
      return manifest.all_passed() ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // usage error
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
