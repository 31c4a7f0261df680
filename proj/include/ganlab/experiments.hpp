#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ganlab/training.hpp"

namespace ganlab {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat dotted-key configuration with typed accessors; unknown keys are caught
// against each experiment's declared key list.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  explicit KeyValueConfig(std::map<std::string, std::string> values)
      : values_(std::move(values)) {}

  static KeyValueConfig parse_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::string get_string(const std::string& key, std::string fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  // Throws listing valid keys when an override is not recognized.
  void check_keys(const std::vector<std::string>& recognized,
                  const std::string& experiment) const;

 private:
  std::map<std::string, std::string> values_;
};

struct AssertionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<AssertionResult> assertions;
  std::vector<std::string> outputs;  // files written
  nlohmann::json summary;            // scalar measurements for aggregation
};

struct ExperimentInfo {
  std::string name;
  std::string claim;            // what the run demonstrates
  std::string default_runtime;  // rough single-seed wall time
  std::vector<std::string> assertion_names;
  std::vector<std::string> config_keys;
  std::function<ExperimentResult(const KeyValueConfig&, std::uint64_t,
                                 const std::string&)>
      run;
};

// Stable-ordered experiment catalog.
const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo* find_experiment(const std::string& name);

struct ExperimentSpec {
  std::string name;
  KeyValueConfig overrides;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = ".";
};

struct RunManifest {
  std::string experiment;
  std::string spec_hash;
  std::string tool_version = kToolVersion;
  struct Entry {
    std::string name;
    std::uint64_t seed = 0;
    bool pass = false;
    std::string detail;
  };
  std::vector<Entry> assertions;
  std::vector<std::string> outputs;
  nlohmann::json summaries;  // per seed (and sweep value)

  bool all_passed() const;
  nlohmann::json to_json() const;
  void save(const std::string& path) const;
};

// Executes every seed of the named experiment, writes its CSVs and
// manifest.json under spec.out_dir, and returns the manifest.
RunManifest run_experiment(const ExperimentSpec& spec);

// Cross product of values x seeds with the swept key overridden per value;
// also writes an aggregate CSV keyed by the swept value.
RunManifest sweep_experiment(const ExperimentSpec& spec, const std::string& key,
                             const std::vector<std::string>& values);

// --- reusable experiment internals (also driven by the acceptance suite) ---

// The two parallel-unit-segments geometry: data on y = 0, generator mapping
// the uniform prior onto y = offset through an exact affine layer.
struct SegmentGapSetup {
  GanConfig config;
  Mlp generator;
};
SegmentGapSetup make_segment_gap_setup(double offset, std::uint64_t seed,
                                       std::size_t batch = 256);

struct BoundCheckRow {
  std::string config_id;
  std::uint64_t seed = 0;
  double w_exact = 0.0;
  double slack = 0.0;
  double v_sqrt = 0.0;
  double c = 0.0;
  double jsd_noisy = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Randomized checks of the noise-transport inequality
// (W(P, P+eps) <= sqrt(V) plus measured finite-sample slack).
std::vector<BoundCheckRow> noise_bound_checks(std::size_t n_configs,
                                              std::size_t n_points,
                                              std::uint64_t seed);

// Randomized checks of the combined transport bound
// W(P_r, P_g) <= 2 sqrt(V) + 2 C sqrt(JSD of the smoothed pair).
std::vector<BoundCheckRow> combined_bound_checks(std::size_t n_configs,
                                           std::size_t n_points,
                                           std::uint64_t seed);

void save_bound_rows(const std::vector<BoundCheckRow>& rows,
                     const std::string& path);

// Local-dimension probe of a relu generator image: singular values of a
// displacement matrix around g(z) beyond index dim Z, relative to the top
// one. Directions are redrawn if they cross an activation boundary.
struct RankProbeResult {
  std::size_t probes = 0;
  std::size_t within_rank = 0;  // probes whose trailing ratio stayed below tol
  double worst_ratio = 0.0;
  double tolerance = 1e-8;
};
RankProbeResult jacobian_rank_probe(std::size_t n_probes, std::uint64_t seed,
                                    std::size_t latent_dim = 2,
                                    std::size_t out_dim = 10);

}  // namespace ganlab
