#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dismet/metrics.hpp"

namespace dismet {

inline constexpr const char* kToolVersion = "1.0.0";

/// Provenance record written next to every report. Timings live here and
/// only here, so report.json and report.csv stay byte-identical across
/// repeated runs.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string posteriors_path;
  std::string factors_path;  // empty when factors were not supplied
  std::vector<std::pair<std::size_t, std::string>> soft_label_paths;
  std::string out_dir;
  EvalConfig config;
  std::string metrics;  // the --metrics selection as given
  double load_ms = 0.0;
  double compute_ms = 0.0;
  double write_ms = 0.0;
};

/// JSON report with sorted keys and shortest-round-trip numbers; metric
/// keys: "informativeness", "misjed", "sepin_at_k", "wsepin", "indin_at_k",
/// "windin", "rmig", "jemmig", "modularity" plus "_normalized" variants.
/// Skipped metrics appear only under "skipped" with their reason.
std::string report_to_json_string(const MetricReport& rep);

/// Flat "metric,i,j,value" table carrying the same numbers as the JSON.
std::string report_to_csv(const MetricReport& rep);

std::string manifest_to_json_string(const RunManifest& manifest);

/// Per-latent bar data: "latent,informativeness,normalized".
std::string plot_informativeness_csv(const MetricReport& rep);
/// Heat-map grid data: "i,j,misjed,misjed_normalized", all L x L cells.
std::string plot_misjed_csv(const MetricReport& rep);

struct EvaluateOptions {
  std::string posteriors_path;
  std::string factors_path;  // optional
  std::vector<std::pair<std::size_t, std::string>> soft_labels;
  std::string out_dir = ".";
  EvalConfig config{};
  std::string metrics = "all";
};

struct SynthOptions {
  std::string preset;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::int32_t> cards;  // optional cardinality override
  std::size_t noise_latents = 0;    // extra appended noise latents
};

struct OracleCheckOptions {
  std::string preset;
  EvalConfig config{};
  std::size_t seeds = 5;      // sampled metrics averaged over this many seeds
  bool corrupt_range = false; // negative control: skews the library grid only
  std::vector<std::int32_t> cards;
};

// Exit codes: 0 success, 1 oracle tolerance breach, 2 input errors,
// 3 configuration errors.
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_synth(const SynthOptions& opt);
int cmd_oracle_check(const OracleCheckOptions& opt);

}  // namespace dismet
