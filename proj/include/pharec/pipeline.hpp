#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pharec/coupling_reduction.hpp"
#include "pharec/limit_cycle.hpp"
#include "pharec/serialize.hpp"
#include "pharec/transforms.hpp"
#include "pharec/trials.hpp"
#include "pharec/vf_reconstruction.hpp"

namespace pharec {

struct PipelineConfig {
  std::optional<ModelSpec> model;  // synthetic run
  std::string trials_dir;          // measured run when no model is given
  TrialOptions trials;
  CycleOptions cycle;
  TransformOptions transforms;
  VfFitOptions vf;
  ReductionOptions reduction;
  double settle_fraction = 0.5;
  int jobs = 1;
  std::map<std::string, double> tolerances;  // keyed by report row family
  std::string extract_input;                  // raw-signal CSV for `extract`
};

// Per-kind defaults; a config without a model uses the polar defaults.
PipelineConfig default_config(std::optional<ModelKind> kind);
// Unknown keys and type errors raise InvalidConfig naming the key path.
PipelineConfig parse_config(const json& j);
json config_to_json(const PipelineConfig& config);
void apply_seed(PipelineConfig& config, std::uint64_t seed);
void apply_jobs(PipelineConfig& config, int jobs);

struct CycleArtifact {
  LimitCycle cycle;
  double lambda_log_slope = 0.0;
};

struct Artifacts {
  std::optional<TrialSet> trials;
  std::vector<RadiusStats> radii;
  std::optional<NetworkVF> vf;
  std::vector<CycleArtifact> cycles;
  std::vector<TransformSet> transforms;
  std::optional<ReducedCoupling> coupling;
};

TrialSet stage_simulate(const PipelineConfig& config);
NetworkVF stage_reconstruct_vf(const PipelineConfig& config, const TrialSet& trials);
// Cycle of each fitted uncoupled VF seeded at the mid radius of the settled data.
std::vector<CycleArtifact> stage_limit_cycle(const PipelineConfig& config, const NetworkVF& vf,
                                             const std::vector<RadiusStats>& radii);
std::vector<TransformSet> stage_transforms(const PipelineConfig& config, const NetworkVF& vf,
                                           const std::vector<CycleArtifact>& cycles);
ReducedCoupling stage_reduce_coupling(const PipelineConfig& config, const NetworkVF& vf,
                                      const std::vector<TransformSet>& transforms,
                                      const std::vector<RadiusStats>& radii);

struct ReportRow {
  std::string name;
  std::optional<double> value;  // empty when the oracle is unavailable
  double bound = 0.0;
  std::optional<bool> pass;
  std::string note;
};

struct Report {
  std::string model;
  std::vector<ReportRow> rows;
  bool all_pass() const;
};

json report_json(const Report& report);
Report compare(const PipelineConfig& config, const Artifacts& artifacts);

// Stage file names inside an artifact directory.
namespace files {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTrials = "trials";
inline constexpr const char* kNetworkVf = "network_vf.json";
inline constexpr const char* kCycles = "limit_cycles.json";
inline constexpr const char* kTransforms = "transforms.json";
inline constexpr const char* kCoupling = "reduced_coupling.json";
inline constexpr const char* kHeatmaps = "heatmaps";
inline constexpr const char* kReport = "report.json";
}  // namespace files

void save_config(const std::filesystem::path& dir, const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);
void save_vf(const std::filesystem::path& dir, const NetworkVF& vf, const std::vector<RadiusStats>& radii);
void load_vf(const std::filesystem::path& dir, Artifacts& artifacts);
void save_cycles(const std::filesystem::path& dir, const std::vector<CycleArtifact>& cycles);
void load_cycles(const std::filesystem::path& dir, Artifacts& artifacts);
void save_transforms(const std::filesystem::path& dir, const std::vector<TransformSet>& transforms);
void load_transforms(const std::filesystem::path& dir, Artifacts& artifacts);
void save_coupling(const std::filesystem::path& dir, const ReducedCoupling& rc);
void load_coupling(const std::filesystem::path& dir, Artifacts& artifacts);
void save_report(const std::filesystem::path& dir, const Report& report);

// Trials from config.trials_dir, or simulated from the model and written
// below `out` when `out` is non-empty.
TrialSet obtain_trials(const PipelineConfig& config, const std::filesystem::path& out);

// Runs every stage, writing each artifact as soon as it exists.
Artifacts run_pipeline(const PipelineConfig& config, const std::filesystem::path& out);

}  // namespace pharec
