#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pharec/error.hpp"
#include "pharec/pipeline.hpp"
#include "pharec/signal_extract.hpp"

namespace fs = std::filesystem;
using namespace pharec;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string from;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_from) {
  cmd->add_option("--config", f.config, "pipeline config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--from", f.from, needs_from ? "artifact directory of earlier stages" : "input path");
  cmd->add_option("--seed", f.seed, "overrides every seed in the config");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

PipelineConfig resolve_config(const CommonFlags& f) {
  PipelineConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else if (!f.from.empty() && fs::exists(fs::path(f.from) / files::kConfig)) {
    c = load_config(fs::path(f.from) / files::kConfig);
  } else {
    throw Error(ErrorCode::InvalidConfig, "--config is required (or --from a directory holding config.json)");
  }
  if (f.seed) apply_seed(c, *f.seed);
  if (f.jobs) apply_jobs(c, *f.jobs);
  return c;
}

fs::path out_dir(const CommonFlags& f) {
  if (!f.out.empty()) return f.out;
  if (!f.from.empty()) return f.from;
  throw Error(ErrorCode::InvalidConfig, "--out is required");
}

fs::path from_dir(const CommonFlags& f) {
  if (f.from.empty()) throw Error(ErrorCode::InvalidConfig, "--from DIR is required for this stage");
  return f.from;
}

// Trials referenced by the config, or the trials/ directory of --from.
TrialSet stage_trials(const PipelineConfig& c, const CommonFlags& f) {
  if (!c.trials_dir.empty()) return read_trials(c.trials_dir);
  if (!f.from.empty() && fs::exists(fs::path(f.from) / files::kTrials / "manifest.json")) {
    return read_trials(fs::path(f.from) / files::kTrials);
  }
  throw Error(ErrorCode::InvalidConfig, "no trials: set input.trials_dir or run simulate into --from");
}

void note(const std::string& msg) { std::cerr << "pharec: " << msg << '\n'; }

int finish_report(const Report& rep, const fs::path& out) {
  save_report(out, rep);
  for (const auto& r : rep.rows) {
    const char* status = !r.pass ? "N/A " : *r.pass ? "PASS" : "FAIL";
    char value[32] = "-";
    if (r.value) std::snprintf(value, sizeof value, "%.6g", *r.value);
    std::printf("%s %-72s value=%-12s bound=%g\n", status, r.name.c_str(), value, r.bound);
  }
  return rep.all_pass() ? kExitPass : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-amplitude reconstruction of coupled oscillator networks"};
  app.require_subcommand(1);
  CommonFlags f;

  auto* simulate = app.add_subcommand("simulate", "simulate synthetic trials");
  auto* limit_cycle = app.add_subcommand("limit-cycle", "cycles and Floquet exponents of the fitted VF");
  auto* transforms = app.add_subcommand("transforms", "phase-amplitude transformations");
  auto* reconstruct = app.add_subcommand("reconstruct-vf", "fit the network vector field to trials");
  auto* reduce = app.add_subcommand("reduce-coupling", "reduced-space coupling and heatmaps");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage and the comparison report");
  auto* comp = app.add_subcommand("compare", "compare artifacts with oracles");
  auto* extract = app.add_subcommand("extract", "phase and radius from raw signals");
  for (auto* cmd : {simulate, limit_cycle, transforms, reconstruct, reduce, pipeline, comp, extract}) {
    add_common(cmd, f, cmd != extract && cmd != simulate && cmd != pipeline);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    int status = kExitPass;
    if (simulate->parsed()) {
      const PipelineConfig c = resolve_config(f);
      const fs::path out = out_dir(f);
      save_config(out, c);
      const TrialSet set = obtain_trials(c, out);
      note("wrote " + std::to_string(set.trials.size()) + " trials to " + (out / files::kTrials).string());
    } else if (reconstruct->parsed()) {
      const PipelineConfig c = resolve_config(f);
      const fs::path out = out_dir(f);
      const TrialSet set = stage_trials(c, f);
      save_vf(out, stage_reconstruct_vf(c, set), radius_statistics(set, c.settle_fraction));
    } else if (limit_cycle->parsed()) {
      const PipelineConfig c = resolve_config(f);
      Artifacts a;
      load_vf(from_dir(f), a);
      const auto cycles = stage_limit_cycle(c, *a.vf, a.radii);
      save_cycles(out_dir(f), cycles);
      for (std::size_t i = 0; i < cycles.size(); ++i) {
        std::printf("oscillator %zu: T=%s lambda=%s log-slope=%s\n", i + 1, format_double(cycles[i].cycle.period).c_str(),
                    format_double(cycles[i].cycle.lambda).c_str(), format_double(cycles[i].lambda_log_slope).c_str());
      }
    } else if (transforms->parsed()) {
      const PipelineConfig c = resolve_config(f);
      Artifacts a;
      load_vf(from_dir(f), a);
      load_cycles(from_dir(f), a);
      save_transforms(out_dir(f), stage_transforms(c, *a.vf, a.cycles));
    } else if (reduce->parsed()) {
      const PipelineConfig c = resolve_config(f);
      Artifacts a;
      load_vf(from_dir(f), a);
      load_transforms(from_dir(f), a);
      save_coupling(out_dir(f), stage_reduce_coupling(c, *a.vf, a.transforms, a.radii));
    } else if (pipeline->parsed()) {
      const PipelineConfig c = resolve_config(f);
      const fs::path out = out_dir(f);
      const Artifacts a = run_pipeline(c, out);
      status = finish_report(compare(c, a), out);
    } else if (comp->parsed()) {
      const PipelineConfig c = resolve_config(f);
      const fs::path from = from_dir(f);
      Artifacts a;
      load_vf(from, a);
      load_cycles(from, a);
      load_transforms(from, a);
      if (fs::exists(from / files::kCoupling)) load_coupling(from, a);
      if (c.model && fs::exists(from / files::kTrials / "manifest.json")) a.trials = read_trials(from / files::kTrials);
      status = finish_report(compare(c, a), out_dir(f));
    } else if (extract->parsed()) {
      std::string input = f.from;
      if (input.empty() && !f.config.empty()) input = load_config(f.config).extract_input;
      if (input.empty()) throw Error(ErrorCode::InvalidConfig, "extract needs --from CSV or extract.input");
      const auto signals = read_raw_signals(input);
      const auto channels = extract_channels(signals, f.jobs.value_or(1));
      const fs::path out = out_dir(CommonFlags{f.config, f.out, "", f.seed, f.jobs});
      write_text_file(out / "extracted.csv", extracted_csv(channels));
      for (const auto& ch : channels) {
        std::printf("%s: dominant frequency %s Hz\n", ch.label.c_str(), format_double(ch.dominant_frequency).c_str());
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    note("done in " + std::to_string(secs) + " s");
    return status;
  } catch (const Error& e) {
    std::cerr << "pharec: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitRuntime;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "pharec: IoError: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "pharec: " << e.what() << '\n';
    return kExitRuntime;
  }
}
