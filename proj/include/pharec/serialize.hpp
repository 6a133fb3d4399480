#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pharec/coupling_reduction.hpp"
#include "pharec/limit_cycle.hpp"
#include "pharec/models.hpp"
#include "pharec/signal_extract.hpp"
#include "pharec/transforms.hpp"
#include "pharec/trials.hpp"
#include "pharec/vf_reconstruction.hpp"

namespace pharec {

using json = nlohmann::json;

// Doubles are written with 17 significant digits, so every file round-trips
// bit-exactly.
std::string format_double(double v);

void to_json(json& j, const ModelSpec& spec);
void from_json(const json& j, ModelSpec& spec);
void to_json(json& j, const SingleBasisSpec& spec);
void from_json(const json& j, SingleBasisSpec& spec);
void to_json(json& j, const PairBasisSpec& spec);
void from_json(const json& j, PairBasisSpec& spec);
void to_json(json& j, const FittedSeries& s);
void from_json(const json& j, FittedSeries& s);
void to_json(json& j, const LimitCycle& c);
void from_json(const json& j, LimitCycle& c);
void to_json(json& j, const TransformSet& t);
void from_json(const json& j, TransformSet& t);
void to_json(json& j, const NetworkVF& v);
void from_json(const json& j, NetworkVF& v);
void to_json(json& j, const ReducedCoupling& rc);
void from_json(const json& j, ReducedCoupling& rc);

// Artifact documents carry a "schema" field checked on load.
json make_document(const std::string& schema, json body);
json open_document(const json& doc, const std::string& schema);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Trial CSV: t, theta_1, r_1, theta_2, r_2, ... with one header row.
std::string trial_csv(const Trial& trial);
Trial parse_trial_csv(const std::string& text, std::size_t n_osc);

// One CSV per trial plus manifest.json listing model, parameters, seed, step and files.
void write_trials(const std::filesystem::path& dir, const TrialSet& trials, const json& provenance);
TrialSet read_trials(const std::filesystem::path& dir);

// Heatmap CSV per (pair, equation, panel) plus manifest.json naming panels and labels.
void write_heatmaps(const std::filesystem::path& dir, const ReducedCoupling& rc);

// Raw-signal CSV: header t,<label>,<label>,...; one column per channel.
std::vector<RawSignal> read_raw_signals(const std::filesystem::path& path);
std::string extracted_csv(const std::vector<ExtractedChannel>& channels);

}  // namespace pharec
