#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cpt/config.hpp"
#include "cpt/core_model.hpp"
#include "cpt/spectra.hpp"

namespace cpt::runner {

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  std::vector<OutputFile> files;
  nlohmann::ordered_json manifest;
};

/// Runs the experiment and assembles every output in memory; nothing touches the disk,
/// so a failing run leaves no partial output behind.
RunResult execute(const config::RunConfig& cfg);

/// Writes the files plus manifest.json into `dir` (created if missing).
void write(const RunResult& result, const std::string& dir);

/// Hz to rad/s.
LambdaParams resolve_params(const config::ParamsHz& p);
/// Sequence with n pulses; dt from dt or total_time / n, t1 from t1 or area_pi * pi / Omega.
PulseSequence resolve_sequence(const config::SequenceSpec& s, const LambdaParams& p, int n);
/// Detuning grid in rad/s; a half_span_fsr grid is centered on zero and scales with dt.
spectra::DetuningGrid resolve_grid(const config::GridSpec& g, double dt);
BlochState resolve_initial(const std::string& name, const LambdaParams& p);
/// n_list when given, otherwise sequence.n_pulses.
std::vector<int> pulse_counts(const config::RunConfig& cfg);

}  // namespace cpt::runner
