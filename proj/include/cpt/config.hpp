#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cpt::config {

enum class Experiment { DarkPumping, Transmission, Fluorescence, AllanPulsed, AllanRamsey, Trajectory };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Frequencies exactly as written in the config (Hz). The runner multiplies by 2 pi.
struct ParamsHz {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double gamma0 = 0.0;
};

/// Exactly one of dt / total_time, and exactly one of t1 / area_pi.
struct SequenceSpec {
  int n_pulses = 1;
  std::optional<double> dt;          ///< s
  std::optional<double> total_time;  ///< s, dt = total_time / N
  std::optional<double> t1;          ///< s
  std::optional<double> area_pi;     ///< pulse area in units of pi, t1 = area / Omega
  double decay_fraction = 1.0;
};

/// Either explicit [min, max] (Hz) or a span of +-half_span_fsr free spectral ranges.
struct GridSpec {
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> half_span_fsr;
  int points = 1001;
  std::vector<std::pair<double, double>> exclusions;  ///< Hz
};

struct DarkPumpingSpec {
  std::string mode = "population";  ///< "population": sigma_D vs n; "steps": N_s vs area
  std::vector<double> areas_pi;
  double sigma_d0 = 0.5;
  double threshold = 0.95;
  long n_max = 200;
  bool numeric = true;  ///< population mode: also run the full Bloch sequence at delta = 0
};

struct RamseySpec {
  double gamma = 0.0;         ///< Hz, always-on decay; 0 means gamma = omega2
  double pulse_length = 0.0;  ///< s, 0 means derived from prep_target
  double prep_target = 0.99;
  bool own_reference = false;
};

struct AllanSpec {
  double nu_at = 1.0;
  double tau = 0.0;
  double t_cycle = 15e-6;
  std::string noise = "shot-noise";
  int slope_half_width = 2;
  int grid_points = 401;
  double grid_half_span_fsr = 0.5;
  double slope_floor = 1e-6;
  std::vector<int> n_values;
  std::vector<double> gamma0;  ///< Hz
  RamseySpec ramsey;
};

struct TrajectorySpec {
  std::vector<double> detunings;  ///< Hz
  int dense_per_segment = 0;
};

struct OutputSpec {
  std::string dir = "out";
  std::string format = "csv";  ///< csv | json | both
};

struct RunConfig {
  Experiment experiment = Experiment::Transmission;
  std::string preset;
  ParamsHz params;
  SequenceSpec sequence;
  std::optional<std::vector<int>> n_list;  ///< sweep over N; unset means sequence.n_pulses
  std::string initial_state = "ground1";  ///< ground1 | thermal | dark | bright
  GridSpec grid;
  std::string sampling = "pulse-end";     ///< pulse-end | pulse-mid
  std::string engine = "numeric";         ///< analytic | numeric | both
  int substeps = 1;
  DarkPumpingSpec dark_pumping;
  AllanSpec allan;
  TrajectorySpec trajectory;
  OutputSpec output;

  /// Checks everything that does not require running the model.
  void validate() const;
};

/// Parses JSON text. Syntax errors report line and column; unknown keys and type errors
/// report the dotted field path and the line where the key first appears.
RunConfig parse(const std::string& text);
RunConfig from_json(const nlohmann::ordered_json& j, const std::string& source_text = {});
nlohmann::ordered_json to_json(const RunConfig& c);

RunConfig load_file(const std::string& path);

}  // namespace cpt::config
