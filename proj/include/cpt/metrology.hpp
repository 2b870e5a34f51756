#pragma once

#include <string>
#include <vector>

#include "cpt/core_model.hpp"
#include "cpt/parallel.hpp"
#include "cpt/spectra.hpp"

namespace cpt::metrology {

enum class NoiseModel { ShotNoise, UnitVariance };

std::string to_string(NoiseModel m);

struct AllanConfig {
  double nu_at = 1.0;     ///< atomic reference frequency (Hz); normalized results do not depend on it
  double tau = 0.0;       ///< averaging time (s); 0 means tau = t_cycle
  double t_cycle = 15e-6; ///< fixed total sequence time T_c (s)
  NoiseModel noise = NoiseModel::ShotNoise;
  int slope_half_width = 2;         ///< central difference over +-h grid steps
  int grid_points = 401;            ///< detuning points per spectrum
  double grid_half_span_fsr = 0.5;  ///< spectrum covers +-this many FSRs of 2 pi / dt
  double slope_floor = 1e-6;        ///< points with |dS/dnu| below floor * max are not candidates

  void validate() const;
};

struct AllanPoint {
  double sigma_a = 0.0;
  double nu_m = 0.0;    ///< detuning of the operating point (rad/s)
  double slope = 0.0;   ///< dS/dnu at nu_m (per Hz)
  double signal = 0.0;  ///< S at nu_m
};

/// White-frequency-noise Allan deviation (1/nu_at) sigma_S / |dS/dnu| sqrt(T_c / tau) at the
/// grid point nu_m that minimizes it.
AllanPoint allan_deviation(const spectra::Spectrum& spec, const AllanConfig& cfg);
AllanPoint allan_deviation(const std::vector<double>& delta, const std::vector<double>& signal,
                           const AllanConfig& cfg);

struct AllanRow {
  int n = 0;
  double gamma0 = 0.0;  ///< rad/s
  double sigma_a = 0.0;
  double sigma_bar = 0.0;
  double nu_m = 0.0;
  double slope = 0.0;
  bool full_relaxation = true;
};

struct NOpt {
  double gamma0 = 0.0;
  int n_opt = 0;
  double sigma_bar_min = 0.0;
};

struct AllanResult {
  std::string protocol;  ///< "pulsed-cpt" or "ramsey-cpt"
  double reference_sigma_a = 0.0;
  std::vector<AllanRow> rows;  ///< ordered by gamma0, then by the order of n_values
  std::vector<NOpt> optima;    ///< one entry per gamma0

  /// sigma_bar(N) for one gamma0 (in n_values order).
  std::vector<double> curve(double gamma0) const;
};

/// Pulsed CPT at fixed T_c: dt = T_c / N with t1 fixed, initial dark state.
struct PulsedTemplate {
  LambdaParams params;  ///< gamma0 is overwritten by the sweep
  double t1 = 0.0;
  double decay_fraction = 1.0;
};

/// Ramsey CPT at fixed T_c: N identical pulses spaced by T_c / N, decay always on.
struct RamseyTemplate {
  LambdaParams params;        ///< gamma is the always-on decay rate
  double pulse_length = 0.0;  ///< 0: use bloch::ramsey_preparation_length(params, prep_target)
  double prep_target = 0.99;
  bool own_reference = false; ///< normalize by the Ramsey (N=2, gamma0=0) point instead of pulsed
};

/// sigma_A of the pulsed-CPT (N = 2, gamma0 = 0) point that normalizes both protocols.
double pulsed_reference(const PulsedTemplate& tpl, const AllanConfig& cfg);

AllanResult pulsed_cpt_sweep(const PulsedTemplate& tpl, const AllanConfig& cfg,
                             const std::vector<int>& n_values,
                             const std::vector<double>& gamma0_values,
                             Execution exec = Execution::Parallel);

AllanResult ramsey_cpt_sweep(const RamseyTemplate& tpl, const PulsedTemplate& reference,
                             const AllanConfig& cfg, const std::vector<int>& n_values,
                             const std::vector<double>& gamma0_values,
                             Execution exec = Execution::Parallel);

/// Resolved Ramsey pulse length for a template.
double ramsey_pulse_length(const RamseyTemplate& tpl);

/// Fluorescence spectrum of one pulsed-CPT sweep point (what the sweep feeds into allan_deviation).
spectra::Spectrum pulsed_spectrum(const PulsedTemplate& tpl, const AllanConfig& cfg, int n,
                                  double gamma0, Execution exec = Execution::Serial);
spectra::Spectrum ramsey_sweep_spectrum(const RamseyTemplate& tpl, double pulse_length,
                                        const AllanConfig& cfg, int n, double gamma0,
                                        Execution exec = Execution::Serial);

/// log-spaced, rounded, de-duplicated integers in [lo, hi].
std::vector<int> log_spaced_counts(int lo, int hi, int count);

}  // namespace cpt::metrology
