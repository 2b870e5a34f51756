#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpt/bloch.hpp"
#include "cpt/core_model.hpp"
#include "cpt/parallel.hpp"

namespace cpt::spectra {

/// Uniform detuning grid in rad/s with optional excluded intervals.
struct DetuningGrid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  std::vector<std::pair<double, double>> exclusions;

  void validate() const;
  double step() const noexcept { return (max - min) / (points - 1); }
  double at(int i) const noexcept { return min + step() * i; }
  bool excluded(double delta) const noexcept;

  /// Grid centered on zero covering +-half_span_fsr free spectral ranges 2 pi / dt.
  static DetuningGrid fsr_span(double dt, double half_span_fsr, int points);
};

enum class Sampling { PulseEnd, PulseMid };
enum class Engine { Analytic, Numeric };
enum class Observable { Transmission, Fluorescence };

std::string to_string(Sampling s);
std::string to_string(Engine e);
std::string to_string(Observable o);

struct Spectrum {
  DetuningGrid grid;
  std::vector<double> delta;    ///< retained grid points (rad/s)
  std::vector<double> values;   ///< Im s13, or summed fluorescence
  std::vector<double> dropped;  ///< grid points removed (exclusions, pole band)
  Observable observable = Observable::Transmission;
  Sampling sampling = Sampling::PulseEnd;
  Engine engine = Engine::Numeric;
  LambdaParams params;
  PulseSequence seq;
};

struct SweepOptions {
  BlochState initial = BlochState::ground1();
  Execution exec = Execution::Parallel;
  int substeps = 1;
  double pole_guard = 1e-6;
};

/// Im s13 at the end (or middle) of the last pulse, swept over delta.
/// The analytic engine needs omega1/omega2 <= 0.01 and gamma0 = 0; it drops pole-band points.
Spectrum transmission_spectrum(const LambdaParams& p, const PulseSequence& seq,
                               const DetuningGrid& grid, Sampling sampling, Engine engine,
                               const SweepOptions& opt = {});

/// S(delta) = sum_{n=2}^{N} s33 at the end of pulse n (numeric engine).
Spectrum fluorescence_spectrum(const LambdaParams& p, const PulseSequence& seq,
                               const DetuningGrid& grid, const SweepOptions& opt = {});

/// Ramsey-CPT photoluminescence summed over every pulse.
Spectrum ramsey_spectrum(const LambdaParams& p, const bloch::RamseyProtocol& protocol,
                         const DetuningGrid& grid, const SweepOptions& opt = {});

/// Single-point kernels, shared by the sweeps and the benchmark.
double numeric_transmission_point(const LambdaParams& p, const PulseSequence& seq,
                                  Sampling sampling, const BlochState& initial, int substeps = 1);
double analytic_transmission_point(const LambdaParams& p, const PulseSequence& seq,
                                   Sampling sampling, double pole_guard = 1e-6);
double fluorescence_point(const LambdaParams& p, const PulseSequence& seq,
                          const BlochState& initial, int substeps = 1);
double ramsey_point(const LambdaParams& p, const bloch::RamseyProtocol& protocol,
                    const BlochState& initial, int substeps = 1);

enum class PeakKind { Maxima, Minima };

struct Peak {
  double position = 0.0;  ///< parabolic-refined abscissa
  double height = 0.0;    ///< value at the refined extremum
  double prominence = 0.0;
  double fwhm = 0.0;      ///< NaN when a half-level crossing falls outside the data
};

struct PeakReport {
  std::vector<Peak> peaks;
  std::optional<double> fsr;      ///< mean spacing of consecutive peaks
  std::optional<double> finesse;  ///< fsr / mean fwhm
  bool found() const noexcept { return !peaks.empty(); }
};

/// Local extrema with prominence >= min_prominence * (max - min). A flat input yields no peaks.
PeakReport peak_analysis(const std::vector<double>& x, const std::vector<double>& y, PeakKind kind,
                         double min_prominence = 0.05);
PeakReport peak_analysis(const Spectrum& s, PeakKind kind, double min_prominence = 0.05);

}  // namespace cpt::spectra
