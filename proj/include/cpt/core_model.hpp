#pragma once

#include <array>
#include <complex>
#include <numbers>

namespace cpt {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Physical constants of the Lambda system. All rates are angular (rad/s).
struct LambdaParams {
  double omega1 = 0.0;  ///< Rabi frequency of field 1 (probe, |1>-|3>)
  double omega2 = 0.0;  ///< Rabi frequency of field 2 (control, |2>-|3>)
  double delta = 0.0;   ///< two-photon detuning of field 1
  double gamma = 0.0;   ///< controlled decay rate while dissipation is gated on
  double gamma0 = 0.0;  ///< ground-state dephasing

  /// Omega = sqrt(omega1^2 + omega2^2).
  double rabi() const noexcept;

  /// Throws InvalidParameters when an invariant is broken.
  void validate() const;

  LambdaParams with_delta(double d) const noexcept {
    LambdaParams p = *this;
    p.delta = d;
    return p;
  }
};

/// Timing of the interleaved excitation / dissipation protocol.
struct PulseSequence {
  int n_pulses = 1;
  double dt = 0.0;              ///< pulse-to-pulse period
  double t1 = 0.0;              ///< excitation pulse length
  double decay_fraction = 1.0;  ///< portion of the gap dt - t1 with gamma switched on

  double gap() const noexcept { return dt - t1; }
  double total_time() const noexcept { return n_pulses * dt; }
  double area(const LambdaParams& p) const noexcept { return p.rabi() * t1; }

  /// gamma * (dt - t1) * decay_fraction >= threshold.
  bool full_relaxation(const LambdaParams& p, double threshold = 10.0) const noexcept;

  void validate() const;

  /// Sequence whose pulse length realizes `area` for the given Rabi frequencies.
  static PulseSequence from_area(const LambdaParams& p, int n_pulses, double dt, double area,
                                 double decay_fraction = 1.0);
};

/// Expectation values <sigma_ij> = Tr(rho |i><j|), i.e. the (j,i) density-matrix element.
struct BlochState {
  complex s13{};
  complex s12{};
  complex s23{};
  double p11 = 0.0;
  double p22 = 0.0;
  double p33 = 0.0;

  double trace() const noexcept { return p11 + p22 + p33; }

  /// Trace, population range and Cauchy-Schwarz checks with the given slack.
  bool satisfies_invariants(double trace_tol = 1e-12, double pop_tol = 1e-10,
                            double coherence_tol = 1e-10) const noexcept;

  bool is_finite() const noexcept;

  static BlochState ground1() noexcept { return {.p11 = 1.0}; }
  static BlochState excited() noexcept { return {.p33 = 1.0}; }
  /// Incoherent ground mixture p11 = p22 = 1/2.
  static BlochState thermal() noexcept { return {.p11 = 0.5, .p22 = 0.5}; }
  /// Pure state c1|1> + c2|2> (normalized by the caller).
  static BlochState ground_superposition(complex c1, complex c2) noexcept;
  static BlochState dark(const LambdaParams& p);
  static BlochState bright(const LambdaParams& p);
};

struct DarkBright {
  complex dark;
  complex bright;
};

/// Projections of the ground amplitudes (c1, c2) onto
/// |D> = (omega2|1> - omega1|2>)/Omega and |B> = (omega1|1> + omega2|2>)/Omega.
DarkBright dark_bright_decompose(const LambdaParams& p, complex c1, complex c2);

/// <D|rho|D> and <B|rho|B> for a (possibly mixed) state.
double dark_population(const BlochState& s, const LambdaParams& p);
double bright_population(const BlochState& s, const LambdaParams& p);

/// Dark-state population after n excitation + full-relaxation steps:
/// 1 - (1 - sin^2(A/2)/2)^n (1 - sigma_d0).
double dark_population_after_n(double area, double sigma_d0, long n);

/// Smallest n with dark_population_after_n >= threshold.
long steps_to_threshold(double area, double sigma_d0, double threshold);

/// Four-level Raman configuration reducing to an effective Lambda system.
struct FourLevelConfig {
  std::array<double, 4> omega_raman{};  ///< Omega_1 .. Omega_4 of the Raman legs
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct EffectiveLambda {
  double omega_p = 0.0;  ///< Omega_1 Omega_2 / Delta_1
  double omega_c = 0.0;  ///< Omega_3 Omega_4 / Delta_2
  bool valid = false;    ///< |Delta_1 - Delta_2| >= factor * max(|Omega_p|, |Omega_c|)
};

EffectiveLambda effective_lambda(const FourLevelConfig& cfg, double validity_factor = 10.0);

}  // namespace cpt
