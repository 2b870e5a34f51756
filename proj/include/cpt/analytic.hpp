#pragma once

#include <utility>

#include "cpt/core_model.hpp"

// Closed-form weak-probe solution (omega1 << omega2, population pinned in |1>,
// full relaxation of s13 before every pulse, gamma0 = 0).
//
// Sign convention: this module follows the reduced system
//   s13' = (i delta - gamma) s13 + i omega1/2 + i omega2/2 s12
//   s12' = i delta s12 + i omega2/2 s13,
// whereas cpt::bloch integrates the full equations with -i delta. The two are related by
// s12 -> conj(s12), s13 -> -conj(s13); Im s13 and |s12| are convention independent.
// to_bloch_convention() converts.
//
// The area entering cos(A/2) is the control area omega2 * t1.
namespace cpt::analytic {

struct AnalyticCoeffs {
  complex alpha;  ///< particular solution of s12 during a pulse (the dressed dark coherence)
  complex c;      ///< e^{-i omega2 dt/2} cos(omega2 t1 / 2)
  complex k;
  complex d;      ///< e^{-i (omega2/2 + delta) dt}
  complex a1;     ///< A_1 = alpha (delta - omega2/2) / omega2
  complex b1;     ///< B_1 = -A_1 - alpha
};

inline constexpr double kDefaultPoleGuard = 1e-6;

/// Throws PoleError when |delta -+ omega2/2| <= pole_guard * omega2.
AnalyticCoeffs coeffs(const LambdaParams& p, const PulseSequence& seq,
                      double pole_guard = kDefaultPoleGuard);

/// True when delta lies in the guard band around +-omega2/2.
bool in_pole_band(double delta, double omega2, double pole_guard = kDefaultPoleGuard) noexcept;

/// Oscillation amplitudes (A_n, B_n) of pulse n >= 1 (global-time form).
std::pair<complex, complex> amplitudes(const AnalyticCoeffs& c, const LambdaParams& p,
                                       const PulseSequence& seq, long n);

/// Prefactor f(delta) of the geometric sum.
complex f_delta(const LambdaParams& p, const PulseSequence& seq,
                double pole_guard = kDefaultPoleGuard);

/// s12 at the start of pulse n (n >= 2) as f(delta) * sum_{l=0}^{n-2} (e^{i delta dt} cos(A/2))^l.
complex sigma12_at_pulse_start(long n, const LambdaParams& p, const PulseSequence& seq,
                               double pole_guard = kDefaultPoleGuard);

struct Coherences {
  complex s12;
  complex s13;
};

/// (s12, s13) at absolute time 0 <= t <= N dt from the piecewise A_n / B_n solution.
Coherences piecewise_solution(double t, const LambdaParams& p, const PulseSequence& seq,
                              double pole_guard = kDefaultPoleGuard);

/// Same solution evaluated inside pulse n (n >= 1) at local time 0 <= tau <= t1.
Coherences in_pulse(long n, double tau, const LambdaParams& p, const PulseSequence& seq,
                    double pole_guard = kDefaultPoleGuard);

/// Map to the sign convention of the full Bloch equations.
Coherences to_bloch_convention(const Coherences& c) noexcept;

/// Finesse pi sqrt(r) / (1 - r), r = e^{-gamma0 dt} cos(A/2). Throws DomainError for r <= 1/2.
double finesse(double area, double gamma0, double dt);

}  // namespace cpt::analytic
