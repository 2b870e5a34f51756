#include "cpt/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpt/error.hpp"

namespace cpt {

double LambdaParams::rabi() const noexcept { return std::hypot(omega1, omega2); }

void LambdaParams::validate() const {
  if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(delta) ||
      !std::isfinite(gamma) || !std::isfinite(gamma0))
    throw InvalidParameters("LambdaParams: non-finite value");
  if (omega1 < 0.0) throw InvalidParameters("LambdaParams: omega1 must be >= 0");
  if (omega2 <= 0.0) throw InvalidParameters("LambdaParams: omega2 must be > 0");
  if (gamma < 0.0) throw InvalidParameters("LambdaParams: gamma must be >= 0");
  if (gamma0 < 0.0) throw InvalidParameters("LambdaParams: gamma0 must be >= 0");
}

bool PulseSequence::full_relaxation(const LambdaParams& p, double threshold) const noexcept {
  return p.gamma * gap() * decay_fraction >= threshold;
}

void PulseSequence::validate() const {
  if (n_pulses < 1) throw InvalidParameters("PulseSequence: n_pulses must be >= 1");
  if (!(t1 > 0.0) || !(t1 < dt))
    throw InvalidParameters("PulseSequence: need 0 < t1 < dt (t1=" + std::to_string(t1) +
                            ", dt=" + std::to_string(dt) + ")");
  if (!(decay_fraction > 0.0) || decay_fraction > 1.0)
    throw InvalidParameters("PulseSequence: decay_fraction must lie in (0, 1]");
}

PulseSequence PulseSequence::from_area(const LambdaParams& p, int n_pulses, double dt, double area,
                                       double decay_fraction) {
  if (p.rabi() <= 0.0) throw InvalidParameters("PulseSequence::from_area: Omega = 0");
  return {n_pulses, dt, area / p.rabi(), decay_fraction};
}

bool BlochState::satisfies_invariants(double trace_tol, double pop_tol,
                                      double coherence_tol) const noexcept {
  if (!is_finite()) return false;
  if (std::abs(trace() - 1.0) > trace_tol) return false;
  for (double p : {p11, p22, p33})
    if (p < -pop_tol || p > 1.0 + pop_tol) return false;
  // Cauchy-Schwarz on the density matrix
  auto ok = [&](complex s, double a, double b) {
    return std::norm(s) <= std::max(a, 0.0) * std::max(b, 0.0) + coherence_tol;
  };
  return ok(s13, p11, p33) && ok(s12, p11, p22) && ok(s23, p22, p33);
}

bool BlochState::is_finite() const noexcept {
  for (double v : {s13.real(), s13.imag(), s12.real(), s12.imag(), s23.real(), s23.imag(), p11,
                   p22, p33})
    if (!std::isfinite(v)) return false;
  return true;
}

BlochState BlochState::ground_superposition(complex c1, complex c2) noexcept {
  BlochState s;
  s.p11 = std::norm(c1);
  s.p22 = std::norm(c2);
  s.s12 = c2 * std::conj(c1);
  return s;
}

BlochState BlochState::dark(const LambdaParams& p) {
  const double om = p.rabi();
  if (om <= 0.0) throw InvalidParameters("dark state undefined for Omega = 0");
  return ground_superposition(p.omega2 / om, -p.omega1 / om);
}

BlochState BlochState::bright(const LambdaParams& p) {
  const double om = p.rabi();
  if (om <= 0.0) throw InvalidParameters("bright state undefined for Omega = 0");
  return ground_superposition(p.omega1 / om, p.omega2 / om);
}

DarkBright dark_bright_decompose(const LambdaParams& p, complex c1, complex c2) {
  const double om = p.rabi();
  if (!(om > 0.0)) throw InvalidParameters("dark_bright_decompose: Omega = 0");
  return {(p.omega2 * c1 - p.omega1 * c2) / om, (p.omega1 * c1 + p.omega2 * c2) / om};
}

double dark_population(const BlochState& s, const LambdaParams& p) {
  const double om2 = p.omega1 * p.omega1 + p.omega2 * p.omega2;
  if (!(om2 > 0.0)) throw InvalidParameters("dark_population: Omega = 0");
  return (p.omega2 * p.omega2 * s.p11 + p.omega1 * p.omega1 * s.p22 -
          2.0 * p.omega1 * p.omega2 * s.s12.real()) /
         om2;
}

double bright_population(const BlochState& s, const LambdaParams& p) {
  const double om2 = p.omega1 * p.omega1 + p.omega2 * p.omega2;
  if (!(om2 > 0.0)) throw InvalidParameters("bright_population: Omega = 0");
  return (p.omega1 * p.omega1 * s.p11 + p.omega2 * p.omega2 * s.p22 +
          2.0 * p.omega1 * p.omega2 * s.s12.real()) /
         om2;
}

namespace {

// Per-step survival factor of the bright population.
double bright_retention(double area) {
  const double s = std::sin(0.5 * area);
  return 1.0 - 0.5 * s * s;
}

}  // namespace

double dark_population_after_n(double area, double sigma_d0, long n) {
  if (n < 0) throw InvalidParameters("dark_population_after_n: n must be >= 0");
  if (sigma_d0 < 0.0 || sigma_d0 > 1.0)
    throw InvalidParameters("dark_population_after_n: sigma_d0 outside [0, 1]");
  return 1.0 - std::pow(bright_retention(area), static_cast<double>(n)) * (1.0 - sigma_d0);
}

long steps_to_threshold(double area, double sigma_d0, double threshold) {
  if (!(area >= 0.0) || area > two_pi)
    throw InvalidParameters("steps_to_threshold: area must lie in (0, 2pi)");
  if (!(sigma_d0 < threshold) || !(threshold < 1.0) || sigma_d0 < 0.0)
    throw InvalidParameters("steps_to_threshold: need 0 <= sigma_d0 < threshold < 1");
  const double q = bright_retention(area);
  if (!(q < 1.0))
    throw NeverConverges("steps_to_threshold: pulse area " + std::to_string(area) +
                         " transfers no population");

  const double estimate = std::log((1.0 - threshold) / (1.0 - sigma_d0)) / std::log(q);
  long n = std::max(1L, static_cast<long>(std::ceil(estimate)));
  // The logarithm can land one off near integer boundaries.
  while (n > 1 && dark_population_after_n(area, sigma_d0, n - 1) >= threshold) --n;
  while (dark_population_after_n(area, sigma_d0, n) < threshold) ++n;
  return n;
}

EffectiveLambda effective_lambda(const FourLevelConfig& cfg, double validity_factor) {
  if (cfg.delta1 == 0.0 || cfg.delta2 == 0.0)
    throw InvalidParameters("effective_lambda: one-photon detunings must be nonzero");
  EffectiveLambda out;
  out.omega_p = cfg.omega_raman[0] * cfg.omega_raman[1] / cfg.delta1;
  out.omega_c = cfg.omega_raman[2] * cfg.omega_raman[3] / cfg.delta2;
  const double width = std::max(std::abs(out.omega_p), std::abs(out.omega_c));
  out.valid = std::abs(cfg.delta1 - cfg.delta2) >= validity_factor * width &&
              cfg.delta1 != cfg.delta2;
  return out;
}

}  // namespace cpt
