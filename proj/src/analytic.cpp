#include "cpt/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cpt/error.hpp"

namespace cpt::analytic {

namespace {

constexpr complex I{0.0, 1.0};

complex ipow(complex base, long n) {
  complex result{1.0, 0.0};
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

// sum_{j=1}^{n} d^j c^{n-j}
complex mixed_geometric(complex d, complex c, long n) {
  if (std::abs(d - c) > 1e-8 * std::max(std::abs(d), 1e-300))
    return d * (ipow(d, n) - ipow(c, n)) / (d - c);
  complex sum{0.0, 0.0};
  for (long j = 1; j <= n; ++j) sum += ipow(d, j) * ipow(c, n - j);
  return sum;
}

// sum_{l=0}^{m-1} q^l
complex geometric(complex q, long m) {
  if (std::abs(1.0 - q) > 1e-8) return (1.0 - ipow(q, m)) / (1.0 - q);
  complex sum{0.0, 0.0};
  complex term{1.0, 0.0};
  for (long l = 0; l < m; ++l) {
    sum += term;
    term *= q;
  }
  return sum;
}

void check_weak_probe_inputs(const LambdaParams& p, const PulseSequence& seq) {
  p.validate();
  seq.validate();
  if (p.gamma0 != 0.0)
    throw InvalidParameters("weak-probe closed form requires gamma0 = 0 (got " +
                            std::to_string(p.gamma0) + ")");
}

void check_pole(double delta, double omega2, double guard) {
  if (in_pole_band(delta, omega2, guard))
    throw PoleError(delta, "analytic: delta = " + std::to_string(delta) +
                               " rad/s lies in the pole band around +-omega2/2");
}

}  // namespace

bool in_pole_band(double delta, double omega2, double pole_guard) noexcept {
  const double band = pole_guard * omega2;
  return std::abs(delta - 0.5 * omega2) <= band || std::abs(delta + 0.5 * omega2) <= band;
}

AnalyticCoeffs coeffs(const LambdaParams& p, const PulseSequence& seq, double pole_guard) {
  check_weak_probe_inputs(p, seq);
  check_pole(p.delta, p.omega2, pole_guard);
  const double w = p.omega2;
  const double dl = p.delta;
  const double dt = seq.dt;
  const double t1 = seq.t1;

  AnalyticCoeffs out;
  out.alpha = 0.25 * p.omega1 * w / (dl * dl - 0.25 * w * w);
  out.c = std::exp(-I * (0.5 * w * dt)) * std::cos(0.5 * w * t1);
  out.d = std::exp(-I * ((0.5 * w + dl) * dt));
  out.k = 0.5 * out.alpha *
          (std::exp(I * (dl * (dt - t1))) - 1.0 +
           2.0 * dl / w * (1.0 - std::exp(-I * (0.5 * w * t1)) * std::exp(I * (dl * dt))));
  out.a1 = out.alpha * (dl - 0.5 * w) / w;
  out.b1 = -out.a1 - out.alpha;
  return out;
}

std::pair<complex, complex> amplitudes(const AnalyticCoeffs& c, const LambdaParams& p,
                                       const PulseSequence& seq, long n) {
  if (n < 1) throw InvalidParameters("amplitudes: pulse index must be >= 1");
  if (n == 1) return {c.a1, c.b1};
  const long m = n - 1;
  const complex a = ipow(c.c, m) * c.a1 + c.k * mixed_geometric(c.d, c.c, m);
  const double w = p.omega2;
  const double t = static_cast<double>(m) * seq.dt;
  const complex b = a * std::exp(I * (w * t)) -
                    2.0 * c.alpha * (p.delta / w) * std::exp(I * ((0.5 * w - p.delta) * t));
  return {a, b};
}

complex f_delta(const LambdaParams& p, const PulseSequence& seq, double pole_guard) {
  check_weak_probe_inputs(p, seq);
  check_pole(p.delta, p.omega2, pole_guard);
  const double w2 = 0.5 * p.omega2;
  const double dl = p.delta;
  const double half_area = w2 * seq.t1;
  const complex bracket = w2 * (std::cos(dl * seq.t1) - std::cos(half_area)) +
                          I * (dl * std::sin(half_area) - w2 * std::sin(dl * seq.t1));
  return 0.5 * p.omega1 * std::exp(I * (dl * seq.dt)) / (dl * dl - w2 * w2) * bracket;
}

complex sigma12_at_pulse_start(long n, const LambdaParams& p, const PulseSequence& seq,
                               double pole_guard) {
  if (n < 2) throw InvalidParameters("sigma12_at_pulse_start: n must be >= 2");
  const complex f = f_delta(p, seq, pole_guard);
  const complex q = std::exp(I * (p.delta * seq.dt)) * std::cos(0.5 * p.omega2 * seq.t1);
  return f * geometric(q, n - 1);
}

Coherences in_pulse(long n, double tau, const LambdaParams& p, const PulseSequence& seq,
                    double pole_guard) {
  const AnalyticCoeffs c = coeffs(p, seq, pole_guard);
  if (tau < 0.0 || tau > seq.t1) throw DomainError("in_pulse: tau outside [0, t1]");
  const auto [a, b] = amplitudes(c, p, seq, n);
  const double t = static_cast<double>(n - 1) * seq.dt + tau;
  const double w2 = 0.5 * p.omega2;
  const complex phase = std::exp(I * (p.delta * t));
  const complex up = a * std::exp(I * (w2 * t));
  const complex down = b * std::exp(-I * (w2 * t));
  return {phase * (up + down) + c.alpha,
          phase * (up - down) - 2.0 * (p.delta / p.omega2) * c.alpha};
}

Coherences piecewise_solution(double t, const LambdaParams& p, const PulseSequence& seq,
                              double pole_guard) {
  if (t < 0.0 || t > seq.total_time() * (1.0 + 1e-15))
    throw DomainError("piecewise_solution: t outside [0, N dt]");
  long n = static_cast<long>(std::floor(t / seq.dt)) + 1;
  double tau = t - static_cast<double>(n - 1) * seq.dt;
  if (tau < 0.0) {  // floor rounding at an exact boundary
    --n;
    tau += seq.dt;
  }
  if (tau <= seq.t1) return in_pulse(n, tau, p, seq, pole_guard);

  const Coherences end = in_pulse(n, seq.t1, p, seq, pole_guard);
  const double since = tau - seq.t1;
  const double damped = std::min(since, seq.gap() * seq.decay_fraction);
  return {std::exp(I * (p.delta * since)) * end.s12,
          std::exp(I * (p.delta * since) - p.gamma * damped) * end.s13};
}

Coherences to_bloch_convention(const Coherences& c) noexcept {
  return {std::conj(c.s12), -std::conj(c.s13)};
}

double finesse(double area, double gamma0, double dt) {
  if (gamma0 < 0.0 || dt <= 0.0) throw InvalidParameters("finesse: need gamma0 >= 0, dt > 0");
  const double r = std::exp(-gamma0 * dt) * std::cos(0.5 * area);
  if (!(r > 0.5))
    throw DomainError("finesse: e^{-gamma0 dt} cos(A/2) = " + std::to_string(r) +
                      " <= 1/2, formula not applicable");
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return pi * std::sqrt(r) / (1.0 - r);
}

}  // namespace cpt::analytic
