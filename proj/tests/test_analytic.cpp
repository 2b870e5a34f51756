#include <doctest.h>

#include <cmath>

#include "cpt/analytic.hpp"
#include "cpt/bloch.hpp"
#include "cpt/error.hpp"
#include "cpt/spectra.hpp"
#include "oracles.hpp"

using namespace cpt;

namespace {

// Fig. 3b: omega1 = 2 pi 31.8 kHz, omega2 = 2 pi 6.37 MHz, dt = 1 us, area 2 pi / 5
LambdaParams fig3b_params(double delta = 0.0) {
  LambdaParams p{two_pi * 31.8e3, two_pi * 6.37e6, delta, 0.0, 0.0};
  const double t1 = 0.4 * pi / p.rabi();
  p.gamma = 200.0 / (1e-6 - t1);
  return p;
}

PulseSequence fig3b_seq(const LambdaParams& p, int n) {
  return PulseSequence::from_area(p, n, 1e-6, 0.4 * pi);
}

double rel(complex a, complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("coeffs at delta = 0") {
  const LambdaParams p = fig3b_params();
  const PulseSequence seq = fig3b_seq(p, 5);
  const analytic::AnalyticCoeffs c = analytic::coeffs(p, seq);
  // The particular solution of the reduced system is -omega1/omega2 (see ledger: the printed
  // prefactor 1/2 in alpha is twice this value).
  const oracle::Reduced fp = oracle::reduced_fixed_point(p);
  CHECK(c.alpha.imag() == 0.0);
  CHECK(c.alpha.real() == doctest::Approx(fp.s12.real()).epsilon(1e-13));
  CHECK(c.alpha.real() == doctest::Approx(-p.omega1 / p.omega2).epsilon(1e-13));
  CHECK(std::abs(c.a1 + 0.5 * c.alpha) <= 1e-15 * std::abs(c.alpha));
  CHECK(std::abs(c.b1 + 0.5 * c.alpha) <= 1e-15 * std::abs(c.alpha));
  CHECK(std::abs(c.a1 + c.b1 + c.alpha) <= 1e-15 * std::abs(c.alpha));
  CHECK(std::abs(c.c) == doctest::Approx(std::cos(0.5 * p.omega2 * seq.t1)).epsilon(1e-14));
  CHECK(std::abs(c.d) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("alpha is the particular solution at any detuning [DERIVED: linear-solve oracle]") {
  for (double x : {-3.1, -0.7, 0.2, 0.45, 1.9}) {
    const LambdaParams p = fig3b_params(x * two_pi * 6.37e6);
    const auto c = analytic::coeffs(p, fig3b_seq(p, 2));
    const oracle::Reduced fp = oracle::reduced_fixed_point(p);
    CHECK(rel(c.alpha, fp.s12) <= 1e-12);
    CHECK(rel(-2.0 * p.delta / p.omega2 * c.alpha, fp.s13) <= 1e-12);
  }
}

TEST_CASE("coeffs errors") {
  LambdaParams p = fig3b_params();
  const PulseSequence seq = fig3b_seq(p, 3);
  p.delta = 0.5 * p.omega2;
  try {
    analytic::coeffs(p, seq);
    FAIL("expected a pole error");
  } catch (const PoleError& e) {
    CHECK(e.delta() == p.delta);
  }
  p.delta = -0.5 * p.omega2 * (1 + 1e-7);
  CHECK_THROWS_AS(analytic::coeffs(p, seq), PoleError);
  p.delta = -0.5 * p.omega2 * (1 + 1e-7);
  CHECK_NOTHROW(analytic::coeffs(p, seq, 1e-8));
  p.delta = 0.0;
  p.gamma0 = 1.0;
  CHECK_THROWS_AS(analytic::coeffs(p, seq), InvalidParameters);
}

TEST_CASE("c = 0 terminates the recursion after one step") {
  LambdaParams p = fig3b_params(two_pi * 0.13e6);
  PulseSequence seq{6, 1e-6, pi / p.omega2, 1.0};  // omega2 t1 / 2 = pi / 2
  const auto c = analytic::coeffs(p, seq);
  CHECK(std::abs(c.c) <= 1e-15);
  for (long n = 2; n <= 6; ++n) {
    const auto [a, b] = analytic::amplitudes(c, p, seq, n);
    CHECK(rel(a, c.k * std::pow(c.d, static_cast<double>(n - 1))) <= 1e-12);
    (void)b;
  }
}

TEST_CASE("amplitudes follow u_{n+1} = c u_n + k d^n [DERIVED: direct recursion oracle]") {
  for (double x : {-1.3, -0.4, 0.0, 0.17, 0.9, 2.4}) {
    const LambdaParams p = fig3b_params(x * two_pi * 1e6);
    const PulseSequence seq = fig3b_seq(p, 200);
    const auto c = analytic::coeffs(p, seq);
    complex u = c.a1;
    complex dn = 1.0;
    for (long n = 1; n <= 200; ++n) {
      const auto [a, b] = analytic::amplitudes(c, p, seq, n);
      CHECK(rel(a, u) <= 1e-9);
      dn *= c.d;
      u = c.c * u + c.k * dn;
      (void)b;
    }
  }
}

TEST_CASE("amplitudes match continuity + full relaxation [DERIVED: per-pulse matching oracle]") {
  for (double x : {-0.9, -0.25, 0.0, 0.31, 1.7}) {
    const LambdaParams p = fig3b_params(x * two_pi * 1e6);
    const PulseSequence seq = fig3b_seq(p, 60);
    const auto c = analytic::coeffs(p, seq);
    const auto ref = oracle::matched_amplitudes(p, seq.dt, seq.t1, 60);
    for (long n = 1; n <= 60; ++n) {
      const auto [a, b] = analytic::amplitudes(c, p, seq, n);
      const double scale = std::abs(ref[n - 1].first) + std::abs(ref[n - 1].second);
      CHECK(std::abs(a - ref[n - 1].first) <= 1e-9 * scale);
      CHECK(std::abs(b - ref[n - 1].second) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("piecewise solution integrates the reduced system [DERIVED: RK4 oracle]") {
  const LambdaParams p = fig3b_params(two_pi * 0.37e6);
  PulseSequence seq = fig3b_seq(p, 4);
  oracle::Reduced s{0.0, 0.0};
  for (int n = 0; n < seq.n_pulses; ++n) {
    s = oracle::reduced_rk4(s, p, true, false, seq.t1, 4000);
    const auto pw = analytic::piecewise_solution(n * seq.dt + seq.t1, p, seq);
    CHECK(std::abs(pw.s12 - s.s12) <= 1e-9 * std::abs(p.omega1 / p.omega2));
    CHECK(std::abs(pw.s13 - s.s13) <= 1e-9 * std::abs(p.omega1 / p.omega2));
    s = oracle::reduced_rk4(s, p, false, true, seq.gap(), 40000);
    s.s13 = 0.0;  // full relaxation hypothesis
  }
}

TEST_CASE("piecewise_solution properties") {
  const LambdaParams p = fig3b_params(two_pi * 0.21e6);
  const PulseSequence seq = fig3b_seq(p, 30);
  const auto zero = analytic::piecewise_solution(0.0, p, seq);
  CHECK(std::abs(zero.s12) <= 1e-18);
  CHECK(std::abs(zero.s13) <= 1e-18);
  const double scale = p.omega1 / p.omega2;
  for (int n = 1; n < seq.n_pulses; ++n) {
    const double tb = n * seq.dt;
    // continuity of s12 at both ends of a pulse
    const auto end_in = analytic::in_pulse(n, seq.t1, p, seq);
    const auto end_out = analytic::piecewise_solution((n - 1) * seq.dt + seq.t1 * (1 + 1e-15), p, seq);
    CHECK(std::abs(end_in.s12 - end_out.s12) <= 1e-12 * scale);
    const auto before = analytic::piecewise_solution(tb, p, seq);
    const auto after = analytic::in_pulse(n + 1, 0.0, p, seq);
    CHECK(std::abs(before.s12 - after.s12) <= 1e-12 * scale);
    // full relaxation: s13 vanishes at pulse starts
    CHECK(std::abs(before.s13) <= 1e-12 * scale);
    CHECK(std::abs(after.s13) <= 1e-12 * scale);
  }
  CHECK_THROWS_AS(analytic::piecewise_solution(-1e-9, p, seq), DomainError);
  CHECK_THROWS_AS(analytic::piecewise_solution(seq.total_time() * 1.01, p, seq), DomainError);
}

TEST_CASE("sigma12_at_pulse_start examples") {
  const LambdaParams p = fig3b_params(two_pi * 0.05e6);
  const PulseSequence seq = fig3b_seq(p, 10);
  CHECK(analytic::sigma12_at_pulse_start(2, p, seq) == analytic::f_delta(p, seq));
  CHECK_THROWS_AS(analytic::sigma12_at_pulse_start(1, p, seq), InvalidParameters);

  // geometric limit at the constructive point delta dt = 2 pi
  const LambdaParams q = fig3b_params(two_pi / seq.dt);
  const complex f = analytic::f_delta(q, seq);
  const double r = std::cos(0.5 * q.omega2 * seq.t1);
  const complex limit = f / (1.0 - r);
  double prev = 0.0;
  for (long n : {2L, 5L, 20L, 80L, 400L}) {
    const complex s = analytic::sigma12_at_pulse_start(n, q, seq);
    CHECK(std::abs(s) > prev);
    prev = std::abs(s);
  }
  CHECK(rel(analytic::sigma12_at_pulse_start(400, q, seq), limit) <= 1e-12);
}

TEST_CASE("geometric sum equals the recursion at pulse starts for n <= 200") {
  const LambdaParams base = fig3b_params();
  const PulseSequence seq = fig3b_seq(base, 200);
  const double half = 3.0 * pi / seq.dt;
  double worst = 0.0;
  for (int i = 0; i < 1001; i += 7) {
    const double d = -half + 2.0 * half * i / 1000.0;
    if (analytic::in_pole_band(d, base.omega2)) continue;
    const LambdaParams p = base.with_delta(d);
    for (long n = 2; n <= 200; ++n) {
      const complex a = analytic::sigma12_at_pulse_start(n, p, seq);
      const complex b = analytic::in_pulse(n, 0.0, p, seq).s12;
      worst = std::max(worst, std::abs(std::abs(a) - std::abs(b)) / std::abs(b));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("Fig. 3b, delta = 0: |s12^n| matches the full Bloch numerics to 1 %") {
  const LambdaParams p = fig3b_params();
  const PulseSequence seq = fig3b_seq(p, 40);
  const bloch::Trajectory t = bloch::run_sequence(BlochState::ground1(), p, seq);
  const auto starts = t.select(bloch::SampleTag::PulseStart);
  for (long n = 2; n <= 40; ++n) {
    const double numeric = std::abs(starts[n - 1].state.s12);
    const double analytic = std::abs(analytic::sigma12_at_pulse_start(n, p, seq));
    CHECK(std::abs(numeric - analytic) <= 0.01 * analytic);
  }
}

TEST_CASE("conversion to the Bloch-equation sign convention") {
  const LambdaParams p = fig3b_params(two_pi * 0.4e6);
  const PulseSequence seq = fig3b_seq(p, 6);
  const bloch::Trajectory t = bloch::run_sequence(BlochState::ground1(), p, seq);
  const auto ends = t.select(bloch::SampleTag::PulseEnd);
  for (long n = 1; n <= 6; ++n) {
    const auto c = analytic::to_bloch_convention(analytic::in_pulse(n, seq.t1, p, seq));
    const auto& s = ends[n - 1].state;
    const double scale = p.omega1 / p.omega2;
    CHECK(std::abs(c.s12 - s.s12) <= 2e-3 * scale);
    CHECK(std::abs(c.s13 - s.s13) <= 2e-3 * scale);
  }
}

TEST_CASE("finesse examples") {
  // [DERIVED: direct evaluation] pi sqrt(cos(pi/5)) / (1 - cos(pi/5)) = 14.7956...
  const double r = std::cos(pi / 5);
  CHECK(analytic::finesse(2 * pi / 5, 0.0, 1e-6) == doctest::Approx(pi * std::sqrt(r) / (1 - r)));
  CHECK(analytic::finesse(2 * pi / 5, 0.0, 1e-6) == doctest::Approx(14.7956).epsilon(1e-4));
  CHECK_THROWS_AS(analytic::finesse(0.1, 1e9, 1e-6), DomainError);
  CHECK_THROWS_AS(analytic::finesse(2.2, 0.0, 1e-6), DomainError);
  CHECK(std::isinf(analytic::finesse(0.0, 0.0, 1e-6)));
  CHECK(analytic::finesse(1e-3, 0.0, 1e-6) > 1e6);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 66; ++k) {
    const double f = analytic::finesse(0.01 * pi * k, 0.0, 1e-6);
    CHECK(f < prev);
    prev = f;
  }
  prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10; ++k) {
    const double f = analytic::finesse(0.4 * pi, two_pi * 5e3 * k, 1e-6);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("mid-pulse at area 2 pi: |Im s13| is locally maximal at delta dt = pi [PAPER: Fig. 4]") {
  LambdaParams p{two_pi * 0.03e6, two_pi * 6.37e6, 0.0, 0.0, 0.0};
  const PulseSequence seq = PulseSequence::from_area(p, 15, 1e-6, two_pi);
  const double step = 6.0 * pi / seq.dt / 1000.0;
  const auto value = [&](double d) {
    return std::abs(analytic::in_pulse(15, 0.5 * seq.t1, p.with_delta(d), seq).s13.imag());
  };
  const double peak = pi / seq.dt;
  CHECK(value(peak) > value(peak - step));
  CHECK(value(peak) > value(peak + step));
  CHECK(value(-peak) > value(-peak - step));
  CHECK(value(-peak) > value(-peak + step));
}
