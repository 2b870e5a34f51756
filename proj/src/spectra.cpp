#include "cpt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cpt/analytic.hpp"
#include "cpt/error.hpp"

namespace cpt::spectra {

void DetuningGrid::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
    throw InvalidParameters("DetuningGrid: need finite min < max");
  if (points < 3) throw InvalidParameters("DetuningGrid: need at least 3 points");
  for (const auto& [lo, hi] : exclusions)
    if (!(lo <= hi)) throw InvalidParameters("DetuningGrid: exclusion interval with lo > hi");
}

bool DetuningGrid::excluded(double delta) const noexcept {
  return std::any_of(exclusions.begin(), exclusions.end(),
                     [delta](const auto& e) { return delta >= e.first && delta <= e.second; });
}

DetuningGrid DetuningGrid::fsr_span(double dt, double half_span_fsr, int points) {
  if (!(dt > 0.0) || !(half_span_fsr > 0.0))
    throw InvalidParameters("DetuningGrid::fsr_span: need dt > 0 and a positive span");
  const double half = half_span_fsr * two_pi / dt;
  return {-half, half, points, {}};
}

std::string to_string(Sampling s) { return s == Sampling::PulseEnd ? "pulse-end" : "pulse-mid"; }
std::string to_string(Engine e) { return e == Engine::Analytic ? "analytic" : "numeric"; }
std::string to_string(Observable o) {
  return o == Observable::Transmission ? "transmission" : "fluorescence";
}

double numeric_transmission_point(const LambdaParams& p, const PulseSequence& seq,
                                  Sampling sampling, const BlochState& initial, int substeps) {
  const bloch::SequenceKernel kernel(p, seq, substeps);
  bloch::Vector v = bloch::to_vector(initial);
  for (int n = 0; n + 1 < seq.n_pulses; ++n) v = kernel.gap().apply(kernel.pulse().apply(v));
  const bloch::Vector last =
      sampling == Sampling::PulseEnd ? kernel.pulse().apply(v) : kernel.half_pulse().apply(v);
  if (!last.allFinite())
    throw NumericError("transmission: non-finite state at delta = " + std::to_string(p.delta));
  return last[1];
}

double analytic_transmission_point(const LambdaParams& p, const PulseSequence& seq,
                                   Sampling sampling, double pole_guard) {
  const double tau = sampling == Sampling::PulseEnd ? seq.t1 : 0.5 * seq.t1;
  return analytic::in_pulse(seq.n_pulses, tau, p, seq, pole_guard).s13.imag();
}

double fluorescence_point(const LambdaParams& p, const PulseSequence& seq,
                          const BlochState& initial, int substeps) {
  const bloch::SequenceKernel kernel(p, seq, substeps);
  bloch::Vector v = bloch::to_vector(initial);
  double signal = 0.0;
  for (int n = 0; n < seq.n_pulses; ++n) {
    v = kernel.pulse().apply(v);
    if (n >= 1) signal += v[8];
    v = kernel.gap().apply(v);
  }
  if (!std::isfinite(signal))
    throw NumericError("fluorescence: non-finite signal at delta = " + std::to_string(p.delta));
  return signal;
}

double ramsey_point(const LambdaParams& p, const bloch::RamseyProtocol& protocol,
                    const BlochState& initial, int substeps) {
  const bloch::Propagator pulse(bloch::generator(p, true, true), protocol.pulse_length, substeps);
  const auto free = bloch::Propagator::drive_off(p, true, protocol.free_time, substeps);
  bloch::Vector v = bloch::to_vector(initial);
  double signal = 0.0;
  for (int n = 0; n < protocol.n_pulses; ++n) {
    const double before = v[9];
    v = pulse.apply(v);
    signal += v[9] - before;  // only light emitted while the pulse is on
    if (n + 1 < protocol.n_pulses) v = free.apply(v);
  }
  if (!std::isfinite(signal))
    throw NumericError("ramsey: non-finite signal at delta = " + std::to_string(p.delta));
  return signal;
}

namespace {

struct Layout {
  std::vector<double> kept;
  std::vector<double> dropped;
};

Layout lay_out(const DetuningGrid& grid, double omega2, bool drop_poles, double pole_guard) {
  grid.validate();
  Layout l;
  for (int i = 0; i < grid.points; ++i) {
    const double d = grid.at(i);
    if (grid.excluded(d) || (drop_poles && analytic::in_pole_band(d, omega2, pole_guard)))
      l.dropped.push_back(d);
    else
      l.kept.push_back(d);
  }
  return l;
}

template <class PointFn>
Spectrum sweep(const LambdaParams& p, const DetuningGrid& grid, bool drop_poles,
               const SweepOptions& opt, PointFn&& point) {
  p.validate();
  Layout l = lay_out(grid, p.omega2, drop_poles, opt.pole_guard);
  Spectrum s;
  s.grid = grid;
  s.params = p;
  s.values = indexed_map<double>(
      l.kept.size(), [&](std::size_t i) { return point(p.with_delta(l.kept[i])); }, opt.exec);
  s.delta = std::move(l.kept);
  s.dropped = std::move(l.dropped);
  return s;
}

}  // namespace

Spectrum transmission_spectrum(const LambdaParams& p, const PulseSequence& seq,
                               const DetuningGrid& grid, Sampling sampling, Engine engine,
                               const SweepOptions& opt) {
  seq.validate();
  Spectrum s;
  if (engine == Engine::Analytic) {
    if (p.omega1 > 0.01 * p.omega2)
      throw InvalidParameters("analytic engine needs omega1/omega2 <= 0.01");
    if (p.gamma0 != 0.0) throw InvalidParameters("analytic engine needs gamma0 = 0");
    s = sweep(p, grid, true, opt, [&](const LambdaParams& q) {
      return analytic_transmission_point(q, seq, sampling, opt.pole_guard);
    });
  } else {
    s = sweep(p, grid, false, opt, [&](const LambdaParams& q) {
      return numeric_transmission_point(q, seq, sampling, opt.initial, opt.substeps);
    });
  }
  s.observable = Observable::Transmission;
  s.sampling = sampling;
  s.engine = engine;
  s.seq = seq;
  return s;
}

Spectrum fluorescence_spectrum(const LambdaParams& p, const PulseSequence& seq,
                               const DetuningGrid& grid, const SweepOptions& opt) {
  seq.validate();
  Spectrum s = sweep(p, grid, false, opt, [&](const LambdaParams& q) {
    return fluorescence_point(q, seq, opt.initial, opt.substeps);
  });
  s.observable = Observable::Fluorescence;
  s.sampling = Sampling::PulseEnd;
  s.engine = Engine::Numeric;
  s.seq = seq;
  return s;
}

Spectrum ramsey_spectrum(const LambdaParams& p, const bloch::RamseyProtocol& protocol,
                         const DetuningGrid& grid, const SweepOptions& opt) {
  if (protocol.n_pulses < 1 || !(protocol.pulse_length > 0.0) || !(protocol.free_time >= 0.0))
    throw InvalidParameters("ramsey_spectrum: invalid protocol");
  Spectrum s = sweep(p, grid, false, opt, [&](const LambdaParams& q) {
    return ramsey_point(q, protocol, opt.initial, opt.substeps);
  });
  s.observable = Observable::Fluorescence;
  s.sampling = Sampling::PulseEnd;
  s.engine = Engine::Numeric;
  s.seq = {protocol.n_pulses, protocol.pulse_length + protocol.free_time, protocol.pulse_length,
           1.0};
  return s;
}

namespace {

// Vertex abscissa and value of the parabola through three points.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                                          double y2) {
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double a = (d1 - d0) / (x2 - x0);
  if (a == 0.0) return {x1, y1};
  const double b = d0 - a * (x0 + x1);
  const double xv = std::clamp(-b / (2.0 * a), x0, x2);
  const double yv = y1 + (xv - x1) * (d0 + a * (xv - x0));
  return {xv, yv};
}

double crossing(double xa, double ya, double xb, double yb, double level) {
  return xa + (level - ya) * (xb - xa) / (yb - ya);
}

}  // namespace

PeakReport peak_analysis(const std::vector<double>& x, const std::vector<double>& y, PeakKind kind,
                         double min_prominence) {
  if (x.size() != y.size()) throw InvalidParameters("peak_analysis: size mismatch");
  PeakReport report;
  const std::size_t n = y.size();
  if (n < 3) return report;

  std::vector<double> v(y);
  if (kind == PeakKind::Minima)
    for (double& e : v) e = -e;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double range = *hi_it - *lo_it;
  const double scale = std::max(std::abs(*hi_it), std::abs(*lo_it));
  if (!(range > 1e-12 * scale) || range == 0.0) return report;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] >= v[i - 1] && v[i] > v[i + 1])) continue;

    // topographic prominence
    double left_min = v[i];
    std::size_t j = i;
    while (j > 0 && v[j - 1] <= v[i]) left_min = std::min(left_min, v[--j]);
    double right_min = v[i];
    std::size_t k = i;
    while (k + 1 < n && v[k + 1] <= v[i]) right_min = std::min(right_min, v[++k]);
    const double base = std::max(left_min, right_min);
    const double prominence = v[i] - base;
    if (prominence < min_prominence * range) continue;

    Peak pk;
    const auto [xv, yv] = parabola_vertex(x[i - 1], v[i - 1], x[i], v[i], x[i + 1], v[i + 1]);
    pk.position = xv;
    pk.height = kind == PeakKind::Minima ? -yv : yv;
    pk.prominence = prominence;

    const double half = v[i] - 0.5 * prominence;
    double xl = std::numeric_limits<double>::quiet_NaN();
    double xr = xl;
    for (std::size_t a = i; a > 0; --a)
      if (v[a - 1] <= half) {
        xl = crossing(x[a - 1], v[a - 1], x[a], v[a], half);
        break;
      }
    for (std::size_t b = i; b + 1 < n; ++b)
      if (v[b + 1] <= half) {
        xr = crossing(x[b], v[b], x[b + 1], v[b + 1], half);
        break;
      }
    pk.fwhm = xr - xl;
    report.peaks.push_back(pk);
  }

  if (report.peaks.size() >= 2) {
    const double span = report.peaks.back().position - report.peaks.front().position;
    report.fsr = span / static_cast<double>(report.peaks.size() - 1);
    double sum = 0.0;
    int count = 0;
    for (const auto& pk : report.peaks)
      if (std::isfinite(pk.fwhm)) {
        sum += pk.fwhm;
        ++count;
      }
    if (count > 0) report.finesse = *report.fsr / (sum / count);
  }
  return report;
}

PeakReport peak_analysis(const Spectrum& s, PeakKind kind, double min_prominence) {
  return peak_analysis(s.delta, s.values, kind, min_prominence);
}

}  // namespace cpt::spectra
