#include "cpt/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpt/bloch.hpp"
#include "cpt/error.hpp"

namespace cpt::metrology {

std::string to_string(NoiseModel m) {
  return m == NoiseModel::ShotNoise ? "shot-noise" : "unit-variance";
}

void AllanConfig::validate() const {
  if (!(nu_at > 0.0)) throw InvalidParameters("allan: nu_at must be positive");
  if (!(t_cycle > 0.0)) throw InvalidParameters("allan: t_cycle must be positive");
  if (tau < 0.0) throw InvalidParameters("allan: tau must be >= 0");
  if (slope_half_width < 1) throw InvalidParameters("allan: slope_half_width must be >= 1");
  if (grid_points < 2 * slope_half_width + 1)
    throw InvalidParameters("allan: grid_points too small for the slope stencil");
  if (!(grid_half_span_fsr > 0.0)) throw InvalidParameters("allan: grid span must be positive");
  if (!(slope_floor >= 0.0 && slope_floor < 1.0))
    throw InvalidParameters("allan: slope_floor must lie in [0, 1)");
}

AllanPoint allan_deviation(const std::vector<double>& delta, const std::vector<double>& signal,
                           const AllanConfig& cfg) {
  cfg.validate();
  if (delta.size() != signal.size()) throw InvalidParameters("allan: size mismatch");
  const int h = cfg.slope_half_width;
  const int n = static_cast<int>(delta.size());
  if (n < 2 * h + 1) throw InvalidParameters("allan: spectrum shorter than the slope stencil");

  // dS/dnu with nu = delta / (2 pi)
  std::vector<double> slope(n, 0.0);
  double max_slope = 0.0;
  for (int i = h; i < n - h; ++i) {
    slope[i] = two_pi * (signal[i + h] - signal[i - h]) / (delta[i + h] - delta[i - h]);
    if (!std::isfinite(slope[i])) throw NumericError("allan: non-finite slope");
    max_slope = std::max(max_slope, std::abs(slope[i]));
  }
  if (!(max_slope > 0.0))
    throw DegenerateSpectrum("allan: spectrum has zero slope everywhere");

  std::vector<double> ratio(n, std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (int i = h; i < n - h; ++i) {
    const double s = std::abs(slope[i]);
    if (s < cfg.slope_floor * max_slope || s == 0.0) continue;
    const double noise =
        cfg.noise == NoiseModel::ShotNoise ? std::sqrt(std::max(signal[i], 0.0)) : 1.0;
    ratio[i] = noise / s;
    best = std::min(best, ratio[i]);
  }
  if (!std::isfinite(best)) throw DegenerateSpectrum("allan: no usable operating point");

  // Near-ties are resolved towards the lowest index, which keeps the choice stable under a
  // global rescaling of the signal.
  int pick = h;
  for (int i = h; i < n - h; ++i)
    if (ratio[i] <= best * (1.0 + 1e-9)) {
      pick = i;
      break;
    }

  const double tau = cfg.tau > 0.0 ? cfg.tau : cfg.t_cycle;
  AllanPoint out;
  out.sigma_a = ratio[pick] / cfg.nu_at * std::sqrt(cfg.t_cycle / tau);
  out.nu_m = delta[pick];
  out.slope = slope[pick];
  out.signal = signal[pick];
  return out;
}

AllanPoint allan_deviation(const spectra::Spectrum& spec, const AllanConfig& cfg) {
  return allan_deviation(spec.delta, spec.values, cfg);
}

std::vector<double> AllanResult::curve(double gamma0) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.gamma0 == gamma0) out.push_back(r.sigma_bar);
  return out;
}

namespace {

void check_sweep_lists(const std::vector<int>& n_values, const std::vector<double>& gamma0s) {
  if (n_values.empty()) throw InvalidParameters("allan sweep: empty N list");
  if (gamma0s.empty()) throw InvalidParameters("allan sweep: empty gamma0 list");
  for (int n : n_values)
    if (n < 2) throw InvalidParameters("allan sweep: N must be >= 2 (got " + std::to_string(n) + ")");
  for (double g : gamma0s)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw InvalidParameters("allan sweep: gamma0 must be finite and >= 0");
}

PulseSequence pulsed_sequence(const PulsedTemplate& tpl, const AllanConfig& cfg, int n) {
  PulseSequence seq{n, cfg.t_cycle / n, tpl.t1, tpl.decay_fraction};
  if (!(seq.dt > seq.t1))
    throw InvalidParameters("pulsed sweep: N = " + std::to_string(n) +
                            " leaves no gap (T_c / N <= t1)");
  seq.validate();
  return seq;
}

bloch::RamseyProtocol ramsey_protocol(double pulse_length, const AllanConfig& cfg, int n) {
  const double period = cfg.t_cycle / n;
  if (!(period > pulse_length))
    throw InvalidParameters("ramsey sweep: N = " + std::to_string(n) +
                            " leaves no free evolution (T_c / N <= pulse length)");
  return {n, pulse_length, period - pulse_length};
}

template <class SigmaFn>
AllanResult assemble(const std::string& protocol, double reference,
                     const std::vector<int>& n_values, const std::vector<double>& gamma0s,
                     Execution exec, SigmaFn&& sigma_at) {
  const std::size_t nn = n_values.size();
  const std::size_t total = nn * gamma0s.size();
  // The (N, gamma0) grid is the parallel axis; each spectrum is swept serially inside.
  auto rows = indexed_map<AllanRow>(
      total,
      [&](std::size_t idx) {
        const double g0 = gamma0s[idx / nn];
        const int n = n_values[idx % nn];
        AllanRow row = sigma_at(n, g0);
        row.n = n;
        row.gamma0 = g0;
        row.sigma_bar = row.sigma_a / reference;
        return row;
      },
      exec);

  AllanResult out;
  out.protocol = protocol;
  out.reference_sigma_a = reference;
  out.rows = std::move(rows);
  for (std::size_t g = 0; g < gamma0s.size(); ++g) {
    NOpt best{gamma0s[g], 0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < nn; ++i) {
      const AllanRow& r = out.rows[g * nn + i];
      if (r.sigma_bar < best.sigma_bar_min) {
        best.sigma_bar_min = r.sigma_bar;
        best.n_opt = r.n;
      }
    }
    out.optima.push_back(best);
  }
  return out;
}

}  // namespace

spectra::Spectrum pulsed_spectrum(const PulsedTemplate& tpl, const AllanConfig& cfg, int n,
                                  double gamma0, Execution exec) {
  cfg.validate();
  LambdaParams p = tpl.params;
  p.gamma0 = gamma0;
  const PulseSequence seq = pulsed_sequence(tpl, cfg, n);
  spectra::SweepOptions opt;
  opt.initial = BlochState::dark(p);
  opt.exec = exec;
  return spectra::fluorescence_spectrum(
      p, seq, spectra::DetuningGrid::fsr_span(seq.dt, cfg.grid_half_span_fsr, cfg.grid_points),
      opt);
}

spectra::Spectrum ramsey_sweep_spectrum(const RamseyTemplate& tpl, double pulse_length,
                                        const AllanConfig& cfg, int n, double gamma0,
                                        Execution exec) {
  cfg.validate();
  LambdaParams p = tpl.params;
  p.gamma0 = gamma0;
  const bloch::RamseyProtocol protocol = ramsey_protocol(pulse_length, cfg, n);
  spectra::SweepOptions opt;
  opt.initial = BlochState::dark(p);
  opt.exec = exec;
  const double period = cfg.t_cycle / n;
  return spectra::ramsey_spectrum(
      p, protocol, spectra::DetuningGrid::fsr_span(period, cfg.grid_half_span_fsr, cfg.grid_points),
      opt);
}

double pulsed_reference(const PulsedTemplate& tpl, const AllanConfig& cfg) {
  return allan_deviation(pulsed_spectrum(tpl, cfg, 2, 0.0), cfg).sigma_a;
}

double ramsey_pulse_length(const RamseyTemplate& tpl) {
  if (tpl.pulse_length > 0.0) return tpl.pulse_length;
  return bloch::ramsey_preparation_length(tpl.params, tpl.prep_target);
}

AllanResult pulsed_cpt_sweep(const PulsedTemplate& tpl, const AllanConfig& cfg,
                             const std::vector<int>& n_values,
                             const std::vector<double>& gamma0_values, Execution exec) {
  cfg.validate();
  check_sweep_lists(n_values, gamma0_values);
  for (int n : n_values) pulsed_sequence(tpl, cfg, n);
  const double reference = pulsed_reference(tpl, cfg);
  return assemble("pulsed-cpt", reference, n_values, gamma0_values, exec,
                  [&](int n, double g0) {
                    const spectra::Spectrum s = pulsed_spectrum(tpl, cfg, n, g0);
                    const AllanPoint pt = allan_deviation(s, cfg);
                    AllanRow row;
                    row.sigma_a = pt.sigma_a;
                    row.nu_m = pt.nu_m;
                    row.slope = pt.slope;
                    row.full_relaxation = s.seq.full_relaxation(s.params);
                    return row;
                  });
}

AllanResult ramsey_cpt_sweep(const RamseyTemplate& tpl, const PulsedTemplate& reference_tpl,
                             const AllanConfig& cfg, const std::vector<int>& n_values,
                             const std::vector<double>& gamma0_values, Execution exec) {
  cfg.validate();
  check_sweep_lists(n_values, gamma0_values);
  const double length = ramsey_pulse_length(tpl);
  for (int n : n_values) ramsey_protocol(length, cfg, n);
  const double reference =
      tpl.own_reference
          ? allan_deviation(ramsey_sweep_spectrum(tpl, length, cfg, 2, 0.0), cfg).sigma_a
          : pulsed_reference(reference_tpl, cfg);
  return assemble("ramsey-cpt", reference, n_values, gamma0_values, exec,
                  [&](int n, double g0) {
                    const AllanPoint pt =
                        allan_deviation(ramsey_sweep_spectrum(tpl, length, cfg, n, g0), cfg);
                    AllanRow row;
                    row.sigma_a = pt.sigma_a;
                    row.nu_m = pt.nu_m;
                    row.slope = pt.slope;
                    row.full_relaxation = true;
                    return row;
                  });
}

std::vector<int> log_spaced_counts(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 1)
    throw InvalidParameters("log_spaced_counts: need 1 <= lo <= hi and count >= 1");
  std::vector<int> out;
  if (count == 1 || lo == hi) return {lo};
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    const int v = static_cast<int>(std::lround(std::exp(a + (b - a) * i / (count - 1))));
    if (out.empty() || v != out.back()) out.push_back(std::clamp(v, lo, hi));
  }
  return out;
}

}  // namespace cpt::metrology
