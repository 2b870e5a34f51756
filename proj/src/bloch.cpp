#include "cpt/bloch.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

#include "cpt/error.hpp"

namespace cpt::bloch {

namespace {

enum Index { R13 = 0, I13, R12, I12, R23, I23, P11, P22, P33, PHOT };

void require_finite(const Vector& v, const char* where) {
  if (!v.allFinite()) throw NumericError(std::string(where) + ": non-finite state");
}

}  // namespace

Vector to_vector(const BlochState& s, double photons) noexcept {
  Vector v;
  v << s.s13.real(), s.s13.imag(), s.s12.real(), s.s12.imag(), s.s23.real(), s.s23.imag(), s.p11,
      s.p22, s.p33, photons;
  return v;
}

BlochState from_vector(const Vector& v) noexcept {
  return {complex(v[R13], v[I13]), complex(v[R12], v[I12]), complex(v[R23], v[I23]),
          v[P11], v[P22], v[P33]};
}

Matrix generator(const LambdaParams& p, bool drive_on, bool gamma_on) {
  const double a = drive_on ? p.omega1 : 0.0;
  const double b = drive_on ? p.omega2 : 0.0;
  const double g = gamma_on ? p.gamma : 0.0;
  const double g0 = p.gamma0;
  const double d = p.delta;

  Matrix m = Matrix::Zero();
  // s13' = -(g/2 + i d) s13 + i a/2 (p11 - p33) + i b/2 s12
  m(R13, R13) = -0.5 * g;
  m(R13, I13) = d;
  m(R13, I12) = -0.5 * b;
  m(I13, I13) = -0.5 * g;
  m(I13, R13) = -d;
  m(I13, P11) = 0.5 * a;
  m(I13, P33) = -0.5 * a;
  m(I13, R12) = 0.5 * b;
  // s12' = -(g0 + i d) s12 + i b/2 s13 - i a/2 conj(s23)
  m(R12, R12) = -g0;
  m(R12, I12) = d;
  m(R12, I13) = -0.5 * b;
  m(R12, I23) = -0.5 * a;
  m(I12, I12) = -g0;
  m(I12, R12) = -d;
  m(I12, R13) = 0.5 * b;
  m(I12, R23) = -0.5 * a;
  // s23' = -(g/2) s23 + i b/2 (p22 - p33) + i a/2 conj(s12)
  m(R23, R23) = -0.5 * g;
  m(R23, I12) = 0.5 * a;
  m(I23, I23) = -0.5 * g;
  m(I23, P22) = 0.5 * b;
  m(I23, P33) = -0.5 * b;
  m(I23, R12) = 0.5 * a;
  // populations
  m(P11, P33) = g;
  m(P11, I13) = -a;
  m(P22, P33) = g;
  m(P22, I23) = -b;
  m(P33, P33) = -2.0 * g;
  m(P33, I13) = a;
  m(P33, I23) = b;
  // emitted photons
  m(PHOT, P33) = 2.0 * g;
  return m;
}

BlochState rhs(const BlochState& s, const LambdaParams& p, bool gamma_on) {
  return rhs(s, p, true, gamma_on);
}

BlochState rhs(const BlochState& s, const LambdaParams& p, bool drive_on, bool gamma_on) {
  return from_vector(generator(p, drive_on, gamma_on) * to_vector(s));
}

Propagator::Propagator(const Matrix& gen, double duration, int substeps) {
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw InvalidParameters("Propagator: duration must be finite and >= 0");
  if (substeps < 1) throw InvalidParameters("Propagator: substeps must be >= 1");
  if (duration == 0.0) {
    m_ = Matrix::Identity();
    return;
  }
  const Matrix step = (gen * (duration / substeps)).exp();
  m_ = step;
  for (int i = 1; i < substeps; ++i) m_ = step * m_;
  if (!m_.allFinite()) throw NumericError("Propagator: matrix exponential overflowed");
}

Propagator Propagator::drive_off(const LambdaParams& p, bool gamma_on, double duration,
                                 int substeps) {
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw InvalidParameters("Propagator: duration must be finite and >= 0");
  if (substeps < 1) throw InvalidParameters("Propagator: substeps must be >= 1");
  const double h = duration / substeps;
  const double g = gamma_on ? p.gamma : 0.0;
  const double e2 = std::exp(-2.0 * g * h);
  const double eh = std::exp(-0.5 * g * h);
  const double e0 = std::exp(-p.gamma0 * h);
  const double c = std::cos(p.delta * h);
  const double s = std::sin(p.delta * h);

  Matrix step = Matrix::Zero();
  // s13 and s12 decay while rotating at the detuning; s23 only decays
  step(R13, R13) = eh * c;
  step(R13, I13) = eh * s;
  step(I13, R13) = -eh * s;
  step(I13, I13) = eh * c;
  step(R12, R12) = e0 * c;
  step(R12, I12) = e0 * s;
  step(I12, R12) = -e0 * s;
  step(I12, I12) = e0 * c;
  step(R23, R23) = eh;
  step(I23, I23) = eh;
  // the excited population empties into both ground states and the photon counter
  step(P11, P11) = 1.0;
  step(P22, P22) = 1.0;
  step(P11, P33) = 0.5 * (1.0 - e2);
  step(P22, P33) = 0.5 * (1.0 - e2);
  step(P33, P33) = e2;
  step(PHOT, P33) = 1.0 - e2;
  step(PHOT, PHOT) = 1.0;

  Matrix m = step;
  for (int i = 1; i < substeps; ++i) m = step * m;
  if (!m.allFinite()) throw NumericError("Propagator: non-finite drive-off propagator");
  return from_matrix(m);
}

Propagator Propagator::segment(const LambdaParams& p, bool drive_on, bool gamma_on,
                               double duration, int substeps) {
  if (!drive_on) return drive_off(p, gamma_on, duration, substeps);
  return Propagator(generator(p, true, gamma_on), duration, substeps);
}

BlochState propagate_segment(const BlochState& s, const LambdaParams& p, bool drive_on,
                             bool gamma_on, double duration, int substeps) {
  const Vector v = to_vector(s);
  require_finite(v, "propagate_segment");
  const Vector out = Propagator::segment(p, drive_on, gamma_on, duration, substeps).apply(v);
  require_finite(out, "propagate_segment");
  return from_vector(out);
}

double step_halving_gap(const BlochState& s, const LambdaParams& p, bool drive_on, bool gamma_on,
                        double duration, int substeps) {
  const Vector v = to_vector(s);
  const Vector coarse = Propagator::segment(p, drive_on, gamma_on, duration, substeps).apply(v);
  const Vector fine = Propagator::segment(p, drive_on, gamma_on, duration, 2 * substeps).apply(v);
  return (coarse - fine).head<9>().cwiseAbs().maxCoeff();
}

double SegmentPlan::total_duration() const noexcept {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

SegmentPlan build_plan(const PulseSequence& seq) {
  seq.validate();
  SegmentPlan plan;
  const double window = seq.gap() * seq.decay_fraction;
  const double rest = seq.gap() - window;
  for (int n = 0; n < seq.n_pulses; ++n) {
    plan.segments.push_back({seq.t1, true, false, SegmentRole::Pulse, n});
    plan.segments.push_back({window, false, true, SegmentRole::Decay, n});
    if (rest > 0.0) plan.segments.push_back({rest, false, false, SegmentRole::Free, n});
  }
  return plan;
}

std::vector<Sample> Trajectory::select(SampleTag tag) const {
  std::vector<Sample> out;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
               [tag](const Sample& s) { return s.tag == tag; });
  return out;
}

namespace {

Matrix gap_propagator(const LambdaParams& p, const PulseSequence& seq, int substeps) {
  const double window = seq.gap() * seq.decay_fraction;
  const double rest = seq.gap() - window;
  Matrix m = Propagator::drive_off(p, true, window, substeps).matrix();
  if (rest > 0.0) m = Propagator::drive_off(p, false, rest, substeps).matrix() * m;
  return m;
}

}  // namespace

SequenceKernel::SequenceKernel(const LambdaParams& p, const PulseSequence& seq, int substeps)
    : pulse_(generator(p, true, false), seq.t1, substeps),
      half_(generator(p, true, false), 0.5 * seq.t1, substeps) {
  gap_ = Propagator::from_matrix(gap_propagator(p, seq, substeps));
}

namespace {

// Appends `count` interior samples of a constant-coefficient segment.
void dense_samples(Trajectory& traj, const LambdaParams& p, bool drive_on, const Vector& start,
                   double t0, double duration, int pulse, int count, int substeps) {
  if (count <= 0) return;
  const double h = duration / (count + 1);
  const Propagator step = Propagator::segment(p, drive_on, !drive_on, h, substeps);
  Vector v = start;
  for (int k = 1; k <= count; ++k) {
    v = step.apply(v);
    traj.samples.push_back({t0 + k * h, SampleTag::Dense, pulse, from_vector(v), v[PHOT]});
  }
}

}  // namespace

Trajectory run_sequence(const BlochState& initial, const LambdaParams& p, const PulseSequence& seq,
                        const RunOptions& opt) {
  p.validate();
  seq.validate();
  Trajectory traj;
  traj.params = p;
  traj.n_pulses = seq.n_pulses;
  traj.dt = seq.dt;
  traj.t1 = seq.t1;

  const SequenceKernel kernel(p, seq, opt.substeps);

  Vector v = to_vector(initial);
  require_finite(v, "run_sequence");
  for (int n = 0; n < seq.n_pulses; ++n) {
    const double t0 = n * seq.dt;
    traj.samples.push_back({t0, SampleTag::PulseStart, n, from_vector(v), v[PHOT]});

    const Vector mid = kernel.half_pulse().apply(v);
    if (opt.dense_per_segment > 0) {
      // dense samples are for plotting only; the tagged samples below stay on the kernel path
      dense_samples(traj, p, true, v, t0, 0.5 * seq.t1, n, opt.dense_per_segment / 2,
                    opt.substeps);
    }
    traj.samples.push_back({t0 + 0.5 * seq.t1, SampleTag::PulseMid, n, from_vector(mid), mid[PHOT]});
    if (opt.dense_per_segment > 0) {
      dense_samples(traj, p, true, mid, t0 + 0.5 * seq.t1, 0.5 * seq.t1, n,
                    opt.dense_per_segment - opt.dense_per_segment / 2, opt.substeps);
    }

    v = kernel.pulse().apply(v);
    require_finite(v, "run_sequence");
    traj.samples.push_back({t0 + seq.t1, SampleTag::PulseEnd, n, from_vector(v), v[PHOT]});
    traj.pulse_signal.push_back(v[P33]);

    if (opt.dense_per_segment > 0 && seq.decay_fraction == 1.0)
      dense_samples(traj, p, false, v, t0 + seq.t1, seq.gap(), n, opt.dense_per_segment,
                    opt.substeps);
    v = kernel.gap().apply(v);
    require_finite(v, "run_sequence");
  }
  traj.samples.push_back(
      {seq.n_pulses * seq.dt, SampleTag::SequenceEnd, seq.n_pulses, from_vector(v), v[PHOT]});
  return traj;
}

Trajectory run_ramsey_cpt(const BlochState& initial, const LambdaParams& p,
                          const RamseyProtocol& protocol, const RunOptions& opt) {
  p.validate();
  if (protocol.n_pulses < 1) throw InvalidParameters("run_ramsey_cpt: n_pulses must be >= 1");
  if (!(protocol.pulse_length > 0.0))
    throw InvalidParameters("run_ramsey_cpt: pulse_length must be > 0");
  if (!(protocol.free_time >= 0.0))
    throw InvalidParameters("run_ramsey_cpt: free_time must be >= 0");

  Trajectory traj;
  traj.params = p;
  traj.n_pulses = protocol.n_pulses;
  traj.dt = protocol.pulse_length + protocol.free_time;
  traj.t1 = protocol.pulse_length;

  const Propagator pulse(generator(p, true, true), protocol.pulse_length, opt.substeps);
  const Propagator half(generator(p, true, true), 0.5 * protocol.pulse_length, opt.substeps);
  const Propagator free = Propagator::drive_off(p, true, protocol.free_time, opt.substeps);

  Vector v = to_vector(initial);
  require_finite(v, "run_ramsey_cpt");
  for (int n = 0; n < protocol.n_pulses; ++n) {
    const double t0 = n * traj.dt;
    traj.samples.push_back({t0, SampleTag::PulseStart, n, from_vector(v), v[PHOT]});
    const Vector mid = half.apply(v);
    traj.samples.push_back(
        {t0 + 0.5 * protocol.pulse_length, SampleTag::PulseMid, n, from_vector(mid), mid[PHOT]});
    const double before = v[PHOT];
    v = pulse.apply(v);
    require_finite(v, "run_ramsey_cpt");
    traj.samples.push_back(
        {t0 + protocol.pulse_length, SampleTag::PulseEnd, n, from_vector(v), v[PHOT]});
    traj.pulse_signal.push_back(v[PHOT] - before);
    if (protocol.free_time > 0.0) v = free.apply(v);
  }
  if (protocol.free_time > 0.0)
    traj.samples.push_back(
        {protocol.n_pulses * traj.dt, SampleTag::SequenceEnd, protocol.n_pulses, from_vector(v),
         v[PHOT]});
  return traj;
}

double ramsey_preparation_length(const LambdaParams& p, double target) {
  p.validate();
  if (!(target > 0.0) || !(target < 1.0))
    throw InvalidParameters("ramsey_preparation_length: target must lie in (0, 1)");
  if (!(p.gamma > 0.0))
    throw NeverConverges("ramsey_preparation_length: no decay, the dark state cannot be pumped");

  LambdaParams q = p;
  q.delta = 0.0;
  q.gamma0 = 0.0;
  const Matrix gen = generator(q, true, true);
  const Vector bright = to_vector(BlochState::bright(q));
  auto dark_after = [&](double t) {
    return dark_population(from_vector(Propagator(gen, t).apply(bright)), q);
  };

  // Coarse forward scan finds the first crossing, bisection refines it.
  const double step = 0.125 * pi / q.rabi();
  double lo = 0.0;
  double hi = step;
  constexpr int kMaxSteps = 200000;
  int k = 0;
  while (dark_after(hi) < target) {
    lo = hi;
    hi += step;
    if (++k > kMaxSteps)
      throw NeverConverges("ramsey_preparation_length: target dark population not reached");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dark_after(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace cpt::bloch
