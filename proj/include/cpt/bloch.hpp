#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cpt/core_model.hpp"

namespace cpt::bloch {

/// Real layout used by the propagators:
/// [Re s13, Im s13, Re s12, Im s12, Re s23, Im s23, p11, p22, p33, photons].
/// The last slot integrates 2*gamma*p33, the number of photons emitted so far.
inline constexpr int kDim = 10;
using Vector = Eigen::Matrix<double, kDim, 1>;
using Matrix = Eigen::Matrix<double, kDim, kDim>;

Vector to_vector(const BlochState& s, double photons = 0.0) noexcept;
BlochState from_vector(const Vector& v) noexcept;

/// Piecewise-constant generator of the full Bloch system.
/// `drive_on` gates both fields, `gamma_on` gates the controlled decay.
Matrix generator(const LambdaParams& p, bool drive_on, bool gamma_on);

/// Time derivative of the six Bloch variables with the drive on.
BlochState rhs(const BlochState& s, const LambdaParams& p, bool gamma_on);
BlochState rhs(const BlochState& s, const LambdaParams& p, bool drive_on, bool gamma_on);

/// exp(G * duration), evaluated as `substeps` repeated products of exp(G * duration / substeps).
class Propagator {
public:
  Propagator() : m_(Matrix::Identity()) {}
  Propagator(const Matrix& gen, double duration, int substeps = 1);

  /// Wraps an already evaluated transfer matrix (e.g. a product of segments).
  static Propagator from_matrix(const Matrix& m) {
    Propagator out;
    out.m_ = m;
    return out;
  }

  /// Drive-off segment (decay gated by `gamma_on`) from its closed-form solution. Strong decay
  /// makes the generator stiff; the closed form keeps the trace exact where the matrix
  /// exponential would lose it to scaling and squaring.
  static Propagator drive_off(const LambdaParams& p, bool gamma_on, double duration,
                              int substeps = 1);
  /// Closed form when the drive is off, matrix exponential of the generator otherwise.
  static Propagator segment(const LambdaParams& p, bool drive_on, bool gamma_on, double duration,
                            int substeps = 1);

  Vector apply(const Vector& v) const { return m_ * v; }
  const Matrix& matrix() const noexcept { return m_; }

private:
  Matrix m_;
};

/// Exact solution of the constant-coefficient system over [0, duration].
/// Throws NumericError for a non-finite input or output state.
BlochState propagate_segment(const BlochState& s, const LambdaParams& p, bool drive_on,
                             bool gamma_on, double duration, int substeps = 1);

/// Largest component change when the internal step is halved.
double step_halving_gap(const BlochState& s, const LambdaParams& p, bool drive_on, bool gamma_on,
                        double duration, int substeps = 1);

enum class SegmentRole { Pulse, Decay, Free };

struct Segment {
  double duration = 0.0;
  bool drive = false;
  bool dissipation = false;
  SegmentRole role = SegmentRole::Pulse;
  int pulse = 0;  ///< zero-based index of the period this segment belongs to
};

/// Ordered segments of a pulsed-CPT sequence: pulse, decay window, optional free remainder.
struct SegmentPlan {
  std::vector<Segment> segments;
  double total_duration() const noexcept;
};

SegmentPlan build_plan(const PulseSequence& seq);

enum class SampleTag { PulseStart, PulseMid, PulseEnd, Dense, SequenceEnd };

struct Sample {
  double time = 0.0;
  SampleTag tag = SampleTag::PulseStart;
  int pulse = 0;
  BlochState state;
  double photons = 0.0;  ///< cumulative emitted photons at this instant
};

struct Trajectory {
  std::vector<Sample> samples;
  LambdaParams params;
  int n_pulses = 0;
  double dt = 0.0;
  double t1 = 0.0;
  /// Per-pulse fluorescence signal: sigma33 at pulse end (pulsed-CPT) or
  /// photons emitted during the pulse (Ramsey-CPT).
  std::vector<double> pulse_signal;

  std::vector<Sample> select(SampleTag tag) const;
};

/// Propagators for one pulse period of a pulsed-CPT sequence. Built once per parameter
/// point, then reused for every pulse; this is the inner kernel of all numeric sweeps.
class SequenceKernel {
public:
  SequenceKernel(const LambdaParams& p, const PulseSequence& seq, int substeps = 1);

  const Propagator& pulse() const noexcept { return pulse_; }
  const Propagator& half_pulse() const noexcept { return half_; }
  /// Decay window followed by the free remainder of the gap.
  const Propagator& gap() const noexcept { return gap_; }

private:
  Propagator pulse_;
  Propagator half_;
  Propagator gap_;
};

struct RunOptions {
  int substeps = 1;
  int dense_per_segment = 0;  ///< extra evenly spaced samples inside each pulse and gap
};

/// Pulsed CPT with controlled dissipation: N x (drive on, gamma off, t1) then
/// (drive off, gamma gated by decay_fraction, dt - t1). Samples at every pulse start,
/// mid-pulse and pulse end, plus the final state at N * dt.
Trajectory run_sequence(const BlochState& initial, const LambdaParams& p, const PulseSequence& seq,
                        const RunOptions& opt = {});

/// Ramsey-CPT timing: identical pulses of `pulse_length` separated by `free_time`;
/// the decay is on at all times.
struct RamseyProtocol {
  int n_pulses = 2;
  double pulse_length = 0.0;
  double free_time = 0.0;
};

Trajectory run_ramsey_cpt(const BlochState& initial, const LambdaParams& p,
                          const RamseyProtocol& protocol, const RunOptions& opt = {});

/// Shortest pulse (decay always on, delta = 0, gamma0 = 0) that pumps the bright state to a
/// dark population >= target.
double ramsey_preparation_length(const LambdaParams& p, double target = 0.99);

}  // namespace cpt::bloch
