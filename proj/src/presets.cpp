#include "cpt/presets.hpp"

#include <cmath>
#include <sstream>

#include "cpt/error.hpp"
#include "cpt/metrology.hpp"

namespace cpt::presets {

namespace {

using config::Experiment;
using config::RunConfig;

constexpr double kOmega2Hz = 6.37e6;
constexpr double kPulsedPeriod = 1e-6;
constexpr double kMetrologyGammaHz = 500e6;
constexpr double kAllanCycle = 15e-6;
constexpr double kAllanPulse = 11e-9;

// gamma (dt - t1) = 200 for the weak-probe figures, written as a frequency in Hz.
double relaxing_gamma_hz(double omega1_hz, double omega2_hz, double area_pi, double dt) {
  const double t1 = area_pi * 0.5 / std::hypot(omega1_hz, omega2_hz);
  return 200.0 / (2.0 * std::numbers::pi * (dt - t1));
}

std::vector<double> gamma0_steps_hz() {
  std::vector<double> out;
  for (int k = 0; k <= 6; ++k) out.push_back(k * kOmega2Hz / 1000.0);
  return out;
}

RunConfig fig2a() {
  RunConfig c;
  c.experiment = Experiment::DarkPumping;
  c.preset = "fig2a";
  c.params = {kOmega2Hz, kOmega2Hz, 0.0, 20e6, 0.0};
  c.sequence.n_pulses = 200;
  c.sequence.dt = kPulsedPeriod;
  c.sequence.area_pi = 0.18;
  c.initial_state = "thermal";
  c.dark_pumping.mode = "population";
  c.dark_pumping.areas_pi = {0.18};
  c.dark_pumping.n_max = 200;
  return c;
}

RunConfig fig2b() {
  RunConfig c;
  c.experiment = Experiment::DarkPumping;
  c.preset = "fig2b";
  c.dark_pumping.mode = "steps";
  for (int i = 5; i <= 195; ++i) c.dark_pumping.areas_pi.push_back(i / 100.0);
  c.dark_pumping.numeric = false;
  return c;
}

RunConfig weak_probe(const char* name, double omega1_hz, double area_pi, const char* sampling) {
  RunConfig c;
  c.experiment = Experiment::Transmission;
  c.preset = name;
  c.params = {omega1_hz, kOmega2Hz, 0.0,
              relaxing_gamma_hz(omega1_hz, kOmega2Hz, area_pi, kPulsedPeriod), 0.0};
  c.sequence.n_pulses = 15;
  c.sequence.dt = kPulsedPeriod;
  c.sequence.area_pi = area_pi;
  c.initial_state = "ground1";
  c.grid.half_span_fsr = 1.5;
  c.grid.points = 1001;
  c.sampling = sampling;
  c.engine = "both";
  return c;
}

RunConfig fig3b() {
  RunConfig c = weak_probe("fig3b", 31.8e3, 0.4, "pulse-end");
  c.n_list = std::vector<int>{2, 5, 15};
  return c;
}

RunConfig fig4b() { return weak_probe("fig4b", 0.03e6, 2.0, "pulse-mid"); }

RunConfig allan_base(Experiment e, const char* name) {
  RunConfig c;
  c.experiment = e;
  c.preset = name;
  c.params = {kOmega2Hz, kOmega2Hz, 0.0, kMetrologyGammaHz, 0.0};
  c.sequence.n_pulses = 2;
  c.sequence.t1 = kAllanPulse;
  c.initial_state = "dark";
  c.allan.t_cycle = kAllanCycle;
  c.allan.gamma0 = gamma0_steps_hz();
  return c;
}

RunConfig fig5a() {
  RunConfig c = allan_base(Experiment::AllanPulsed, "fig5a");
  c.allan.n_values = metrology::log_spaced_counts(2, 600, 32);
  return c;
}

RunConfig fig5b() {
  RunConfig c = allan_base(Experiment::AllanRamsey, "fig5b");
  c.allan.n_values = metrology::log_spaced_counts(2, 50, 20);
  c.allan.ramsey.gamma = kOmega2Hz;
  c.allan.ramsey.prep_target = 0.99;
  return c;
}

RunConfig fig7() {
  RunConfig c;
  c.experiment = Experiment::Trajectory;
  c.preset = "fig7";
  const double t1 = 31e-9;
  c.params = {31.8e3, kOmega2Hz, 0.0, 200.0 / (2.0 * std::numbers::pi * (kPulsedPeriod - t1)), 0.0};
  c.sequence.n_pulses = 40;
  c.sequence.dt = kPulsedPeriod;
  c.sequence.t1 = t1;
  c.initial_state = "ground1";
  c.trajectory.detunings = {0.0, 1.0 / kPulsedPeriod};
  return c;
}

RunConfig fig8() {
  RunConfig c;
  c.experiment = Experiment::Fluorescence;
  c.preset = "fig8";
  c.params = {kOmega2Hz, kOmega2Hz, 0.0, kMetrologyGammaHz, 0.0};
  c.sequence.n_pulses = 54;
  c.sequence.total_time = kAllanCycle;
  c.sequence.t1 = kAllanPulse;
  c.n_list = std::vector<int>{10, 54, 200};
  c.initial_state = "dark";
  c.grid.half_span_fsr = 0.5;
  c.grid.points = 401;
  return c;
}

struct Entry {
  PresetInfo info;
  RunConfig (*make)();
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"fig2a", "A=0.18*pi, sigma_D0=0.5, threshold=0.95, n<=200", "dark-pumping"}, fig2a},
      {{"fig2b", "A=0.05*pi..1.95*pi, sigma_D0=0.5, threshold=0.95", "dark-pumping"}, fig2b},
      {{"fig3b", "omega1=2*pi*31.8kHz, omega2=2*pi*6.37MHz, dt=1us, A=2*pi/5, N=2,5,15",
        "transmission"},
       fig3b},
      {{"fig4b", "omega1=2*pi*0.03MHz, omega2=2*pi*6.37MHz, dt=1us, A=2*pi, N=15, mid-pulse",
        "transmission"},
       fig4b},
      {{"fig5a", "omega1=omega2=2*pi*6.37MHz, T=15us, t1=11ns, gamma0=2*pi*(0..38.2)kHz",
        "allan-pulsed"},
       fig5a},
      {{"fig5b", "omega1=omega2=2*pi*6.37MHz, T=15us, gamma0=2*pi*(0..38.2)kHz, Ramsey-CPT",
        "allan-ramsey"},
       fig5b},
      {{"fig7", "omega1=2*pi*31.8kHz, omega2=2*pi*6.37MHz, dt=1us, t1=31ns", "trajectory"}, fig7},
      {{"fig8", "T=15us, t1=11ns, A=0.2*pi, N=10,54,200", "fluorescence"}, fig8},
  };
  return list;
}

}  // namespace

const std::vector<PresetInfo>& table() {
  static const std::vector<PresetInfo> infos = [] {
    std::vector<PresetInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

config::RunConfig get(const std::string& name) {
  for (const auto& e : entries())
    if (e.info.name == name) return e.make();
  std::string known;
  for (const auto& e : entries()) known += (known.empty() ? "" : ", ") + e.info.name;
  throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
}

std::string format_table() {
  std::ostringstream os;
  for (const auto& p : table()) os << p.name << ": " << p.summary << "\n    experiment=" << p.experiment << '\n';
  return os.str();
}

}  // namespace cpt::presets
