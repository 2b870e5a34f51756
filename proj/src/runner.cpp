#include "cpt/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpt/bloch.hpp"
#include "cpt/error.hpp"
#include "cpt/io.hpp"
#include "cpt/metrology.hpp"

namespace cpt::runner {

using json = nlohmann::ordered_json;
using config::Experiment;
using config::RunConfig;

LambdaParams resolve_params(const config::ParamsHz& p) {
  return {two_pi * p.omega1, two_pi * p.omega2, two_pi * p.delta, two_pi * p.gamma,
          two_pi * p.gamma0};
}

PulseSequence resolve_sequence(const config::SequenceSpec& s, const LambdaParams& p, int n) {
  PulseSequence seq;
  seq.n_pulses = n;
  if (s.dt)
    seq.dt = *s.dt;
  else if (s.total_time)
    seq.dt = *s.total_time / n;
  else
    throw ConfigError("sequence: dt or total_time is required");
  if (s.t1)
    seq.t1 = *s.t1;
  else if (s.area_pi)
    seq.t1 = *s.area_pi * pi / p.rabi();
  else
    throw ConfigError("sequence: t1 or area_pi is required");
  seq.decay_fraction = s.decay_fraction;
  seq.validate();
  return seq;
}

spectra::DetuningGrid resolve_grid(const config::GridSpec& g, double dt) {
  spectra::DetuningGrid grid;
  if (g.half_span_fsr) {
    grid = spectra::DetuningGrid::fsr_span(dt, *g.half_span_fsr, g.points);
  } else {
    if (!g.min || !g.max) throw ConfigError("grid: give either half_span_fsr or min and max");
    grid = {two_pi * *g.min, two_pi * *g.max, g.points, {}};
  }
  for (const auto& [lo, hi] : g.exclusions) grid.exclusions.emplace_back(two_pi * lo, two_pi * hi);
  grid.validate();
  return grid;
}

BlochState resolve_initial(const std::string& name, const LambdaParams& p) {
  if (name == "ground1") return BlochState::ground1();
  if (name == "thermal") return BlochState::thermal();
  if (name == "dark") return BlochState::dark(p);
  if (name == "bright") return BlochState::bright(p);
  throw ConfigError("unknown initial_state '" + name + "'");
}

std::vector<int> pulse_counts(const RunConfig& cfg) {
  return cfg.n_list ? *cfg.n_list : std::vector<int>{cfg.sequence.n_pulses};
}

namespace {

struct Emitter {
  bool csv;
  bool json_out;
  RunResult* out;

  void add(const std::string& name, const std::string& content) {
    out->files.push_back({name, content});
  }

  template <class CsvFn>
  void csv_file(const std::string& stem, CsvFn&& fn) {
    if (!csv) return;
    std::ostringstream os;
    fn(os);
    add(stem + ".csv", os.str());
  }

  void json_file(const std::string& stem, const json& j, bool always = false) {
    if (json_out || always) add(stem + ".json", j.dump(2) + "\n");
  }
};

json params_json(const LambdaParams& p) {
  return {{"omega1_rad_per_s", p.omega1},
          {"omega2_rad_per_s", p.omega2},
          {"delta_rad_per_s", p.delta},
          {"gamma_rad_per_s", p.gamma},
          {"gamma0_rad_per_s", p.gamma0}};
}

json sequence_json(const PulseSequence& s, const LambdaParams& p) {
  return {{"N", s.n_pulses},
          {"dt", s.dt},
          {"t1", s.t1},
          {"decay_fraction", s.decay_fraction},
          {"area_rad", s.area(p)},
          {"full_relaxation", s.full_relaxation(p)}};
}

json grid_json(const spectra::DetuningGrid& g) {
  json ex = json::array();
  for (const auto& [lo, hi] : g.exclusions) ex.push_back({lo, hi});
  return {{"min_rad_per_s", g.min},
          {"max_rad_per_s", g.max},
          {"points", g.points},
          {"exclusions_rad_per_s", ex}};
}

std::vector<spectra::Engine> engines(const std::string& e) {
  if (e == "analytic") return {spectra::Engine::Analytic};
  if (e == "numeric") return {spectra::Engine::Numeric};
  return {spectra::Engine::Analytic, spectra::Engine::Numeric};
}

void run_dark_pumping(const RunConfig& cfg, Emitter& em, json& resolved) {
  const auto& dp = cfg.dark_pumping;
  io::DarkPumpingTable table;
  table.kind = dp.mode;
  if (dp.mode == "steps") {
    for (double a : dp.areas_pi) {
      const double area = a * pi;
      const long n = steps_to_threshold(area, dp.sigma_d0, dp.threshold);
      table.rows.push_back({area, n, dark_population_after_n(area, dp.sigma_d0, n), -1.0});
    }
  } else {
    const LambdaParams p = resolve_params(cfg.params);
    json per_area = json::array();
    for (double a : dp.areas_pi) {
      const double area = a * pi;
      std::vector<double> numeric(static_cast<std::size_t>(dp.n_max) + 1, -1.0);
      if (dp.numeric) {
        config::SequenceSpec spec = cfg.sequence;
        spec.t1.reset();
        spec.total_time.reset();
        spec.area_pi = a;
        const PulseSequence seq =
            resolve_sequence(spec, p, static_cast<int>(std::max<long>(dp.n_max, 1)));
        const bloch::Trajectory traj =
            bloch::run_sequence(resolve_initial(cfg.initial_state, p), p, seq);
        for (const auto& s : traj.samples) {
          if (s.tag == bloch::SampleTag::PulseStart && s.pulse <= dp.n_max)
            numeric[static_cast<std::size_t>(s.pulse)] = dark_population(s.state, p);
          if (s.tag == bloch::SampleTag::SequenceEnd && dp.n_max >= 1)
            numeric[static_cast<std::size_t>(dp.n_max)] = dark_population(s.state, p);
        }
        per_area.push_back({{"area_rad", area}, {"sequence", sequence_json(seq, p)}});
      }
      for (long n = 0; n <= dp.n_max; ++n)
        table.rows.push_back({area, n, dark_population_after_n(area, dp.sigma_d0, n),
                              numeric[static_cast<std::size_t>(n)]});
    }
    resolved["params"] = params_json(p);
    resolved["numeric_runs"] = per_area;
  }
  em.csv_file("dark_pumping", [&](std::ostream& os) { io::write_dark_pumping_csv(os, table); });
  em.json_file("dark_pumping", io::dark_pumping_json(table));
}

void run_spectra(const RunConfig& cfg, Emitter& em, json& resolved) {
  const LambdaParams p = resolve_params(cfg.params);
  resolved["params"] = params_json(p);
  json runs = json::array();
  spectra::SweepOptions opt;
  opt.initial = resolve_initial(cfg.initial_state, p);
  opt.substeps = cfg.substeps;

  for (int n : pulse_counts(cfg)) {
    const PulseSequence seq = resolve_sequence(cfg.sequence, p, n);
    const spectra::DetuningGrid grid = resolve_grid(cfg.grid, seq.dt);
    runs.push_back({{"sequence", sequence_json(seq, p)}, {"grid", grid_json(grid)}});
    const std::string tag = "N" + std::to_string(n);

    if (cfg.experiment == Experiment::Fluorescence) {
      const spectra::Spectrum s = spectra::fluorescence_spectrum(p, seq, grid, opt);
      const std::string stem = "fluorescence_" + tag;
      em.csv_file(stem, [&](std::ostream& os) { io::write_spectrum_csv(os, s); });
      em.json_file(stem, io::spectrum_json(s));
      continue;
    }
    const auto sampling =
        cfg.sampling == "pulse-mid" ? spectra::Sampling::PulseMid : spectra::Sampling::PulseEnd;
    for (const auto engine : engines(cfg.engine)) {
      const spectra::Spectrum s = spectra::transmission_spectrum(p, seq, grid, sampling, engine, opt);
      const std::string stem = "transmission_" + tag + "_" + spectra::to_string(engine);
      em.csv_file(stem, [&](std::ostream& os) { io::write_spectrum_csv(os, s); });
      em.json_file(stem, io::spectrum_json(s));
    }
  }
  resolved["runs"] = runs;
}

metrology::AllanConfig allan_config(const config::AllanSpec& a) {
  metrology::AllanConfig c;
  c.nu_at = a.nu_at;
  c.tau = a.tau;
  c.t_cycle = a.t_cycle;
  c.noise = a.noise == "unit-variance" ? metrology::NoiseModel::UnitVariance
                                       : metrology::NoiseModel::ShotNoise;
  c.slope_half_width = a.slope_half_width;
  c.grid_points = a.grid_points;
  c.grid_half_span_fsr = a.grid_half_span_fsr;
  c.slope_floor = a.slope_floor;
  return c;
}

void run_allan(const RunConfig& cfg, Emitter& em, json& resolved) {
  const LambdaParams p = resolve_params(cfg.params);
  const metrology::AllanConfig acfg = allan_config(cfg.allan);
  std::vector<double> gamma0;
  for (double g : cfg.allan.gamma0) gamma0.push_back(two_pi * g);

  metrology::PulsedTemplate pulsed{p, 0.0, cfg.sequence.decay_fraction};
  pulsed.t1 = cfg.sequence.t1 ? *cfg.sequence.t1 : *cfg.sequence.area_pi * pi / p.rabi();
  resolved["params"] = params_json(p);
  resolved["t1"] = pulsed.t1;
  resolved["gamma0_rad_per_s"] = gamma0;

  metrology::AllanResult result;
  std::string stem;
  if (cfg.experiment == Experiment::AllanPulsed) {
    result = metrology::pulsed_cpt_sweep(pulsed, acfg, cfg.allan.n_values, gamma0);
    stem = "allan_pulsed";
  } else {
    metrology::RamseyTemplate ramsey;
    ramsey.params = p;
    ramsey.params.gamma =
        cfg.allan.ramsey.gamma > 0.0 ? two_pi * cfg.allan.ramsey.gamma : p.omega2;
    ramsey.pulse_length = cfg.allan.ramsey.pulse_length;
    ramsey.prep_target = cfg.allan.ramsey.prep_target;
    ramsey.own_reference = cfg.allan.ramsey.own_reference;
    const double length = metrology::ramsey_pulse_length(ramsey);
    ramsey.pulse_length = length;
    resolved["ramsey"] = {{"gamma_rad_per_s", ramsey.params.gamma}, {"pulse_length", length}};
    result = metrology::ramsey_cpt_sweep(ramsey, pulsed, acfg, cfg.allan.n_values, gamma0);
    stem = "allan_ramsey";
  }
  resolved["reference_sigma_a"] = result.reference_sigma_a;
  em.csv_file(stem, [&](std::ostream& os) { io::write_allan_csv(os, result); });
  // The N_opt summary is always emitted; it is the headline result of the sweep.
  em.json_file(stem, io::allan_json(result), true);
}

void run_trajectory(const RunConfig& cfg, Emitter& em, json& resolved) {
  const LambdaParams base = resolve_params(cfg.params);
  const PulseSequence seq = resolve_sequence(cfg.sequence, base, cfg.sequence.n_pulses);
  resolved["params"] = params_json(base);
  resolved["sequence"] = sequence_json(seq, base);
  bloch::RunOptions opt;
  opt.substeps = cfg.substeps;
  opt.dense_per_segment = cfg.trajectory.dense_per_segment;

  const auto& dets = cfg.trajectory.detunings;
  const auto trajs = indexed_map<bloch::Trajectory>(dets.size(), [&](std::size_t i) {
    const LambdaParams p = base.with_delta(two_pi * dets[i]);
    return bloch::run_sequence(resolve_initial(cfg.initial_state, p), p, seq, opt);
  });
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const std::string stem = "trajectory_" + std::to_string(i);
    em.csv_file(stem, [&](std::ostream& os) { io::write_trajectory_csv(os, trajs[i]); });
    em.json_file(stem, io::trajectory_json(trajs[i]));
  }
}

}  // namespace

RunResult execute(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  Emitter em{cfg.output.format != "json", cfg.output.format != "csv", &result};
  json resolved;
  resolved["experiment"] = config::to_string(cfg.experiment);

  switch (cfg.experiment) {
    case Experiment::DarkPumping: run_dark_pumping(cfg, em, resolved); break;
    case Experiment::Transmission:
    case Experiment::Fluorescence: run_spectra(cfg, em, resolved); break;
    case Experiment::AllanPulsed:
    case Experiment::AllanRamsey: run_allan(cfg, em, resolved); break;
    case Experiment::Trajectory: run_trajectory(cfg, em, resolved); break;
  }

  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.name);
  result.manifest = {{"tool", "cpt-sim"},
                     {"version", CPT_VERSION},
                     {"config", config::to_json(cfg)},
                     {"resolved", resolved},
                     {"outputs", files}};
  return result;
}

void write(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
    out << content;
  };
  for (const auto& f : result.files) put(f.name, f.content);
  put("manifest.json", result.manifest.dump(2) + "\n");
}

}  // namespace cpt::runner
