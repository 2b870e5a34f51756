#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "cpt/config.hpp"
#include "cpt/core_model.hpp"
#include "cpt/error.hpp"
#include "cpt/io.hpp"
#include "cpt/presets.hpp"
#include "cpt/runner.hpp"
#include "cpt/spectra.hpp"

namespace fs = std::filesystem;
using namespace cpt;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cpt_sim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout/stderr captured into files; returns the exit status.
int cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(CPT_SIM_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("presets: count and caption lines [PAPER: Fig. 7 and Fig. 8 captions]") {
  CHECK(presets::table().size() == 8);
  const std::string t = presets::format_table();
  CHECK(t.find("fig7: omega1=2*pi*31.8kHz, omega2=2*pi*6.37MHz, dt=1us, t1=31ns") != std::string::npos);
  CHECK(t.find("fig8: T=15us, t1=11ns, A=0.2*pi") != std::string::npos);
  for (const char* name : {"fig2a", "fig2b", "fig3b", "fig4b", "fig5a", "fig5b", "fig7", "fig8"})
    CHECK_NOTHROW(presets::get(name).validate());
  CHECK_THROWS_AS(presets::get("fig9"), ConfigError);

  const fs::path dir = scratch("presets");
  fs::create_directories(dir);
  CHECK(cli("presets", dir / "log") == 0);
  const std::string out = slurp(dir / "log");
  CHECK(out == t);
}

TEST_CASE("config parse diagnostics") {
  SUBCASE("unknown key reports path and line") {
    const std::string text = "{\n  \"experiment\": \"transmission\",\n  \"params\": {\n"
                             "    \"omega1\": 1.0,\n    \"foo\": 2\n  }\n}\n";
    try {
      config::parse(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CHECK(what.find("params.foo") != std::string::npos);
      CHECK(what.find("line 5") != std::string::npos);
    }
  }
  SUBCASE("syntax error reports line") {
    try {
      config::parse("{\n  \"experiment\": \"transmission\",\n  \"params\": {,}\n}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("type error reports the field") {
    try {
      config::parse("{\"experiment\": \"transmission\", \"sequence\": {\"n_pulses\": \"many\"}}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("sequence.n_pulses") != std::string::npos);
    }
  }
  SUBCASE("unknown experiment and empty sweep list") {
    CHECK_THROWS_AS(config::parse("{\"experiment\": \"holography\"}"), ConfigError);
    CHECK_THROWS_AS(config::parse("{\"experiment\": \"transmission\", \"n_list\": []}").validate(), ConfigError);
  }
}

TEST_CASE("configs state frequencies in Hz; the loader converts to rad/s") {
  const config::RunConfig c = config::parse(
      "{\"experiment\": \"transmission\", \"params\": {\"omega1\": 31.8e3, \"omega2\": 6.37e6, \"delta\": -5, \"gamma\": 1e6, "
      "\"gamma0\": 6.4e3},\n"
      " \"sequence\": {\"dt\": 1e-6, \"area_pi\": 0.4}, \"grid\": {\"half_span_fsr\": 1}}");
  const LambdaParams p = runner::resolve_params(c.params);
  CHECK(p.omega1 == two_pi * 31.8e3);
  CHECK(p.omega2 == two_pi * 6.37e6);
  CHECK(p.delta == -two_pi * 5.0);
  CHECK(p.gamma == two_pi * 1e6);
  CHECK(p.gamma0 == two_pi * 6.4e3);
}

TEST_CASE("to_json / from_json round trip for every preset") {
  for (const auto& info : presets::table()) {
    const config::RunConfig c = presets::get(info.name);
    const auto j = config::to_json(c);
    const config::RunConfig back = config::parse(j.dump(2));
    CHECK_MESSAGE(config::to_json(back) == j, info.name);
  }
}

TEST_CASE("fig3b --n 15: transmission CSV over delta dt in [-3 pi, 3 pi] [PAPER: Fig. 3b caption]") {
  const fs::path dir = scratch("fig3b");
  REQUIRE(cli("run --preset fig3b --n 15 --out " + dir.string(), dir.string() + ".log") == 0);
  for (const char* engine : {"analytic", "numeric"}) {
    std::ifstream in(dir / ("transmission_N15_" + std::string(engine) + ".csv"));
    REQUIRE(in);
    const io::SpectrumTable t = io::read_spectrum_csv(in);
    CHECK(t.header.find("engine=" + std::string(engine)) != std::string::npos);
    CHECK(t.header.find("N=15") != std::string::npos);
    const double dt = 1e-6;
    CHECK(t.delta.front() * dt == doctest::Approx(-3 * pi).epsilon(1e-12));
    CHECK(t.delta.back() * dt == doctest::Approx(3 * pi).epsilon(1e-12));
    // the pole band lies far outside 3 FSRs here, so nothing is dropped
    CHECK(t.delta.size() == 1001);
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["tool"] == "cpt-sim");
  CHECK(manifest["config"]["n_list"] == nlohmann::json::array({15}));
}

TEST_CASE("outputs are byte-identical across runs and through the manifest") {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  const fs::path c = scratch("rerun_c");
  REQUIRE(cli("run --preset fig8 --out " + a.string(), a.string() + ".log") == 0);
  REQUIRE(cli("run --preset fig8 --threads 1 --out " + b.string(), b.string() + ".log") == 0);
  REQUIRE(cli("run --config " + (a / "manifest.json").string() + " --out " + c.string(),
              c.string() + ".log") == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    CHECK_MESSAGE(slurp(entry.path()) == slurp(c / name), name.string());
    ++compared;
  }
  CHECK(compared == 3);
}

TEST_CASE("CSV read-back is bit-exact") {
  config::RunConfig cfg = presets::get("fig4b");
  cfg.grid.points = 101;
  const runner::RunResult r = runner::execute(cfg);
  REQUIRE(r.files.size() == 2);
  std::istringstream in(r.files[1].content);
  const io::SpectrumTable t = io::read_spectrum_csv(in);
  cfg.engine = "numeric";
  const LambdaParams p = runner::resolve_params(cfg.params);
  const PulseSequence seq = runner::resolve_sequence(cfg.sequence, p, 15);
  spectra::SweepOptions opt;
  const spectra::Spectrum s = spectra::transmission_spectrum(
      p, seq, runner::resolve_grid(cfg.grid, seq.dt), spectra::Sampling::PulseMid,
      spectra::Engine::Numeric, opt);
  CHECK(t.delta == s.delta);
  CHECK(t.values == s.values);
  std::istringstream bad("# x\ndelta_rad_per_s,value\n1.0,abc\n");
  CHECK_THROWS_AS(io::read_spectrum_csv(bad), ConfigError);
}

TEST_CASE("fig5a preset sweeps gamma0/2pi from 0 to 38.2 kHz in 6.4 kHz steps [PAPER: Fig. 5a caption]") {
  const config::RunConfig c = presets::get("fig5a");
  REQUIRE(c.allan.gamma0.size() == 7);
  CHECK(c.allan.gamma0.front() == 0.0);
  CHECK(c.allan.gamma0.back() == doctest::Approx(38.2e3).epsilon(0.002));
  for (std::size_t i = 1; i < c.allan.gamma0.size(); ++i)
    CHECK(c.allan.gamma0[i] - c.allan.gamma0[i - 1] == doctest::Approx(6.4e3).epsilon(0.01));

  const fs::path dir = scratch("fig5a");
  REQUIRE(cli("run --preset fig5a --out " + dir.string(), dir.string() + ".log") == 0);
  const auto lines = lines_of(slurp(dir / "allan_pulsed.csv"));
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "N,gamma0_rad_per_s,sigma_bar,nu_m_rad_per_s,slope");
  CHECK(lines.size() == 1 + 7 * c.allan.n_values.size());
  const auto summary = nlohmann::json::parse(slurp(dir / "allan_pulsed.json"));
  CHECK(summary["n_opt"].size() == 7);
}

TEST_CASE("error exits") {
  SUBCASE("empty sweep list: validation error and nothing written [TRIVIAL]") {
    const fs::path dir = scratch("empty_sweep");
    const fs::path cfg = scratch("empty_sweep.json");
    std::ofstream(cfg) << "{\"experiment\": \"transmission\", \"n_list\": [],\n"
                          " \"params\": {\"omega1\": 1e3, \"omega2\": 1e6, \"gamma\": 1e7},\n"
                          " \"sequence\": {\"dt\": 1e-6, \"area_pi\": 0.4}}\n";
    CHECK(cli("run --config " + cfg.string() + " --out " + dir.string(), dir.string() + ".log") == 1);
    CHECK_FALSE(fs::exists(dir));
    CHECK(slurp(dir.string() + ".log").find("empty sweep list") != std::string::npos);
  }
  SUBCASE("parse error exits 1 with the field in the message") {
    const fs::path cfg = scratch("bad_key.json");
    std::ofstream(cfg) << "{\n\"experiment\": \"transmission\",\n\"bogus\": 1\n}\n";
    const fs::path log = scratch("bad_key.log");
    CHECK(cli("run --config " + cfg.string() + " --out " + scratch("bad_key").string(), log) == 1);
    CHECK(slurp(log).find("bogus") != std::string::npos);
  }
  SUBCASE("CLI misuse exits 1") {
    const fs::path log = scratch("misuse.log");
    CHECK(cli("run --preset fig3b --engine quantum", log) == 1);
    CHECK(cli("run", log) == 1);
    CHECK(cli("run --preset nope", log) == 1);
  }
  SUBCASE("numeric failure (degenerate spectrum) exits 2") {
    // omega1 = 0 with the atoms in |1>: no light is ever scattered, so S is identically zero
    const fs::path dir = scratch("degenerate");
    const fs::path cfg = scratch("degenerate.json");
    std::ofstream(cfg) << "{\"experiment\": \"allan-pulsed\",\n"
                          " \"params\": {\"omega1\": 0, \"omega2\": 6.37e6, \"gamma\": 5e8},\n"
                          " \"sequence\": {\"t1\": 11e-9},\n"
                          " \"allan\": {\"n_values\": [2, 5], \"gamma0\": [0]}}\n";
    const fs::path log = scratch("degenerate.log");
    CHECK(cli("run --config " + cfg.string() + " --out " + dir.string(), log) == 2);
    CHECK_FALSE(fs::exists(dir));
  }
}
