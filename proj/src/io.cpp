#include "cpt/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "cpt/error.hpp"

namespace cpt::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string spectrum_header(const spectra::Spectrum& s) {
  std::ostringstream h;
  h << "engine=" << spectra::to_string(s.engine) << ", sampling=" << spectra::to_string(s.sampling)
    << ", N=" << s.seq.n_pulses << ", dt=" << format_double(s.seq.dt)
    << ", t1=" << format_double(s.seq.t1) << ", omega1=" << format_double(s.params.omega1)
    << ", omega2=" << format_double(s.params.omega2) << ", gamma=" << format_double(s.params.gamma)
    << ", gamma0=" << format_double(s.params.gamma0);
  return h.str();
}

const char* tag_name(bloch::SampleTag t) {
  switch (t) {
    case bloch::SampleTag::PulseStart: return "pulse-start";
    case bloch::SampleTag::PulseMid: return "pulse-mid";
    case bloch::SampleTag::PulseEnd: return "pulse-end";
    case bloch::SampleTag::Dense: return "dense";
    case bloch::SampleTag::SequenceEnd: return "sequence-end";
  }
  return "unknown";
}

}  // namespace

void write_spectrum_csv(std::ostream& os, const spectra::Spectrum& s) {
  os << "# " << spectrum_header(s) << '\n';
  os << "delta_rad_per_s,value\n";
  for (std::size_t i = 0; i < s.delta.size(); ++i)
    os << format_double(s.delta[i]) << ',' << format_double(s.values[i]) << '\n';
}

nlohmann::ordered_json spectrum_json(const spectra::Spectrum& s) {
  nlohmann::ordered_json j;
  j["engine"] = spectra::to_string(s.engine);
  j["sampling"] = spectra::to_string(s.sampling);
  j["observable"] = spectra::to_string(s.observable);
  j["N"] = s.seq.n_pulses;
  j["dt"] = s.seq.dt;
  j["t1"] = s.seq.t1;
  j["omega1"] = s.params.omega1;
  j["omega2"] = s.params.omega2;
  j["gamma"] = s.params.gamma;
  j["gamma0"] = s.params.gamma0;
  j["delta_rad_per_s"] = s.delta;
  j["value"] = s.values;
  j["dropped_rad_per_s"] = s.dropped;
  return j;
}

SpectrumTable read_spectrum_csv(std::istream& is) {
  SpectrumTable t;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("spectrum csv: missing '# ' header line");
  t.header = line.substr(2);
  if (!std::getline(is, line) || line != "delta_rad_per_s,value")
    throw ConfigError("spectrum csv: missing column header");
  int lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("spectrum csv: line " + std::to_string(lineno) + " has no comma");
    try {
      t.delta.push_back(std::stod(line.substr(0, comma)));
      t.values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("spectrum csv: line " + std::to_string(lineno) + " is not numeric");
    }
  }
  return t;
}

void write_allan_csv(std::ostream& os, const metrology::AllanResult& r) {
  os << "N,gamma0_rad_per_s,sigma_bar,nu_m_rad_per_s,slope\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << format_double(row.gamma0) << ',' << format_double(row.sigma_bar) << ','
       << format_double(row.nu_m) << ',' << format_double(row.slope) << '\n';
}

nlohmann::ordered_json allan_json(const metrology::AllanResult& r) {
  nlohmann::ordered_json j;
  j["protocol"] = r.protocol;
  j["reference_sigma_a"] = r.reference_sigma_a;
  auto& optima = j["n_opt"] = nlohmann::ordered_json::array();
  for (const auto& o : r.optima)
    optima.push_back({{"gamma0_rad_per_s", o.gamma0},
                      {"gamma0_hz", o.gamma0 / two_pi},
                      {"n_opt", o.n_opt},
                      {"sigma_bar_min", o.sigma_bar_min}});
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"N", row.n},
                    {"gamma0_rad_per_s", row.gamma0},
                    {"sigma_a", row.sigma_a},
                    {"sigma_bar", row.sigma_bar},
                    {"nu_m_rad_per_s", row.nu_m},
                    {"slope", row.slope},
                    {"full_relaxation", row.full_relaxation}});
  return j;
}

void write_trajectory_csv(std::ostream& os, const bloch::Trajectory& t) {
  os << "# N=" << t.n_pulses << ", dt=" << format_double(t.dt) << ", t1=" << format_double(t.t1)
     << ", delta=" << format_double(t.params.delta) << '\n';
  os << "t_s,tag,pulse,re_s13,im_s13,re_s12,im_s12,re_s23,im_s23,p11,p22,p33,photons\n";
  for (const auto& s : t.samples) {
    const auto& b = s.state;
    os << format_double(s.time) << ',' << tag_name(s.tag) << ',' << s.pulse;
    for (double v : {b.s13.real(), b.s13.imag(), b.s12.real(), b.s12.imag(), b.s23.real(),
                     b.s23.imag(), b.p11, b.p22, b.p33, s.photons})
      os << ',' << format_double(v);
    os << '\n';
  }
}

nlohmann::ordered_json trajectory_json(const bloch::Trajectory& t) {
  nlohmann::ordered_json j;
  j["N"] = t.n_pulses;
  j["dt"] = t.dt;
  j["t1"] = t.t1;
  j["delta"] = t.params.delta;
  j["pulse_signal"] = t.pulse_signal;
  auto& samples = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : t.samples) {
    const auto& b = s.state;
    samples.push_back({{"t", s.time},
                       {"tag", tag_name(s.tag)},
                       {"pulse", s.pulse},
                       {"s13", {b.s13.real(), b.s13.imag()}},
                       {"s12", {b.s12.real(), b.s12.imag()}},
                       {"s23", {b.s23.real(), b.s23.imag()}},
                       {"p", {b.p11, b.p22, b.p33}},
                       {"photons", s.photons}});
  }
  return j;
}

void write_dark_pumping_csv(std::ostream& os, const DarkPumpingTable& t) {
  os << "# kind=" << t.kind << '\n';
  os << "area_rad,n,sigma_d,sigma_d_numeric\n";
  for (const auto& r : t.rows)
    os << format_double(r.area) << ',' << r.n << ',' << format_double(r.sigma_d) << ','
       << format_double(r.numeric) << '\n';
}

nlohmann::ordered_json dark_pumping_json(const DarkPumpingTable& t) {
  nlohmann::ordered_json j;
  j["kind"] = t.kind;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"area_rad", r.area},
                    {"n", r.n},
                    {"sigma_d", r.sigma_d},
                    {"sigma_d_numeric", r.numeric}});
  return j;
}

}  // namespace cpt::io
