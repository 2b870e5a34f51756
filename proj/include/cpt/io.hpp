#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpt/bloch.hpp"
#include "cpt/metrology.hpp"
#include "cpt/spectra.hpp"

namespace cpt::io {

/// Shortest decimal form that still round-trips (17 significant digits).
std::string format_double(double v);

void write_spectrum_csv(std::ostream& os, const spectra::Spectrum& s);
nlohmann::ordered_json spectrum_json(const spectra::Spectrum& s);

struct SpectrumTable {
  std::string header;  ///< the comment line without the leading "# "
  std::vector<double> delta;
  std::vector<double> values;
};

/// Reads back what write_spectrum_csv produced.
SpectrumTable read_spectrum_csv(std::istream& is);

void write_allan_csv(std::ostream& os, const metrology::AllanResult& r);
nlohmann::ordered_json allan_json(const metrology::AllanResult& r);

void write_trajectory_csv(std::ostream& os, const bloch::Trajectory& t);
nlohmann::ordered_json trajectory_json(const bloch::Trajectory& t);

struct DarkPumpingRow {
  double area = 0.0;     ///< rad
  long n = 0;
  double sigma_d = 0.0;  ///< law value
  double numeric = -1.0; ///< numeric dark population, negative when not computed
};

struct DarkPumpingTable {
  std::string kind;  ///< "population" (sigma_D vs n) or "steps" (N_s vs area)
  std::vector<DarkPumpingRow> rows;
};

void write_dark_pumping_csv(std::ostream& os, const DarkPumpingTable& t);
nlohmann::ordered_json dark_pumping_json(const DarkPumpingTable& t);

}  // namespace cpt::io
