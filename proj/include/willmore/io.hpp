#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "willmore/conformal.hpp"
#include "willmore/immersion.hpp"
#include "willmore/minimizer.hpp"
#include "willmore/stability.hpp"

namespace willmore {

using Json = nlohmann::ordered_json;

// Fixed 12-significant-digit formatting used by every report.
std::string format_real(double x);
// x rounded through format_real, for JSON emission. NaN maps to null.
Json json_real(double x);

// Self-description block carried by every output file.
struct OutputHeader {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> tolerances;
};

void write_csv_header(std::ostream& os, const OutputHeader& h);
Json header_json(const OutputHeader& h);
std::string version_string();

// Immersion samples: "# lattice" and "# n" comment lines, then rows
// x,y,p0,p1,p2,p3 over the (u, v) grid with i along gen1.
void write_immersion_csv(std::ostream& os, const TorusImmersion& f, int n);
TorusImmersion read_immersion_csv(std::istream& is);

// Binary dump (little endian): "WTGS", uint32 version = 1, uint32 n,
// float64 gen1.re gen1.im gen2.re gen2.im, then n*n rows of 4 float64.
void write_immersion_binary(std::ostream& os, const TorusImmersion& f, int n);
TorusImmersion read_immersion_binary(std::istream& is);

// Columns x,y,E,F,G in domain coordinates.
void write_metric_csv(std::ostream& os, const MetricGrid& m, const Lattice& domain);
std::pair<Lattice, MetricGrid> read_metric_csv(std::istream& is);

void write_margin_csv(std::ostream& os, const std::vector<MarginRow>& rows);
Json margins_json(const std::vector<MarginRow>& rows);
Json threshold_json(const ThresholdResult& r);

void write_energy_table_csv(std::ostream& os, const EnergyTable& t);
Json energy_table_json(const EnergyTable& t);

Json coefficients_json(const ModeCoefficients& c, int K);
ModeCoefficients coefficients_from_json(const Json& j);
Json minimizer_json(const MinimizerResult& r);

}  // namespace willmore
