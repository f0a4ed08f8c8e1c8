#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdl/concurrence.hpp"
#include "qdl/quantum_state.hpp"
#include "qdl/scan.hpp"

// File formats: JSON density matrices, CSV trace/sweep output, and a
// dependency-free SVG line chart. All numeric text is locale-independent
// with shortest round-trip doubles and '\n' line endings.

namespace qdl::io {

std::string format_double(double v);

// {"basis": "pp,pm,mp,mm", "re": 4x4, "im": 4x4}; the basis string names the
// fixed two-qubit product-basis ordering. Reading validates all state
// invariants.
nlohmann::json density_to_json(const DensityMatrix<double>& rho);
DensityMatrix<double> density_from_json(const nlohmann::json& j);
void write_density_json(const std::string& path, const DensityMatrix<double>& rho);
DensityMatrix<double> read_density_json(const std::string& path);

struct EvolveRow {
  double t{};
  double concurrence{};
  double p_abs{}, p_re{}, p_im{};  // qubit A decay amplitude
  double rho11{}, rho22{}, rho33{}, rho44{};
  double rho14_abs{}, rho23_abs{};
};

std::vector<EvolveRow> evolve_rows(const ConcurrenceTrace<double>& trace);
void write_evolve_csv(std::ostream& os, const std::vector<EvolveRow>& rows);
nlohmann::json evolve_to_json(const std::vector<EvolveRow>& rows);

// Long format: axis_value,t,concurrence; summary: one row per axis value
// with the regime label, first death time (empty when none) and the number
// of revivals.
void write_sweep_csv(std::ostream& os, const std::string& axis, const SweepSurface<double>& s);
void write_sweep_summary_csv(std::ostream& os, const std::string& axis,
                             const SweepSurface<double>& s);

void write_trace_svg(std::ostream& os, const ConcurrenceTrace<double>& trace,
                     const std::string& title);

// Tabulated spectral density from CSV with required header "omega,J".
std::vector<std::pair<double, double>> read_spectrum_csv(const std::string& path);

}  // namespace qdl::io
