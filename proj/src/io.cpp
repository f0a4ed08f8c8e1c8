#include "qdl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qdl::io {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kBasis = "pp,pm,mp,mm";

nlohmann::json matrix_part(const Matrix4<double>& m, bool real) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) row.push_back(real ? m(r, c).real() : m(r, c).imag());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

nlohmann::json density_to_json(const DensityMatrix<double>& rho) {
  return {{"basis", kBasis},
          {"re", matrix_part(rho.matrix(), true)},
          {"im", matrix_part(rho.matrix(), false)}};
}

DensityMatrix<double> density_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw Error(Errc::invalid_spec, "density matrix JSON needs 're' and 'im' 4x4 arrays");
  if (j.value("basis", std::string(kBasis)) != kBasis)
    throw Error(Errc::invalid_spec,
                std::string("unsupported basis ordering; expected \"") + kBasis + "\"");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  Matrix4<double> m;
  for (int r = 0; r < 4; ++r) {
    if (!re.is_array() || re.size() != 4 || !re.at(r).is_array() || re.at(r).size() != 4 ||
        !im.is_array() || im.size() != 4 || !im.at(r).is_array() || im.at(r).size() != 4)
      throw Error(Errc::invalid_spec, "density matrix JSON parts must be 4x4 arrays");
    for (int c = 0; c < 4; ++c)
      m(r, c) = Complex<double>(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
  }
  return make_density(m);
}

void write_density_json(const std::string& path, const DensityMatrix<double>& rho) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::invalid_spec, "cannot open '" + path + "' for writing");
  f << density_to_json(rho).dump(2) << "\n";
}

DensityMatrix<double> read_density_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::invalid_spec, "cannot open state file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_spec, std::string("state file is not valid JSON: ") + e.what());
  }
  return density_from_json(j);
}

std::vector<EvolveRow> evolve_rows(const ConcurrenceTrace<double>& trace) {
  std::vector<EvolveRow> rows;
  rows.reserve(trace.times.size());
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    const auto [pa, pb] = pair_amplitudes(trace.pair, t);
    (void)pb;
    const auto rho = evolve_state(trace.pair, trace.rho0, t);
    EvolveRow row;
    row.t = t;
    row.concurrence = trace.values[i];
    row.p_abs = pa.abs();
    row.p_re = pa.value.real();
    row.p_im = pa.value.imag();
    row.rho11 = rho(0, 0).real();
    row.rho22 = rho(1, 1).real();
    row.rho33 = rho(2, 2).real();
    row.rho44 = rho(3, 3).real();
    row.rho14_abs = std::abs(rho(0, 3));
    row.rho23_abs = std::abs(rho(1, 2));
    rows.push_back(row);
  }
  return rows;
}

void write_evolve_csv(std::ostream& os, const std::vector<EvolveRow>& rows) {
  os << "t,concurrence,p_abs,p_re,p_im,rho11,rho22,rho33,rho44,rho14_abs,rho23_abs\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.concurrence) << ','
       << format_double(r.p_abs) << ',' << format_double(r.p_re) << ',' << format_double(r.p_im)
       << ',' << format_double(r.rho11) << ',' << format_double(r.rho22) << ','
       << format_double(r.rho33) << ',' << format_double(r.rho44) << ','
       << format_double(r.rho14_abs) << ',' << format_double(r.rho23_abs) << '\n';
  }
}

nlohmann::json evolve_to_json(const std::vector<EvolveRow>& rows) {
  nlohmann::json cols;
  const auto col = [&](const char* name, auto get) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(get(r));
    cols[name] = std::move(arr);
  };
  col("t", [](const EvolveRow& r) { return r.t; });
  col("concurrence", [](const EvolveRow& r) { return r.concurrence; });
  col("p_abs", [](const EvolveRow& r) { return r.p_abs; });
  col("p_re", [](const EvolveRow& r) { return r.p_re; });
  col("p_im", [](const EvolveRow& r) { return r.p_im; });
  col("rho11", [](const EvolveRow& r) { return r.rho11; });
  col("rho22", [](const EvolveRow& r) { return r.rho22; });
  col("rho33", [](const EvolveRow& r) { return r.rho33; });
  col("rho44", [](const EvolveRow& r) { return r.rho44; });
  col("rho14_abs", [](const EvolveRow& r) { return r.rho14_abs; });
  col("rho23_abs", [](const EvolveRow& r) { return r.rho23_abs; });
  return cols;
}

void write_sweep_csv(std::ostream& os, const std::string& axis, const SweepSurface<double>& s) {
  os << axis << ",t,concurrence\n";
  for (std::size_t i = 0; i < s.axis_values.size(); ++i) {
    const auto& trace = s.traces[i];
    for (std::size_t k = 0; k < trace.times.size(); ++k)
      os << format_double(s.axis_values[i]) << ',' << format_double(trace.times[k]) << ','
         << format_double(trace.values[k]) << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& os, const std::string& axis,
                             const SweepSurface<double>& s) {
  os << axis << ",regime,first_death_time,n_revivals\n";
  for (std::size_t i = 0; i < s.axis_values.size(); ++i) {
    const auto& ev = s.events[i];
    os << format_double(s.axis_values[i]) << ',' << regime_name(ev.regime) << ',';
    if (!ev.death_times.empty()) os << format_double(ev.death_times.front());
    os << ',' << ev.revival_times.size() << '\n';
  }
}

void write_trace_svg(std::ostream& os, const ConcurrenceTrace<double>& trace,
                     const std::string& title) {
  const int w = 840, h = 520, ml = 70, mr = 20, mt = 40, mb = 50;
  const double t_max = trace.times.empty() ? 1.0 : trace.times.back();
  const auto sx = [&](double t) { return ml + (w - ml - mr) * (t_max > 0 ? t / t_max : 0.0); };
  const auto sy = [&](double c) { return mt + (h - mt - mb) * (1.0 - c); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << sy(0) << "\" x2=\"" << w - mr << "\" y2=\"" << sy(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << sy(0) << "\" x2=\"" << ml << "\" y2=\"" << sy(1)
     << "\" stroke=\"black\"/>\n";
  for (double c : {0.0, 0.5, 1.0})
    os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(c) + 4
       << "\" text-anchor=\"end\" font-size=\"12\">" << format_double(c) << "</text>\n";
  for (double frac : {0.0, 0.5, 1.0})
    os << "<text x=\"" << sx(frac * t_max) << "\" y=\"" << sy(0) + 20
       << "\" text-anchor=\"middle\" font-size=\"12\">" << format_double(frac * t_max)
       << "</text>\n";
  os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">t (units of 1/gamma)</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << (mt + h - mb) / 2 << ")\">concurrence</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (i) os << ' ';
    os << format_double(sx(trace.times[i])) << ',' << format_double(sy(trace.values[i]));
  }
  os << "\"/>\n</svg>\n";
}

std::vector<std::pair<double, double>> read_spectrum_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::invalid_spec, "cannot open spectrum file '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line.find("omega") == std::string::npos)
    throw Error(Errc::invalid_spec, "spectrum CSV needs a header line 'omega,J'");
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
      std::ostringstream os;
      os << "spectrum CSV line " << line_no << " is not 'omega,J'";
      throw Error(Errc::invalid_spec, os.str());
    }
    try {
      rows.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "spectrum CSV line " << line_no << " has non-numeric fields";
      throw Error(Errc::invalid_spec, os.str());
    }
  }
  return rows;
}

}  // namespace qdl::io
