#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/channels.hpp"
#include "qdl/oracle.hpp"
#include "qdl/scan.hpp"

// Oracle-vs-closed-form validation: the Volterra solver against the
// amplitude-damping amplitude on a (lambda, delta) lattice, the dephasing
// quadrature against the closed-form Gamma(t), and the two limit spectra.

namespace qdl {

struct ValidationCase {
  std::string name;
  double value{0};  // measured error (or order ratio for the order check)
  double tol{0};
  bool pass{false};
  std::string note;
};

struct ValidationOptions {
  double dt_override{0};  // 0 keeps the per-point rule dt = min(0.002, 0.05/lambda)
  double t_max{20};
  unsigned jobs{1};
};

namespace detail {

inline double ad_lattice_dt(double lambda) { return std::min(0.002, 0.05 / lambda); }

inline double max_oracle_error(const SpectralDensity& sd, const AdParams<double>& p, double t_max,
                               double dt) {
  const OracleSolution sol = solve_p(sd, t_max, dt);
  double worst = 0;
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const auto exact = ad_amplitude(p, sol.times[i]).value;
    worst = std::max(worst, std::abs(sol.p_values[i] - exact));
  }
  return worst;
}

}  // namespace detail

inline std::vector<ValidationCase> run_validation_suite(const ValidationOptions& opt = {}) {
  const std::vector<double> lattice = {0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<ValidationCase> cases;

  // Amplitude damping: Volterra solve vs closed form on the lattice.
  std::vector<std::pair<double, double>> points;
  for (double lambda : lattice)
    for (double delta : lattice) points.emplace_back(lambda, delta);
  std::vector<ValidationCase> ad_cases(points.size());
  parallel_for(points.size(), opt.jobs, [&](std::size_t i) {
    const auto [lambda, delta] = points[i];
    ValidationCase c;
    std::ostringstream name;
    name << "ad lambda=" << lambda << " delta=" << delta;
    c.name = name.str();
    c.tol = 1e-5;
    const double dt = opt.dt_override > 0 ? opt.dt_override : detail::ad_lattice_dt(lambda);
    try {
      const AdParams<double> p{1.0, lambda, delta};
      c.value = detail::max_oracle_error(SpectralDensity::lorentzian(1.0, lambda, delta), p,
                                         opt.t_max, dt);
      c.pass = c.value <= c.tol;
    } catch (const Error& e) {
      c.pass = false;
      c.note = e.what();
    }
    ad_cases[i] = c;
  });
  cases.insert(cases.end(), ad_cases.begin(), ad_cases.end());

  // Convergence order at the oscillatory benchmark point: halving dt must
  // shrink the error by about 4x.
  {
    ValidationCase c;
    c.name = "ad volterra order (lambda=0.01 delta=0.01)";
    c.tol = 4.0;
    try {
      const AdParams<double> p{1.0, 0.01, 0.01};
      const auto sd = SpectralDensity::lorentzian(1.0, 0.01, 0.01);
      const double e1 = detail::max_oracle_error(sd, p, 50.0, 0.005);
      const double e2 = detail::max_oracle_error(sd, p, 50.0, 0.0025);
      c.value = e1 / e2;
      c.pass = c.value > 3.0 && c.value < 5.0;
      std::ostringstream note;
      note << "err(dt)=" << e1 << " err(dt/2)=" << e2;
      c.note = note.str();
    } catch (const Error& e) {
      c.pass = false;
      c.note = e.what();
    }
    cases.push_back(c);
  }

  // Phase damping: quadrature of the spectral integral vs closed form.
  for (double lambda : {0.01, 1.0, 10.0})
    for (double omega_c : {0.1, 1.0, 10.0}) {
      ValidationCase c;
      std::ostringstream name;
      name << "pd lambda=" << lambda << " omega_c=" << omega_c;
      c.name = name.str();
      c.tol = 1e-6;
      try {
        const PdParams<double> p{1.0, lambda, omega_c};
        const auto sd = SpectralDensity::lorentzian(1.0, lambda, 0.0, omega_c);
        for (double t : {1.0, 5.0, 20.0})
          c.value = std::max(c.value, std::abs(gamma_quadrature(sd, t) - pd_gamma(p, t)));
        c.pass = c.value <= c.tol;
      } catch (const Error& e) {
        c.pass = false;
        c.note = e.what();
      }
      cases.push_back(c);
    }

  // Single-oscillator spectrum: the Volterra solution must reproduce the
  // undamped oscillation formula.
  {
    ValidationCase c;
    c.name = "delta-limit spectrum vs single-mode formula";
    c.tol = 1e-6;
    try {
      const double dt = opt.dt_override > 0 ? opt.dt_override : 0.005;
      const AdParams<double> p{1.0, 0.01, 0.01};
      const auto sol = solve_p(SpectralDensity::delta_limit(1.0, 0.01, 0.01), 50.0, dt);
      for (std::size_t i = 0; i < sol.times.size(); ++i) {
        const auto lim = ad_limit_amplitude(AdRegime::single_mode, p, sol.times[i]);
        c.value = std::max(c.value, std::abs(sol.p_values[i] - lim));
      }
      c.pass = c.value <= c.tol;
    } catch (const Error& e) {
      c.pass = false;
      c.note = e.what();
    }
    cases.push_back(c);
  }

  // White noise: the solver reduces to dp/dt = -(gamma/2) p.
  {
    ValidationCase c;
    c.name = "white-noise spectrum vs exp(-gamma t/2)";
    c.tol = 1e-10;
    try {
      const double dt = opt.dt_override > 0 ? opt.dt_override : 0.002;
      const auto sol = solve_p(SpectralDensity::white_noise(1.0), 20.0, dt);
      for (std::size_t i = 0; i < sol.times.size(); ++i)
        c.value = std::max(c.value, std::abs(sol.p_values[i] - std::exp(-0.5 * sol.times[i])));
      c.pass = c.value <= c.tol;
    } catch (const Error& e) {
      c.pass = false;
      c.note = e.what();
    }
    cases.push_back(c);
  }

  return cases;
}

}  // namespace qdl
