#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include "qdl/quadrature.hpp"
#include "qdl/types.hpp"

// Independent numerical route to the decay amplitude p(t) and the dephasing
// exponent Gamma(t) for a given environment spectral density: a Volterra
// integro-differential solver for dp/dt = -int_0^t f(t-tau) p(tau) dtau and
// quadrature for Gamma(t) = -2 int dw J(w) 4 sin^2(wt/2) / w^2. Used to
// cross-validate every closed form in channels.hpp.

namespace qdl {

struct SpectralDensity {
  enum class Kind { lorentzian, delta_limit, white_noise, custom_tabulated };

  Kind kind{Kind::lorentzian};
  double gamma{1};
  double lambda{1};
  double delta{0};
  double omega0{0};
  std::vector<std::pair<double, double>> table;  // (omega, J) rows, omega ascending

  // Spectral peak location; the Lorentzian is centered at omega0 - delta.
  double center() const { return omega0 - delta; }

  static SpectralDensity lorentzian(double gamma, double lambda, double delta,
                                    double omega0 = 0) {
    return {Kind::lorentzian, gamma, lambda, delta, omega0, {}};
  }
  static SpectralDensity delta_limit(double gamma, double lambda, double delta,
                                     double omega0 = 0) {
    return {Kind::delta_limit, gamma, lambda, delta, omega0, {}};
  }
  static SpectralDensity white_noise(double gamma) {
    return {Kind::white_noise, gamma, 0, 0, 0, {}};
  }
  static SpectralDensity custom(std::vector<std::pair<double, double>> rows, double omega0 = 0) {
    if (rows.size() < 2)
      throw Error(Errc::invalid_spec, "tabulated spectrum needs at least two rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && !(rows[i].first > rows[i - 1].first))
        throw Error(Errc::invalid_spec, "tabulated omega values must be strictly increasing");
      if (rows[i].second < 0)
        throw Error(Errc::invalid_spec, "tabulated spectrum has negative values");
    }
    SpectralDensity sd{Kind::custom_tabulated, 0, 0, 0, omega0, std::move(rows)};
    return sd;
  }
};

inline double eval_spectral(const SpectralDensity& sd, double omega) {
  switch (sd.kind) {
    case SpectralDensity::Kind::lorentzian: {
      const double u = omega - sd.center();
      return sd.gamma * sd.lambda * sd.lambda / (2 * M_PI * (u * u + sd.lambda * sd.lambda));
    }
    case SpectralDensity::Kind::white_noise:
      return sd.gamma / (2 * M_PI);
    case SpectralDensity::Kind::delta_limit:
      throw Error(Errc::invalid_spec,
                  "delta-limit spectrum is a distribution; use correlation/solve_p");
    case SpectralDensity::Kind::custom_tabulated: {
      if (omega < sd.table.front().first || omega > sd.table.back().first) {
        std::ostringstream os;
        os << "omega = " << omega << " outside tabulated range [" << sd.table.front().first
           << ", " << sd.table.back().first << "]";
        throw Error(Errc::tabulation_out_of_range, os.str());
      }
      auto it = std::lower_bound(sd.table.begin(), sd.table.end(), omega,
                                 [](const auto& row, double w) { return row.first < w; });
      if (it == sd.table.begin()) return it->second;
      const auto& [w1, j1] = *it;
      const auto& [w0, j0] = *(it - 1);
      return j0 + (j1 - j0) * (omega - w0) / (w1 - w0);
    }
  }
  return 0;
}

// Environment correlation kernel f(t) = int dw J(w) e^{i(omega0 - w)t}.
// The Lorentzian transform is analytic; tabulated spectra are integrated
// numerically with the tails below 1e-12 of the peak truncated. The
// white-noise kernel is a delta distribution and is flagged instead of
// evaluated; solve_p treats it symbolically.
inline std::complex<double> correlation(const SpectralDensity& sd, double t) {
  using C = std::complex<double>;
  switch (sd.kind) {
    case SpectralDensity::Kind::lorentzian:
      return 0.5 * sd.gamma * sd.lambda *
             std::exp(C(-sd.lambda * std::abs(t), sd.delta * t));
    case SpectralDensity::Kind::delta_limit:
      return 0.5 * sd.gamma * sd.lambda * std::exp(C(0, sd.delta * t));
    case SpectralDensity::Kind::white_noise:
      throw Error(Errc::invalid_spec,
                  "white-noise kernel is a delta distribution; solve_p handles it analytically");
    case SpectralDensity::Kind::custom_tabulated: {
      double peak = 0;
      for (const auto& [w, j] : sd.table) peak = std::max(peak, j);
      if (peak <= 0) return C(0);
      const double floor = 1e-12 * peak;
      std::size_t lo = 0, hi = sd.table.size() - 1;
      while (lo + 1 < hi && sd.table[lo].second < floor && sd.table[lo + 1].second < floor) ++lo;
      while (hi > lo + 1 && sd.table[hi].second < floor && sd.table[hi - 1].second < floor) --hi;
      const double a = sd.table[lo].first, b = sd.table[hi].first;
      const double panel = std::min(b - a, 2 * M_PI / (4 * std::abs(t) + 1e-12));
      const double tol = 1e-12 * peak * (b - a) + 1e-300;
      return quad::integrate(
          [&](double w) { return eval_spectral(sd, w) * std::exp(C(0, (sd.omega0 - w) * t)); }, a,
          b, tol, panel);
    }
  }
  return C(0);
}

// Correlation kernel sampled on a uniform grid; f(0) is real and
// non-negative for non-negative spectra and f(-t) = conj(f(t)).
struct CorrelationKernel {
  double dt{0};
  std::vector<std::complex<double>> samples;  // f(j * dt), j = 0..n

  std::complex<double> at(std::size_t j) const { return samples[j]; }
};

inline CorrelationKernel sample_correlation(const SpectralDensity& sd, double t_max, double dt) {
  if (!(dt > 0) || !(t_max >= 0))
    throw Error(Errc::invalid_spec, "kernel sampling needs dt > 0 and t_max >= 0");
  CorrelationKernel k;
  k.dt = dt;
  const std::size_t n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  k.samples.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) k.samples[j] = correlation(sd, dt * static_cast<double>(j));
  return k;
}

struct OracleSolution {
  std::vector<double> times;
  std::vector<std::complex<double>> p_values;
  double dt{0};
  double kernel_peak{0};  // |f(0)| used by the step-size guard
};

// March dp/dt = -int_0^t f(t-tau) p(tau) dtau by second-order product
// integration: the kernel is integrated exactly against a piecewise-linear
// interpolant of p (per-interval moments via Simpson sampling of f), and the
// outer derivative uses the trapezoidal rule. Work is O(N^2) with the full
// history kept. The white-noise kernel reduces the equation to
// dp/dt = -(gamma/2) p, which is used in closed form.
inline OracleSolution solve_p(const SpectralDensity& sd, double t_max, double dt) {
  using C = std::complex<double>;
  if (!(dt > 0) || !(t_max > dt))
    throw Error(Errc::invalid_spec, "solve_p needs dt > 0 and t_max > dt");
  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));

  OracleSolution sol;
  sol.dt = dt;
  sol.times.resize(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) sol.times[n] = dt * static_cast<double>(n);

  if (sd.kind == SpectralDensity::Kind::white_noise) {
    sol.kernel_peak = sd.gamma / 2;
    sol.p_values.resize(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n)
      sol.p_values[n] = std::exp(-0.5 * sd.gamma * sol.times[n]);
    sol.p_values[0] = C(1);
    return sol;
  }

  const double f0 = std::abs(correlation(sd, 0.0));
  sol.kernel_peak = f0;
  if (dt * f0 > 0.1) {
    std::ostringstream os;
    os << "dt * |f(0)| = " << dt * f0 << " exceeds the stability bound 0.1";
    throw Error(Errc::step_too_large, os.str());
  }

  // Kernel moments on [t_{m-1}, t_m] against the two linear hat functions;
  // the half-step sampling provides the grid nodes and the midpoints.
  const CorrelationKernel kernel =
      sample_correlation(sd, dt * static_cast<double>(n_steps), dt / 2);
  const auto fn = [&](std::size_t j) { return kernel.at(2 * j); };
  const auto fm = [&](std::size_t j) { return kernel.at(2 * j + 1); };
  std::vector<C> wa(n_steps + 1), wb(n_steps + 1);
  for (std::size_t m = 1; m <= n_steps; ++m) {
    wa[m] = (dt / 6) * (fn(m - 1) + 2.0 * fm(m - 1));  // weight of p at the newer node
    wb[m] = (dt / 6) * (2.0 * fm(m - 1) + fn(m));      // weight of p at the older node
  }

  // Combined history weight of p_{n-k} in the memory integral, split into
  // planar real/imag arrays so the convolution vectorizes.
  std::vector<double> wdr(n_steps + 1, 0.0), wdi(n_steps + 1, 0.0);
  double w_peak = 0;
  for (std::size_t k = 1; k < n_steps; ++k) {
    const C w = wa[k + 1] + wb[k];
    wdr[k] = w.real();
    wdi[k] = w.imag();
    w_peak = std::max(w_peak, std::abs(w));
  }
  // History beyond the decayed kernel support contributes below 1e-18 of the
  // peak weight per term and is dropped.
  std::size_t k_hist = n_steps >= 1 ? n_steps - 1 : 0;
  while (k_hist > 1 && std::hypot(wdr[k_hist], wdi[k_hist]) < 1e-18 * w_peak) --k_hist;

  std::vector<double> pr(n_steps + 1, 0.0), pi(n_steps + 1, 0.0);
  pr[0] = 1.0;
  C mem_prev(0);  // memory integral at the previous node
  const C denom = 1.0 + (dt / 2) * wa[1];
  for (std::size_t n = 0; n < n_steps; ++n) {
    C rest = wb[n + 1] * C(pr[0], pi[0]);
    const std::size_t kmax = std::min(n, k_hist);
    double sr = 0, si = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
      const double ar = wdr[k], ai = wdi[k];
      const double br = pr[n + 1 - k], bi = pi[n + 1 - k];
      sr += ar * br - ai * bi;
      si += ar * bi + ai * br;
    }
    rest += C(sr, si);
    const C next = (C(pr[n], pi[n]) - (dt / 2) * (mem_prev + rest)) / denom;
    pr[n + 1] = next.real();
    pi[n + 1] = next.imag();
    mem_prev = rest + wa[1] * next;
  }
  sol.p_values.resize(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) sol.p_values[n] = C(pr[n], pi[n]);
  sol.p_values[0] = C(1);
  return sol;
}

namespace detail {

inline double msinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Upper bound on the integral of J(w) 4 sin^2(wt/2)/w^2 beyond the window
// edge, using sin^2 <= 1 and the analytic Lorentzian tail mass.
inline double lorentzian_tail_bound(const SpectralDensity& sd, double edge, bool right) {
  const double c = sd.center();
  const double dist = right ? (edge - c) : (c - edge);
  const double mass = (sd.gamma * sd.lambda / (2 * M_PI)) * (M_PI / 2 - std::atan(dist / sd.lambda));
  return 4.0 / (edge * edge) * mass;
}

}  // namespace detail

// Gamma(t) = -2 int dw J(w) 4 sin^2(wt/2)/w^2, the time integrals of the
// double dephasing integral done analytically. The integrand is smooth
// (the w = 0 limit is t^2) and non-negative, so Gamma <= 0 for any
// non-negative spectrum. Delta and white-noise spectra reduce analytically.
inline double gamma_quadrature(const SpectralDensity& sd, double t) {
  if (t == 0) return 0;
  const auto sinc2 = [&](double w) {
    const double s = detail::msinc(0.5 * w * t);
    return t * t * s * s;
  };
  switch (sd.kind) {
    case SpectralDensity::Kind::white_noise:
      // flat J = gamma/2pi: int 4 sin^2(wt/2)/w^2 dw = 2 pi t exactly
      return -2.0 * sd.gamma * t;
    case SpectralDensity::Kind::delta_limit:
      return -sd.gamma * sd.lambda * sinc2(sd.center());
    case SpectralDensity::Kind::custom_tabulated: {
      const double a = sd.table.front().first, b = sd.table.back().first;
      const double panel = std::min(b - a, M_PI / std::abs(t));
      double peak = 0;
      for (const auto& [w, j] : sd.table) peak = std::max(peak, j);
      const double tol = 1e-12 * peak * (b - a) * t * t + 1e-300;
      return -2.0 * quad::integrate([&](double w) { return eval_spectral(sd, w) * sinc2(w); }, a,
                                    b, tol, panel);
    }
    case SpectralDensity::Kind::lorentzian:
      break;
  }

  const double c = sd.center();
  const double scale = sd.gamma * std::min(sd.lambda * t * t, 2 * t) + 1e-6;
  const double tol = 1e-10 * scale;
  const double panel = std::min(sd.lambda, M_PI / std::abs(t));
  const auto g = [&](double w) { return eval_spectral(sd, w) * sinc2(w); };

  double r = 16 * std::max({sd.lambda, 2 * M_PI / std::abs(t), 1e-2 * std::abs(c)});
  double lo = std::min(0.0, c) - r;
  double hi = std::max(0.0, c) + r;
  double integral = quad::integrate(g, lo, hi, tol, panel);
  for (int round = 0;; ++round) {
    const double tail = detail::lorentzian_tail_bound(sd, hi, true) +
                        detail::lorentzian_tail_bound(sd, lo, false);
    if (tail <= std::max(1e-10 * integral, 0.25 * tol)) break;
    if (round >= 48)
      throw Error(Errc::quadrature_non_convergence,
                  "spectral tail failed to drop below tolerance while growing the window");
    const double new_lo = lo - (hi - lo), new_hi = hi + (hi - lo);
    integral += quad::integrate(g, new_lo, lo, tol, panel);
    integral += quad::integrate(g, hi, new_hi, tol, panel);
    lo = new_lo;
    hi = new_hi;
  }
  return -2.0 * integral;
}

}  // namespace qdl
