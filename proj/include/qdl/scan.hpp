#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdl/channels.hpp"
#include "qdl/concurrence.hpp"
#include "qdl/quantum_state.hpp"

// Time-series generation, 1-axis parameter sweeps over the channel
// parameters, and the one-sided pure-state factorization-law checker.

namespace qdl {

template <class Scalar>
struct TimeGrid {
  Scalar t_max{50};
  std::size_t n_points{2000};

  std::vector<Scalar> times() const {
    if (n_points < 2) throw Error(Errc::invalid_spec, "time grid needs at least 2 points");
    if (!(t_max > Scalar(0))) throw Error(Errc::invalid_spec, "time grid needs t_max > 0");
    std::vector<Scalar> t(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
      t[i] = t_max * static_cast<Scalar>(i) / static_cast<Scalar>(n_points - 1);
    return t;
  }
};

// Run row bodies [0, n) on up to `jobs` workers; results land by index, so
// the outcome is identical for any worker count. The first exception thrown
// by any row is rethrown on the calling thread after all workers finish.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Concurrence along the grid for one channel configuration.
template <class Scalar>
ConcurrenceTrace<Scalar> evolve_trace(const QubitPair<Scalar>& pair,
                                      const DensityMatrix<Scalar>& rho0,
                                      const TimeGrid<Scalar>& grid,
                                      const std::string& state_label = "") {
  ConcurrenceTrace<Scalar> trace{grid.times(), {}, pair, rho0, state_label};
  trace.values.reserve(trace.times.size());
  for (Scalar t : trace.times) trace.values.push_back(concurrence_at(pair, rho0, t));
  return trace;
}

enum class SweepAxis { lambda, delta, omega_c, gamma };

inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::delta: return "delta";
    case SweepAxis::omega_c: return "omega_c";
    case SweepAxis::gamma: return "gamma";
  }
  return "?";
}

// One-axis sweep: the axis parameter is applied to both qubits, everything
// else fixed. Axis grids default to logarithmic like the figure axes.
template <class Scalar>
struct SweepSpec {
  ChannelKind channel{ChannelKind::ad};
  DensityMatrix<Scalar> rho0;
  std::string state_label;
  Scalar gamma{1};
  Scalar lambda{1};
  Scalar detuning{0};   // AD detuning or PD central frequency, per channel
  SweepAxis axis{SweepAxis::lambda};
  Scalar axis_min{0.01};
  Scalar axis_max{10};
  std::size_t axis_points{20};
  bool log_axis{true};
  TimeGrid<Scalar> grid{};

  std::vector<Scalar> axis_values() const {
    if (axis_points < 2) throw Error(Errc::invalid_spec, "sweep axis needs at least 2 points");
    if (!(axis_max > axis_min))
      throw Error(Errc::invalid_spec, "sweep axis needs axis_max > axis_min");
    if (log_axis && !(axis_min > Scalar(0)))
      throw Error(Errc::invalid_spec, "logarithmic axis needs axis_min > 0");
    std::vector<Scalar> v(axis_points);
    for (std::size_t i = 0; i < axis_points; ++i) {
      const Scalar u = static_cast<Scalar>(i) / static_cast<Scalar>(axis_points - 1);
      v[i] = log_axis ? axis_min * std::pow(axis_max / axis_min, u)
                      : axis_min + (axis_max - axis_min) * u;
    }
    return v;
  }

  QubitPair<Scalar> pair_at(Scalar axis_value) const {
    Scalar g = gamma, l = lambda, d = detuning;
    switch (axis) {
      case SweepAxis::gamma: g = axis_value; break;
      case SweepAxis::lambda: l = axis_value; break;
      case SweepAxis::delta:
        if (channel != ChannelKind::ad)
          throw Error(Errc::invalid_spec, "delta axis applies to the ad channel only");
        d = axis_value;
        break;
      case SweepAxis::omega_c:
        if (channel != ChannelKind::pd)
          throw Error(Errc::invalid_spec, "omega_c axis applies to the pd channel only");
        d = axis_value;
        break;
    }
    if (channel == ChannelKind::ad) {
      const AdParams<Scalar> p{g, l, d};
      return QubitPair<Scalar>::ad(p, p);
    }
    const PdParams<Scalar> p{g, l, d};
    return QubitPair<Scalar>::pd(p, p);
  }
};

template <class Scalar>
struct SweepSurface {
  std::vector<Scalar> axis_values;
  std::vector<ConcurrenceTrace<Scalar>> traces;  // aligned with axis_values
  std::vector<EsdEvents<Scalar>> events;
};

template <class Scalar>
SweepSurface<Scalar> run_sweep(const SweepSpec<Scalar>& spec, unsigned jobs = 1,
                               const ClassifyOptions<Scalar>& opt = {}) {
  SweepSurface<Scalar> surface;
  surface.axis_values = spec.axis_values();
  const std::size_t n = surface.axis_values.size();
  surface.traces.resize(n, ConcurrenceTrace<Scalar>{{}, {}, spec.pair_at(surface.axis_values[0]),
                                                    spec.rho0, spec.state_label});
  surface.events.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto pair = spec.pair_at(surface.axis_values[i]);
    surface.traces[i] = evolve_trace(pair, spec.rho0, spec.grid, spec.state_label);
    surface.events[i] = detect_events(surface.traces[i], opt.eps, Scalar(1e-6), opt);
  });
  return surface;
}

template <class Scalar>
struct FactorizationReport {
  Scalar c0{0};
  Scalar max_deviation{0};  // max_t | C(t) - |p(t)| C(0) |
  bool pass{false};
};

// Factorization law for one-sided noise on a pure state: C(t) = |p(t)| C(0).
// The channel acts on qubit A only; qubit B evolves trivially (p = 1).
template <class Scalar>
FactorizationReport<Scalar> factorization_check(ChannelKind channel,
                                                const std::variant<AdParams<Scalar>, PdParams<Scalar>>& params,
                                                const DensityMatrix<Scalar>& pure_state,
                                                const TimeGrid<Scalar>& grid,
                                                Scalar tol = Scalar(1e-9)) {
  const Scalar purity = pure_state.purity();
  if (std::abs(purity - Scalar(1)) > Scalar(1e-10)) {
    std::ostringstream os;
    os << "tr(rho^2) = " << purity << " differs from 1";
    throw Error(Errc::not_pure_state, os.str());
  }

  FactorizationReport<Scalar> report;
  report.c0 = concurrence(pure_state);
  for (Scalar t : grid.times()) {
    Complex<Scalar> pa;
    DensityMatrix<Scalar> rho = [&] {
      if (channel == ChannelKind::ad) {
        pa = ad_amplitude(std::get<AdParams<Scalar>>(params), t).value;
        return ad_evolve(pure_state, pa, Complex<Scalar>(1));
      }
      pa = pd_amplitude(std::get<PdParams<Scalar>>(params), t).value;
      return pd_evolve(pure_state, pa.real(), Scalar(1));
    }();
    const Scalar dev = std::abs(concurrence(rho) - std::abs(pa) * report.c0);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

}  // namespace qdl
