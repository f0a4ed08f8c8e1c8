#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qdl/channels.hpp"
#include "qdl/quantum_state.hpp"
#include "qdl/types.hpp"

// Wootters concurrence (general and X-state fast path) and entanglement
// event analytics: sudden death, revival, regime classification.

namespace qdl {

// C = max{0, sqrt(mu1) - sqrt(mu2) - sqrt(mu3) - sqrt(mu4)} with mu_i the
// descending eigenvalues of rho (sy x sy) rho* (sy x sy).
//
// Numerically the sqrt(mu_i) are taken as the singular values of
// W = L^T (sy x sy) L for any factorization rho = L L^dag: with Y = sy x sy
// (real symmetric) and rho* = conj(L) L^T, the nonzero spectrum of
// rho Y rho* Y equals that of W^dag W by a cyclic permutation. A direct
// eigensolve of the non-normal product loses O(sqrt(eps)) on the zero modes
// of rank-deficient states, which the square root then inflates far beyond
// the 1e-9 accuracy this function must deliver on pure inputs; in the SVD
// form the zero modes of rho drop out of W exactly.
template <class Scalar>
Scalar concurrence(const DensityMatrix<Scalar>& rho) {
  static const Matrix4<Scalar> yy = tensor(pauli_y<Scalar>(), pauli_y<Scalar>());
  Eigen::SelfAdjointEigenSolver<Matrix4<Scalar>> es(rho.matrix());
  if (es.info() != Eigen::Success)
    throw Error(Errc::eigen_solver_failure, "eigenvalue solve of the state failed");

  Eigen::Matrix<Scalar, 4, 1> d = es.eigenvalues();
  for (int i = 0; i < 4; ++i) {
    if (d(i) < -Scalar(1e-9)) {
      std::ostringstream os;
      os << "state eigenvalue " << d(i) << " below the rounding band";
      throw Error(Errc::spurious_eigenvalue, os.str());
    }
    // populations at rounding scale are exact zeros of the factor
    if (d(i) < Scalar(1e-14)) d(i) = Scalar(0);
  }
  const Matrix4<Scalar> l = es.eigenvectors() * d.cwiseSqrt().asDiagonal();
  const Matrix4<Scalar> w = l.transpose() * yy * l;
  Eigen::JacobiSVD<Matrix4<Scalar>> svd(w);
  const auto& s = svd.singularValues();  // descending
  const Scalar c = s(0) - s(1) - s(2) - s(3);
  return std::clamp(c, Scalar(0), Scalar(1));
}

// X-state fast path: C = 2 max{0, |rho14| - sqrt(rho22 rho33),
//                               |rho23| - sqrt(rho11 rho44)}.
template <class Scalar>
Scalar concurrence_x(const DensityMatrix<Scalar>& rho) {
  if (!is_x_form(rho, Scalar(1e-8)))
    throw Error(Errc::not_x_form, "state has entries off the diagonal and anti-diagonal");
  const auto& m = rho.matrix();
  const auto diag = [&](int i) { return std::max(Scalar(0), m(i, i).real()); };
  const Scalar b1 = std::abs(m(0, 3)) - std::sqrt(diag(1) * diag(2));
  const Scalar b2 = std::abs(m(1, 2)) - std::sqrt(diag(0) * diag(3));
  return std::clamp(Scalar(2) * std::max({Scalar(0), b1, b2}), Scalar(0), Scalar(1));
}

// Concurrence of the evolved state at time t; X fast path when applicable.
template <class Scalar>
Scalar concurrence_at(const QubitPair<Scalar>& pair, const DensityMatrix<Scalar>& rho0, Scalar t) {
  const DensityMatrix<Scalar> rho = evolve_state(pair, rho0, t);
  if (is_x_form(rho, Scalar(1e-10))) return concurrence_x(rho);
  return concurrence(rho);
}

// Concurrence samples on a time grid, with the generating channel and
// initial state kept so events can be refined on the exact C(t).
template <class Scalar>
struct ConcurrenceTrace {
  std::vector<Scalar> times;   // strictly increasing, units of 1/gamma
  std::vector<Scalar> values;  // clamped to [0, 1]
  QubitPair<Scalar> pair;
  DensityMatrix<Scalar> rho0;
  std::string state_label;
};

enum class Regime { stationary, persistent_oscillation, damped_oscillation, monotonic_decay };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::stationary: return "stationary";
    case Regime::persistent_oscillation: return "persistent_oscillation";
    case Regime::damped_oscillation: return "damped_oscillation";
    case Regime::monotonic_decay: return "monotonic_decay";
  }
  return "?";
}

template <class Scalar>
struct EsdEvents {
  std::vector<Scalar> death_times;    // alternate with revivals, death first
  std::vector<Scalar> revival_times;
  Regime regime{Regime::stationary};
};

// Classification thresholds; the defaults are artifact choices and can be
// overridden from the CLI.
template <class Scalar>
struct ClassifyOptions {
  Scalar stationary_band{0.01};  // peak-to-peak variation relative to C(0)
  Scalar peak_ratio{0.5};        // last/first peak ratio for persistent oscillation
  Scalar eps{1e-9};              // floor below which peaks are noise
};

// Interior local maxima of the sampled trace above the floor.
template <class Scalar>
std::vector<std::size_t> local_maxima(const std::vector<Scalar>& v, Scalar floor) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > floor) peaks.push_back(i);
  return peaks;
}

// Regime rules: stationary if the peak-to-peak variation is below
// stationary_band * C(0); persistent oscillation if at least two interior
// maxima survive with last/first ratio above peak_ratio; damped oscillation
// if any interior maximum survives; monotonic decay otherwise.
template <class Scalar>
Regime classify_dynamics(const ConcurrenceTrace<Scalar>& trace,
                         const ClassifyOptions<Scalar>& opt = {}) {
  if (trace.values.empty()) throw Error(Errc::empty_trace, "no samples to classify");
  const auto& v = trace.values;
  const Scalar c0 = v.front();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi - *lo < opt.stationary_band * c0) return Regime::stationary;
  const auto peaks = local_maxima(v, opt.eps);
  if (peaks.size() >= 2 && v[peaks.back()] > opt.peak_ratio * v[peaks.front()])
    return Regime::persistent_oscillation;
  if (!peaks.empty()) return Regime::damped_oscillation;
  return Regime::monotonic_decay;
}

namespace detail {

// Locate the crossing of C(t) = eps inside [lo, hi] by bisection on the
// closed-form trace; the bracket is assumed to straddle the crossing.
template <class Scalar, class Fn>
Scalar bisect_crossing(Fn&& c_of_t, Scalar lo, Scalar hi, Scalar eps, Scalar tol) {
  Scalar flo = c_of_t(lo) - eps;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    const Scalar fmid = c_of_t(mid) - eps;
    if ((flo > Scalar(0)) == (fmid > Scalar(0))) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / Scalar(2);
}

}  // namespace detail

// Sudden-death and revival detection. A death is the first grid crossing
// where C falls below eps after being above it, refined by bisection on the
// exact C(t); a revival is the subsequent rise above eps. A trace that
// starts below eps is treated as pre-history: events are only counted after
// the first rise, keeping the death-first alternation.
template <class Scalar>
EsdEvents<Scalar> detect_events(const ConcurrenceTrace<Scalar>& trace, Scalar eps = Scalar(1e-9),
                                Scalar refine_tol = Scalar(1e-6),
                                const ClassifyOptions<Scalar>& opt = {}) {
  if (trace.values.empty() || trace.times.empty())
    throw Error(Errc::empty_trace, "no samples to scan for events");
  if (!(eps > Scalar(0))) throw Error(Errc::invalid_spec, "eps must be positive");

  const auto c_of_t = [&](Scalar t) { return concurrence_at(trace.pair, trace.rho0, t); };

  EsdEvents<Scalar> ev;
  bool alive = trace.values.front() > eps;
  bool counting = alive;
  for (std::size_t i = 0; i + 1 < trace.values.size(); ++i) {
    const bool next_alive = trace.values[i + 1] > eps;
    if (alive == next_alive) continue;
    if (!alive && !counting) {
      counting = true;  // first rise of a trace born dead: pre-history ends
      alive = true;
      continue;
    }
    const Scalar t = detail::bisect_crossing(c_of_t, trace.times[i], trace.times[i + 1], eps,
                                             refine_tol);
    if (alive)
      ev.death_times.push_back(t);
    else
      ev.revival_times.push_back(t);
    alive = next_alive;
  }
  ev.regime = classify_dynamics(trace, opt);
  return ev;
}

}  // namespace qdl
