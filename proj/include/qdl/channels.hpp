#pragma once

#include <cmath>
#include <sstream>
#include <utility>
#include <variant>

#include "qdl/quantum_state.hpp"
#include "qdl/types.hpp"

// Closed-form decoherence amplitudes and channel maps for local amplitude
// damping and phase damping with Lorentzian coupling spectra. All rates are
// expressed in units of the qubit decay rate gamma; times in 1/gamma.

namespace qdl {

template <class Scalar>
struct AdParams {
  Scalar gamma{1};   // decay rate of the upper level, sets the time unit
  Scalar lambda{1};  // coupling bandwidth (1/lambda = environment memory time)
  Scalar delta{0};   // detuning of the spectral peak from resonance
};

template <class Scalar>
struct PdParams {
  Scalar gamma{1};
  Scalar lambda{1};
  Scalar omega_c{0};  // central frequency of the coupling spectrum, >= 0
};

template <class Scalar>
void validate(const AdParams<Scalar>& p) {
  if (!(p.gamma > Scalar(0)) || !(p.lambda > Scalar(0)))
    throw Error(Errc::invalid_spec, "amplitude damping requires gamma > 0 and lambda > 0");
}

template <class Scalar>
void validate(const PdParams<Scalar>& p) {
  if (!(p.gamma > Scalar(0)) || !(p.lambda > Scalar(0)))
    throw Error(Errc::invalid_spec, "phase damping requires gamma > 0 and lambda > 0");
  if (p.omega_c < Scalar(0))
    throw Error(Errc::invalid_spec, "phase damping requires omega_c >= 0");
}

// Complex decay amplitude p(t); |p| <= 1 for all t >= 0 and p(0) = 1.
// Phase damping amplitudes are real.
template <class Scalar>
struct DecayAmplitude {
  Complex<Scalar> value{1};

  Scalar abs() const { return std::abs(value); }
};

enum class ChannelKind { ad, pd };

// Per-qubit noise parameters; both qubits see the same channel kind.
template <class Scalar>
struct QubitPair {
  std::variant<std::pair<AdParams<Scalar>, AdParams<Scalar>>,
               std::pair<PdParams<Scalar>, PdParams<Scalar>>>
      params;

  static QubitPair ad(AdParams<Scalar> a, AdParams<Scalar> b) {
    validate(a);
    validate(b);
    return QubitPair{std::make_pair(a, b)};
  }
  static QubitPair pd(PdParams<Scalar> a, PdParams<Scalar> b) {
    validate(a);
    validate(b);
    return QubitPair{std::make_pair(a, b)};
  }

  ChannelKind kind() const {
    return params.index() == 0 ? ChannelKind::ad : ChannelKind::pd;
  }

  QubitPair swapped() const {
    QubitPair out = *this;
    std::visit([](auto& pr) { std::swap(pr.first, pr.second); }, out.params);
    return out;
  }
};

// d = sqrt((lambda - i*delta)^2 - 2*gamma*lambda), principal branch. The
// amplitude below is even in d, so the branch choice cannot affect results.
template <class Scalar>
Complex<Scalar> ad_d(const AdParams<Scalar>& p) {
  const Complex<Scalar> lmid(p.lambda, -p.delta);
  return std::sqrt(lmid * lmid - Scalar(2) * p.gamma * p.lambda);
}

namespace detail {

// Amplitude with an explicit root of d^2; used to verify branch invariance.
// Evaluated as a sum of two exponentials so that large lambda*t cannot
// overflow cosh/sinh. Near d = 0 the 0/0 form is replaced by its series:
// cosh(x) ~ 1 + x^2/2, sinh(x)/x ~ 1 + x^2/6, truncation below 1e-13.
template <class Scalar>
Complex<Scalar> ad_amplitude_branch(const AdParams<Scalar>& p, Scalar t, Complex<Scalar> d) {
  if (t == Scalar(0)) return Complex<Scalar>(1);
  const Complex<Scalar> lmid(p.lambda, -p.delta);
  const Complex<Scalar> x = d * t / Scalar(2);
  if (std::abs(x) < Scalar(1e-3)) {
    const Complex<Scalar> x2 = x * x;
    const Complex<Scalar> ch = Scalar(1) + x2 / Scalar(2);
    const Complex<Scalar> shx = Scalar(1) + x2 / Scalar(6);  // sinh(x)/x
    return std::exp(-lmid * t / Scalar(2)) * (ch + lmid * (t / Scalar(2)) * shx);
  }
  const Complex<Scalar> r = lmid / d;
  const Complex<Scalar> ep = std::exp((d - lmid) * t / Scalar(2));
  const Complex<Scalar> em = std::exp((-d - lmid) * t / Scalar(2));
  return ((Scalar(1) + r) * ep + (Scalar(1) - r) * em) / Scalar(2);
}

}  // namespace detail

// p(t) = e^{-(lambda - i delta)t/2} [cosh(dt/2) + ((lambda - i delta)/d) sinh(dt/2)].
template <class Scalar>
DecayAmplitude<Scalar> ad_amplitude(const AdParams<Scalar>& p, Scalar t) {
  return {detail::ad_amplitude_branch(p, t, ad_d(p))};
}

enum class AdRegime { single_mode, weak_damped_osc, decoupled, markovian };

// Asymptotic forms of p(t) in the four parameter regimes.
template <class Scalar>
Complex<Scalar> ad_limit_amplitude(AdRegime regime, const AdParams<Scalar>& p, Scalar t) {
  const Complex<Scalar> i(0, 1);
  switch (regime) {
    case AdRegime::single_mode: {
      // lambda << delta << gamma; oscillates with no damping.
      const Scalar wd = std::sqrt(Scalar(2) * p.gamma * p.lambda + p.delta * p.delta);
      return std::exp(i * p.delta * t / Scalar(2)) *
             (std::cos(wd * t / Scalar(2)) -
              i * (p.delta / wd) * std::sin(wd * t / Scalar(2)));
    }
    case AdRegime::weak_damped_osc:
      // delta << lambda << gamma.
      return std::exp(-p.lambda * t / Scalar(2)) *
             std::cos(std::sqrt(p.gamma * p.lambda / Scalar(2)) * t);
    case AdRegime::decoupled:
      // delta >> gamma >> lambda; coupling ineffective.
      return Complex<Scalar>(1);
    case AdRegime::markovian:
      // lambda >> gamma >> delta.
      return std::exp(Complex<Scalar>(-p.gamma * t / Scalar(2)));
  }
  return Complex<Scalar>(1);
}

template <class Scalar>
void require_amplitude_in_range(Complex<Scalar> p) {
  const Scalar a = std::abs(p);
  if (a > Scalar(1) + Scalar(1e-12)) {
    std::ostringstream os;
    os << "|p| = " << a << " exceeds 1";
    throw Error(Errc::amplitude_out_of_range, os.str());
  }
}

// Amplitude damping operation elements E1 = [[p,0],[0,1]], E2 = [[0,0],[q,0]],
// q = sqrt(1 - |p|^2).
template <class Scalar>
KrausSet2<Scalar> ad_kraus(const DecayAmplitude<Scalar>& p) {
  require_amplitude_in_range(p.value);
  const Scalar q = std::sqrt(std::max(Scalar(0), Scalar(1) - std::norm(p.value)));
  Matrix2<Scalar> e1 = Matrix2<Scalar>::Zero();
  Matrix2<Scalar> e2 = Matrix2<Scalar>::Zero();
  e1(0, 0) = p.value;
  e1(1, 1) = Scalar(1);
  e2(1, 0) = q;
  return {{e1, e2}};
}

// Phase damping operation elements E1 = [[p,0],[0,1]], E2 = [[q,0],[0,0]];
// p must be real in [0, 1].
template <class Scalar>
KrausSet2<Scalar> pd_kraus(const DecayAmplitude<Scalar>& p) {
  if (std::abs(p.value.imag()) > Scalar(1e-12)) {
    std::ostringstream os;
    os << "phase damping amplitude must be real; Im p = " << p.value.imag();
    throw Error(Errc::non_real_amplitude, os.str());
  }
  const Scalar pr = p.value.real();
  if (pr < -Scalar(1e-12) || pr > Scalar(1) + Scalar(1e-12)) {
    std::ostringstream os;
    os << "phase damping amplitude p = " << pr << " outside [0, 1]";
    throw Error(Errc::amplitude_out_of_range, os.str());
  }
  const Scalar q = std::sqrt(std::max(Scalar(0), Scalar(1) - pr * pr));
  Matrix2<Scalar> e1 = Matrix2<Scalar>::Zero();
  Matrix2<Scalar> e2 = Matrix2<Scalar>::Zero();
  e1(0, 0) = pr;
  e1(1, 1) = Scalar(1);
  e2(0, 0) = q;
  return {{e1, e2}};
}

// Element-wise two-qubit amplitude damping map. Complete for arbitrary
// (not only X-form) states; agrees with the Kraus route to rounding.
template <class Scalar>
DensityMatrix<Scalar> ad_evolve(const DensityMatrix<Scalar>& rho0, Complex<Scalar> pa,
                                Complex<Scalar> pb) {
  require_amplitude_in_range(pa);
  require_amplitude_in_range(pb);
  const auto& r = rho0.matrix();
  const Scalar na = std::norm(pa), nb = std::norm(pb);
  const Scalar qa2 = Scalar(1) - na, qb2 = Scalar(1) - nb;

  Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
  m(0, 0) = na * nb * r(0, 0).real();
  m(1, 1) = na * (r(1, 1).real() + qb2 * r(0, 0).real());
  m(2, 2) = nb * (r(2, 2).real() + qa2 * r(0, 0).real());
  m(3, 3) = Scalar(1) - (m(0, 0).real() + m(1, 1).real() + m(2, 2).real());
  m(0, 1) = na * pb * r(0, 1);
  m(0, 2) = pa * nb * r(0, 2);
  m(0, 3) = pa * pb * r(0, 3);
  m(1, 2) = pa * std::conj(pb) * r(1, 2);
  m(1, 3) = pa * (r(1, 3) + qb2 * r(0, 2));
  m(2, 3) = pb * (r(2, 3) + qa2 * r(0, 1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) m(i, j) = std::conj(m(j, i));
  return make_density(m);
}

// Gamma(t) for a Lorentzian spectrum centered at omega_c with bandwidth
// lambda; real and <= 0 for all t >= 0.
template <class Scalar>
Scalar pd_gamma(const PdParams<Scalar>& p, Scalar t) {
  const Scalar s = p.lambda * p.lambda + p.omega_c * p.omega_c;
  const Scalar e = std::exp(-p.lambda * t);
  const Scalar c = std::cos(p.omega_c * t);
  const Scalar sn = std::sin(p.omega_c * t);
  const Scalar bracket =
      ((p.lambda * p.lambda - p.omega_c * p.omega_c) * (Scalar(1) - e * c) +
       Scalar(2) * p.lambda * p.omega_c * e * sn) /
      (s * s);
  return -Scalar(2) * p.gamma * p.lambda * (p.lambda / s * t - bracket);
}

// p(t) = exp(Gamma(t)), real in (0, 1].
template <class Scalar>
DecayAmplitude<Scalar> pd_amplitude(const PdParams<Scalar>& p, Scalar t) {
  return {Complex<Scalar>(std::exp(pd_gamma(p, t)))};
}

enum class PdRegime { narrowband, broadband };

// Asymptotic forms of Gamma(t) for lambda << omega_c and lambda >> omega_c.
template <class Scalar>
Scalar pd_limit_gamma(PdRegime regime, const PdParams<Scalar>& p, Scalar t) {
  const Scalar e = std::exp(-p.lambda * t);
  const Scalar c = std::cos(p.omega_c * t);
  switch (regime) {
    case PdRegime::narrowband:
      return -(Scalar(2) * p.gamma * p.lambda / (p.omega_c * p.omega_c)) *
             (Scalar(1) + p.lambda * t - e * c);
    case PdRegime::broadband:
      return -Scalar(2) * p.gamma * (t - (Scalar(1) - e * c) / p.lambda);
  }
  return Scalar(0);
}

// Element-wise two-qubit phase damping map: populations unchanged,
// coherences scaled by the real amplitudes.
template <class Scalar>
DensityMatrix<Scalar> pd_evolve(const DensityMatrix<Scalar>& rho0, Scalar pa, Scalar pb) {
  for (Scalar p : {pa, pb})
    if (p < -Scalar(1e-12) || p > Scalar(1) + Scalar(1e-12)) {
      std::ostringstream os;
      os << "phase damping amplitude p = " << p << " outside [0, 1]";
      throw Error(Errc::amplitude_out_of_range, os.str());
    }
  const auto& r = rho0.matrix();
  Matrix4<Scalar> m = r;
  m(0, 1) = pb * r(0, 1);
  m(0, 2) = pa * r(0, 2);
  m(0, 3) = pa * pb * r(0, 3);
  m(1, 2) = pa * pb * r(1, 2);
  m(1, 3) = pa * r(1, 3);
  m(2, 3) = pb * r(2, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) m(i, j) = std::conj(m(j, i));
  return make_density(m);
}

// Decay amplitudes for both qubits of a pair at time t.
template <class Scalar>
std::pair<DecayAmplitude<Scalar>, DecayAmplitude<Scalar>> pair_amplitudes(
    const QubitPair<Scalar>& pair, Scalar t) {
  if (pair.kind() == ChannelKind::ad) {
    const auto& pr = std::get<0>(pair.params);
    return {ad_amplitude(pr.first, t), ad_amplitude(pr.second, t)};
  }
  const auto& pr = std::get<1>(pair.params);
  return {pd_amplitude(pr.first, t), pd_amplitude(pr.second, t)};
}

// Evolve a state under the pair's channel to time t via the element-wise maps.
template <class Scalar>
DensityMatrix<Scalar> evolve_state(const QubitPair<Scalar>& pair, const DensityMatrix<Scalar>& rho0,
                                   Scalar t) {
  const auto [pa, pb] = pair_amplitudes(pair, t);
  if (pair.kind() == ChannelKind::ad) return ad_evolve(rho0, pa.value, pb.value);
  return pd_evolve(rho0, pa.value.real(), pb.value.real());
}

}  // namespace qdl
