#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

// Core scalar and matrix aliases shared by all qdl modules.
//
// Two-qubit objects use the product basis {|++>, |+->, |-+>, |-->} with
// qubit A as the leading (slow) index; all matrix I/O follows this ordering.

namespace qdl {

template <class Scalar>
using Complex = std::complex<Scalar>;

template <class Scalar>
using Matrix2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <class Scalar>
using Matrix4 = Eigen::Matrix<Complex<Scalar>, 4, 4>;

enum class Errc {
  not_hermitian,
  trace_not_one,
  not_positive,
  incomplete_kraus_set,
  unknown_preset,
  amplitude_out_of_range,
  non_real_amplitude,
  not_x_form,
  empty_trace,
  eigen_solver_failure,
  spurious_eigenvalue,
  not_pure_state,
  step_too_large,
  quadrature_non_convergence,
  tabulation_out_of_range,
  invalid_spec,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_hermitian: return "NotHermitian";
    case Errc::trace_not_one: return "TraceNotOne";
    case Errc::not_positive: return "NotPositive";
    case Errc::incomplete_kraus_set: return "IncompleteKrausSet";
    case Errc::unknown_preset: return "UnknownPreset";
    case Errc::amplitude_out_of_range: return "AmplitudeOutOfRange";
    case Errc::non_real_amplitude: return "NonRealAmplitude";
    case Errc::not_x_form: return "NotXForm";
    case Errc::empty_trace: return "EmptyTrace";
    case Errc::eigen_solver_failure: return "EigenSolverFailure";
    case Errc::spurious_eigenvalue: return "SpuriousEigenvalue";
    case Errc::not_pure_state: return "NotPureState";
    case Errc::step_too_large: return "StepTooLarge";
    case Errc::quadrature_non_convergence: return "QuadratureNonConvergence";
    case Errc::tabulation_out_of_range: return "TabulationOutOfRange";
    case Errc::invalid_spec: return "InvalidSpec";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Largest entrywise magnitude, usable on any dense Eigen expression.
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real max_abs(
    const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

template <class Scalar>
Matrix2<Scalar> pauli_y() {
  Matrix2<Scalar> y;
  const Complex<Scalar> i(0, 1);
  y << Complex<Scalar>(0), -i, i, Complex<Scalar>(0);
  return y;
}

}  // namespace qdl
