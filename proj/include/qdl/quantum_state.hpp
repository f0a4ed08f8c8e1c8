#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdl/types.hpp"

// Two-qubit states and operator-sum (Kraus) maps.

namespace qdl {

inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr double kKrausTol = 1e-12;

// Validated two-qubit density matrix: Hermitian, unit trace, positive
// semidefinite up to numerical slack. Immutable after construction.
template <class Scalar>
class DensityMatrix {
 public:
  static DensityMatrix make(const Matrix4<Scalar>& m) {
    const Scalar herm_dev = max_abs((m - m.adjoint()).eval());
    if (herm_dev > Scalar(kHermTol)) {
      std::ostringstream os;
      os << "matrix is not Hermitian; worst |rho_ij - conj(rho_ji)| = " << herm_dev;
      throw Error(Errc::not_hermitian, os.str());
    }
    const Scalar trace_dev = std::abs(m.trace() - Complex<Scalar>(1));
    if (trace_dev > Scalar(kTraceTol)) {
      std::ostringstream os;
      os << "trace deviates from 1 by " << trace_dev;
      throw Error(Errc::trace_not_one, os.str());
    }
    const Matrix4<Scalar> h = ((m + m.adjoint()) / Scalar(2)).eval();
    Eigen::SelfAdjointEigenSolver<Matrix4<Scalar>> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw Error(Errc::eigen_solver_failure, "eigenvalue solve failed during validation");
    const Scalar min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -Scalar(kPsdSlack)) {
      std::ostringstream os;
      os << "matrix is not positive semidefinite; smallest eigenvalue = " << min_eig;
      throw Error(Errc::not_positive, os.str());
    }
    return DensityMatrix(m);
  }

  const Matrix4<Scalar>& matrix() const { return m_; }
  Complex<Scalar> operator()(int r, int c) const { return m_(r, c); }

  Scalar purity() const { return (m_ * m_).trace().real(); }

 private:
  explicit DensityMatrix(Matrix4<Scalar> m) : m_(std::move(m)) {}
  Matrix4<Scalar> m_;
};

template <class Scalar>
DensityMatrix<Scalar> make_density(const Matrix4<Scalar>& m) {
  return DensityMatrix<Scalar>::make(m);
}

// Kronecker product in the A-major basis ordering: row index = 2*a + b.
template <class DerivedA, class DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  constexpr int ra = DerivedA::RowsAtCompileTime;
  constexpr int ca = DerivedA::ColsAtCompileTime;
  constexpr int rb = DerivedB::RowsAtCompileTime;
  constexpr int cb = DerivedB::ColsAtCompileTime;
  static_assert(ra > 0 && ca > 0 && rb > 0 && cb > 0, "tensor needs fixed-size operands");
  using S = typename DerivedA::Scalar;
  Eigen::Matrix<S, ra * rb, ca * cb> out;
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < ca; ++j)
      out.template block<rb, cb>(i * rb, j * cb) = a(i, j) * b.derived();
  return out;
}

// Ordered operation elements of a quantum channel, Sum_i E_i^dag E_i = 1.
template <class Scalar, int N>
struct KrausSet {
  std::vector<Eigen::Matrix<Complex<Scalar>, N, N>> ops;
};

template <class Scalar>
using KrausSet2 = KrausSet<Scalar, 2>;
template <class Scalar>
using KrausSet4 = KrausSet<Scalar, 4>;

template <class Scalar, int N>
Scalar completeness_defect(const KrausSet<Scalar, N>& ks) {
  Eigen::Matrix<Complex<Scalar>, N, N> sum = Eigen::Matrix<Complex<Scalar>, N, N>::Zero();
  for (const auto& e : ks.ops) sum += e.adjoint() * e;
  return max_abs((sum - Eigen::Matrix<Complex<Scalar>, N, N>::Identity()).eval());
}

template <class Scalar, int N>
void require_complete(const KrausSet<Scalar, N>& ks, Scalar tol) {
  const Scalar defect = completeness_defect(ks);
  if (defect > tol) {
    std::ostringstream os;
    os << "Sum E_i^dag E_i deviates from identity by " << defect;
    throw Error(Errc::incomplete_kraus_set, os.str());
  }
}

// Two-qubit operation elements from per-qubit ones, enumerated A-major:
// {E1xF1, E1xF2, E2xF1, E2xF2, ...}.
template <class Scalar>
KrausSet4<Scalar> two_qubit_kraus(const KrausSet2<Scalar>& a, const KrausSet2<Scalar>& b) {
  KrausSet4<Scalar> out;
  out.ops.reserve(a.ops.size() * b.ops.size());
  for (const auto& ea : a.ops)
    for (const auto& eb : b.ops) out.ops.push_back(tensor(ea, eb));
  return out;
}

// rho(t) = Sum_i K_i rho(0) K_i^dag. The set must be complete within 1e-10.
template <class Scalar>
DensityMatrix<Scalar> apply_kraus(const KrausSet4<Scalar>& ks, const DensityMatrix<Scalar>& rho0) {
  require_complete(ks, Scalar(1e-10));
  Matrix4<Scalar> out = Matrix4<Scalar>::Zero();
  for (const auto& k : ks.ops) out += k * rho0.matrix() * k.adjoint();
  return make_density(out);
}

enum class Preset { x1, x2, bell_phi_plus, bell_psi_plus };

template <class Scalar>
DensityMatrix<Scalar> preset_state(Preset name) {
  Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
  const Scalar third = Scalar(1) / Scalar(3);
  switch (name) {
    case Preset::x1:
      m(0, 0) = third * third;
      m(1, 1) = third;
      m(2, 2) = third;
      m(1, 2) = third;
      m(2, 1) = third;
      m(3, 3) = Scalar(2) * third * third;
      break;
    case Preset::x2: {
      const Scalar r2 = std::sqrt(Scalar(2));
      m(0, 0) = Scalar(2) * third;
      m(3, 3) = third;
      m(0, 3) = r2 * third;
      m(3, 0) = r2 * third;
      break;
    }
    case Preset::bell_phi_plus:
      m(0, 0) = Scalar(0.5);
      m(3, 3) = Scalar(0.5);
      m(0, 3) = Scalar(0.5);
      m(3, 0) = Scalar(0.5);
      break;
    case Preset::bell_psi_plus:
      m(1, 1) = Scalar(0.5);
      m(2, 2) = Scalar(0.5);
      m(1, 2) = Scalar(0.5);
      m(2, 1) = Scalar(0.5);
      break;
  }
  return make_density(m);
}

template <class Scalar>
DensityMatrix<Scalar> preset_state(std::string_view name) {
  if (name == "x1") return preset_state<Scalar>(Preset::x1);
  if (name == "x2") return preset_state<Scalar>(Preset::x2);
  if (name == "bell_phi_plus") return preset_state<Scalar>(Preset::bell_phi_plus);
  if (name == "bell_psi_plus") return preset_state<Scalar>(Preset::bell_psi_plus);
  throw Error(Errc::unknown_preset, "no preset named '" + std::string(name) + "'");
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"x1", "x2", "bell_phi_plus", "bell_psi_plus"};
  return names;
}

// True iff all entries off the diagonal and anti-diagonal are below tol.
template <class Scalar>
bool is_x_form(const DensityMatrix<Scalar>& rho, Scalar tol) {
  const auto& m = rho.matrix();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      if (r == c || r + c == 3) continue;
      if (std::abs(m(r, c)) >= tol) return false;
    }
  return true;
}

}  // namespace qdl
