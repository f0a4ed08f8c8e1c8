#include <doctest.h>

#include "qdl/channels.hpp"
#include "qdl/quantum_state.hpp"
#include "test_helpers.hpp"

using namespace qdl;
using testing::C;

namespace {

Errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a qdl::Error");
  return Errc::invalid_spec;
}

}  // namespace

TEST_CASE("make_density accepts the maximally mixed state and the presets") {
  const Matrix4<double> mixed = Matrix4<double>::Identity() / 4.0;
  CHECK(make_density(mixed).matrix().isApprox(mixed));
  CHECK(std::abs(preset_state<double>("x1").matrix().trace() - C(1)) < 1e-15);
  CHECK(preset_state<double>("x2").purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_density rejects each violated invariant by name") {
  Matrix4<double> m = Matrix4<double>::Identity() / 4.0;

  SUBCASE("trace") {
    m(0, 0) = 0.15;  // trace 0.9
    CHECK(thrown_code([&] { make_density(m); }) == Errc::trace_not_one);
    try {
      make_density(m);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("TraceNotOne") != std::string::npos);
      CHECK(std::string(e.what()).find("0.1") != std::string::npos);
    }
  }
  SUBCASE("hermiticity") {
    m(0, 1) = C(0.1, 0.0);  // no matching conjugate below the diagonal
    CHECK(thrown_code([&] { make_density(m); }) == Errc::not_hermitian);
  }
  SUBCASE("positivity") {
    m.setZero();
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    CHECK(thrown_code([&] { make_density(m); }) == Errc::not_positive);
  }
}

TEST_CASE("tensor follows the A-major Kronecker convention") {
  const Matrix2<double> id = Matrix2<double>::Identity();
  CHECK(tensor(id, id).isApprox(Matrix4<double>::Identity()));

  SUBCASE("diagonal operands") {
    Matrix2<double> a = Matrix2<double>::Zero(), b = Matrix2<double>::Zero();
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    b(0, 0) = 5.0;
    b(1, 1) = 7.0;
    const Matrix4<double> t = tensor(a, b);
    CHECK(t(0, 0) == C(10));
    CHECK(t(1, 1) == C(14));
    CHECK(t(2, 2) == C(15));
    CHECK(t(3, 3) == C(21));
    CHECK(max_abs((t - t.diagonal().asDiagonal().toDenseMatrix()).eval()) == 0.0);
  }

  SUBCASE("damping elements") {
    // p = 0.5 gives q = sqrt(0.75); E1 (x) E2 laid out block-wise by qubit A
    const double q = std::sqrt(0.75);
    const auto ks = ad_kraus<double>({C(0.5)});
    const Matrix4<double> t = tensor(ks.ops[0], ks.ops[1]);
    Matrix4<double> expect = Matrix4<double>::Zero();
    expect(1, 0) = 0.5 * q;  // |+-><++| : qubit B decays while A keeps p
    expect(3, 2) = 1.0 * q;
    CHECK(max_abs((t - expect).eval()) < 1e-15);
    CHECK(t(1, 0) == C(0.5 * q));
  }

  SUBCASE("bilinearity in a random scalar") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
      Matrix2<double> a, b;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          a(r, c) = testing::randn_c(rng);
          b(r, c) = testing::randn_c(rng);
        }
      const C alpha = testing::randn_c(rng);
      CHECK(max_abs((tensor((alpha * a).eval(), b) - alpha * tensor(a, b)).eval()) < 1e-13);
    }
  }
}

TEST_CASE("apply_kraus") {
  std::mt19937_64 rng(22);

  SUBCASE("identity channel leaves any state unchanged") {
    KrausSet4<double> id{{Matrix4<double>::Identity()}};
    const auto rho = testing::random_density(rng);
    CHECK(max_abs((apply_kraus(id, rho).matrix() - rho.matrix()).eval()) < 1e-15);
  }

  SUBCASE("p = 1 amplitude damping is the identity on x1") {
    const auto ks = two_qubit_kraus(ad_kraus<double>({C(1)}), ad_kraus<double>({C(1)}));
    const auto x1 = preset_state<double>("x1");
    CHECK(max_abs((apply_kraus(ks, x1).matrix() - x1.matrix()).eval()) < 1e-15);
  }

  SUBCASE("p = 0 amplitude damping relaxes everything to the ground state") {
    const auto ks = two_qubit_kraus(ad_kraus<double>({C(0)}), ad_kraus<double>({C(0)}));
    Matrix4<double> ground = Matrix4<double>::Zero();
    ground(3, 3) = 1.0;
    for (int it = 0; it < 10; ++it) {
      const auto out = apply_kraus(ks, testing::random_density(rng));
      CHECK(max_abs((out.matrix() - ground).eval()) < 1e-14);
    }
  }

  SUBCASE("incomplete sets are rejected") {
    KrausSet4<double> half{{Matrix4<double>::Identity() * 0.5}};
    CHECK(thrown_code([&] { apply_kraus(half, preset_state<double>("x1")); }) ==
          Errc::incomplete_kraus_set);
  }

  SUBCASE("channel outputs satisfy all state invariants") {
    for (int it = 0; it < 200; ++it) {
      const C pa = testing::random_amplitude(rng);
      const C pb = testing::random_amplitude(rng);
      const bool pd = it % 2;
      const auto ka = pd ? pd_kraus<double>({C(std::abs(pa))}) : ad_kraus<double>({pa});
      const auto kb = pd ? pd_kraus<double>({C(std::abs(pb))}) : ad_kraus<double>({pb});
      const auto ks = two_qubit_kraus(ka, kb);
      CHECK(completeness_defect(ks) < 1e-12);
      const auto out = apply_kraus(ks, testing::random_density(rng));
      CHECK(max_abs((out.matrix() - out.matrix().adjoint()).eval()) < 1e-12);
      CHECK(std::abs(out.matrix().trace() - C(1)) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix4<double>> es(out.matrix(), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }

  SUBCASE("both channels preserve the X form") {
    for (int it = 0; it < 200; ++it) {
      const auto rho = testing::random_x_state(rng);
      const C pa = testing::random_amplitude(rng);
      const C pb = testing::random_amplitude(rng);
      const auto ad = apply_kraus(two_qubit_kraus(ad_kraus<double>({pa}), ad_kraus<double>({pb})), rho);
      CHECK(is_x_form(ad, 1e-10));
      const auto pd = apply_kraus(
          two_qubit_kraus(pd_kraus<double>({C(std::abs(pa))}), pd_kraus<double>({C(std::abs(pb))})),
          rho);
      CHECK(is_x_form(pd, 1e-10));
    }
  }
}

TEST_CASE("presets") {
  CHECK(std::abs(preset_state<double>("x1").matrix().trace() - C(1)) < 1e-15);
  CHECK(preset_state<double>("x2").purity() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(preset_state<double>(Preset::bell_phi_plus)(0, 3) == C(0.5));
  CHECK(preset_state<double>(Preset::bell_psi_plus)(1, 2) == C(0.5));
  CHECK(thrown_code([] { preset_state<double>("x3"); }) == Errc::unknown_preset);
}

TEST_CASE("is_x_form") {
  CHECK(is_x_form(preset_state<double>("x1"), 1e-12));
  CHECK(is_x_form(make_density((Matrix4<double>::Identity() / 4.0).eval()), 1e-12));

  Matrix4<double> m = Matrix4<double>::Zero();
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  m(1, 0) = 0.1;
  CHECK_FALSE(is_x_form(make_density(m), 1e-12));
}
