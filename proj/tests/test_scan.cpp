#include <doctest.h>

#include <sstream>

#include "qdl/io.hpp"
#include "qdl/scan.hpp"
#include "test_helpers.hpp"

using namespace qdl;
using testing::C;

TEST_CASE("evolve_trace reference regimes") {
  const auto x1 = preset_state<double>("x1");
  const TimeGrid<double> grid{50.0, 2000};

  SUBCASE("large detuning keeps the concurrence near its initial value") {
    const auto trace = evolve_trace(QubitPair<double>::ad({1, 0.01, 10.0}, {1, 0.01, 10.0}), x1, grid);
    const double c0 = trace.values.front();
    for (double v : trace.values) CHECK(std::abs(v - c0) < 0.02);
  }
  SUBCASE("large bandwidth decays monotonically and is gone by t = 15") {
    const auto trace = evolve_trace(QubitPair<double>::ad({1, 10.0, 0.01}, {1, 10.0, 0.01}), x1, grid);
    for (std::size_t i = 1; i < trace.values.size(); ++i)
      CHECK(trace.values[i] <= trace.values[i - 1] + 1e-12);
    for (std::size_t i = 0; i < trace.values.size(); ++i)
      if (trace.times[i] >= 15.0) CHECK(trace.values[i] < 1e-3);
  }
  SUBCASE("narrowband phase damping on x2 oscillates under a decaying envelope") {
    const auto trace =
        evolve_trace(QubitPair<double>::pd({1, 0.01, 1.0}, {1, 0.01, 1.0}),
                     preset_state<double>("x2"), grid);
    const auto peaks = local_maxima(trace.values, 1e-9);
    REQUIRE(peaks.size() >= 2);
    CHECK(trace.values[peaks.back()] < trace.values[peaks.front()]);
    const auto regime = classify_dynamics(trace);
    CHECK((regime == Regime::persistent_oscillation || regime == Regime::damped_oscillation));
  }
}

namespace {

int regime_rank(Regime r) {
  switch (r) {
    case Regime::persistent_oscillation: return 0;
    case Regime::damped_oscillation: return 1;
    case Regime::monotonic_decay: return 2;
    case Regime::stationary: return 3;
  }
  return -1;
}

}  // namespace

TEST_CASE("run_sweep") {
  SUBCASE("bandwidth sweep crosses from oscillatory to monotonic decay") {
    SweepSpec<double> spec{ChannelKind::ad, preset_state<double>("x1"), "x1"};
    spec.detuning = 0.01;
    spec.axis = SweepAxis::lambda;
    spec.axis_min = 0.01;
    spec.axis_max = 10.0;
    spec.axis_points = 10;
    spec.grid = {50.0, 1200};
    const auto surface = run_sweep(spec);
    REQUIRE(surface.axis_values.size() == 10);
    int prev = regime_rank(surface.events.front().regime);
    CHECK(prev <= 1);  // oscillatory at the smallest bandwidth
    for (const auto& ev : surface.events) {
      const int rank = regime_rank(ev.regime);
      CHECK(rank <= 2);  // never stationary at small detuning
      CHECK(rank >= prev);
      prev = rank;
    }
    CHECK(surface.events.back().regime == Regime::monotonic_decay);
  }

  SUBCASE("detuning sweep ends stationary at the top") {
    SweepSpec<double> spec{ChannelKind::ad, preset_state<double>("x1"), "x1"};
    spec.lambda = 0.01;
    spec.axis = SweepAxis::delta;
    spec.axis_min = 0.01;
    spec.axis_max = 10.0;
    spec.axis_points = 8;
    spec.grid = {50.0, 1200};
    const auto surface = run_sweep(spec);
    CHECK(surface.events.back().regime == Regime::stationary);
    CHECK(surface.events.front().regime != Regime::stationary);
    const auto min_of = [](const ConcurrenceTrace<double>& tr) {
      return *std::min_element(tr.values.begin(), tr.values.end());
    };
    CHECK(min_of(surface.traces.front()) < min_of(surface.traces.back()));
  }

  SUBCASE("central-frequency sweep: monotonic at the bottom, stationary at the top") {
    SweepSpec<double> spec{ChannelKind::pd, preset_state<double>("x1"), "x1"};
    spec.lambda = 0.01;
    spec.axis = SweepAxis::omega_c;
    spec.axis_min = 0.01;
    spec.axis_max = 10.0;
    spec.axis_points = 8;
    spec.grid = {50.0, 1200};
    const auto surface = run_sweep(spec);
    CHECK(surface.events.front().regime == Regime::monotonic_decay);
    CHECK(surface.events.back().regime == Regime::stationary);
  }

  SUBCASE("invalid specs are rejected") {
    SweepSpec<double> spec{ChannelKind::ad, preset_state<double>("x1"), "x1"};
    spec.axis_points = 1;
    CHECK_THROWS_AS(run_sweep(spec), Error);
    spec.axis_points = 5;
    spec.axis = SweepAxis::omega_c;  // wrong channel for this axis
    CHECK_THROWS_AS(run_sweep(spec), Error);
    spec.axis = SweepAxis::lambda;
    spec.axis_min = -1.0;  // log grid needs positive start
    CHECK_THROWS_AS(run_sweep(spec), Error);
  }

  SUBCASE("deterministic and independent of the worker count") {
    SweepSpec<double> spec{ChannelKind::ad, preset_state<double>("x2"), "x2"};
    spec.detuning = 0.01;
    spec.axis = SweepAxis::lambda;
    spec.axis_min = 0.01;
    spec.axis_max = 1.0;
    spec.axis_points = 6;
    spec.grid = {30.0, 400};
    const auto a = run_sweep(spec, 1);
    const auto b = run_sweep(spec, 4);
    std::ostringstream sa, sb;
    io::write_sweep_csv(sa, "lambda", a);
    io::write_sweep_csv(sb, "lambda", b);
    CHECK(sa.str() == sb.str());
    std::ostringstream sc;
    io::write_sweep_csv(sc, "lambda", run_sweep(spec, 1));
    CHECK(sa.str() == sc.str());
  }
}

TEST_CASE("qubit exchange symmetry on exchange-symmetric states") {
  const auto pair = QubitPair<double>::ad({1.0, 0.3, 0.05}, {1.0, 2.0, 0.7});
  const TimeGrid<double> grid{20.0, 300};
  for (const char* name : {"x1", "x2"}) {
    const auto rho = preset_state<double>(name);
    const auto a = evolve_trace(pair, rho, grid);
    const auto b = evolve_trace(pair.swapped(), rho, grid);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK(std::abs(a.values[i] - b.values[i]) < 1e-12);
  }
}

TEST_CASE("factorization_check") {
  std::mt19937_64 rng(77);
  const TimeGrid<double> grid{20.0, 251};

  SUBCASE("bell state under one-sided amplitude damping") {
    const auto report =
        factorization_check<double>(ChannelKind::ad, AdParams<double>{1.0, 0.5, 0.3},
                                    preset_state<double>("bell_phi_plus"), grid);
    CHECK(report.c0 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.pass);
    CHECK(report.max_deviation <= 1e-9);
  }
  SUBCASE("pure preset under one-sided phase damping") {
    const auto report = factorization_check<double>(
        ChannelKind::pd, PdParams<double>{1.0, 0.7, 1.2}, preset_state<double>("x2"), grid);
    CHECK(report.pass);
  }
  SUBCASE("random pure states under both channels") {
    for (int it = 0; it < 5; ++it) {
      const auto psi = testing::random_pure_state(rng);
      CHECK(factorization_check<double>(ChannelKind::ad, AdParams<double>{1.0, 1.5, 0.4}, psi, grid)
                .pass);
      CHECK(factorization_check<double>(ChannelKind::pd, PdParams<double>{1.0, 2.0, 0.8}, psi, grid)
                .pass);
    }
  }
  SUBCASE("mixed states are rejected") {
    CHECK_THROWS_AS(factorization_check<double>(ChannelKind::ad, AdParams<double>{1.0, 0.5, 0.0},
                                                preset_state<double>("x1"), grid),
                    Error);
  }
}
