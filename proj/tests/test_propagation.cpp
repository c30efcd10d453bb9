#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "polargate/errors.hpp"
#include "polargate/propagation.hpp"
#include "polargate/units.hpp"

using namespace polargate;
using namespace polargate::units;
using testing_util::max_abs;

namespace {

const double kV = hz_to_joule(-1850.0);

Pulse random_pulse(std::size_t n, double dt, double cap, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PulseStep> steps(n);
  for (auto& s : steps) s = {cap * u(rng), kTwoPi * u(rng)};
  return Pulse(dt, std::move(steps));
}

GaussianPulse reference_gaussian() {
  GaussianPulse g;
  g.tau_gate = 0.5e-3;
  g.tau_rms = 0.118e-3;
  g.omega_max = hz_to_rad(1200.0);
  g.delta = hz_to_rad(-1970.0);
  return g;
}

}  // namespace

TEST_SUITE("propagation") {

TEST_CASE("single-step exponential") {
  const auto id = expm_step(CMatrix::Zero(4, 4), Basis::bell4, 1e-3);
  CHECK(max_abs(id.matrix - CMatrix::Identity(4, 4)) == 0.0);

  // Resonant pi pulse
  const double omega = hz_to_rad(1000.0);
  const auto u = expm_step(h_single({0.0, omega, 0.0, 0.0}).matrix(), Basis::single,
                           std::numbers::pi / omega);
  CMatrix expected(2, 2);
  expected << 0, Complex(0, -1), Complex(0, -1), 0;
  CHECK(max_abs(u.matrix - expected) < 1e-12);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix h = testing_util::random_hermitian(12, rng, 1e-30);
    const double t = 1e-3 * std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const auto step = expm_step(h, Basis::motional12, t);
    CHECK(max_abs(step.matrix - oracle::expm_pade(h / kHbar, t)) < 1e-10);
    CHECK(unitarity_defect(step.matrix) < 1e-12);
  }

  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1e-30;
  CHECK_THROWS_AS(expm_step(bad, Basis::single, 1e-6), NumericalError);
  CHECK_THROWS_AS(expm_step(CMatrix::Zero(2, 2), Basis::single, 0.0), DomainError);
}

TEST_CASE("pulse propagation basics") {
  const auto sys = two_molecule_system(Basis::bell4, 0.0, 0.0);
  const Pulse silent(5e-6, std::vector<PulseStep>(20));
  const auto u = propagate(silent, sys);
  CHECK(max_abs(u.matrix - CMatrix::Identity(4, 4)) < 1e-15);
  CHECK_FALSE(u.empty_pulse);

  const auto empty = propagate(Pulse(5e-6, {}), two_molecule_system(Basis::bell4, 1e3, kV));
  CHECK(empty.empty_pulse);
  CHECK(max_abs(empty.matrix - CMatrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("three-level Rabi oscillation at the avoided crossing") {
  // Constant drive at delta = V/hbar: the |11> -> |Psi+> population follows
  // the spectral decomposition of the 3x3 block.
  const double omega = hz_to_rad(731.0);
  const double delta = joule_to_rad(kV);
  const auto sys = two_molecule_system(Basis::sym3, delta, kV);
  const Eigen::Matrix3d h3 = h_sym3({delta, omega, 0.0, kV}).matrix().real() / kHbar;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h3);

  const double dt = 10e-6;
  const Pulse step(dt, {{omega, 0.0}});
  CMatrix u = CMatrix::Identity(3, 3);
  double first_max_t = 0.0;
  double previous = 0.0;
  bool rising = true;
  for (int k = 1; k <= 400; ++k) {
    u = propagate(step, sys).matrix * u;
    const double t = k * dt;
    Complex amp(0.0, 0.0);
    for (int n = 0; n < 3; ++n) {
      amp += es.eigenvectors()(1, n) * es.eigenvectors()(0, n) *
             std::exp(Complex(0.0, -es.eigenvalues()(n) * t));
    }
    const double p = std::norm(u(1, 0));
    CHECK(p == doctest::Approx(std::norm(amp)).epsilon(1e-10));
    if (rising && p < previous && first_max_t == 0.0) {
      first_max_t = t - dt;
      rising = false;
    }
    previous = p;
  }
  // The two levels carrying |11> and |Psi+> dominate the oscillation.
  std::array<double, 3> weight{};
  for (int n = 0; n < 3; ++n) {
    weight[n] = std::abs(es.eigenvectors()(0, n) * es.eigenvectors()(1, n));
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return weight[a] > weight[b]; });
  const double gap = std::abs(es.eigenvalues()(order[0]) - es.eigenvalues()(order[1]));
  CHECK(first_max_t == doctest::Approx(std::numbers::pi / gap).epsilon(0.05));
}

TEST_CASE("Gaussian gate against the target") {
  const auto base = reference_gaussian();
  std::vector<double> grid;
  for (int k = -30; k <= 30; ++k) grid.push_back(10.0 * k);
  const auto scan = gaussian_error_scan(base, kV, grid, 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (scan[i].fidelity > scan[best].fidelity) best = i;
  }
  CHECK(std::abs(scan[best].delta_err_hz) <= 10.0);
  CHECK(scan[best].fidelity > 0.99);
  const auto at = [&](double eps) {
    for (const auto& p : scan) {
      if (p.delta_err_hz == eps) return p.fidelity;
    }
    return -1.0;
  };
  CHECK(at(100.0) == doctest::Approx(0.95).epsilon(0.02 / 0.95));
  CHECK(at(-100.0) == doctest::Approx(0.95).epsilon(0.02 / 0.95));
  // Monotone decrease away from the peak over |eps| <= 100 Hz.
  for (std::size_t i = best; i + 1 < scan.size() && scan[i + 1].delta_err_hz <= 100.0; ++i) {
    CHECK(scan[i + 1].fidelity < scan[i].fidelity);
  }
  for (std::size_t i = best; i > 0 && scan[i - 1].delta_err_hz >= -100.0; --i) {
    CHECK(scan[i - 1].fidelity < scan[i].fidelity);
  }

  // Halving the discretization step changes F by less than 1e-5.
  for (double eps : {-100.0, 0.0, 100.0}) {
    auto g = base;
    g.delta += hz_to_rad(eps);
    const double coarse = gate_fidelity(propagate(g, kV, Basis::bell4, 1e-6));
    const double fine = gate_fidelity(propagate(g, kV, Basis::bell4, 0.5e-6));
    CHECK(std::abs(coarse - fine) < 1e-5);
  }
  CHECK(base.discretize().size() == 500);
  CHECK(base.amplitude_at(0.25e-3) == doctest::Approx(base.omega_max));
  CHECK(base.amplitude_at(0.6e-3) == 0.0);
}

TEST_CASE("gate fidelity convention") {
  for (double beta : {0.0, 0.7, -2.1, std::numbers::pi}) {
    const Propagator t{target_gate(beta), Basis::bell4, false};
    CHECK(gate_fidelity(t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gate_fidelity(t, BetaPolicy::fixed(beta)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(score_gate(t).beta == doctest::Approx(beta).epsilon(1e-12));
    CHECK(unitarity_defect(target_gate(beta)) < 1e-15);
  }
  // Identity: |tr(T^dagger I)/4|^2 = |1 + e^{-i beta}|^2 / 16, 1/4 at beta = 0.
  const Propagator id{CMatrix::Identity(4, 4), Basis::bell4, false};
  CHECK(gate_fidelity(id, BetaPolicy::fixed(0.0)) == doctest::Approx(0.25));
  CHECK(gate_fidelity(id, BetaPolicy::fixed(std::numbers::pi / 2)) == doctest::Approx(0.125));
  CHECK(gate_fidelity(id) == doctest::Approx(0.25));
  const Propagator t3{target_sym3(), Basis::sym3, false};
  CHECK(gate_fidelity(t3) == doctest::Approx(1.0));
  CHECK(target_gate(0.3).topLeftCorner(3, 3) == target_sym3());

  const Propagator bad{2.0 * CMatrix::Identity(4, 4), Basis::bell4, false};
  CHECK_THROWS_AS(gate_fidelity(bad), NumericalError);
  const Propagator wrong{CMatrix::Identity(2, 2), Basis::single, false};
  CHECK_THROWS_AS(gate_fidelity(wrong), ConfigError);
}

TEST_CASE("unitarity after long pulses") {
  std::mt19937_64 rng(21);
  const auto p = random_pulse(10000, 5e-6, hz_to_rad(50e3), rng);
  for (Basis b : {Basis::bell4, Basis::product4, Basis::sym3}) {
    const auto u = propagate(p, two_molecule_system(b, hz_to_rad(-1850.0), kV));
    CHECK(unitarity_defect(u.matrix) < 1e-10);
  }
}

TEST_CASE("composition, basis equivalence and antisymmetric block") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p1 = random_pulse(40, 5e-6, hz_to_rad(50e3), rng);
    const auto p2 = random_pulse(25, 5e-6, hz_to_rad(50e3), rng);
    const double delta = hz_to_rad(std::uniform_real_distribution<double>(-3e3, 3e3)(rng));
    const auto sys = two_molecule_system(Basis::bell4, delta, kV);
    const auto u12 = propagate(p1.then(p2), sys).matrix;
    CHECK(max_abs(u12 - propagate(p2, sys).matrix * propagate(p1, sys).matrix) < 1e-10);

    const auto prod = propagate(p1, two_molecule_system(Basis::product4, delta, kV));
    const auto bell = propagate(p1, sys);
    const CMatrix& w = product_to_bell();
    CHECK(max_abs(w.adjoint() * prod.matrix * w - bell.matrix) < 1e-10);
    CHECK(std::abs(gate_fidelity(prod) - gate_fidelity(bell)) < 1e-10);
    CHECK(std::abs(std::abs(bell.matrix(3, 3)) - 1.0) < 1e-10);
  }
}

TEST_CASE("resolvability check") {
  const double tmin = minimum_resolvable_gate_time(kV);
  CHECK(tmin == doctest::Approx(1.0 / 1850.0));
  CHECK(gate_time_resolves(0.6e-3, kV));
  CHECK_FALSE(gate_time_resolves(0.4e-3, kV));
  CHECK(gate_time_resolves(0.5e-3, hz_to_joule(-2500.0)));
}

TEST_CASE("pulse file format") {
  std::mt19937_64 rng(2);
  auto p = random_pulse(7, 5e-6, 1e5, rng);
  p.meta()["note"] = "x";
  const auto back = Pulse::from_json(p.to_json());
  CHECK(back.dt() == p.dt());
  REQUIRE(back.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(back.steps()[i].amplitude == p.steps()[i].amplitude);
    CHECK(back.steps()[i].phase == p.steps()[i].phase);
  }
  CHECK(back.meta()["note"] == "x");
  CHECK(p.to_json().contains("dt_s"));

  const auto q = Pulse::from_quadratures(1e-6, {3.0, 4.0, -1.0, 0.0});
  CHECK(q.steps()[0].amplitude == doctest::Approx(5.0));
  CHECK(q.steps()[1].phase == doctest::Approx(std::numbers::pi));
  CHECK(q.max_amplitude() == doctest::Approx(5.0));
  const auto quad = q.quadratures();
  CHECK(quad[0] == doctest::Approx(3.0));
  CHECK(quad[1] == doctest::Approx(4.0));

  CHECK_THROWS_AS(Pulse(0.0, {}), ConfigError);
  CHECK_THROWS_AS(Pulse(1e-6, {{-1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(Pulse::from_json(nlohmann::json{{"dt_s", 1e-6}}), ConfigError);
  CHECK_THROWS_AS(p.then(Pulse(2.0 * p.dt(), {{1.0, 0.0}})), ConfigError);
  CHECK(p.then(Pulse(1e-6, {})).size() == p.size());
}

}  // TEST_SUITE
