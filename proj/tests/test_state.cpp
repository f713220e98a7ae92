#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nlch/error.hpp"
#include "nlch/leray.hpp"
#include "nlch/operators.hpp"
#include "nlch/reference.hpp"
#include "nlch/state.hpp"
#include "support.hpp"

using namespace nlch;
using nlch::test::max_abs;
using nlch::test::square;

namespace {

KernelSpec zero_kernel(const Grid& g) {
  KernelSpec s = KernelSpec::default_gaussian(g);
  s.amplitude = 0.0;
  return s;
}

StateParams params(double dt, int steps) {
  StateParams p;
  p.dt = dt;
  p.n_steps = steps;
  return p;
}

double max_drift(const StateTrajectory& tr) {
  double d = 0.0;
  for (double m : tr.mass) d = std::max(d, std::abs(m - tr.mass.front()));
  return d;
}

}  // namespace

TEST_CASE("energy") {
  const Grid g = square(8);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  CHECK(energy(ScalarField(g), k, pot) == 0.0);

  const ScalarField phi = random_field(g, 1, -0.9, 0.9);
  const KernelTable k0 = build_kernel(zero_kernel(g), g);
  double entropy = 0.0;
  for (double s : phi.values()) entropy += potential_eval(pot, s, 0);
  CHECK(energy(phi, k0, pot) == doctest::Approx(entropy * g.cell_volume()).epsilon(1e-14));
  CHECK(energy(phi, k0, pot) >= 0.0);

  for (const KernelSpec& spec : {KernelSpec::default_gaussian(g), KernelSpec::default_newtonian(g)}) {
    const double ref = reference::direct_energy(spec, pot, phi);
    CHECK(std::abs(energy(phi, build_kernel(spec, g), pot) - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("constant state is a fixed point without interaction or flow") {
  const Grid g = square(16);
  const PotentialParams pot;
  const KernelTable k0 = build_kernel(zero_kernel(g), g);
  const ScalarField c(g, 0.35);
  const StepResult r = state_step(c, VectorField(g), k0, pot, params(1e-3, 1));
  CHECK(max_abs(r.phi - c) <= 1e-14);
  CHECK(max_abs(r.mu - ScalarField(g, potential_eval(pot, 0.35, 1))) <= 1e-14);
}

TEST_CASE("each step conserves mass") {
  const Grid g = square(24);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ScalarField phi = random_field(g, 10 + s, -0.8, 0.8);
    const VectorField v = random_solenoidal(g, 20 + s, 5.0);
    const StepResult r = state_step(phi, v, k, pot, params(0.5 * g.h[0] * g.h[0], 1));
    CHECK(std::abs(mean(r.phi) - mean(phi)) <= 1e-12);
    CHECK(r.residual <= 1e-10);
  }
}

TEST_CASE("energy decreases without flow") {
  const Grid g = square(32);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const StateParams p = params(g.h[0] * g.h[0], 1);
  double worst = -1.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const ScalarField phi = random_field(g, 100 + s, -0.9, 0.9);
    const StepResult r = state_step(phi, VectorField(g), k, pot, p);
    worst = std::max(worst, energy(r.phi, k, pot) - energy(phi, k, pot));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("CFL and domain violations are rejected before solving") {
  const Grid g = square(16);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const ScalarField phi = random_field(g, 1, -0.5, 0.5);
  const VectorField fast = random_solenoidal(g, 2, 100.0);
  CHECK_THROWS_WITH_AS(state_step(phi, fast, k, pot, params(1e-3, 1)), doctest::Contains("CFL"), ConfigError);
  CHECK(cfl_number(fast, 1e-3) == doctest::Approx(1.6));

  ScalarField bad = phi;
  bad[3] = 1.0;
  CHECK_THROWS(simulate(bad, ControlField::zeros(g, 2, 1e-3), k, pot, params(1e-3, 2)));

  ControlField v = ControlField::zeros(g, 3, 1e-3);
  v.slices[2] = fast;
  CHECK_THROWS_WITH(simulate(phi, v, k, pot, params(1e-3, 3)), doctest::Contains("step 2"));
}

TEST_CASE("zero steps") {
  const Grid g = square(8);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const ScalarField phi = random_field(g, 1, -0.5, 0.5);
  const StateTrajectory tr = simulate(phi, ControlField::zeros(g, 0, 1e-3), k, pot, params(1e-3, 0));
  CHECK(tr.phi.size() == 1);
  CHECK(tr.mass.size() == 1);
  CHECK(tr.energy.size() == 1);
  CHECK(tr.separation.size() == 1);
  CHECK(tr.phi[0].data() == phi.data());
  const auto r = energy_identity_residual(tr, ControlField::zeros(g, 0, 1e-3), k, pot);
  CHECK(r.size() == 1);
  CHECK(r[0] == 0.0);
}

TEST_CASE("trajectory diagnostics") {
  const Grid g = square(32);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const ScalarField phi0 = smooth_random_field(g, 4, 0.1, 0.7);
  const double dt = 0.5 * g.h[0] * g.h[0];
  const ControlField v = ControlField::constant(random_solenoidal(g, 5, 0.3 / dt * g.h[0]), 40, dt);
  const StateTrajectory tr = simulate(phi0, v, k, pot, params(dt, 40));
  CHECK(tr.phi.size() == 41);
  CHECK(tr.mu.size() == 41);
  CHECK(max_drift(tr) <= 1e-12);
  const double margin = *std::min_element(tr.separation.begin(), tr.separation.end());
  MESSAGE("min separation " << margin);
  CHECK(margin > 0.0);
  for (int n = 0; n <= 40; ++n) {
    CHECK(tr.separation[n] == doctest::Approx(1.0 - max_abs(tr.phi[n])).epsilon(1e-15));
    CHECK(tr.energy[n] == doctest::Approx(energy(tr.phi[n], k, pot)).epsilon(1e-14));
  }
}

TEST_CASE("energy identity residual converges at first order in dt") {
  const Grid g = square(32);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const ScalarField phi0 = smooth_random_field(g, 6, 0.0, 0.5);
  const double T = 4e-3;
  for (double amp : {0.0, 2.0}) {
    const VectorField v = random_solenoidal(g, 7, amp);
    std::vector<double> res;
    for (int steps : {8, 16, 32, 64}) {
      const ControlField vc = ControlField::constant(v, steps, T / steps);
      const StateTrajectory tr = simulate(phi0, vc, k, pot, params(T / steps, steps));
      const auto r = energy_identity_residual(tr, vc, k, pot);
      double m = 0.0;
      for (double x : r) m = std::max(m, std::abs(x));
      res.push_back(m);
    }
    for (double p : test::orders(res)) CHECK(p >= 0.9);
  }
}

TEST_CASE("time-step self-convergence") {
  const Grid g = square(16);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const ScalarField phi0 = smooth_random_field(g, 8, 0.0, 0.5);
  const VectorField v = random_solenoidal(g, 9, 2.0);
  const double T = 8e-3;
  auto run = [&](int steps) {
    return simulate(phi0, ControlField::constant(v, steps, T / steps), k, pot, params(T / steps, steps));
  };
  const int base = 8;
  const StateTrajectory ref = run(base * 8 * 8);
  std::vector<double> errors;
  for (int steps : {base, 2 * base, 4 * base}) {
    const StateTrajectory tr = run(steps);
    const int stride = base * 64 / steps;
    double e = 0.0;
    for (int n = 0; n <= steps; ++n) e = std::max(e, norm(tr.phi[n] - ref.phi[n * stride]));
    errors.push_back(e);
  }
  for (double p : test::orders(errors)) CHECK(p >= 0.9);
}

TEST_CASE("continuous dependence ratio stays bounded") {
  const Grid g = square(16);
  const PotentialParams pot;
  const KernelTable k = build_kernel(KernelSpec::default_gaussian(g), g);
  const int steps = 20;
  const double dt = 1e-3;
  const ScalarField phi0 = smooth_random_field(g, 10, 0.0, 0.5);
  const VectorField v1 = random_solenoidal(g, 11, 3.0);
  const ScalarField dphi = subtract_mean(smooth_random_field(g, 12, 0.0, 1.0));
  const VectorField dv = random_solenoidal(g, 13, 1.0);
  const StateTrajectory t1 = simulate(phi0, ControlField::constant(v1, steps, dt), k, pot, params(dt, steps));
  std::vector<double> ratios;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const ScalarField phi02 = phi0 + eps * dphi;
    const ControlField v2 = ControlField::constant(v1 + eps * dv, steps, dt);
    const StateTrajectory t2 = simulate(phi02, v2, k, pot, params(dt, steps));
    double linf_h = 0.0, l2_v = 0.0;
    for (int n = 0; n <= steps; ++n) {
      const ScalarField d = t1.phi[n] - t2.phi[n];
      linf_h = std::max(linf_h, norm(d));
      if (n > 0) l2_v += dt * (inner(d, d) + inner(gradient(d), gradient(d)));
    }
    const double num = linf_h + std::sqrt(l2_v);
    const double den = norm(ControlField::constant(eps * dv, steps, dt)) + norm(eps * dphi);
    ratios.push_back(num / den);
  }
  MESSAGE("ratios " << ratios[0] << " " << ratios[1] << " " << ratios[2]);
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  CHECK(hi / lo <= 2.0);
  CHECK(ratios[2] <= 1.5 * ratios[0]);
}
