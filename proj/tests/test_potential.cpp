#include <cmath>

#include "doctest.h"
#include "nlch/error.hpp"
#include "nlch/potential.hpp"
#include "support.hpp"

using namespace nlch;

TEST_CASE("closed-form values") {
  const PotentialParams p{0.2, 1e-9};
  CHECK(potential_eval(p, 0.0, 0) == 0.0);
  CHECK(potential_eval(p, 0.0, 1) == 0.0);
  CHECK(potential_eval(p, 0.0, 2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(potential_eval(p, 0.0, 3) == 0.0);
  CHECK(potential_eval(p, 0.5, 1) == doctest::Approx(0.1 * std::log(3.0)).epsilon(1e-14));
  CHECK(potential_eval(p, 0.5, 1) == doctest::Approx(0.10986).epsilon(1e-4));
  const double s = 0.3;
  CHECK(potential_eval(p, s, 0) ==
        doctest::Approx(0.1 * ((1 + s) * std::log(1 + s) + (1 - s) * std::log(1 - s))).epsilon(1e-14));
  CHECK(potential_eval(p, s, 2) == doctest::Approx(0.2 / (1 - s * s)).epsilon(1e-14));
  CHECK(potential_eval(p, s, 3) == doctest::Approx(2 * 0.2 * s / std::pow(1 - s * s, 2)).epsilon(1e-14));
}

TEST_CASE("singular and invalid arguments throw") {
  const PotentialParams p;
  CHECK_THROWS_AS(potential_eval(p, 1.0, 0), SingularEvaluation);
  CHECK_THROWS_AS(potential_eval(p, -1.0, 1), SingularEvaluation);
  CHECK_THROWS_AS(potential_eval(p, 1.5, 2), SingularEvaluation);
  CHECK_THROWS_AS(potential_eval(p, std::nan(""), 0), SingularEvaluation);
  CHECK_THROWS(potential_eval(p, 0.1, 4));
  CHECK_THROWS_AS(validate(PotentialParams{0.0, 1e-9}), ConfigError);
  CHECK_THROWS_AS(validate(PotentialParams{0.2, 0.1}), ConfigError);
}

TEST_CASE("convexity bound over a dense sweep") {
  const PotentialParams p{0.37, 1e-9};
  const int N = 10000;
  double worst = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double s = -1.0 + p.guard + (2.0 - 2.0 * p.guard) * i / N;
    worst = std::min(worst, potential_eval(p, s, 2) - p.alpha());
  }
  CHECK(worst >= 0.0);
}

TEST_CASE("symmetry") {
  const PotentialParams p;
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const double s = rng.uniform(-0.999, 0.999);
    CHECK(potential_eval(p, -s, 0) == doctest::Approx(potential_eval(p, s, 0)).epsilon(1e-14));
    CHECK(potential_eval(p, -s, 1) == doctest::Approx(-potential_eval(p, s, 1)).epsilon(1e-14));
    CHECK(potential_eval(p, -s, 2) == doctest::Approx(potential_eval(p, s, 2)).epsilon(1e-14));
    CHECK(potential_eval(p, -s, 3) == doctest::Approx(-potential_eval(p, s, 3)).epsilon(1e-14));
  }
}

TEST_CASE("derivative consistency by central differences") {
  const PotentialParams p;
  Rng rng(11);
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const double s = rng.uniform(-0.95, 0.95);
    for (int order = 0; order < 3; ++order) {
      const double fd = (potential_eval(p, s + h, order) - potential_eval(p, s - h, order)) / (2 * h);
      const double exact = potential_eval(p, s, order + 1);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("F' blows up monotonically towards the pure phases") {
  const PotentialParams p;
  double prev = 0.0;
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    const double v = potential_eval(p, 1.0 - 2.0 * delta, 1);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("field evaluation is elementwise") {
  const Grid g = test::square(8);
  const PotentialParams p;
  const ScalarField f = random_field(g, 1, -0.9, 0.9);
  const ScalarField d2 = potential_eval(p, f, 2);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(d2[i] == potential_eval(p, f[i], 2));
}

TEST_CASE("clip_to_domain") {
  const Grid g = test::square(4);
  ScalarField f(g, 0.0);
  f[0] = 0.9999;
  f[1] = -1.5;
  f[2] = 0.5;
  const ClipResult r = clip_to_domain(f, 1e-3);
  CHECK(r.field[0] == doctest::Approx(0.999).epsilon(1e-15));
  CHECK(r.field[1] == doctest::Approx(-0.999).epsilon(1e-15));
  CHECK(r.field[2] == 0.5);
  CHECK(r.clipped == 2);

  const ScalarField inside = random_field(g, 4, -0.9, 0.9);
  const ClipResult same = clip_to_domain(inside, 1e-3);
  CHECK(same.clipped == 0);
  CHECK(same.field.data() == inside.data());
}
