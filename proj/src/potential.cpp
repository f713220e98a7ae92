#include "nlch/potential.hpp"

#include <cmath>
#include <string>

#include "nlch/error.hpp"

namespace nlch {

void validate(const PotentialParams& p) {
  if (!(p.theta > 0.0)) throw ConfigError("potential theta must be positive");
  if (!(p.guard > 0.0 && p.guard <= 1e-2)) throw ConfigError("potential guard must lie in (0, 1e-2]");
}

double potential_eval(const PotentialParams& p, double s, int order) {
  if (!std::isfinite(s) || std::abs(s) >= 1.0)
    throw SingularEvaluation("logarithmic potential evaluated at s = " + std::to_string(s));
  const double theta = p.theta;
  switch (order) {
    case 0:
      return 0.5 * theta * ((1.0 + s) * std::log1p(s) + (1.0 - s) * std::log1p(-s));
    case 1:
      return theta * std::atanh(s);
    case 2:
      return theta / ((1.0 - s) * (1.0 + s));
    case 3: {
      const double d = (1.0 - s) * (1.0 + s);
      return 2.0 * theta * s / (d * d);
    }
    default:
      throw ConfigError("potential derivative order must be 0..3");
  }
}

ScalarField potential_eval(const PotentialParams& p, const ScalarField& f, int order) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = potential_eval(p, f[i], order);
  return out;
}

ClipResult clip_to_domain(const ScalarField& f, double guard) {
  ClipResult res{f, 0};
  const double hi = 1.0 - guard;
  for (double& d : res.field.values()) {
    if (d > hi) {
      d = hi;
      ++res.clipped;
    } else if (d < -hi) {
      d = -hi;
      ++res.clipped;
    }
  }
  return res;
}

}  // namespace nlch
