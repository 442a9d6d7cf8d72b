#include "core/rng.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace oim {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  boost::random::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double Rng::gamma(double shape) {
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  if (s <= 0.0) return a / (a + b);
  return x / s;
}

}  // namespace oim
