#include "lwocp/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lwocp {

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;  // avoid log(0)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * uniform();
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

int Rng::geometric(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("geometric: p must lie in (0,1)");
  const double u = uniform();
  const double k = std::ceil(std::log1p(-u) / std::log1p(-p));
  if (!(k >= 1.0)) return 1;
  return static_cast<int>(k);
}

}  // namespace lwocp
