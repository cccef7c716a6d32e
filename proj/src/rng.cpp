#include "omlevy/rng.hpp"

#include <cmath>

namespace omlevy {

double RandomStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * scale;
  has_cached_ = true;
  return u * scale;
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

}  // namespace omlevy
