#include "qrob/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qrob {

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double CounterRng::exponential(double rate) noexcept {
  return -std::log(uniform_open()) / rate;
}

double CounterRng::poisson(double rate) {
  if (!(rate > 0.0) || rate > 700.0) throw std::invalid_argument("poisson rate must lie in (0, 700]");
  const double u = uniform();
  double p = std::exp(-rate);
  double cumulative = p;
  double k = 0.0;
  while (u >= cumulative && p > 0.0) {
    k += 1.0;
    p *= rate / k;
    cumulative += p;
  }
  return k;
}

}  // namespace qrob
