#include "mellinridge/complex_gamma.hpp"

#include <array>
#include <numbers>

namespace mellinridge {

namespace {

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
  0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
  771.32342877765313,      -176.61502916214059,   12.507343278686905,
  -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7
};

// log(sin(pi z)) without overflowing for large |Im z|
std::complex<double>
log_sin_pi(std::complex<double> z)
{
  using std::numbers::pi;
  const std::complex<double> i(0.0, 1.0);
  if (z.imag() >= 0.0)
    return -i * pi * z + std::log(std::exp(2.0 * i * pi * z) - 1.0) -
           std::log(2.0 * i);
  return i * pi * z + std::log(1.0 - std::exp(-2.0 * i * pi * z)) -
         std::log(2.0 * i);
}

} // namespace

std::complex<double>
log_gamma(std::complex<double> z)
{
  using std::numbers::pi;
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(pi) - log_sin_pi(z) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  std::complex<double> series = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i)
    series += lanczos_coef[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

std::complex<double>
gamma(std::complex<double> z)
{
  return std::exp(log_gamma(z));
}

} // namespace mellinridge
