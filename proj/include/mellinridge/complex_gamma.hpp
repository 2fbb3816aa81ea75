#pragma once

#include <complex>

namespace mellinridge {

//! Logarithm of the Gamma function for complex argument (Lanczos
//! approximation, g = 7, nine terms; reflection for Re z < 1/2). The
//! imaginary part is a branch of arg Gamma(z), not necessarily the
//! principal one.
std::complex<double>
log_gamma(std::complex<double> z);

//! Gamma(z) = exp(log_gamma(z)); underflows to 0 far out on the line.
std::complex<double>
gamma(std::complex<double> z);

} // namespace mellinridge
