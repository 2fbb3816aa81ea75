#pragma once

#include "mellinridge/quadrature.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mellinridge {

using complex = std::complex<double>;

//! Densities with closed-form Mellin transforms: four targets and two
//! multiplicative error densities.
enum class DensityId
{
  beta25,        // x(1-x)^4 / B(2,5) on (0,1)
  loggamma,      // 5^5/Gamma(5) x^-6 log(x)^4 on (1,inf)
  gamma5,        // x^4 e^-x / Gamma(5)
  lognormal,     // log X ~ N(0, 0.04)
  noise_uniform, // 1 on (0.5, 1.5)
  noise_beta,    // 2x on (0,1)
};

std::string_view
to_string(DensityId id);

//! Throws ErrorCode::unknown_id for names outside the catalog.
DensityId
density_from_string(std::string_view name);

inline bool
is_noise(DensityId id)
{
  return id == DensityId::noise_uniform || id == DensityId::noise_beta;
}

//! t -> M_c[h](t) at development point c, optionally certified to decay
//! polynomially: c_g (1+t^2)^(-gamma/2) <= |M(t)| <= C_g (1+t^2)^(-gamma/2).
class MellinFunction
{
public:
  using Eval = std::function<complex(double)>;

  //! When `decay_exponent` is given the two-sided bound is checked on
  //! t in [0, 1000]; a vanishing or non-finite ratio throws.
  MellinFunction(double c, Eval eval,
                 std::optional<double> decay_exponent = std::nullopt);

  complex operator()(double t) const { return eval_(t); }
  double c() const { return c_; }
  const std::optional<double>& decay_exponent() const { return decay_; }

  //! Empirical constants (c_g, C_g) observed during certification.
  std::pair<double, double> decay_bounds() const { return bounds_; }

private:
  double c_;
  Eval eval_;
  std::optional<double> decay_;
  std::pair<double, double> bounds_{ 0.0, 0.0 };
};

//! Closed-form Mellin transform of a catalog density. Throws
//! ErrorCode::domain where the transform integral diverges (loggamma needs
//! c < 6, gamma5 c > -4, beta25 and noise_beta c > -1).
MellinFunction
catalog_mellin(DensityId id, double c);

//! The plug-in estimator n^-1 sum_j Y_j^(c-1+it) of the Mellin transform of
//! the observation density.
class EmpiricalMellin
{
public:
  EmpiricalMellin(std::vector<double> sample, double c);

  complex operator()(double t) const;

  //! Values on t_j = j*h, j = 0..m; negative nodes follow by conjugation.
  std::vector<complex> on_grid(const SymmetricGrid& grid) const;

  double c() const { return c_; }
  std::size_t size() const { return sample_.size(); }
  std::span<const double> sample() const { return sample_; }

  //! M_c(0) = n^-1 sum_j Y_j^(c-1), an upper bound for |M_c(t)|.
  double at_zero() const { return weight_sum_; }

private:
  std::vector<double> sample_;
  std::vector<double> log_y_;
  std::vector<double> weight_; // Y_j^(c-1)
  double c_;
  double weight_sum_ = 0.0;
};

//! Values on a positive x-grid, square-integrable against x^(2c-1).
struct WeightedFunction
{
  std::vector<double> x_grid;
  std::vector<double> values;
  double c = 1.0;

  void validate() const;
};

//! n log-spaced points on [x_min, x_max].
std::vector<double>
log_spaced_grid(double x_min, double x_max, std::size_t n);

//! Result of inverting Mellin-domain samples on a grid.
struct Inversion
{
  std::vector<double> values;
  double max_imag_residual = 0.0; //!< max |Im| / (1 + |Re|)
};

//! (2 pi)^-1 sum_j w_j x^(-c-it_j) H(t_j) over the symmetric grid, with
//! `pos[j]` = H(t_j) and `neg[j]` = H(-t_j).
Inversion
invert_on_grid(const SymmetricGrid& grid, std::span<const complex> pos,
               std::span<const complex> neg, double c,
               std::span<const double> x_grid);

//! Tolerance on the imaginary residue of an inversion.
inline constexpr double hermitian_tolerance = 1e-8;

//! Inverse Mellin transform (2 pi)^-1 int x^(-c-it) H(t) dt on x_grid.
//! The t-range is truncated once the L1 tail of H falls below rel_tail_tol.
//! Throws ErrorCode::numerical on non-finite H or when the result is not
//! real to within hermitian_tolerance.
WeightedFunction
inverse_mellin(const std::function<complex(double)>& transform, double c,
               std::span<const double> x_grid, const QuadratureConfig& q);

//! (2 pi)^-1 int |H(t)|^2 dt, i.e. the weighted squared norm of the
//! inverse transform. Includes the extrapolated tail beyond the truncation.
double
plancherel_norm_sq(const std::function<complex(double)>& transform,
                   const QuadratureConfig& q);

//! Trapezoidal int (a - b)^2 x^(2c-1) dx over the shared grid.
double
weighted_l2_dist_sq(const WeightedFunction& a, const WeightedFunction& b);

} // namespace mellinridge
