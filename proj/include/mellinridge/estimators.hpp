#pragma once

#include "mellinridge/mellin.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace mellinridge {

//! Ridge regularisation level k, exponent xi and power r at development
//! point c.
struct RidgeSpec
{
  double k = 1.0;
  double xi = 0.0;
  double r = 2.0;
  double c = 1.0;

  void validate() const;
};

//! Spectral cut-off at |t| <= k.
struct CutoffSpec
{
  double k = 1.0;
  double c = 1.0;

  void validate() const;
};

//! Mellin-domain regularised inverse of the noise transform.
//!
//! Ridge:   R(t) = M_g(-t) |M_g(t)|^r / max(|M_g(t)|, (1+|t|)^xi / k)^(r+2),
//!          which equals 1/M_g(t) off the damped set
//!          G_k = { t : (1+|t|)^xi / k > |M_g(t)| }.
//! Cut-off: 1/M_g(t) on [-k, k] and 0 outside.
class MellinMultiplier
{
public:
  using Spec = std::variant<RidgeSpec, CutoffSpec>;

  const Spec& spec() const { return spec_; }
  bool is_ridge() const { return std::holds_alternative<RidgeSpec>(spec_); }
  double k() const;
  double c() const;
  const MellinFunction& noise() const { return noise_; }

  complex operator()(double t) const;

  //! Membership of t in G_k (ridge) or outside the window (cut-off).
  bool damped(double t) const;

  //! Half-width of the support for cut-off multipliers.
  std::optional<double> support() const;

private:
  friend MellinMultiplier ridge_multiplier(const RidgeSpec&,
                                           const MellinFunction&);
  friend MellinMultiplier cutoff_multiplier(const CutoffSpec&,
                                            const MellinFunction&,
                                            const QuadratureConfig&);
  MellinMultiplier(Spec spec, MellinFunction noise)
    : spec_(std::move(spec))
    , noise_(std::move(noise))
  {}

  Spec spec_;
  MellinFunction noise_;
};

//! Throws ErrorCode::invalid_argument when the development points differ.
MellinMultiplier
ridge_multiplier(const RidgeSpec& spec, const MellinFunction& g_mellin);

//! Throws ErrorCode::g0_violation when |M_g| drops below 1e-12 on [-k, k].
//! Grid minima of |M_g| are refined so that isolated zeros between grid
//! nodes are detected.
MellinMultiplier
cutoff_multiplier(const CutoffSpec& spec, const MellinFunction& g_mellin,
                  const QuadratureConfig& q);

//! Threshold of the numerical non-vanishing check on cut-off windows.
inline constexpr double g0_threshold = 1e-12;

//! Estimated density on an x-grid together with its Mellin-domain
//! representation t_j -> M_hat(t_j) R(t_j) on the nonnegative half grid.
struct DensityEstimate
{
  WeightedFunction fn;
  SymmetricGrid grid;
  std::vector<complex> product;
  double max_imag_residual = 0.0;
  MellinMultiplier::Spec spec;
};

//! Inverse Mellin transform of M_hat * R on x_grid.
DensityEstimate
estimate_density(const MellinMultiplier& mult, const EmpiricalMellin& em,
                 std::span<const double> x_grid, const QuadratureConfig& q);

//! Same as above for a closed-form transform standing in for M_hat
//! (population-level estimate).
DensityEstimate
estimate_density(const MellinMultiplier& mult, const MellinFunction& source,
                 std::span<const double> x_grid, const QuadratureConfig& q);

//! Estimate from M_hat precomputed on the nodes of `grid` (used by the
//! selection stage). Every node of `grid` enters the quadrature; for
//! cut-off multipliers the grid must end exactly on the window.
DensityEstimate
estimate_from_grid(const MellinMultiplier& mult, const SymmetricGrid& grid,
                   std::span<const complex> mhat, std::span<const double> x_grid,
                   const QuadratureConfig& q);

//! Truncation used for integrals involving the multiplier: the window for
//! cut-off, a tail fit of |R|^2 otherwise.
Truncation
multiplier_truncation(const MellinMultiplier& mult, const QuadratureConfig& q);

//! int |R(t)|^2 dt over the whole line (no 1/(2 pi) factor).
double
multiplier_norm_sq(const MellinMultiplier& mult, const QuadratureConfig& q);

//! CSV with columns x, f_hat.
void
write_estimate_csv(std::ostream& out, const DensityEstimate& est);

} // namespace mellinridge
