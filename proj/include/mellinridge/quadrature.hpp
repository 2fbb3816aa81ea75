#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mellinridge {

//! Discretisation of integrals over the Mellin line t in R.
struct QuadratureConfig
{
  double t_step = 0.01;       //!< largest admissible grid spacing
  double t_max = 1.0e4;       //!< upper bound on the truncation point
  double rel_tail_tol = 1e-6; //!< acceptable tail mass relative to the total

  void validate() const;
};

//! Composite Simpson rule on [-m*h, m*h] evaluated from the samples
//! f(j*h), j = 0..m, of an even function.
double
simpson_even(std::span<const double> half, std::size_t m, double h);

//! Composite Simpson rule for f on [a, b] with spacing at most `max_step`.
double
simpson(const std::function<double(double)>& f, double a, double b,
        double max_step);

//! Uniform grid t_j = j*h, j = 0..m, standing for the symmetric grid on
//! [-m*h, m*h]. The point -t_j carries the same Simpson weight as t_j.
class SymmetricGrid
{
public:
  SymmetricGrid() = default;

  //! Smallest grid reaching t_max whose spacing does not exceed max_step;
  //! the end point lands exactly on t_max.
  SymmetricGrid(double t_max, double max_step);

  //! Grid with explicit spacing and number of intervals per side.
  static SymmetricGrid with_spacing(double h, std::size_t m);

  std::size_t size() const { return m_ + 1; }
  std::size_t intervals() const { return m_; }
  double step() const { return h_; }
  double t_max() const { return static_cast<double>(m_) * h_; }
  double t(std::size_t j) const { return static_cast<double>(j) * h_; }

  //! Simpson weight of the point +t_j (and of -t_j).
  double weight(std::size_t j) const;

  //! Integral over [-t_max, t_max] of an even function given on t_j.
  double integrate_even(std::span<const double> half) const;

  //! The same spacing truncated to m' <= m intervals per side.
  SymmetricGrid prefix(std::size_t m) const;

private:
  double h_ = 1.0;
  std::size_t m_ = 0;
};

//! Truncation point chosen for an integrand together with the estimated
//! mass beyond it.
struct Truncation
{
  double t_max = 0.0;
  double tail = 0.0; //!< estimate of the integral over [t_max, inf)
};

//! Chooses a truncation point for the integral of a nonnegative `power`
//! over [0, inf). Doubling from `t_start`, the tail beyond T is
//! extrapolated from the dyadic block integrals over [T/4, T/2] and
//! [T/2, T] (exact for power-law decay) and the search stops once it falls
//! below rel_tail_tol of the total or T reaches q.t_max.
Truncation
fit_truncation(const std::function<double(double)>& power,
               const QuadratureConfig& q,
               double t_start = 8.0);

} // namespace mellinridge
