#include "mellinridge/quadrature.hpp"

#include "mellinridge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mellinridge {

void
QuadratureConfig::validate() const
{
  if (!(t_step > 0.0) || !std::isfinite(t_step))
    fail(ErrorCode::invalid_argument, "quadrature: t_step must be positive");
  if (!(t_max >= 10.0 * t_step) || !std::isfinite(t_max))
    fail(ErrorCode::invalid_argument,
         "quadrature: t_max must be at least 10 * t_step");
  if (!(rel_tail_tol > 0.0 && rel_tail_tol <= 0.01))
    fail(ErrorCode::invalid_argument,
         "quadrature: rel_tail_tol must lie in (0, 0.01]");
}

namespace {

double
simpson_weight(std::size_t i, std::size_t n_intervals, double h)
{
  if (i == 0 || i == n_intervals)
    return h / 3.0;
  return (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
}

} // namespace

double
simpson_even(std::span<const double> half, std::size_t m, double h)
{
  if (half.size() < m + 1)
    fail(ErrorCode::invalid_argument, "simpson_even: too few samples");
  if (m == 0)
    return 0.0;
  // point t_j sits at index m + j of the full grid with 2m intervals
  double sum = simpson_weight(m, 2 * m, h) * half[0];
  for (std::size_t j = 1; j <= m; ++j)
    sum += 2.0 * simpson_weight(m + j, 2 * m, h) * half[j];
  return sum;
}

double
simpson(const std::function<double(double)>& f, double a, double b,
        double max_step)
{
  if (b <= a)
    return 0.0;
  auto n = static_cast<std::size_t>(std::ceil((b - a) / (2.0 * max_step)));
  n = std::max<std::size_t>(n, 1) * 2;
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i)
    sum += simpson_weight(i, n, h) * f(a + static_cast<double>(i) * h);
  return sum;
}

SymmetricGrid::SymmetricGrid(double t_max, double max_step)
{
  if (!(t_max > 0.0) || !(max_step > 0.0) || !std::isfinite(t_max))
    fail(ErrorCode::invalid_argument, "grid: t_max and step must be positive");
  // the 1e-9 slack keeps t_max/max_step = 100.0000000001 from adding a point
  const double ratio = t_max / max_step;
  m_ = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
  m_ = std::max<std::size_t>(m_, 1);
  h_ = t_max / static_cast<double>(m_);
}

SymmetricGrid
SymmetricGrid::with_spacing(double h, std::size_t m)
{
  if (!(h > 0.0) || m == 0)
    fail(ErrorCode::invalid_argument, "grid: need h > 0 and m >= 1");
  SymmetricGrid g;
  g.h_ = h;
  g.m_ = m;
  return g;
}

double
SymmetricGrid::weight(std::size_t j) const
{
  return simpson_weight(m_ + j, 2 * m_, h_);
}

double
SymmetricGrid::integrate_even(std::span<const double> half) const
{
  return simpson_even(half, m_, h_);
}

SymmetricGrid
SymmetricGrid::prefix(std::size_t m) const
{
  if (m == 0 || m > m_)
    fail(ErrorCode::invalid_argument, "grid: prefix out of range");
  return with_spacing(h_, m);
}

Truncation
fit_truncation(const std::function<double(double)>& power,
               const QuadratureConfig& q,
               double t_start)
{
  q.validate();
  const double h = q.t_step;
  double t = std::clamp(t_start, 8.0 * h, q.t_max);

  double head = simpson(power, 0.0, t / 4.0, h);
  double block1 = simpson(power, t / 4.0, t / 2.0, h);
  double block2 = simpson(power, t / 2.0, t, h);

  for (;;) {
    if (!std::isfinite(head + block1 + block2))
      fail(ErrorCode::numerical, "fit_truncation: non-finite integrand");

    double tail = std::numeric_limits<double>::infinity();
    if (block2 == 0.0) {
      tail = 0.0;
    } else if (block1 > 0.0 && block2 < block1) {
      // blocks of a t^-p tail shrink geometrically with ratio 2^(1-p)
      const double rho = block2 / block1;
      tail = block2 * rho / (1.0 - rho);
    }
    const double total = head + block1 + block2;
    if (std::isfinite(tail) && tail <= q.rel_tail_tol * (total + tail))
      return { t, tail };
    if (t >= q.t_max)
      return { t, std::isfinite(tail) ? tail : 0.0 };

    const double next = std::min(2.0 * t, q.t_max);
    if (next < 2.0 * t) {
      // final partial step up to the cap: recompute the blocks there
      head = simpson(power, 0.0, next / 4.0, h);
      block1 = simpson(power, next / 4.0, next / 2.0, h);
      block2 = simpson(power, next / 2.0, next, h);
    } else {
      head += block1;
      block1 = block2;
      block2 = simpson(power, t, next, h);
    }
    t = next;
  }
}

} // namespace mellinridge
