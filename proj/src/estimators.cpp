#include "mellinridge/estimators.hpp"

#include "mellinridge/error.hpp"
#include "format.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mellinridge {

void
RidgeSpec::validate() const
{
  if (!(k > 0.0) || !std::isfinite(k))
    fail(ErrorCode::invalid_argument, "ridge: k must be positive");
  if (!(xi >= 0.0) || !std::isfinite(xi))
    fail(ErrorCode::invalid_argument, "ridge: xi must be >= 0");
  if (!(r >= 0.0) || !std::isfinite(r))
    fail(ErrorCode::invalid_argument, "ridge: r must be >= 0");
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "ridge: c must be finite");
}

void
CutoffSpec::validate() const
{
  if (!(k > 0.0) || !std::isfinite(k))
    fail(ErrorCode::invalid_argument, "cut-off: k must be positive");
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "cut-off: c must be finite");
}

double
MellinMultiplier::k() const
{
  return std::visit([](const auto& s) { return s.k; }, spec_);
}

double
MellinMultiplier::c() const
{
  return std::visit([](const auto& s) { return s.c; }, spec_);
}

complex
MellinMultiplier::operator()(double t) const
{
  if (const auto* ridge = std::get_if<RidgeSpec>(&spec_)) {
    const complex m = noise_(t);
    const double a = std::abs(m);
    const double floor = std::pow(1.0 + std::abs(t), ridge->xi) / ridge->k;
    if (a >= floor)
      return 1.0 / m;
    const double denom = std::pow(std::max(a, floor), ridge->r + 2.0);
    return noise_(-t) * (std::pow(a, ridge->r) / denom);
  }
  const auto& cut = std::get<CutoffSpec>(spec_);
  // grid end points m * (k / m) may exceed k by an ulp
  if (std::abs(t) > cut.k * (1.0 + 1e-12))
    return 0.0;
  return 1.0 / noise_(t);
}

bool
MellinMultiplier::damped(double t) const
{
  if (const auto* ridge = std::get_if<RidgeSpec>(&spec_))
    return std::pow(1.0 + std::abs(t), ridge->xi) / ridge->k >
           std::abs(noise_(t));
  return std::abs(t) > std::get<CutoffSpec>(spec_).k * (1.0 + 1e-12);
}

std::optional<double>
MellinMultiplier::support() const
{
  if (is_ridge())
    return std::nullopt;
  return std::get<CutoffSpec>(spec_).k;
}

MellinMultiplier
ridge_multiplier(const RidgeSpec& spec, const MellinFunction& g_mellin)
{
  spec.validate();
  if (spec.c != g_mellin.c())
    fail(ErrorCode::invalid_argument,
         "ridge_multiplier: development point of the noise transform (" +
           std::to_string(g_mellin.c()) + ") differs from c = " +
           std::to_string(spec.c));
  return MellinMultiplier(spec, g_mellin);
}

namespace {

// Gauss-Newton steps on |M(t)|^2 from a bracketed minimum; Brent alone stops
// at ~sqrt(eps) in t, which leaves |M| ~ 1e-8 next to a simple zero
double
polish_minimum(const MellinFunction& m, double t, double lo, double hi)
{
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  for (int it = 0; it < 20; ++it) {
    const complex v = m(t);
    const complex d = (m(t + h) - m(t - h)) / (2.0 * h);
    const double dd = std::norm(d);
    if (!(dd > 0.0))
      break;
    const double step = (std::conj(d) * v).real() / dd;
    const double next = std::clamp(t - step, lo, hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t)))
      break;
    t = next;
  }
  return t;
}

} // namespace

MellinMultiplier
cutoff_multiplier(const CutoffSpec& spec, const MellinFunction& g_mellin,
                  const QuadratureConfig& q)
{
  spec.validate();
  q.validate();
  if (spec.c != g_mellin.c())
    fail(ErrorCode::invalid_argument,
         "cutoff_multiplier: development point of the noise transform (" +
           std::to_string(g_mellin.c()) + ") differs from c = " +
           std::to_string(spec.c));

  const SymmetricGrid grid(spec.k, q.t_step);
  const std::size_t n = 2 * grid.intervals() + 1;
  const auto node = [&](std::size_t i) {
    return -spec.k + static_cast<double>(i) * grid.step();
  };
  const auto modulus = [&](double t) { return std::abs(g_mellin(t)); };

  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = modulus(node(i));

  double lowest = std::min(a.front(), a.back());
  double where = a.front() <= a.back() ? -spec.k : spec.k;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(a[i] <= a[i - 1] && a[i] <= a[i + 1]))
      continue;
    const auto [t_min, v_min] = boost::math::tools::brent_find_minima(
      modulus, node(i - 1), node(i + 1), std::numeric_limits<double>::digits);
    const double t_star = polish_minimum(g_mellin, t_min, node(i - 1), node(i + 1));
    const double v = std::min({ v_min, a[i], modulus(t_star) });
    if (v < lowest) {
      lowest = v;
      where = t_star;
    }
  }
  if (!(lowest >= g0_threshold))
    fail(ErrorCode::g0_violation,
         "cutoff_multiplier: noise Mellin transform vanishes near t = " +
           std::to_string(where) + " inside [-k, k] with k = " +
           std::to_string(spec.k));
  return MellinMultiplier(spec, g_mellin);
}

namespace {

DensityEstimate
finish_estimate(const MellinMultiplier& mult, const SymmetricGrid& grid,
                std::vector<complex> pos, const std::vector<complex>& neg,
                std::span<const double> x_grid)
{
  Inversion inv = invert_on_grid(grid, pos, neg, mult.c(), x_grid);
  if (inv.max_imag_residual > hermitian_tolerance)
    fail(ErrorCode::numerical,
         "estimate_density: imaginary residue " +
           std::to_string(inv.max_imag_residual) + " exceeds tolerance");
  DensityEstimate est;
  est.fn.x_grid.assign(x_grid.begin(), x_grid.end());
  est.fn.values = std::move(inv.values);
  est.fn.c = mult.c();
  est.fn.validate();
  est.grid = grid;
  est.product = std::move(pos);
  est.max_imag_residual = inv.max_imag_residual;
  est.spec = mult.spec();
  return est;
}

} // namespace

Truncation
multiplier_truncation(const MellinMultiplier& mult, const QuadratureConfig& q)
{
  q.validate();
  if (const auto window = mult.support())
    return { *window, 0.0 };
  const auto power = [&](double t) {
    return std::norm(mult(t)) + std::norm(mult(-t));
  };
  return fit_truncation(power, q, std::max(8.0, 2.0 * mult.k()));
}

double
multiplier_norm_sq(const MellinMultiplier& mult, const QuadratureConfig& q)
{
  const Truncation tr = multiplier_truncation(mult, q);
  const SymmetricGrid grid(tr.t_max, q.t_step);
  std::vector<double> half(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    half[j] = std::norm(mult(grid.t(j))) + std::norm(mult(-grid.t(j)));
  return 0.5 * grid.integrate_even(half) + tr.tail;
}

DensityEstimate
estimate_from_grid(const MellinMultiplier& mult, const SymmetricGrid& grid,
                   std::span<const complex> mhat, std::span<const double> x_grid,
                   const QuadratureConfig& q)
{
  q.validate();
  if (mhat.size() < grid.size())
    fail(ErrorCode::invalid_argument, "estimate_from_grid: too few samples");
  if (const auto window = mult.support()) {
    if (std::abs(grid.t_max() - *window) > 1e-9 * std::max(1.0, *window))
      fail(ErrorCode::invalid_argument,
           "estimate_from_grid: grid must end on the cut-off window");
  }
  std::vector<complex> pos(grid.size()), neg(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.t(j);
    // M_hat(-t) = conj(M_hat(t)) for real samples
    pos[j] = mhat[j] * mult(t);
    neg[j] = std::conj(mhat[j]) * mult(-t);
  }
  return finish_estimate(mult, grid, std::move(pos), neg, x_grid);
}

DensityEstimate
estimate_density(const MellinMultiplier& mult, const EmpiricalMellin& em,
                 std::span<const double> x_grid, const QuadratureConfig& q)
{
  if (em.c() != mult.c())
    fail(ErrorCode::invalid_argument,
         "estimate_density: sample and multiplier use different c");
  const Truncation tr = multiplier_truncation(mult, q);
  const SymmetricGrid grid(tr.t_max, q.t_step);
  const auto mhat = em.on_grid(grid);
  return estimate_from_grid(mult, grid, mhat, x_grid, q);
}

DensityEstimate
estimate_density(const MellinMultiplier& mult, const MellinFunction& source,
                 std::span<const double> x_grid, const QuadratureConfig& q)
{
  q.validate();
  if (source.c() != mult.c())
    fail(ErrorCode::invalid_argument,
         "estimate_density: source and multiplier use different c");
  Truncation tr{ 0.0, 0.0 };
  if (const auto window = mult.support()) {
    tr.t_max = *window;
  } else {
    const auto power = [&](double t) {
      return std::norm(source(t) * mult(t)) + std::norm(source(-t) * mult(-t));
    };
    tr = fit_truncation(power, q);
  }
  const SymmetricGrid grid(tr.t_max, q.t_step);
  std::vector<complex> pos(grid.size()), neg(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.t(j);
    pos[j] = source(t) * mult(t);
    neg[j] = source(-t) * mult(-t);
  }
  return finish_estimate(mult, grid, std::move(pos), neg, x_grid);
}

void
write_estimate_csv(std::ostream& out, const DensityEstimate& est)
{
  out << "x,f_hat\n";
  for (std::size_t i = 0; i < est.fn.x_grid.size(); ++i) {
    detail::put_number(out, est.fn.x_grid[i]);
    out.put(',');
    detail::put_number(out, est.fn.values[i]);
    out.put('\n');
  }
}

} // namespace mellinridge
