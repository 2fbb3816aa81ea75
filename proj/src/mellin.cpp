#include "mellinridge/mellin.hpp"

#include "mellinridge/complex_gamma.hpp"
#include "mellinridge/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mellinridge {

namespace {

constexpr std::array<std::pair<DensityId, std::string_view>, 6> names = { {
  { DensityId::beta25, "beta25" },
  { DensityId::loggamma, "loggamma" },
  { DensityId::gamma5, "gamma5" },
  { DensityId::lognormal, "lognormal" },
  { DensityId::noise_uniform, "noise_uniform" },
  { DensityId::noise_beta, "noise_beta" },
} };

// (1.5^s - 0.5^s) / s with the removable singularity at s = 0
complex
uniform_noise_transform(complex s)
{
  const double a = std::log(1.5);
  const double b = std::log(0.5);
  if (std::abs(s) < 1e-4) {
    return (a - b) + s * (a * a - b * b) / 2.0 +
           s * s * (a * a * a - b * b * b) / 6.0;
  }
  return (std::exp(s * a) - std::exp(s * b)) / s;
}

// resynchronise the phase recurrences every so many steps
constexpr std::size_t resync_period = 256;

} // namespace

std::string_view
to_string(DensityId id)
{
  for (const auto& [key, name] : names)
    if (key == id)
      return name;
  return "unknown";
}

DensityId
density_from_string(std::string_view name)
{
  for (const auto& [key, n] : names)
    if (n == name)
      return key;
  fail(ErrorCode::unknown_id, "unknown density id '" + std::string(name) + "'");
}

MellinFunction::MellinFunction(double c, Eval eval,
                               std::optional<double> decay_exponent)
  : c_(c)
  , eval_(std::move(eval))
  , decay_(decay_exponent)
{
  if (!eval_)
    fail(ErrorCode::invalid_argument, "MellinFunction: empty evaluator");
  if (!decay_)
    return;
  if (!(*decay_ > 0.0))
    fail(ErrorCode::invalid_argument, "MellinFunction: decay exponent <= 0");

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  auto probe = [&](double t) {
    const double ratio =
      std::abs(eval_(t)) * std::pow(1.0 + t * t, *decay_ / 2.0);
    if (!std::isfinite(ratio))
      fail(ErrorCode::numerical, "MellinFunction: non-finite transform");
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  };
  probe(0.0);
  constexpr int probes = 2000;
  for (int i = 0; i <= probes; ++i)
    probe(std::pow(10.0, -2.0 + 5.0 * i / probes));
  if (!(lo > 1e-12 * hi))
    fail(ErrorCode::numerical,
         "MellinFunction: polynomial decay bound fails (transform nearly "
         "vanishes)");
  bounds_ = { lo, hi };
}

MellinFunction
catalog_mellin(DensityId id, double c)
{
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "catalog_mellin: c must be finite");
  auto undefined = [&](const char* need) {
    fail(ErrorCode::domain, "Mellin transform of " +
                              std::string(to_string(id)) +
                              " is undefined at c = " + std::to_string(c) +
                              " (needs " + need + ")");
  };
  switch (id) {
    case DensityId::beta25:
      if (c <= -1.0)
        undefined("c > -1");
      // B(s,5)/B(2,5) = 720 Gamma(s)/Gamma(s+5)
      return MellinFunction(
        c,
        [c](double t) {
          const complex s(c + 1.0, t);
          return 720.0 * std::exp(log_gamma(s) - log_gamma(s + 5.0));
        },
        5.0);
    case DensityId::loggamma:
      if (c >= 6.0)
        undefined("c < 6");
      return MellinFunction(
        c, [c](double t) { return std::pow(5.0 / complex(6.0 - c, -t), 5); },
        5.0);
    case DensityId::gamma5:
      if (c <= -4.0)
        undefined("c > -4");
      return MellinFunction(c, [c](double t) {
        return std::exp(log_gamma(complex(c + 4.0, t)) - std::log(24.0));
      });
    case DensityId::lognormal:
      return MellinFunction(c, [c](double t) {
        const complex s(c - 1.0, t);
        return std::exp(s * s * 0.02);
      });
    case DensityId::noise_uniform: {
      // zeros at t = 2 pi m / log 3 when c = 0, so no decay certificate
      std::optional<double> decay;
      if (c != 0.0)
        decay = 1.0;
      return MellinFunction(
        c, [c](double t) { return uniform_noise_transform(complex(c, t)); },
        decay);
    }
    case DensityId::noise_beta:
      if (c <= -1.0)
        undefined("c > -1");
      return MellinFunction(
        c, [c](double t) { return 2.0 / complex(c + 1.0, t); }, 1.0);
  }
  fail(ErrorCode::unknown_id, "catalog_mellin: unknown density");
}

EmpiricalMellin::EmpiricalMellin(std::vector<double> sample, double c)
  : sample_(std::move(sample))
  , c_(c)
{
  if (sample_.empty())
    fail(ErrorCode::invalid_argument, "EmpiricalMellin: empty sample");
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "EmpiricalMellin: c must be finite");
  const double n = static_cast<double>(sample_.size());
  log_y_.reserve(sample_.size());
  weight_.reserve(sample_.size());
  for (std::size_t j = 0; j < sample_.size(); ++j) {
    const double y = sample_[j];
    if (!(y > 0.0) || !std::isfinite(y))
      fail(ErrorCode::invalid_argument,
           "EmpiricalMellin: sample value " + std::to_string(j + 1) +
             " is not a positive finite number");
    log_y_.push_back(std::log(y));
    weight_.push_back(std::exp((c - 1.0) * log_y_.back()));
    weight_sum_ += weight_.back();
  }
  weight_sum_ /= n;
}

complex
EmpiricalMellin::operator()(double t) const
{
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < log_y_.size(); ++j) {
    re += weight_[j] * std::cos(t * log_y_[j]);
    im += weight_[j] * std::sin(t * log_y_[j]);
  }
  const double n = static_cast<double>(log_y_.size());
  return { re / n, im / n };
}

std::vector<complex>
EmpiricalMellin::on_grid(const SymmetricGrid& grid) const
{
  const std::size_t n = log_y_.size();
  const double h = grid.step();
  const double nd = static_cast<double>(n);
  std::vector<double> zr(n), zi(n), sr(n), si(n);
  for (std::size_t i = 0; i < n; ++i) {
    sr[i] = std::cos(h * log_y_[i]);
    si[i] = std::sin(h * log_y_[i]);
  }
  std::vector<complex> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j % resync_period == 0) {
      const double t = grid.t(j);
      for (std::size_t i = 0; i < n; ++i) {
        zr[i] = weight_[i] * std::cos(t * log_y_[i]);
        zi[i] = weight_[i] * std::sin(t * log_y_[i]);
      }
    }
    std::array<double, 4> ar{};
    std::array<double, 4> ai{};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        const double r = zr[i + l];
        const double m = zi[i + l];
        ar[l] += r;
        ai[l] += m;
        zr[i + l] = r * sr[i + l] - m * si[i + l];
        zi[i + l] = r * si[i + l] + m * sr[i + l];
      }
    }
    for (; i < n; ++i) {
      const double r = zr[i];
      const double m = zi[i];
      ar[0] += r;
      ai[0] += m;
      zr[i] = r * sr[i] - m * si[i];
      zi[i] = r * si[i] + m * sr[i];
    }
    out[j] = { ((ar[0] + ar[1]) + (ar[2] + ar[3])) / nd,
               ((ai[0] + ai[1]) + (ai[2] + ai[3])) / nd };
  }
  return out;
}

void
WeightedFunction::validate() const
{
  if (x_grid.size() != values.size())
    fail(ErrorCode::invalid_argument,
         "WeightedFunction: grid and values differ in length");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0))
      fail(ErrorCode::invalid_argument, "WeightedFunction: grid must be > 0");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      fail(ErrorCode::invalid_argument,
           "WeightedFunction: grid must be strictly increasing");
  }
}

std::vector<double>
log_spaced_grid(double x_min, double x_max, std::size_t n)
{
  if (!(x_min > 0.0) || !(x_max > x_min) || n < 2)
    fail(ErrorCode::invalid_argument,
         "log_spaced_grid: need 0 < x_min < x_max and n >= 2");
  std::vector<double> x(n);
  const double a = std::log(x_min);
  const double step = (std::log(x_max) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::exp(a + step * static_cast<double>(i));
  x.front() = x_min;
  x.back() = x_max;
  return x;
}

Inversion
invert_on_grid(const SymmetricGrid& grid, std::span<const complex> pos,
               std::span<const complex> neg, double c,
               std::span<const double> x_grid)
{
  if (pos.size() < grid.size() || neg.size() < grid.size())
    fail(ErrorCode::invalid_argument, "invert_on_grid: too few samples");
  const std::size_t nx = x_grid.size();
  const double h = grid.step();

  std::vector<double> lx(nx), zr(nx), zi(nx), sr(nx), si(nx);
  std::vector<double> acc_r(nx, 0.0), acc_i(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    if (!(x_grid[i] > 0.0))
      fail(ErrorCode::invalid_argument, "invert_on_grid: x must be > 0");
    lx[i] = std::log(x_grid[i]);
    sr[i] = std::cos(h * lx[i]);
    si[i] = -std::sin(h * lx[i]);
  }

  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j % resync_period == 0) {
      const double t = grid.t(j);
      for (std::size_t i = 0; i < nx; ++i) {
        zr[i] = std::cos(t * lx[i]);
        zi[i] = -std::sin(t * lx[i]);
      }
    }
    const double w = grid.weight(j);
    if (j == 0) {
      // t = 0 is a single node of the symmetric grid
      for (std::size_t i = 0; i < nx; ++i) {
        acc_r[i] += w * pos[0].real();
        acc_i[i] += w * pos[0].imag();
      }
    } else {
      const double pr = pos[j].real(), pi = pos[j].imag();
      const double nr = neg[j].real(), ni = neg[j].imag();
      for (std::size_t i = 0; i < nx; ++i) {
        // z H(t) + conj(z) H(-t), z = x^(-i t)
        const double a = zr[i], b = zi[i];
        acc_r[i] += w * ((a * pr - b * pi) + (a * nr + b * ni));
        acc_i[i] += w * ((a * pi + b * pr) + (a * ni - b * nr));
      }
    }
    for (std::size_t i = 0; i < nx; ++i) {
      const double a = zr[i], b = zi[i];
      zr[i] = a * sr[i] - b * si[i];
      zi[i] = a * si[i] + b * sr[i];
    }
  }

  Inversion out;
  out.values.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double scale = std::exp(-c * lx[i]) / (2.0 * std::numbers::pi);
    const double re = scale * acc_r[i];
    const double im = scale * acc_i[i];
    out.values[i] = re;
    out.max_imag_residual =
      std::max(out.max_imag_residual, std::abs(im) / (1.0 + std::abs(re)));
  }
  return out;
}

WeightedFunction
inverse_mellin(const std::function<complex(double)>& transform, double c,
               std::span<const double> x_grid, const QuadratureConfig& q)
{
  q.validate();
  // pointwise error is bounded by the L1 tail of H
  const auto modulus = [&](double t) {
    return std::abs(transform(t)) + std::abs(transform(-t));
  };
  const Truncation tr = fit_truncation(modulus, q);
  const SymmetricGrid grid(tr.t_max, q.t_step);

  std::vector<complex> pos(grid.size()), neg(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    pos[j] = transform(grid.t(j));
    neg[j] = transform(-grid.t(j));
    if (!std::isfinite(pos[j].real()) || !std::isfinite(pos[j].imag()) ||
        !std::isfinite(neg[j].real()) || !std::isfinite(neg[j].imag()))
      fail(ErrorCode::numerical, "inverse_mellin: non-finite transform at t = " +
                                   std::to_string(grid.t(j)));
  }

  WeightedFunction out;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.c = c;
  Inversion inv = invert_on_grid(grid, pos, neg, c, x_grid);
  if (inv.max_imag_residual > hermitian_tolerance)
    fail(ErrorCode::numerical,
         "inverse_mellin: result is not real (imaginary residue " +
           std::to_string(inv.max_imag_residual) +
           "); transform lacks Hermitian symmetry");
  out.values = std::move(inv.values);
  out.validate();
  return out;
}

double
plancherel_norm_sq(const std::function<complex(double)>& transform,
                   const QuadratureConfig& q)
{
  q.validate();
  const auto power = [&](double t) {
    return std::norm(transform(t)) + std::norm(transform(-t));
  };
  const Truncation tr = fit_truncation(power, q);
  const SymmetricGrid grid(tr.t_max, q.t_step);
  std::vector<double> half(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    half[j] = power(grid.t(j));
    if (!std::isfinite(half[j]))
      fail(ErrorCode::numerical, "plancherel_norm_sq: non-finite transform");
  }
  // power is even and already sums both half-lines
  const double body = 0.5 * grid.integrate_even(half);
  return (body + tr.tail) / (2.0 * std::numbers::pi);
}

double
weighted_l2_dist_sq(const WeightedFunction& a, const WeightedFunction& b)
{
  a.validate();
  b.validate();
  if (a.x_grid.size() != b.x_grid.size() || a.c != b.c)
    fail(ErrorCode::invalid_argument,
         "weighted_l2_dist_sq: grid or development point mismatch");
  for (std::size_t i = 0; i < a.x_grid.size(); ++i)
    if (std::abs(a.x_grid[i] - b.x_grid[i]) > 1e-12 * a.x_grid[i])
      fail(ErrorCode::invalid_argument, "weighted_l2_dist_sq: grid mismatch");

  const double p = 2.0 * a.c - 1.0;
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < a.x_grid.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    const double cur = d * d * std::pow(a.x_grid[i], p);
    if (i > 0)
      sum += 0.5 * (a.x_grid[i] - a.x_grid[i - 1]) * (prev + cur);
    prev = cur;
  }
  return sum;
}

} // namespace mellinridge
