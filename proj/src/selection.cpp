#include "mellinridge/selection.hpp"

#include "mellinridge/error.hpp"
#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mellinridge {

std::string_view
to_string(Method m)
{
  return m == Method::ridge ? "ridge" : "cutoff";
}

Method
method_from_string(std::string_view name)
{
  if (name == "ridge")
    return Method::ridge;
  if (name == "cutoff")
    return Method::cutoff;
  fail(ErrorCode::unknown_id, "unknown method '" + std::string(name) +
                                "' (expected ridge or cutoff)");
}

SelectionConfig
SelectionConfig::for_noise(DensityId noise, double c)
{
  SelectionConfig cfg;
  cfg.c = c;
  switch (noise) {
    case DensityId::noise_uniform:
      cfg.chi1 = cfg.chi2 = 72.0;
      cfg.chi = 5.0;
      break;
    case DensityId::noise_beta:
      cfg.chi1 = cfg.chi2 = 6.0;
      cfg.chi = 3.0;
      break;
    default:
      fail(ErrorCode::invalid_argument,
           std::string(to_string(noise)) + " is not an error density");
  }
  return cfg;
}

void
SelectionConfig::validate() const
{
  if (!(chi1 > 0.0) || !std::isfinite(chi1))
    fail(ErrorCode::invalid_argument, "selection: chi1 must be positive");
  if (!(chi2 >= chi1) || !std::isfinite(chi2))
    fail(ErrorCode::invalid_argument, "selection: chi2 must be >= chi1");
  if (!(chi > 0.0) || !std::isfinite(chi))
    fail(ErrorCode::invalid_argument, "selection: chi must be positive");
  if (!(r >= 0.0) || !std::isfinite(r))
    fail(ErrorCode::invalid_argument, "selection: r must be >= 0");
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "selection: c must be finite");
  if (xi != 0.0)
    fail(ErrorCode::invalid_argument,
         "selection: only xi = 0 is supported by the selection rules");
  if (k_scan_limit < 1)
    fail(ErrorCode::invalid_argument, "selection: k_scan_limit must be >= 1");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1)
      fail(ErrorCode::invalid_argument, "selection: k_grid must be positive");
    if (i > 0 && k_grid[i] <= k_grid[i - 1])
      fail(ErrorCode::invalid_argument,
           "selection: k_grid must be strictly increasing");
  }
}

std::size_t
SelectionResult::admissible_count() const
{
  return static_cast<std::size_t>(
    std::count_if(levels.begin(), levels.end(),
                  [](const LevelDiagnostics& d) { return d.admissible; }));
}

double
sigma_hat(const EmpiricalMellin& em)
{
  const auto y = em.sample();
  if (y.empty())
    fail(ErrorCode::invalid_argument, "sigma_hat: empty sample");
  const double p = 2.0 * (em.c() - 1.0);
  double sum = 0.0;
  for (double v : y)
    sum += p == 0.0 ? 1.0 : std::pow(v, p);
  return sum / static_cast<double>(y.size());
}

namespace {

// 1/(2 pi) * full-line Simpson weight of the node pair +-t_j
std::vector<double>
pair_weights(const SymmetricGrid& grid)
{
  std::vector<double> w(grid.size());
  for (std::size_t j = 0; j < w.size(); ++j)
    w[j] = (j == 0 ? 1.0 : 2.0) * grid.weight(j) / (2.0 * std::numbers::pi);
  return w;
}

} // namespace

Selector::Selector(Method method, const MellinFunction& g_mellin,
                   const SelectionConfig& cfg, std::size_t n,
                   const QuadratureConfig& q)
  : method_(method)
  , noise_(g_mellin)
  , cfg_(cfg)
  , n_(n)
  , q_(q)
{
  cfg_.validate();
  q_.validate();
  if (n_ == 0)
    fail(ErrorCode::invalid_argument, "selection: n must be at least 1");
  if (g_mellin.c() != cfg_.c)
    fail(ErrorCode::invalid_argument,
         "selection: noise transform and config use different c");

  const std::size_t candidates =
    cfg_.k_grid.empty() ? static_cast<std::size_t>(cfg_.k_scan_limit)
                        : cfg_.k_grid.size();
  const auto candidate = [&](std::size_t i) {
    return cfg_.k_grid.empty() ? static_cast<int>(i + 1) : cfg_.k_grid[i];
  };
  const double budget = static_cast<double>(n_);

  if (method_ == Method::ridge) {
    std::vector<std::size_t> intervals;
    for (std::size_t i = 0; i < candidates; ++i) {
      const int k = candidate(i);
      const auto mult = multiplier(k);
      const Truncation tr = multiplier_truncation(mult, q_);
      const SymmetricGrid own(tr.t_max, q_.t_step);
      std::vector<double> half(own.size());
      for (std::size_t j = 0; j < own.size(); ++j)
        half[j] = std::norm(mult(own.t(j))) + std::norm(mult(-own.t(j)));
      const double norm = 0.5 * own.integrate_even(half) + tr.tail;
      if (!(norm <= budget)) {
        rejected_k_ = k;
        rejected_norm_ = norm;
        break;
      }
      levels_.push_back(k);
      norms_.push_back(norm);
      intervals.push_back(static_cast<std::size_t>(
        std::ceil(tr.t_max / q_.t_step - 1e-9 * tr.t_max / q_.t_step)));
    }
    if (levels_.empty())
      fail(ErrorCode::empty_admissible,
           "selection: no ridge level satisfies ||R_k||^2 <= n (first "
           "candidate k = " + std::to_string(rejected_k_) + " has norm " +
             std::to_string(rejected_norm_) + ", n = " + std::to_string(n_) +
             ")");
    intervals_ = intervals;
    grid_ = SymmetricGrid::with_spacing(
      q_.t_step, *std::max_element(intervals.begin(), intervals.end()));
    rows_.resize(levels_.size());
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const auto mult = multiplier(levels_[i]);
      auto& row = rows_[i];
      row.resize(grid_.size());
      for (std::size_t j = 0; j < grid_.size(); ++j)
        row[j] = mult(grid_.t(j));
    }
    return;
  }

  // cut-off: integer windows must end on grid nodes
  const auto per_unit = static_cast<std::size_t>(
    std::max(1.0, std::ceil(1.0 / q_.t_step - 1e-9 / q_.t_step)));
  const double h = 1.0 / static_cast<double>(per_unit);
  std::vector<complex> inv;
  const double budget_cut = 2.0 * std::numbers::pi * budget;
  for (std::size_t i = 0; i < candidates; ++i) {
    const int k = candidate(i);
    const std::size_t m = static_cast<std::size_t>(k) * per_unit;
    for (std::size_t j = inv.size(); j <= m; ++j) {
      const double t = static_cast<double>(j) * h;
      inv.push_back(1.0 / noise_(t));
      inv_noise_sq_.push_back(std::norm(inv.back()) +
                              std::norm(1.0 / noise_(-t)));
    }
    const double norm = 0.5 * simpson_even(inv_noise_sq_, m, h);
    if (!(norm <= budget_cut)) {
      rejected_k_ = k;
      rejected_norm_ = norm;
      break;
    }
    levels_.push_back(k);
    norms_.push_back(norm);
    intervals_.push_back(m);
  }
  if (levels_.empty())
    fail(ErrorCode::empty_admissible,
         "selection: no cut-off window satisfies ||1/M_g||^2 <= 2 pi n "
         "(first candidate k = " + std::to_string(rejected_k_) +
           ", n = " + std::to_string(n_) + ")");
  // the largest admissible window must keep M_g away from zero
  (void)cutoff_multiplier(CutoffSpec{ static_cast<double>(levels_.back()), cfg_.c },
                          noise_, q_);
  grid_ = SymmetricGrid::with_spacing(h, intervals_.back());
  inv.resize(grid_.size());
  inv_noise_sq_.resize(grid_.size());
  rows_.push_back(std::move(inv));
}

MellinMultiplier
Selector::multiplier(double k) const
{
  if (method_ == Method::ridge)
    return ridge_multiplier(RidgeSpec{ k, cfg_.xi, cfg_.r, cfg_.c }, noise_);
  return cutoff_multiplier(CutoffSpec{ k, cfg_.c }, noise_, q_);
}

std::size_t
Selector::level_index(int k) const
{
  const auto it = std::find(levels_.begin(), levels_.end(), k);
  if (it == levels_.end())
    fail(ErrorCode::invalid_argument,
         "selection: k = " + std::to_string(k) + " is not an admissible level");
  return static_cast<std::size_t>(it - levels_.begin());
}

SelectionResult
Selector::select(const EmpiricalMellin& em) const
{
  if (em.c() != cfg_.c)
    fail(ErrorCode::invalid_argument,
         "selection: sample transform and config use different c");
  if (em.size() != n_)
    fail(ErrorCode::invalid_argument,
         "selection: selector was prepared for n = " + std::to_string(n_) +
           " but the sample has " + std::to_string(em.size()) + " points");
  return select_on_grid(em.on_grid(grid_), sigma_hat(em));
}

SelectionResult
Selector::select_on_grid(std::span<const complex> mhat, double sig) const
{
  if (mhat.size() < grid_.size())
    fail(ErrorCode::invalid_argument, "selection: M_hat does not cover the grid");
  if (!(sig > 0.0) || !std::isfinite(sig))
    fail(ErrorCode::invalid_argument, "selection: sigma_hat must be positive");

  const std::size_t levels = levels_.size();
  const double nd = static_cast<double>(n_);
  SelectionResult res;
  res.sigma_hat = sig;
  res.levels.resize(levels);

  if (method_ == Method::ridge) {
    const auto w = pair_weights(grid_);
    std::vector<double> p(grid_.size());
    for (std::size_t j = 0; j < p.size(); ++j)
      p[j] = w[j] * std::norm(mhat[j]);

    std::vector<double> v(levels);
    for (std::size_t i = 0; i < levels; ++i)
      v[i] = 2.0 * sig * norms_[i] / nd;

    for (std::size_t i = 0; i < levels; ++i) {
      // levels at or below k contribute (0 - penalty)_+ = 0
      double a = 0.0;
      for (std::size_t l = i + 1; l < levels; ++l) {
        const auto& hi = rows_[l];
        const auto& lo = rows_[i];
        double contrast = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
          contrast += p[j] * std::norm(hi[j] - lo[j]);
        const double pen =
          cfg_.chi1 *
          (cfg_.penalty == PenaltyPlacement::compared_level ? v[l] : v[i]);
        a = std::max(a, contrast - pen);
      }
      auto& d = res.levels[i];
      d.k = levels_[i];
      d.a_hat = a;
      d.v_hat = v[i];
      d.objective = a + cfg_.chi2 * v[i];
      d.admissible = true;
    }
  } else {
    const double h = grid_.step();
    std::vector<double> q(grid_.size());
    for (std::size_t j = 0; j < q.size(); ++j)
      q[j] = std::norm(mhat[j]) * inv_noise_sq_[j];
    for (std::size_t i = 0; i < levels; ++i) {
      const double fit =
        0.5 * simpson_even(q, intervals_[i], h) / (2.0 * std::numbers::pi);
      const double pen = 2.0 * cfg_.chi * sig * norms_[i] /
                         (2.0 * std::numbers::pi * nd);
      auto& d = res.levels[i];
      d.k = levels_[i];
      d.a_hat = -fit;
      d.v_hat = pen;
      d.objective = pen - fit;
      d.admissible = true;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < levels; ++i)
    if (res.levels[i].objective < res.levels[best].objective)
      best = i;
  res.k_hat = res.levels[best].k;

  if (rejected_k_ > 0) {
    LevelDiagnostics d;
    d.k = rejected_k_;
    d.v_hat = method_ == Method::ridge
                ? 2.0 * sig * rejected_norm_ / nd
                : 2.0 * cfg_.chi * sig * rejected_norm_ /
                    (2.0 * std::numbers::pi * nd);
    d.objective = (method_ == Method::ridge ? cfg_.chi2 : 1.0) * d.v_hat;
    d.admissible = false;
    res.levels.push_back(d);
  }
  return res;
}

DensityEstimate
Selector::estimate(std::span<const complex> mhat, int k,
                   std::span<const double> x_grid) const
{
  const std::size_t i = level_index(k);
  return estimate_from_grid(multiplier(k), grid_.prefix(intervals_[i]), mhat,
                            x_grid, q_);
}

std::vector<int>
admissible_ridge(const MellinFunction& g_mellin, const SelectionConfig& cfg,
                 std::size_t n, const QuadratureConfig& q)
{
  const Selector sel(Method::ridge, g_mellin, cfg, n, q);
  return { sel.admissible().begin(), sel.admissible().end() };
}

std::vector<int>
admissible_cutoff(const MellinFunction& g_mellin, const SelectionConfig& cfg,
                  std::size_t n, const QuadratureConfig& q)
{
  const Selector sel(Method::cutoff, g_mellin, cfg, n, q);
  return { sel.admissible().begin(), sel.admissible().end() };
}

SelectionResult
select_ridge(const EmpiricalMellin& em, const MellinFunction& g_mellin,
             const SelectionConfig& cfg, const QuadratureConfig& q)
{
  return Selector(Method::ridge, g_mellin, cfg, em.size(), q).select(em);
}

SelectionResult
select_cutoff(const EmpiricalMellin& em, const MellinFunction& g_mellin,
              const SelectionConfig& cfg, const QuadratureConfig& q)
{
  return Selector(Method::cutoff, g_mellin, cfg, em.size(), q).select(em);
}

void
write_diagnostics_csv(std::ostream& out, const SelectionResult& res)
{
  out << "k,A_hat,V_hat,objective,admissible\n";
  for (const auto& d : res.levels) {
    out << d.k << ',';
    detail::put_number(out, d.a_hat);
    out.put(',');
    detail::put_number(out, d.v_hat);
    out.put(',');
    detail::put_number(out, d.objective);
    out << ',' << (d.admissible ? 1 : 0) << '\n';
  }
}

} // namespace mellinridge
