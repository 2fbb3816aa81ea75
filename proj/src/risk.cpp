#include "mellinridge/risk.hpp"

#include "mellinridge/error.hpp"
#include "format.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>

namespace mellinridge {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions
// are collected per index and the one with the lowest index is rethrown.
template<class Body>
void
parallel_for(std::size_t count, unsigned threads, Body&& body)
{
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
    std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{ 0 };
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < threads; ++w)
    pool.emplace_back(work);
  work();
  pool.clear();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

std::uint64_t
replication_stream(DensityId target, DensityId error, std::size_t n,
                   std::size_t rep)
{
  // the method is deliberately left out: paired samples across methods
  std::uint64_t h = hash_combine(0x6d656c6c696eULL, static_cast<std::uint64_t>(target));
  h = hash_combine(h, static_cast<std::uint64_t>(error));
  h = hash_combine(h, n);
  return hash_combine(h, rep);
}

EmpiricalMellin
draw_observations(DensityId target, DensityId error, std::size_t n, double c,
                  std::uint64_t seed, std::size_t rep)
{
  const RngStream base{ seed, replication_stream(target, error, n, rep) };
  const auto x = sample(DensitySpec(target, Role::target), n, base.substream(0));
  const auto u = sample(DensitySpec(error, Role::error), n, base.substream(1));
  return EmpiricalMellin(contaminate(x, u), c);
}

void
check_grid_spec(double x_min, double x_max, std::size_t points)
{
  if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max))
    fail(ErrorCode::invalid_argument, "x-grid: need 0 < x_min < x_max");
  if (points < 2)
    fail(ErrorCode::invalid_argument, "x-grid: need at least 2 points");
}

double
mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

double
median_of(std::vector<double> v)
{
  MiseReport r;
  r.errors = std::move(v);
  return r.median();
}

void
summarise(MiseReport& rep)
{
  const std::size_t reps = rep.errors.size();
  rep.mise = mean(rep.errors);
  rep.mise_se = 0.0;
  if (reps > 1) {
    double ss = 0.0;
    for (double e : rep.errors)
      ss += (e - rep.mise) * (e - rep.mise);
    rep.mise_se =
      std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  }
  rep.scaled_mise = 100.0 * rep.mise;
}

} // namespace

ExperimentConfig
ExperimentConfig::scenario(DensityId target, DensityId error, std::size_t n,
                           Method method)
{
  ExperimentConfig cfg;
  cfg.target = target;
  cfg.error = error;
  cfg.n = n;
  cfg.method = method;
  cfg.selection = SelectionConfig::for_noise(error, cfg.c);
  return cfg;
}

void
ExperimentConfig::validate() const
{
  DensitySpec(target, Role::target);
  DensitySpec(error, Role::error);
  if (n == 0)
    fail(ErrorCode::invalid_argument, "experiment: n must be at least 1");
  if (replications == 0)
    fail(ErrorCode::invalid_argument,
         "experiment: replications must be at least 1");
  if (!std::isfinite(c))
    fail(ErrorCode::invalid_argument, "experiment: c must be finite");
  if (fixed_k && (!(*fixed_k > 0.0) || !std::isfinite(*fixed_k)))
    fail(ErrorCode::invalid_argument, "experiment: fixed k must be positive");
  check_grid_spec(x_min, x_max, x_points);
  selection.validate();
  quadrature.validate();
}

std::vector<double>
ExperimentConfig::x_grid() const
{
  return log_spaced_grid(x_min, x_max, x_points);
}

std::string
scenario_label(DensityId target, DensityId error)
{
  return std::string(to_string(target)) + "/" + std::string(to_string(error));
}

double
MiseReport::median() const
{
  if (errors.empty())
    return 0.0;
  auto v = errors;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1)
    return v[mid];
  const double hi = v[mid];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

double
oracle_error(const DensityEstimate& estimate, DensityId target, double c)
{
  if (estimate.fn.c != c)
    fail(ErrorCode::invalid_argument,
         "oracle_error: estimate was computed at a different c");
  WeightedFunction truth;
  truth.x_grid = estimate.fn.x_grid;
  truth.c = c;
  truth.values.reserve(truth.x_grid.size());
  const auto spec = DensitySpec::of(target);
  for (double x : truth.x_grid)
    truth.values.push_back(density_eval(spec, x));
  return weighted_l2_dist_sq(estimate.fn, truth);
}

MiseReport
run_mise(const ExperimentConfig& cfg_in)
{
  cfg_in.validate();
  ExperimentConfig cfg = cfg_in;
  // the experiment's development point is authoritative
  cfg.selection.c = cfg.c;

  const auto x = cfg.x_grid();
  const auto g = catalog_mellin(cfg.error, cfg.c);
  const std::size_t reps = cfg.replications;

  std::optional<Selector> selector;
  std::optional<MellinMultiplier> fixed;
  SymmetricGrid fixed_grid;
  if (cfg.fixed_k) {
    fixed = cfg.method == Method::ridge
              ? ridge_multiplier(RidgeSpec{ *cfg.fixed_k, cfg.selection.xi,
                                            cfg.selection.r, cfg.c },
                                 g)
              : cutoff_multiplier(CutoffSpec{ *cfg.fixed_k, cfg.c }, g,
                                  cfg.quadrature);
    const Truncation tr = multiplier_truncation(*fixed, cfg.quadrature);
    fixed_grid = SymmetricGrid(tr.t_max, cfg.quadrature.t_step);
  } else {
    selector.emplace(cfg.method, g, cfg.selection, cfg.n, cfg.quadrature);
  }

  MiseReport rep;
  rep.errors.resize(reps);
  rep.levels.resize(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const auto em =
      draw_observations(cfg.target, cfg.error, cfg.n, cfg.c, cfg.seed, r);
    if (fixed) {
      const auto mhat = em.on_grid(fixed_grid);
      const auto est =
        estimate_from_grid(*fixed, fixed_grid, mhat, x, cfg.quadrature);
      rep.errors[r] = oracle_error(est, cfg.target, cfg.c);
      rep.levels[r] = *cfg.fixed_k;
      return;
    }
    const auto mhat = em.on_grid(selector->grid());
    const auto sel = selector->select_on_grid(mhat, sigma_hat(em));
    const auto est = selector->estimate(mhat, sel.k_hat, x);
    rep.errors[r] = oracle_error(est, cfg.target, cfg.c);
    rep.levels[r] = sel.k_hat;
  });

  summarise(rep);
  return rep;
}

double
SelectionAudit::best_fixed_median() const
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : level_errors)
    best = std::min(best, median_of(e));
  return best;
}

int
SelectionAudit::best_fixed_level() const
{
  double best = std::numeric_limits<double>::infinity();
  int level = 0;
  for (std::size_t i = 0; i < level_errors.size(); ++i) {
    const double m = median_of(level_errors[i]);
    if (m < best) {
      best = m;
      level = levels[i];
    }
  }
  return level;
}

SelectionAudit
run_selection_audit(const ExperimentConfig& cfg_in)
{
  cfg_in.validate();
  if (cfg_in.fixed_k)
    fail(ErrorCode::invalid_argument,
         "selection audit: needs data-driven selection (fixed k is set)");
  ExperimentConfig cfg = cfg_in;
  cfg.selection.c = cfg.c;
  const auto x = cfg.x_grid();
  const Selector selector(cfg.method, catalog_mellin(cfg.error, cfg.c),
                          cfg.selection, cfg.n, cfg.quadrature);
  const std::size_t reps = cfg.replications;

  SelectionAudit audit;
  audit.levels.assign(selector.admissible().begin(), selector.admissible().end());
  audit.level_errors.assign(audit.levels.size(), std::vector<double>(reps));
  audit.selected.errors.resize(reps);
  audit.selected.levels.resize(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const auto em =
      draw_observations(cfg.target, cfg.error, cfg.n, cfg.c, cfg.seed, r);
    const auto mhat = em.on_grid(selector.grid());
    const auto sel = selector.select_on_grid(mhat, sigma_hat(em));
    for (std::size_t i = 0; i < audit.levels.size(); ++i) {
      const double err = oracle_error(
        selector.estimate(mhat, audit.levels[i], x), cfg.target, cfg.c);
      audit.level_errors[i][r] = err;
      if (audit.levels[i] == sel.k_hat)
        audit.selected.errors[r] = err;
    }
    audit.selected.levels[r] = sel.k_hat;
  });
  summarise(audit.selected);
  return audit;
}

std::vector<RatePoint>
run_oracle_rate(const ExperimentConfig& base,
                const std::vector<std::size_t>& n_list, double s, double gamma)
{
  if (n_list.empty())
    fail(ErrorCode::invalid_argument, "oracle rate: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      fail(ErrorCode::invalid_argument, "oracle rate: n list must increase");
  if (!(s > 0.0) || !(gamma > 0.0))
    fail(ErrorCode::invalid_argument, "oracle rate: need s > 0 and gamma > 0");

  std::vector<RatePoint> out;
  for (std::size_t n : n_list) {
    ExperimentConfig cfg = base;
    cfg.n = n;
    const double exponent = gamma / (2.0 * s + 2.0 * gamma + 1.0);
    cfg.fixed_k =
      std::max(1.0, std::round(std::pow(static_cast<double>(n), exponent)));
    out.push_back({ n, *cfg.fixed_k, run_mise(cfg) });
  }
  return out;
}

double
log_log_slope(const std::vector<RatePoint>& points)
{
  if (points.size() < 2)
    fail(ErrorCode::invalid_argument, "slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double lx = std::log(static_cast<double>(p.n));
    const double ly = std::log(p.report.mise);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(points.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void
ProfileConfig::validate() const
{
  DensitySpec(target, Role::target);
  DensitySpec(error, Role::error);
  if (n == 0 || replications == 0)
    fail(ErrorCode::invalid_argument, "profile: n and replications must be >= 1");
  if (k_grid.empty())
    fail(ErrorCode::invalid_argument, "profile: k_grid is empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i)
    if (k_grid[i] < 1 || (i > 0 && k_grid[i] <= k_grid[i - 1]))
      fail(ErrorCode::invalid_argument,
           "profile: k_grid must be increasing positive integers");
  if (!(r >= 0.0) || !std::isfinite(c))
    fail(ErrorCode::invalid_argument, "profile: need r >= 0 and finite c");
  check_grid_spec(x_min, x_max, x_points);
  quadrature.validate();
}

double
sigma_c(DensityId target, DensityId error, double c)
{
  const double p = 2.0 * c - 1.0;
  return catalog_mellin(target, p)(0.0).real() *
         catalog_mellin(error, p)(0.0).real();
}

std::vector<ProfileRow>
bias_variance_profile(const ProfileConfig& cfg)
{
  cfg.validate();
  const auto x = log_spaced_grid(cfg.x_min, cfg.x_max, cfg.x_points);
  const auto f = catalog_mellin(cfg.target, cfg.c);
  const auto g = catalog_mellin(cfg.error, cfg.c);
  const auto& q = cfg.quadrature;
  const double sig = sigma_c(cfg.target, cfg.error, cfg.c);
  const std::size_t levels = cfg.k_grid.size();

  std::vector<MellinMultiplier> mults;
  std::vector<std::size_t> intervals;
  for (int k : cfg.k_grid) {
    mults.push_back(ridge_multiplier(RidgeSpec{ static_cast<double>(k), 0.0,
                                                cfg.r, cfg.c },
                                     g));
    const double t = multiplier_truncation(mults.back(), q).t_max;
    intervals.push_back(static_cast<std::size_t>(
      std::ceil(t / q.t_step - 1e-9 * t / q.t_step)));
  }
  const auto shared = SymmetricGrid::with_spacing(
    q.t_step, *std::max_element(intervals.begin(), intervals.end()));

  WeightedFunction truth;
  truth.x_grid = x;
  truth.c = cfg.c;
  for (double xv : x)
    truth.values.push_back(density_eval(DensitySpec::of(cfg.target), xv));

  // estimates[level][rep] on the x-grid
  std::vector<std::vector<std::vector<double>>> estimates(
    levels, std::vector<std::vector<double>>(cfg.replications));
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    const auto em =
      draw_observations(cfg.target, cfg.error, cfg.n, cfg.c, cfg.seed, r);
    const auto mhat = em.on_grid(shared);
    for (std::size_t i = 0; i < levels; ++i)
      estimates[i][r] = estimate_from_grid(mults[i], shared.prefix(intervals[i]),
                                           mhat, x, q)
                          .fn.values;
  });

  // truncation for |M_f|^2, shared by all bias bounds
  const auto f_power = [&](double t) {
    return std::norm(f(t)) + std::norm(f(-t));
  };
  const Truncation f_tr = fit_truncation(f_power, q);
  const SymmetricGrid f_grid(f_tr.t_max, q.t_step);

  std::vector<ProfileRow> rows;
  for (std::size_t i = 0; i < levels; ++i) {
    ProfileRow row;
    row.k = cfg.k_grid[i];

    WeightedFunction avg = truth;
    std::fill(avg.values.begin(), avg.values.end(), 0.0);
    for (const auto& e : estimates[i])
      for (std::size_t j = 0; j < e.size(); ++j)
        avg.values[j] += e[j];
    for (auto& v : avg.values)
      v /= static_cast<double>(cfg.replications);
    WeightedFunction single = avg;
    for (const auto& e : estimates[i]) {
      single.values = e;
      row.variance += weighted_l2_dist_sq(single, avg);
    }
    const auto reps = static_cast<double>(cfg.replications);
    row.variance = cfg.replications > 1 ? row.variance / (reps - 1.0) : 0.0;
    // ||f - mean||^2 overshoots the squared bias by variance / reps
    row.bias_sq = weighted_l2_dist_sq(truth, avg) - row.variance / reps;

    const auto& mult = mults[i];
    std::vector<double> half(f_grid.size());
    for (std::size_t j = 0; j < f_grid.size(); ++j) {
      const double t = f_grid.t(j);
      half[j] = (mult.damped(t) ? std::norm(f(t)) : 0.0) +
                (mult.damped(-t) ? std::norm(f(-t)) : 0.0);
    }
    // beyond the truncation |M_g| has decayed below 1/k, so the tail lies in G_k
    row.bound_bias =
      (0.5 * f_grid.integrate_even(half) + f_tr.tail) / (2.0 * std::numbers::pi);
    row.bound_var = sig * multiplier_norm_sq(mult, q) /
                    (2.0 * std::numbers::pi * static_cast<double>(cfg.n));
    rows.push_back(row);
  }
  return rows;
}

void
write_mise_csv_header(std::ostream& out)
{
  out << "scenario,method,n,c,reps,mise_x100,se_x100\n";
}

void
write_mise_csv_row(std::ostream& out, const ExperimentConfig& cfg,
                   const MiseReport& report)
{
  out << scenario_label(cfg.target, cfg.error) << ',' << to_string(cfg.method)
      << ',' << cfg.n << ',';
  detail::put_number(out, cfg.c);
  out << ',' << report.errors.size() << ',';
  detail::put_number(out, report.scaled_mise);
  out.put(',');
  detail::put_number(out, report.scaled_se());
  out.put('\n');
}

void
write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows)
{
  out << "k,bias_sq,variance,bound_bias,bound_var\n";
  for (const auto& r : rows) {
    out << r.k << ',';
    detail::put_number(out, r.bias_sq);
    out.put(',');
    detail::put_number(out, r.variance);
    out.put(',');
    detail::put_number(out, r.bound_bias);
    out.put(',');
    detail::put_number(out, r.bound_var);
    out.put('\n');
  }
}

} // namespace mellinridge
