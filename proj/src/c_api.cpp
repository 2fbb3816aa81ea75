#include "mellinridge/mellinridge.h"

#include "mellinridge/error.hpp"
#include "mellinridge/risk.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

using namespace mellinridge;

struct mr_sample
{
  std::vector<double> y;
};

struct mr_estimate
{
  DensityEstimate est;
  double k = 0.0;
  double sigma_hat = 0.0;
  std::size_t admissible = 0;
  std::optional<SelectionResult> selection;
};

struct mr_mise
{
  MiseReport report;
};

namespace {

thread_local std::string last_error;

mr_status
record(mr_status s, std::string msg)
{
  last_error = std::move(msg);
  return s;
}

// Runs fn, translating exceptions into status codes.
template<class Fn>
mr_status
guarded(Fn&& fn)
{
  try {
    fn();
    last_error.clear();
    return MR_OK;
  } catch (const Error& e) {
    return record(static_cast<mr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(MR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(MR_INTERNAL, e.what());
  } catch (...) {
    return record(MR_INTERNAL, "unknown error");
  }
}

DensityId
to_id(mr_density d)
{
  if (d < MR_BETA25 || d > MR_NOISE_BETA)
    fail(ErrorCode::unknown_id, "unknown density id " + std::to_string(d));
  return static_cast<DensityId>(d);
}

Method
to_method(mr_method m)
{
  if (m != MR_RIDGE && m != MR_CUTOFF)
    fail(ErrorCode::unknown_id, "unknown method id " + std::to_string(m));
  return m == MR_RIDGE ? Method::ridge : Method::cutoff;
}

template<class T>
void
require(const T* p, const char* what)
{
  if (p == nullptr)
    fail(ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

QuadratureConfig
to_quadrature(const mr_quadrature& q)
{
  QuadratureConfig out;
  out.t_step = q.t_step;
  out.t_max = q.t_max;
  out.rel_tail_tol = q.rel_tail_tol;
  return out;
}

mr_quadrature
from_quadrature(const QuadratureConfig& q)
{
  return { q.t_step, q.t_max, q.rel_tail_tol };
}

SelectionConfig
to_selection(const mr_selection& s, double c)
{
  SelectionConfig out;
  out.chi1 = s.chi1;
  out.chi2 = s.chi2;
  out.chi = s.chi;
  out.r = s.r;
  out.c = c;
  if (s.penalty != MR_PENALTY_COMPARED_LEVEL &&
      s.penalty != MR_PENALTY_CANDIDATE_LEVEL)
    fail(ErrorCode::invalid_argument, "unknown penalty placement");
  out.penalty = s.penalty == MR_PENALTY_COMPARED_LEVEL
                  ? PenaltyPlacement::compared_level
                  : PenaltyPlacement::candidate_level;
  if (s.k_grid_len > 0) {
    require(s.k_grid, "selection.k_grid");
    out.k_grid.assign(s.k_grid, s.k_grid + s.k_grid_len);
  }
  return out;
}

mr_selection
from_selection(const SelectionConfig& s)
{
  return { s.chi1, s.chi2, s.chi, s.r, MR_PENALTY_COMPARED_LEVEL, nullptr, 0 };
}

ExperimentConfig
to_experiment(const mr_experiment& e)
{
  ExperimentConfig cfg;
  cfg.target = to_id(e.target);
  cfg.error = to_id(e.error);
  cfg.n = e.n;
  cfg.c = e.c;
  cfg.method = to_method(e.method);
  cfg.selection = to_selection(e.selection, e.c);
  cfg.replications = e.replications;
  cfg.seed = e.seed;
  cfg.x_min = e.x_min;
  cfg.x_max = e.x_max;
  cfg.x_points = e.x_points;
  cfg.quadrature = to_quadrature(e.quadrature);
  if (e.fixed_k > 0.0)
    cfg.fixed_k = e.fixed_k;
  else if (e.fixed_k < 0.0)
    fail(ErrorCode::invalid_argument, "fixed_k must be >= 0");
  cfg.threads = e.threads;
  return cfg;
}

std::ofstream
open_output(const char* path)
{
  require(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    fail(ErrorCode::io, std::string("cannot write ") + path);
  return out;
}

void
finish_output(std::ofstream& out, const char* path)
{
  out.flush();
  if (!out)
    fail(ErrorCode::io, std::string("write failed for ") + path);
}

} // namespace

extern "C" {

const char*
mr_last_error(void)
{
  return last_error.c_str();
}

const char*
mr_status_string(mr_status status)
{
  switch (status) {
    case MR_OK: return "ok";
    case MR_INVALID_ARGUMENT: return "invalid argument";
    case MR_DOMAIN: return "outside the domain of the transform";
    case MR_G0_VIOLATION: return "noise transform vanishes in the window";
    case MR_EMPTY_ADMISSIBLE: return "empty admissible set";
    case MR_NUMERICAL: return "numerical failure";
    case MR_IO: return "i/o error";
    case MR_PARSE: return "parse error";
    case MR_UNKNOWN_ID: return "unknown identifier";
    case MR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char*
mr_version(void)
{
  return "0.1.0";
}

mr_status
mr_density_from_name(const char* name, mr_density* out)
{
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = static_cast<mr_density>(density_from_string(name));
  });
}

const char*
mr_density_name(mr_density id)
{
  if (id < MR_BETA25 || id > MR_NOISE_BETA)
    return nullptr;
  return to_string(static_cast<DensityId>(id)).data();
}

mr_status
mr_method_from_name(const char* name, mr_method* out)
{
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = method_from_string(name) == Method::ridge ? MR_RIDGE : MR_CUTOFF;
  });
}

const char*
mr_method_name(mr_method method)
{
  switch (method) {
    case MR_RIDGE: return "ridge";
    case MR_CUTOFF: return "cutoff";
  }
  return nullptr;
}

int
mr_density_is_error(mr_density id)
{
  return id == MR_NOISE_UNIFORM || id == MR_NOISE_BETA;
}

mr_status
mr_density_eval(mr_density id, double x, double* out)
{
  return guarded([&] {
    require(out, "out");
    *out = density_eval(DensitySpec::of(to_id(id)), x);
  });
}

mr_status
mr_catalog_mellin(mr_density id, double c, double t, double* re, double* im)
{
  return guarded([&] {
    require(re, "re");
    require(im, "im");
    const complex v = catalog_mellin(to_id(id), c)(t);
    *re = v.real();
    *im = v.imag();
  });
}

mr_status
mr_sample_from_array(const double* y, size_t n, mr_sample** out)
{
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (n == 0)
      fail(ErrorCode::invalid_argument, "sample is empty");
    require(y, "y");
    auto s = std::make_unique<mr_sample>();
    s->y.assign(y, y + n);
    for (std::size_t i = 0; i < n; ++i)
      if (!(s->y[i] > 0.0) || !std::isfinite(s->y[i]))
        fail(ErrorCode::invalid_argument,
             "sample value " + std::to_string(i) + " is not positive");
    *out = s.release();
  });
}

mr_status
mr_sample_read_csv(const char* path, mr_sample** out)
{
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<mr_sample>();
    s->y = read_sample_csv(std::filesystem::path(path));
    *out = s.release();
  });
}

mr_status
mr_sample_write_csv(const mr_sample* s, const char* path)
{
  return guarded([&] {
    require(s, "sample");
    require(path, "path");
    write_sample_csv(std::filesystem::path(path), s->y);
  });
}

mr_status
mr_sample_simulate(mr_density target, mr_density error, size_t n,
                   uint64_t seed, mr_sample** out)
{
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const DensitySpec tspec(to_id(target), Role::target);
    const DensitySpec espec(to_id(error), Role::error);
    const RngStream rng{ seed, 0 };
    const auto x = sample(tspec, n, rng.substream(0));
    auto s = std::make_unique<mr_sample>();
    s->y = contaminate(x, espec, rng.substream(1));
    *out = s.release();
  });
}

size_t
mr_sample_size(const mr_sample* s)
{
  return s ? s->y.size() : 0;
}

const double*
mr_sample_data(const mr_sample* s)
{
  return s ? s->y.data() : nullptr;
}

void
mr_sample_destroy(mr_sample* s)
{
  delete s;
}

mr_status
mr_estimate_options_default(mr_density error, mr_estimate_options* out)
{
  return guarded([&] {
    require(out, "out");
    const SelectionConfig sel = SelectionConfig::for_noise(to_id(error), 1.0);
    mr_estimate_options o{};
    o.error = error;
    o.c = 1.0;
    o.method = MR_RIDGE;
    o.selection = from_selection(sel);
    o.fixed_k = 0.0;
    o.x_min = 0.01;
    o.x_max = 30.0;
    o.x_points = 512;
    o.quadrature = from_quadrature(QuadratureConfig{});
    *out = o;
  });
}

mr_status
mr_estimate_run(const mr_sample* s, const mr_estimate_options* opts,
                mr_estimate** out)
{
  return guarded([&] {
    require(s, "sample");
    require(opts, "options");
    require(out, "out");
    *out = nullptr;
    const DensitySpec espec(to_id(opts->error), Role::error);
    const Method method = to_method(opts->method);
    const QuadratureConfig q = to_quadrature(opts->quadrature);
    q.validate();
    if (!(opts->x_min > 0.0) || !(opts->x_max > opts->x_min) ||
        opts->x_points < 2)
      fail(ErrorCode::invalid_argument,
           "x-grid: need 0 < x_min < x_max and at least 2 points");
    const auto x = log_spaced_grid(opts->x_min, opts->x_max, opts->x_points);
    const auto g = catalog_mellin(espec.id(), opts->c);
    const EmpiricalMellin em(s->y, opts->c);
    auto res = std::make_unique<mr_estimate>();
    res->sigma_hat = sigma_hat(em);

    if (opts->fixed_k > 0.0) {
      const SelectionConfig sel = to_selection(opts->selection, opts->c);
      const auto mult =
        method == Method::ridge
          ? ridge_multiplier(RidgeSpec{ opts->fixed_k, 0.0, sel.r, opts->c }, g)
          : cutoff_multiplier(CutoffSpec{ opts->fixed_k, opts->c }, g, q);
      res->est = estimate_density(mult, em, x, q);
      res->k = opts->fixed_k;
    } else {
      if (opts->fixed_k < 0.0)
        fail(ErrorCode::invalid_argument, "fixed_k must be >= 0");
      const Selector selector(method, g, to_selection(opts->selection, opts->c),
                              em.size(), q);
      const auto mhat = em.on_grid(selector.grid());
      auto sel = selector.select_on_grid(mhat, res->sigma_hat);
      res->est = selector.estimate(mhat, sel.k_hat, x);
      res->k = sel.k_hat;
      res->admissible = sel.admissible_count();
      res->selection = std::move(sel);
    }
    *out = res.release();
  });
}

double
mr_estimate_k(const mr_estimate* e)
{
  return e ? e->k : 0.0;
}

double
mr_estimate_sigma_hat(const mr_estimate* e)
{
  return e ? e->sigma_hat : 0.0;
}

size_t
mr_estimate_admissible_count(const mr_estimate* e)
{
  return e ? e->admissible : 0;
}

size_t
mr_estimate_size(const mr_estimate* e)
{
  return e ? e->est.fn.x_grid.size() : 0;
}

const double*
mr_estimate_x(const mr_estimate* e)
{
  return e ? e->est.fn.x_grid.data() : nullptr;
}

const double*
mr_estimate_values(const mr_estimate* e)
{
  return e ? e->est.fn.values.data() : nullptr;
}

mr_status
mr_estimate_write_csv(const mr_estimate* e, const char* path)
{
  return guarded([&] {
    require(e, "estimate");
    auto out = open_output(path);
    write_estimate_csv(out, e->est);
    finish_output(out, path);
  });
}

mr_status
mr_estimate_write_diagnostics_csv(const mr_estimate* e, const char* path)
{
  return guarded([&] {
    require(e, "estimate");
    if (!e->selection)
      fail(ErrorCode::invalid_argument,
           "estimate used a fixed level; there are no selection diagnostics");
    auto out = open_output(path);
    write_diagnostics_csv(out, *e->selection);
    finish_output(out, path);
  });
}

void
mr_estimate_destroy(mr_estimate* e)
{
  delete e;
}

mr_status
mr_experiment_default(mr_density target, mr_density error, size_t n,
                      mr_method method, mr_experiment* out)
{
  return guarded([&] {
    require(out, "out");
    const auto cfg = ExperimentConfig::scenario(to_id(target), to_id(error), n,
                                                to_method(method));
    mr_experiment e{};
    e.target = target;
    e.error = error;
    e.n = n;
    e.c = cfg.c;
    e.method = method;
    e.selection = from_selection(cfg.selection);
    e.replications = cfg.replications;
    e.seed = cfg.seed;
    e.x_min = cfg.x_min;
    e.x_max = cfg.x_max;
    e.x_points = cfg.x_points;
    e.quadrature = from_quadrature(cfg.quadrature);
    e.fixed_k = 0.0;
    e.threads = 0;
    *out = e;
  });
}

mr_status
mr_mise_run(const mr_experiment* cfg, mr_mise** out)
{
  return guarded([&] {
    require(cfg, "experiment");
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<mr_mise>();
    m->report = run_mise(to_experiment(*cfg));
    *out = m.release();
  });
}

double
mr_mise_value(const mr_mise* m)
{
  return m ? m->report.mise : 0.0;
}

double
mr_mise_se(const mr_mise* m)
{
  return m ? m->report.mise_se : 0.0;
}

double
mr_mise_scaled(const mr_mise* m)
{
  return m ? m->report.scaled_mise : 0.0;
}

double
mr_mise_median(const mr_mise* m)
{
  return m ? m->report.median() : 0.0;
}

size_t
mr_mise_replications(const mr_mise* m)
{
  return m ? m->report.errors.size() : 0;
}

const double*
mr_mise_errors(const mr_mise* m)
{
  return m ? m->report.errors.data() : nullptr;
}

const double*
mr_mise_levels(const mr_mise* m)
{
  return m ? m->report.levels.data() : nullptr;
}

void
mr_mise_destroy(mr_mise* m)
{
  delete m;
}

const char*
mr_mise_csv_header(void)
{
  return "scenario,method,n,c,reps,mise_x100,se_x100";
}

mr_status
mr_mise_csv_row(const mr_experiment* cfg, const mr_mise* m, char* buf,
                size_t cap, size_t* needed)
{
  return guarded([&] {
    require(cfg, "experiment");
    require(m, "mise");
    std::ostringstream os;
    write_mise_csv_row(os, to_experiment(*cfg), m->report);
    const std::string row = os.str();
    if (needed)
      *needed = row.size() + 1;
    if (buf == nullptr || cap < row.size() + 1)
      fail(ErrorCode::invalid_argument, "buffer too small for CSV row");
    std::memcpy(buf, row.c_str(), row.size() + 1);
  });
}

mr_status
mr_oracle_rate(const mr_experiment* base, const size_t* n_list, size_t len,
               double s, double gamma, double* k_out, double* mise_out,
               double* se_out)
{
  return guarded([&] {
    require(base, "experiment");
    require(n_list, "n_list");
    require(k_out, "k_out");
    require(mise_out, "mise_out");
    require(se_out, "se_out");
    const std::vector<std::size_t> ns(n_list, n_list + len);
    const auto points = run_oracle_rate(to_experiment(*base), ns, s, gamma);
    for (std::size_t i = 0; i < points.size(); ++i) {
      k_out[i] = points[i].k;
      mise_out[i] = points[i].report.mise;
      se_out[i] = points[i].report.mise_se;
    }
  });
}

mr_status
mr_profile_options_default(mr_density target, mr_density error, size_t n,
                           mr_profile_options* out)
{
  return guarded([&] {
    require(out, "out");
    DensitySpec(to_id(target), Role::target);
    DensitySpec(to_id(error), Role::error);
    const ProfileConfig cfg;
    mr_profile_options o{};
    o.target = target;
    o.error = error;
    o.c = cfg.c;
    o.r = cfg.r;
    o.n = n;
    o.k_grid = nullptr;
    o.k_grid_len = 0;
    o.replications = cfg.replications;
    o.seed = cfg.seed;
    o.x_min = cfg.x_min;
    o.x_max = cfg.x_max;
    o.x_points = cfg.x_points;
    o.quadrature = from_quadrature(cfg.quadrature);
    o.threads = 0;
    *out = o;
  });
}

mr_status
mr_profile_run(const mr_profile_options* opts, mr_profile_row* rows)
{
  return guarded([&] {
    require(opts, "options");
    require(rows, "rows");
    ProfileConfig cfg;
    cfg.target = to_id(opts->target);
    cfg.error = to_id(opts->error);
    cfg.c = opts->c;
    cfg.r = opts->r;
    cfg.n = opts->n;
    if (opts->k_grid_len > 0) {
      require(opts->k_grid, "k_grid");
      cfg.k_grid.assign(opts->k_grid, opts->k_grid + opts->k_grid_len);
    }
    cfg.replications = opts->replications;
    cfg.seed = opts->seed;
    cfg.x_min = opts->x_min;
    cfg.x_max = opts->x_max;
    cfg.x_points = opts->x_points;
    cfg.quadrature = to_quadrature(opts->quadrature);
    cfg.threads = opts->threads;
    const auto result = bias_variance_profile(cfg);
    for (std::size_t i = 0; i < result.size(); ++i)
      rows[i] = { result[i].k, result[i].bias_sq, result[i].variance,
                  result[i].bound_bias, result[i].bound_var };
  });
}

mr_status
mr_profile_write_csv(const mr_profile_row* rows, size_t len, const char* path)
{
  return guarded([&] {
    if (len > 0)
      require(rows, "rows");
    std::vector<ProfileRow> v;
    for (std::size_t i = 0; i < len; ++i)
      v.push_back({ rows[i].k, rows[i].bias_sq, rows[i].variance,
                    rows[i].bound_bias, rows[i].bound_var });
    auto out = open_output(path);
    write_profile_csv(out, v);
    finish_output(out, path);
  });
}

} // extern "C"
