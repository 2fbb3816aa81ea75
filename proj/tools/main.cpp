//! mellinridge-cli: estimation, simulation and Monte-Carlo reports on top of
//! the C interface of the library.

#include "config_file.hpp"

#include <mellinridge/mellinridge.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

//! Library failure carried to main as "error: <status>: <message>".
class Failure : public std::runtime_error
{
public:
  explicit Failure(const std::string& what)
    : std::runtime_error(what)
  {
  }
};

void
check(mr_status s)
{
  if (s != MR_OK)
    throw Failure(std::string(mr_status_string(s)) + ": " + mr_last_error());
}

struct SampleDeleter
{
  void operator()(mr_sample* s) const { mr_sample_destroy(s); }
};
struct EstimateDeleter
{
  void operator()(mr_estimate* e) const { mr_estimate_destroy(e); }
};
struct MiseDeleter
{
  void operator()(mr_mise* m) const { mr_mise_destroy(m); }
};
using SamplePtr = std::unique_ptr<mr_sample, SampleDeleter>;
using EstimatePtr = std::unique_ptr<mr_estimate, EstimateDeleter>;
using MisePtr = std::unique_ptr<mr_mise, MiseDeleter>;

mr_density
density(const std::string& name)
{
  mr_density id{};
  check(mr_density_from_name(name.c_str(), &id));
  return id;
}

mr_density
error_density(const std::string& name)
{
  const mr_density id = density(name);
  if (!mr_density_is_error(id))
    throw Failure(std::string(mr_status_string(MR_INVALID_ARGUMENT)) + ": '" +
                  name + "' is not an error density");
  return id;
}

mr_method
method(const std::string& name)
{
  mr_method m{};
  check(mr_method_from_name(name.c_str(), &m));
  return m;
}

mr_penalty
penalty(const std::string& name)
{
  if (name == "compared")
    return MR_PENALTY_COMPARED_LEVEL;
  if (name == "candidate")
    return MR_PENALTY_CANDIDATE_LEVEL;
  throw Failure(std::string(mr_status_string(MR_UNKNOWN_ID)) +
                ": penalty must be 'compared' or 'candidate', got '" + name + "'");
}

std::vector<std::string>
split_list(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos)
      out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::vector<int>
parse_k_grid(const std::string& s)
{
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw Failure(std::string(mr_status_string(MR_INVALID_ARGUMENT)) +
                    ": bad k-grid entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

//! Overrides shared by every subcommand that runs a selection rule.
struct SelectionFlags
{
  std::optional<double> chi1, chi2, chi, r;
  std::optional<std::string> penalty;
  std::optional<std::string> k_grid;

  void add(CLI::App* app)
  {
    app->add_option("--chi1", chi1, "ridge bias-proxy variance constant");
    app->add_option("--chi2", chi2, "ridge selection variance constant");
    app->add_option("--chi", chi, "cut-off penalty constant");
    app->add_option("--r", r, "ridge exponent r >= 0");
    app->add_option("--penalty", penalty,
                    "variance level inside the bias proxy: compared|candidate");
    app->add_option("--k-grid", k_grid,
                    "comma-separated candidate levels (default: 1, 2, ... while admissible)");
  }

  //! Applies flags over `sel`; the returned grid must outlive `sel`.
  void apply(mr_selection& sel, std::vector<int>& grid_storage) const
  {
    if (chi1)
      sel.chi1 = *chi1;
    if (chi2)
      sel.chi2 = *chi2;
    else if (chi1 && sel.chi2 < *chi1)
      sel.chi2 = *chi1;
    if (chi)
      sel.chi = *chi;
    if (r)
      sel.r = *r;
    if (penalty)
      sel.penalty = ::penalty(*penalty);
    if (k_grid) {
      grid_storage = parse_k_grid(*k_grid);
      sel.k_grid = grid_storage.data();
      sel.k_grid_len = grid_storage.size();
    }
  }
};

std::ofstream
open_output(const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw Failure(std::string(mr_status_string(MR_IO)) + ": cannot open " + path);
  out.precision(17);
  return out;
}

void
finish_output(std::ostream& out, const std::string& path)
{
  out.flush();
  if (!out)
    throw Failure(std::string(mr_status_string(MR_IO)) + ": failed writing " + path);
}

std::string
diagnostics_path_for(const std::string& out)
{
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + "_diagnostics.csv";
  return out + "_diagnostics.csv";
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs
{
  std::string sample;
  std::string error;
  std::optional<double> c;
  std::string method = "ridge";
  SelectionFlags selection;
  std::optional<double> k;
  std::string out;
  std::optional<std::string> diagnostics;
  std::string format = "csv";
};

void
run_estimate(const EstimateArgs& a)
{
  SamplePtr sample;
  {
    mr_sample* s = nullptr;
    check(mr_sample_read_csv(a.sample.c_str(), &s));
    sample.reset(s);
  }
  const mr_density err = error_density(a.error);
  mr_estimate_options opts{};
  check(mr_estimate_options_default(err, &opts));
  opts.method = method(a.method);
  if (a.c)
    opts.c = *a.c;
  std::vector<int> grid;
  a.selection.apply(opts.selection, grid);
  if (a.k)
    opts.fixed_k = *a.k;

  EstimatePtr est;
  {
    mr_estimate* e = nullptr;
    check(mr_estimate_run(sample.get(), &opts, &e));
    est.reset(e);
  }

  if (a.format == "json") {
    json doc;
    doc["method"] = a.method;
    doc["error"] = a.error;
    doc["c"] = opts.c;
    doc["k"] = mr_estimate_k(est.get());
    doc["sigma_hat"] = mr_estimate_sigma_hat(est.get());
    doc["admissible"] = mr_estimate_admissible_count(est.get());
    const std::size_t m = mr_estimate_size(est.get());
    const double* x = mr_estimate_x(est.get());
    const double* f = mr_estimate_values(est.get());
    doc["x"] = std::vector<double>(x, x + m);
    doc["f_hat"] = std::vector<double>(f, f + m);
    auto out = open_output(a.out);
    out << doc.dump(2) << '\n';
    finish_output(out, a.out);
  } else {
    check(mr_estimate_write_csv(est.get(), a.out.c_str()));
  }
  if (!a.k) {
    const std::string diag = a.diagnostics ? *a.diagnostics : diagnostics_path_for(a.out);
    check(mr_estimate_write_diagnostics_csv(est.get(), diag.c_str()));
  }

  std::cout << "k_hat = " << mr_estimate_k(est.get()) << '\n'
            << "sigma_hat = " << mr_estimate_sigma_hat(est.get()) << '\n'
            << "admissible = " << mr_estimate_admissible_count(est.get()) << '\n';
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs
{
  std::string target;
  std::string error;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

void
run_simulate(const SimulateArgs& a)
{
  const mr_density t = density(a.target);
  const mr_density e = error_density(a.error);
  mr_sample* raw = nullptr;
  check(mr_sample_simulate(t, e, a.n, a.seed, &raw));
  SamplePtr sample(raw);
  check(mr_sample_write_csv(sample.get(), a.out.c_str()));

  json meta;
  meta["target"] = mr_density_name(t);
  meta["error"] = mr_density_name(e);
  meta["n"] = a.n;
  meta["seed"] = a.seed;
  meta["library_version"] = mr_version();
  const std::string sidecar = a.out + ".json";
  auto out = open_output(sidecar);
  out << meta.dump(2) << '\n';
  finish_output(out, sidecar);
}

// ---- mise -----------------------------------------------------------------

const std::vector<std::string> mise_keys = {
  "scenario.targets",   "scenario.errors",       "scenario.sizes",
  "scenario.methods",   "scenario.c",            "selection.chi1",
  "selection.chi2",     "selection.chi",         "selection.r",
  "selection.penalty",  "selection.k_grid",      "experiment.reps",
  "experiment.seed",    "experiment.threads",    "experiment.fixed_k",
  "grid.x_min",         "grid.x_max",            "grid.x_points",
  "quadrature.t_step",  "quadrature.t_max",      "quadrature.rel_tail_tol",
  "output.path",        "output.format",
};

struct MiseArgs
{
  std::optional<std::string> config;
  std::vector<std::string> targets, errors, methods;
  std::vector<std::size_t> sizes;
  std::optional<double> c;
  SelectionFlags selection;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> k;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

template<class T>
void
fill(std::optional<T>& flag, const std::optional<T>& file_value)
{
  if (!flag && file_value)
    flag = file_value;
}

void
run_mise(MiseArgs a)
{
  mrcli::ConfigFile file;
  if (a.config)
    file = mrcli::ConfigFile::load(*a.config, mise_keys);

  auto list_or = [&](std::vector<std::string>& flag, const char* key,
                     std::vector<std::string> fallback) {
    if (!flag.empty())
      return;
    if (const auto v = file.text(key))
      flag = split_list(*v);
    else
      flag = std::move(fallback);
  };
  list_or(a.targets, "scenario.targets", { "beta25", "loggamma", "gamma5", "lognormal" });
  list_or(a.errors, "scenario.errors", { "noise_uniform", "noise_beta" });
  list_or(a.methods, "scenario.methods", { "ridge", "cutoff" });
  if (a.sizes.empty()) {
    if (const auto v = file.text("scenario.sizes")) {
      for (const auto& item : split_list(*v)) {
        std::size_t used = 0;
        unsigned long long n = 0;
        try {
          n = std::stoull(item, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != item.size())
          throw mrcli::ConfigError("scenario.sizes: bad sample size '" + item + "'");
        a.sizes.push_back(static_cast<std::size_t>(n));
      }
    } else {
      a.sizes = { 500, 2000 };
    }
  }

  fill(a.c, file.number("scenario.c"));
  fill(a.selection.chi1, file.number("selection.chi1"));
  fill(a.selection.chi2, file.number("selection.chi2"));
  fill(a.selection.chi, file.number("selection.chi"));
  fill(a.selection.r, file.number("selection.r"));
  fill(a.selection.penalty, file.text("selection.penalty"));
  fill(a.selection.k_grid, file.text("selection.k_grid"));
  if (!a.reps)
    if (const auto v = file.integer("experiment.reps"))
      a.reps = static_cast<std::size_t>(*v);
  if (!a.seed)
    if (const auto v = file.integer("experiment.seed"))
      a.seed = *v;
  if (!a.threads)
    if (const auto v = file.integer("experiment.threads"))
      a.threads = static_cast<unsigned>(*v);
  fill(a.k, file.number("experiment.fixed_k"));
  fill(a.out, file.text("output.path"));
  fill(a.format, file.text("output.format"));
  const auto x_min = file.number("grid.x_min");
  const auto x_max = file.number("grid.x_max");
  const auto x_points = file.integer("grid.x_points");
  const auto t_step = file.number("quadrature.t_step");
  const auto t_max = file.number("quadrature.t_max");
  const auto tail_tol = file.number("quadrature.rel_tail_tol");

  const std::string format = a.format.value_or("csv");
  if (format != "csv" && format != "json")
    throw Failure(std::string(mr_status_string(MR_INVALID_ARGUMENT)) +
                  ": format must be csv or json");

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (a.out) {
    file_out = open_output(*a.out);
    out = &file_out;
  }

  json rows = json::array();
  if (format == "csv")
    *out << mr_mise_csv_header() << '\n';

  std::vector<char> buf(256);
  for (const auto& err_name : a.errors) {
    const mr_density err = error_density(err_name);
    for (const auto& method_name : a.methods) {
      const mr_method m = method(method_name);
      for (const auto& target_name : a.targets) {
        const mr_density target = density(target_name);
        for (const std::size_t n : a.sizes) {
          mr_experiment cfg{};
          check(mr_experiment_default(target, err, n, m, &cfg));
          if (a.c)
            cfg.c = *a.c;
          std::vector<int> grid;
          a.selection.apply(cfg.selection, grid);
          if (a.reps)
            cfg.replications = *a.reps;
          if (a.seed)
            cfg.seed = *a.seed;
          if (a.threads)
            cfg.threads = *a.threads;
          if (a.k)
            cfg.fixed_k = *a.k;
          if (x_min)
            cfg.x_min = *x_min;
          if (x_max)
            cfg.x_max = *x_max;
          if (x_points)
            cfg.x_points = static_cast<std::size_t>(*x_points);
          if (t_step)
            cfg.quadrature.t_step = *t_step;
          if (t_max)
            cfg.quadrature.t_max = *t_max;
          if (tail_tol)
            cfg.quadrature.rel_tail_tol = *tail_tol;

          mr_mise* raw = nullptr;
          check(mr_mise_run(&cfg, &raw));
          MisePtr report(raw);
          std::cerr << mr_density_name(target) << '/' << mr_density_name(err) << ' '
                    << mr_method_name(m) << " n=" << n << ": "
                    << mr_mise_scaled(report.get()) << '\n';

          if (format == "json") {
            json row;
            row["target"] = mr_density_name(target);
            row["error"] = mr_density_name(err);
            row["method"] = mr_method_name(m);
            row["n"] = n;
            row["c"] = cfg.c;
            row["reps"] = mr_mise_replications(report.get());
            row["mise_x100"] = mr_mise_scaled(report.get());
            row["se_x100"] = 100.0 * mr_mise_se(report.get());
            row["median_x100"] = 100.0 * mr_mise_median(report.get());
            rows.push_back(std::move(row));
          } else {
            std::size_t needed = 0;
            mr_status s = mr_mise_csv_row(&cfg, report.get(), buf.data(), buf.size(), &needed);
            if (s == MR_INVALID_ARGUMENT && needed > buf.size()) {
              buf.resize(needed);
              s = mr_mise_csv_row(&cfg, report.get(), buf.data(), buf.size(), &needed);
            }
            check(s);
            *out << buf.data();
          }
        }
      }
    }
  }
  if (format == "json")
    *out << rows.dump(2) << '\n';
  finish_output(*out, a.out.value_or("standard output"));
}

// ---- diagnose -------------------------------------------------------------

struct DiagnoseArgs
{
  std::string target = "gamma5";
  std::string error = "noise_beta";
  std::optional<double> c, r;
  std::size_t n = 2000;
  int k_max = 20;
  std::optional<std::size_t> reps;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
};

void
run_diagnose(const DiagnoseArgs& a)
{
  mr_profile_options opts{};
  check(mr_profile_options_default(density(a.target), error_density(a.error), a.n, &opts));
  if (a.c)
    opts.c = *a.c;
  if (a.r)
    opts.r = *a.r;
  if (a.k_max < 1)
    throw Failure(std::string(mr_status_string(MR_INVALID_ARGUMENT)) +
                  ": --k-max must be at least 1");
  std::vector<int> grid;
  for (int k = 1; k <= a.k_max; ++k)
    grid.push_back(k);
  opts.k_grid = grid.data();
  opts.k_grid_len = grid.size();
  if (a.reps)
    opts.replications = *a.reps;
  opts.seed = a.seed;
  opts.threads = a.threads;

  std::vector<mr_profile_row> rows(grid.size());
  check(mr_profile_run(&opts, rows.data()));
  check(mr_profile_write_csv(rows.data(), rows.size(), a.out.c_str()));
}

// ---- rate -----------------------------------------------------------------

struct RateArgs
{
  std::string target = "lognormal";
  std::string error = "noise_uniform";
  std::string method = "ridge";
  std::vector<std::size_t> sizes = { 500, 2000, 8000 };
  double s = 0.0;
  double gamma = 0.0;
  std::optional<std::size_t> reps;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<std::string> out;
};

void
run_rate(const RateArgs& a)
{
  mr_experiment base{};
  check(mr_experiment_default(density(a.target), error_density(a.error), a.sizes.front(),
                              method(a.method), &base));
  if (a.reps)
    base.replications = *a.reps;
  base.seed = a.seed;
  base.threads = a.threads;

  const std::size_t len = a.sizes.size();
  std::vector<double> k(len), mise(len), se(len);
  check(mr_oracle_rate(&base, a.sizes.data(), len, a.s, a.gamma, k.data(), mise.data(),
                       se.data()));

  // least-squares slope of log mise against log n
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    mx += std::log(static_cast<double>(a.sizes[i]));
    my += std::log(mise[i]);
  }
  mx /= static_cast<double>(len);
  my /= static_cast<double>(len);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double dx = std::log(static_cast<double>(a.sizes[i])) - mx;
    sxy += dx * (std::log(mise[i]) - my);
    sxx += dx * dx;
  }

  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (a.out) {
    file_out = open_output(*a.out);
    out = &file_out;
  }
  *out << "n,k,mise_x100,se_x100\n";
  for (std::size_t i = 0; i < len; ++i)
    *out << a.sizes[i] << ',' << k[i] << ',' << 100.0 * mise[i] << ',' << 100.0 * se[i]
         << '\n';
  finish_output(*out, a.out.value_or("standard output"));
  if (len >= 2)
    std::cerr << "slope = " << sxy / sxx << '\n';
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Multiplicative deconvolution with Mellin ridge and spectral cut-off estimators" };
  app.set_version_flag("--version", std::string(mr_version()));
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate a density from a sample file");
  estimate->add_option("--sample", est.sample, "CSV with header y")->required()->check(CLI::ExistingFile);
  estimate->add_option("--error", est.error, "error density: noise_uniform|noise_beta")->required();
  estimate->add_option("--c", est.c, "Mellin weight parameter");
  estimate->add_option("--method", est.method, "ridge|cutoff");
  est.selection.add(estimate);
  estimate->add_option("--k", est.k, "fixed level instead of data-driven selection");
  estimate->add_option("--out", est.out, "estimate output path")->required();
  estimate->add_option("--diagnostics", est.diagnostics,
                       "selection diagnostics path (default: <out>_diagnostics.csv)");
  estimate->add_option("--format", est.format, "csv|json")
    ->check(CLI::IsMember({ "csv", "json" }));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "draw Y = X U from catalog densities");
  simulate->add_option("--target", sim.target, "target density")->required();
  simulate->add_option("--error", sim.error, "error density")->required();
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "sample CSV path (metadata goes to <out>.json)")
    ->required();

  MiseArgs mise;
  auto* mise_cmd = app.add_subcommand("mise", "Monte-Carlo MISE over a grid of scenarios");
  mise_cmd->add_option("--config", mise.config, "configuration file")->check(CLI::ExistingFile);
  mise_cmd->add_option("--target", mise.targets, "target densities")->delimiter(',');
  mise_cmd->add_option("--error", mise.errors, "error densities")->delimiter(',');
  mise_cmd->add_option("--n", mise.sizes, "sample sizes")->delimiter(',');
  mise_cmd->add_option("--method", mise.methods, "ridge and/or cutoff")->delimiter(',');
  mise_cmd->add_option("--c", mise.c, "Mellin weight parameter");
  mise.selection.add(mise_cmd);
  mise_cmd->add_option("--reps", mise.reps, "replications per scenario");
  mise_cmd->add_option("--seed", mise.seed, "random seed");
  mise_cmd->add_option("--threads", mise.threads, "worker threads (0: all cores)");
  mise_cmd->add_option("--k", mise.k, "fixed level instead of data-driven selection");
  mise_cmd->add_option("--out", mise.out, "report path (default: standard output)");
  mise_cmd->add_option("--format", mise.format, "csv|json");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "bias/variance profile of the ridge estimator");
  diagnose->add_option("--target", diag.target, "target density");
  diagnose->add_option("--error", diag.error, "error density");
  diagnose->add_option("--c", diag.c, "Mellin weight parameter");
  diagnose->add_option("--r", diag.r, "ridge exponent");
  diagnose->add_option("--n", diag.n, "sample size");
  diagnose->add_option("--k-max", diag.k_max, "levels 1..k_max");
  diagnose->add_option("--reps", diag.reps, "replications");
  diagnose->add_option("--seed", diag.seed, "random seed");
  diagnose->add_option("--threads", diag.threads, "worker threads (0: all cores)");
  diagnose->add_option("--out", diag.out, "profile CSV path")->required();

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("rate", "MISE at the rate-optimal fixed level across n");
  rate_cmd->add_option("--target", rate.target, "target density");
  rate_cmd->add_option("--error", rate.error, "error density");
  rate_cmd->add_option("--method", rate.method, "ridge|cutoff");
  rate_cmd->add_option("--n", rate.sizes, "sample sizes")->delimiter(',');
  rate_cmd->add_option("--s", rate.s, "smoothness of the target")->required();
  rate_cmd->add_option("--gamma", rate.gamma, "decay exponent of the error transform")
    ->required();
  rate_cmd->add_option("--reps", rate.reps, "replications per n");
  rate_cmd->add_option("--seed", rate.seed, "random seed");
  rate_cmd->add_option("--threads", rate.threads, "worker threads (0: all cores)");
  rate_cmd->add_option("--out", rate.out, "CSV path (default: standard output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed())
      run_estimate(est);
    else if (simulate->parsed())
      run_simulate(sim);
    else if (mise_cmd->parsed())
      run_mise(mise);
    else if (diagnose->parsed())
      run_diagnose(diag);
    else if (rate_cmd->parsed())
      run_rate(rate);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const mrcli::ConfigError& e) {
    std::cerr << "error: " << mr_status_string(MR_PARSE) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
