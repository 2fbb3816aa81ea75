#pragma once

#include "mellinridge/model.hpp"
#include "mellinridge/selection.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mellinridge {

//! One Monte-Carlo scenario: Y = X U with X ~ target and U ~ error.
struct ExperimentConfig
{
  DensityId target = DensityId::gamma5;
  DensityId error = DensityId::noise_uniform;
  std::size_t n = 500;
  double c = 1.0;
  Method method = Method::ridge;
  SelectionConfig selection;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  //! Error integration grid: x_points log-spaced points on [x_min, x_max].
  double x_min = 0.01;
  double x_max = 30.0;
  std::size_t x_points = 512;
  QuadratureConfig quadrature;
  //! Use this level for every replication instead of data-driven selection.
  std::optional<double> fixed_k;
  //! Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  //! Defaults for a catalog scenario, selection constants by error density.
  static ExperimentConfig scenario(DensityId target, DensityId error,
                                   std::size_t n, Method method);

  void validate() const;
  std::vector<double> x_grid() const;
};

//! "target/error", e.g. "gamma5/noise_uniform".
std::string
scenario_label(DensityId target, DensityId error);

struct MiseReport
{
  std::vector<double> errors;  //!< per replication, in replication order
  std::vector<double> levels;  //!< k used in each replication
  double mise = 0.0;
  double mise_se = 0.0;
  double scaled_mise = 0.0;    //!< 100 * mise

  double median() const;
  double scaled_se() const { return 100.0 * mise_se; }
};

//! Weighted squared L2 distance between an estimate and the true density on
//! the estimate's x-grid.
double
oracle_error(const DensityEstimate& estimate, DensityId target, double c);

//! Replication r draws X from stream (seed, hash(target, error, n, r)) and U
//! from a sibling substream, so ridge and cut-off runs of one scenario see
//! identical samples. The result does not depend on the thread count.
MiseReport
run_mise(const ExperimentConfig& cfg);

//! Data-driven choice next to every fixed admissible level, all evaluated on
//! the same replications.
struct SelectionAudit
{
  std::vector<int> levels;                      //!< admissible levels
  std::vector<std::vector<double>> level_errors; //!< [level][replication]
  MiseReport selected;

  //! Smallest median error over the fixed levels.
  double best_fixed_median() const;
  int best_fixed_level() const;
};

//! Requires data-driven selection (cfg.fixed_k unset).
SelectionAudit
run_selection_audit(const ExperimentConfig& cfg);

struct RatePoint
{
  std::size_t n = 0;
  double k = 0.0;
  MiseReport report;
};

//! MISE at the fixed levels k = round(n^(gamma / (2s + 2gamma + 1))).
std::vector<RatePoint>
run_oracle_rate(const ExperimentConfig& base, const std::vector<std::size_t>& n_list,
                double s, double gamma);

//! Least-squares slope of log(mise) against log(n).
double
log_log_slope(const std::vector<RatePoint>& points);

struct ProfileRow
{
  int k = 0;
  //! Unbiased Monte-Carlo estimates; bias_sq can dip below zero when the
  //! bias is under the Monte-Carlo resolution. bias_sq + variance is the
  //! mean of the per-replication errors.
  double bias_sq = 0.0;
  double variance = 0.0;
  double bound_bias = 0.0; //!< (2 pi)^-1 ||1_{G_k} M_c[f]||^2
  double bound_var = 0.0;  //!< sigma_c ||R_k||^2 / (2 pi n)

  double risk() const { return bias_sq + variance; }
  double bound() const { return bound_bias + bound_var; }
};

struct ProfileConfig
{
  DensityId target = DensityId::gamma5;
  DensityId error = DensityId::noise_beta;
  double c = 1.0;
  double r = 2.0;
  std::size_t n = 2000;
  std::vector<int> k_grid;
  std::size_t replications = 50;
  std::uint64_t seed = 1;
  double x_min = 0.01;
  double x_max = 30.0;
  std::size_t x_points = 512;
  QuadratureConfig quadrature;
  unsigned threads = 0;

  void validate() const;
};

//! Empirical bias/variance of the fixed-k ridge estimator next to the two
//! terms of the risk bound. All levels share the same samples.
std::vector<ProfileRow>
bias_variance_profile(const ProfileConfig& cfg);

//! E Y^(2(c-1)) for Y = X U, from the catalog transforms at 2c - 1.
double
sigma_c(DensityId target, DensityId error, double c);

void
write_mise_csv_header(std::ostream& out);

void
write_mise_csv_row(std::ostream& out, const ExperimentConfig& cfg,
                   const MiseReport& report);

void
write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows);

} // namespace mellinridge
