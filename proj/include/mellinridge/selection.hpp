#pragma once

#include "mellinridge/estimators.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mellinridge {

enum class Method
{
  ridge,
  cutoff,
};

std::string_view
to_string(Method m);

//! Throws ErrorCode::unknown_id for names other than "ridge" / "cutoff".
Method
method_from_string(std::string_view name);

//! Where the variance penalty enters the supremum of the bias proxy A_hat.
enum class PenaltyPlacement
{
  //! sup_{k'} (contrast(k', k) - chi1 V_hat(k'))_+
  compared_level,
  //! sup_{k'} (contrast(k', k) - chi1 V_hat(k))_+
  candidate_level,
};

struct SelectionConfig
{
  double chi1 = 72.0;
  double chi2 = 72.0;
  double chi = 5.0;
  //! Candidate levels; empty means 1, 2, ... up to the first inadmissible.
  std::vector<int> k_grid;
  double c = 1.0;
  double r = 2.0;
  double xi = 0.0;
  PenaltyPlacement penalty = PenaltyPlacement::compared_level;
  int k_scan_limit = 10000;

  //! Constants tuned for the two catalog error densities (r = 2).
  static SelectionConfig for_noise(DensityId noise, double c = 1.0);

  void validate() const;
};

struct LevelDiagnostics
{
  int k = 0;
  //! Ridge: bias proxy A_hat(k). Cut-off: -||f_k||^2 (contrast term).
  double a_hat = 0.0;
  //! Ridge: V_hat(k) = 2 sigma_hat ||R_k||^2 / n. Cut-off: pen_hat(k).
  double v_hat = 0.0;
  double objective = 0.0;
  bool admissible = false;
};

struct SelectionResult
{
  int k_hat = 0;
  std::vector<LevelDiagnostics> levels;
  double sigma_hat = 0.0;

  std::size_t admissible_count() const;
};

//! n^-1 sum_j Y_j^(2(c-1)).
double
sigma_hat(const EmpiricalMellin& em);

//! Data-driven choice of the regularisation level for one noise density and
//! sample size. Everything that does not depend on the data (admissible
//! levels, multiplier norms, multipliers sampled on the shared grid) is
//! computed once at construction, so one selector serves many samples.
class Selector
{
public:
  //! Throws ErrorCode::empty_admissible when no level passes the variance
  //! bound and ErrorCode::g0_violation when a cut-off window contains a
  //! zero of the noise transform.
  Selector(Method method, const MellinFunction& g_mellin,
           const SelectionConfig& cfg, std::size_t n,
           const QuadratureConfig& q);

  Method method() const { return method_; }
  const SelectionConfig& config() const { return cfg_; }
  std::size_t sample_size() const { return n_; }

  //! Admissible prefix of the candidate levels.
  std::span<const int> admissible() const { return levels_; }

  //! ||R_k||^2 (ridge) or ||1_[-k,k] / M_g||^2 (cut-off) per admissible level.
  std::span<const double> norms() const { return norms_; }

  //! Grid on which M_hat is needed by select_on_grid().
  const SymmetricGrid& grid() const { return grid_; }

  SelectionResult select(const EmpiricalMellin& em) const;

  //! Selection from M_hat sampled on grid().
  SelectionResult select_on_grid(std::span<const complex> mhat,
                                 double sigma_hat) const;

  MellinMultiplier multiplier(double k) const;

  //! Estimate at level k (an admissible level) from M_hat on grid().
  DensityEstimate estimate(std::span<const complex> mhat, int k,
                           std::span<const double> x_grid) const;

private:
  std::size_t level_index(int k) const;

  Method method_;
  MellinFunction noise_;
  SelectionConfig cfg_;
  std::size_t n_;
  QuadratureConfig q_;

  std::vector<int> levels_;
  std::vector<double> norms_;
  std::vector<std::size_t> intervals_; // truncation of each level on grid_
  int rejected_k_ = 0;                 // first inadmissible level, if scanned
  double rejected_norm_ = 0.0;
  SymmetricGrid grid_;
  // ridge: R_k(t_j) per level; cut-off: a single row holding 1 / M_g(t_j)
  std::vector<std::vector<complex>> rows_;
  std::vector<double> inv_noise_sq_; // cut-off: |1/M_g(t)|^2 + |1/M_g(-t)|^2
};

//! Admissible ridge levels {k : ||R_k||^2 <= n} (a prefix of the grid).
std::vector<int>
admissible_ridge(const MellinFunction& g_mellin, const SelectionConfig& cfg,
                 std::size_t n, const QuadratureConfig& q);

//! Admissible cut-off levels {k : ||1_[-k,k] / M_g||^2 <= 2 pi n}.
std::vector<int>
admissible_cutoff(const MellinFunction& g_mellin, const SelectionConfig& cfg,
                  std::size_t n, const QuadratureConfig& q);

SelectionResult
select_ridge(const EmpiricalMellin& em, const MellinFunction& g_mellin,
             const SelectionConfig& cfg, const QuadratureConfig& q);

SelectionResult
select_cutoff(const EmpiricalMellin& em, const MellinFunction& g_mellin,
              const SelectionConfig& cfg, const QuadratureConfig& q);

//! CSV with columns k, A_hat, V_hat, objective, admissible (0/1).
void
write_diagnostics_csv(std::ostream& out, const SelectionResult& res);

} // namespace mellinridge
