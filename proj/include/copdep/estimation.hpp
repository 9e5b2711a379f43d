#ifndef COPDEP_ESTIMATION_HPP
#define COPDEP_ESTIMATION_HPP

#include "copdep/checkerboard.hpp"

namespace copdep {

/// Column-wise rank transform of a sample, entries (rank - 0.5) / N.
struct PseudoObservations {
  Eigen::MatrixXd values;  // N x d, entries in (0,1)
  Index tie_count = 0;     // tied pairs broken by row order

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

struct ResolutionPolicy {
  enum class Mode { fixed, automatic };

  Mode mode = Mode::automatic;
  std::optional<Index> fixed_m;
  Index min_m = 2;
  Index max_m = 128;

  static ResolutionPolicy fixed(Index m) {
    ResolutionPolicy p;
    p.mode = Mode::fixed;
    p.fixed_m = m;
    return p;
  }

  void check() const {
    require(min_m >= 2 && min_m <= max_m, "resolution policy needs 2 <= min_m <= max_m");
    if (mode == Mode::fixed) require(fixed_m && *fixed_m >= 1, "fixed resolution policy needs fixed_m >= 1");
  }
};

struct RebalanceOptions {
  double tolerance = 1e-10;
  int max_sweeps = 50;
};

/// Ranks each column; ties go to the earlier row. Throws insufficient-data
/// for N < 2 and invalid-data (naming the column) for non-finite entries.
PseudoObservations pseudo_observations(const Eigen::MatrixXd& data);

/// Counts pseudo-observations per cell, divides by N, then restores uniform
/// marginals with rebalance_marginals. A point on an interior cell boundary
/// belongs to the upper cell.
CheckerboardCopula fit_checkerboard(const PseudoObservations& pseudo, const std::vector<Index>& resolutions,
                                    Index max_m = 128);

/// Iterative proportional fitting over all axes until the worst marginal
/// error is below the tolerance. Already-uniform input is returned unchanged.
CheckerboardCopula rebalance_marginals(const CheckerboardCopula& copula, const RebalanceOptions& options = {});

/// Automatic mode: m = clamp(floor(N^(1/(d+1))), min_m, max_m) on every axis.
/// The exponent is a heuristic balancing cell count against samples per cell.
std::vector<Index> choose_resolution(Index n_rows, Index dims, const ResolutionPolicy& policy);

}  // namespace copdep

#endif  // COPDEP_ESTIMATION_HPP
