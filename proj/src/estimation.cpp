#include "copdep/estimation.hpp"

#include <numeric>

namespace copdep {

PseudoObservations pseudo_observations(const Eigen::MatrixXd& data) {
  const Index n = data.rows();
  const Index d = data.cols();
  if (n < 2) fail(ErrorCode::insufficient_data, "need at least 2 rows, got " + std::to_string(n));
  require(d >= 1, "need at least one column");
  for (Index c = 0; c < d; ++c)
    for (Index r = 0; r < n; ++r)
      if (!std::isfinite(data(r, c)))
        fail(ErrorCode::invalid_data, "non-finite value in column " + std::to_string(c) + " (row " +
                                          std::to_string(r) + ")");

  PseudoObservations out;
  out.values.resize(n, d);
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<Index> ties(d, 0);
  parallel_for(d, [&](Index c) {
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index(0));
    const auto col = data.col(c);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return col[a] < col[b]; });
    for (Index rank = 0; rank < n; ++rank) {
      out.values(idx[rank], c) = (static_cast<double>(rank) + 0.5) * scale;
      if (rank > 0 && col[idx[rank]] == col[idx[rank - 1]]) ++ties[c];
    }
  });
  out.tie_count = std::accumulate(ties.begin(), ties.end(), Index(0));
  return out;
}

CheckerboardCopula fit_checkerboard(const PseudoObservations& pseudo, const std::vector<Index>& resolutions,
                                    Index max_m) {
  const Index d = pseudo.cols();
  require(static_cast<Index>(resolutions.size()) == d,
          "need one resolution per column (" + std::to_string(d) + "), got " + std::to_string(resolutions.size()));
  Index total = 1;
  for (Index m : resolutions) {
    require(m >= 1, "resolution must be >= 1");
    require(m <= max_m, "resolution " + std::to_string(m) + " exceeds max_m " + std::to_string(max_m));
    total *= m;
  }
  std::vector<Index> strides(d, 1);
  for (Index k = d - 2; k >= 0; --k) strides[k] = strides[k + 1] * resolutions[k + 1];

  std::vector<Index> counts(total, 0);
  for (Index r = 0; r < pseudo.rows(); ++r) {
    Index flat = 0;
    for (Index k = 0; k < d; ++k) {
      const Index m = resolutions[k];
      const Index cell = std::clamp<Index>(static_cast<Index>(std::floor(pseudo.values(r, k) * m)), 0, m - 1);
      flat += cell * strides[k];
    }
    ++counts[flat];
  }
  Eigen::VectorXd mass(total);
  const double n = static_cast<double>(pseudo.rows());
  for (Index i = 0; i < total; ++i) mass[i] = static_cast<double>(counts[i]) / n;
  return rebalance_marginals(CheckerboardCopula(resolutions, std::move(mass)));
}

namespace {

double worst_marginal_error(const std::vector<std::vector<double>>& slabs) {
  double worst = 0.0;
  for (const auto& axis : slabs) {
    const double target = 1.0 / static_cast<double>(axis.size());
    for (double s : axis) worst = std::max(worst, std::abs(s - target));
  }
  return worst;
}

}  // namespace

CheckerboardCopula rebalance_marginals(const CheckerboardCopula& copula, const RebalanceOptions& options) {
  const auto& mass0 = copula.mass();
  for (Index i = 0; i < mass0.size(); ++i)
    require(mass0[i] >= 0.0 && std::isfinite(mass0[i]), "rebalance needs finite nonnegative masses");
  const double total = pairwise_sum(std::span<const double>(mass0.data(), static_cast<std::size_t>(mass0.size())));
  require(std::abs(total - 1.0) <= kValidityTolerance, "rebalance needs masses summing to 1");

  auto slabs = slab_masses(copula);
  for (Index k = 0; k < copula.dims(); ++k)
    for (Index i = 0; i < copula.resolution(k); ++i)
      if (slabs[k][i] <= 0.0)
        fail(ErrorCode::degenerate_marginal,
             "slab " + std::to_string(i) + " of axis " + std::to_string(k) + " has zero mass");
  if (worst_marginal_error(slabs) < options.tolerance) return copula;

  Eigen::VectorXd mass = mass0;
  const Index d = copula.dims();
  const auto& res = copula.resolutions();
  double residual = 0.0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    for (Index k = 0; k < d; ++k) {
      const auto current = slab_masses(CheckerboardCopula(res, mass));
      const double target = 1.0 / static_cast<double>(res[k]);
      std::vector<double> factor(res[k]);
      for (Index i = 0; i < res[k]; ++i) factor[i] = target / current[k][i];
      std::vector<Index> cell(d, 0);
      Index flat = 0;
      do {
        mass[flat++] *= factor[cell[k]];
      } while (detail::next_cell(cell, res));
    }
    slabs = slab_masses(CheckerboardCopula(res, mass));
    residual = worst_marginal_error(slabs);
    if (residual < options.tolerance) return CheckerboardCopula(res, std::move(mass));
  }
  fail(ErrorCode::rebalance_failed, "marginal rebalancing did not converge in " + std::to_string(options.max_sweeps) +
                                        " sweeps (residual " + std::to_string(residual) + ")");
}

std::vector<Index> choose_resolution(Index n_rows, Index dims, const ResolutionPolicy& policy) {
  policy.check();
  if (n_rows < 2) fail(ErrorCode::insufficient_data, "need at least 2 rows");
  require(dims >= 2, "need at least 2 dimensions");
  if (policy.mode == ResolutionPolicy::Mode::fixed) return std::vector<Index>(dims, *policy.fixed_m);
  // Largest m with m^(d+1) <= N, computed in integers to avoid pow rounding.
  auto fits = [&](Index m) {
    long double p = 1.0L;
    for (Index k = 0; k <= dims; ++k) p *= static_cast<long double>(m);
    return p <= static_cast<long double>(n_rows);
  };
  Index m = std::max<Index>(1, static_cast<Index>(std::floor(std::pow(static_cast<double>(n_rows), 1.0 / (dims + 1)))));
  while (m > 1 && !fits(m)) --m;
  while (fits(m + 1)) ++m;
  return std::vector<Index>(dims, std::clamp(m, policy.min_m, policy.max_m));
}

}  // namespace copdep
