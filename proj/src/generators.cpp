#include "copdep/generators.hpp"

#include "copdep/estimation.hpp"

#include <numeric>

namespace copdep {

namespace {

void shuffle(std::vector<Index>& values, CounterRng& rng) {
  for (Index i = static_cast<Index>(values.size()) - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(values[i], values[j]);
  }
}

double apply(FunctionSpec f, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  switch (f) {
    case FunctionSpec::sin_plus_square: return std::sin(x[0]) + x[1] * x[1];
    case FunctionSpec::sum: return x.sum();
    case FunctionSpec::product: return x.prod();
    case FunctionSpec::square: return x[0] * x[0];
  }
  return 0.0;
}

}  // namespace

SynthTag parse_synth_tag(std::string_view name) {
  if (name == "independent") return SynthTag::independent;
  if (name == "comonotone") return SynthTag::comonotone;
  if (name == "mixture") return SynthTag::mixture;
  if (name == "functional") return SynthTag::functional;
  if (name == "gaussian") return SynthTag::gaussian;
  if (name == "square_law") return SynthTag::square_law;
  fail(ErrorCode::invalid_argument, "unknown synthetic model '" + std::string(name) + "'");
}

FunctionSpec parse_function_spec(std::string_view name) {
  if (name == "sin_plus_square") return FunctionSpec::sin_plus_square;
  if (name == "sum") return FunctionSpec::sum;
  if (name == "product") return FunctionSpec::product;
  if (name == "square") return FunctionSpec::square;
  fail(ErrorCode::invalid_argument, "unknown function '" + std::string(name) + "'");
}

void SynthModel::check() const {
  switch (tag) {
    case SynthTag::independent:
    case SynthTag::comonotone:
      require(dimension >= 2, "model needs dimension >= 2");
      break;
    case SynthTag::mixture:
      require(dimension >= 2, "model needs dimension >= 2");
      require(theta >= 0.0 && theta <= 1.0, "mixture theta must lie in [0,1]");
      break;
    case SynthTag::functional:
      require(dimension >= 2, "functional model needs at least one input and one output");
      require(sigma >= 0.0 && std::isfinite(sigma), "noise sigma must be >= 0");
      if (function == FunctionSpec::sin_plus_square)
        require(dimension >= 3, "sin_plus_square needs two inputs (dimension >= 3)");
      break;
    case SynthTag::gaussian: {
      const Index d = correlation.rows();
      require(d >= 2 && correlation.cols() == d, "gaussian model needs a square correlation matrix of size >= 2");
      require(dimension == d, "gaussian dimension must equal the correlation matrix size");
      require((correlation - correlation.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
              "correlation matrix must be symmetric");
      require((correlation.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12,
              "correlation matrix must have unit diagonal");
      Eigen::LLT<Eigen::MatrixXd> llt(correlation);
      require(llt.info() == Eigen::Success, "correlation matrix is not positive definite");
      break;
    }
    case SynthTag::square_law:
      require(dimension == 2, "square_law model is bivariate");
      break;
  }
}

Eigen::MatrixXd generate(const SynthModel& model, Index n_rows) {
  model.check();
  if (n_rows < 2) fail(ErrorCode::insufficient_data, "need at least 2 rows");
  const Index d = model.dimension;
  CounterRng rng(model.seed);
  Eigen::MatrixXd out(n_rows, d);
  switch (model.tag) {
    case SynthTag::independent:
      for (Index r = 0; r < n_rows; ++r)
        for (Index c = 0; c < d; ++c) out(r, c) = rng.uniform();
      break;
    case SynthTag::comonotone:
      for (Index r = 0; r < n_rows; ++r) {
        const double x = rng.uniform();
        for (Index c = 0; c < d; ++c) out(r, c) = std::pow(x, static_cast<double>(c + 1));
      }
      break;
    case SynthTag::mixture:
      for (Index r = 0; r < n_rows; ++r) {
        const bool shared = rng.uniform() < model.theta;
        for (Index c = 0; c < d; ++c) out(r, c) = rng.uniform();
        if (shared) out.row(r).setConstant(out(r, 0));
      }
      break;
    case SynthTag::functional:
      for (Index r = 0; r < n_rows; ++r) {
        for (Index c = 0; c + 1 < d; ++c) out(r, c) = rng.uniform(-1.0, 1.0);
        const double noise = model.sigma > 0.0 ? model.sigma * rng.normal() : 0.0;
        out(r, d - 1) = apply(model.function, out.row(r).head(d - 1)) + noise;
      }
      break;
    case SynthTag::gaussian: {
      const Eigen::MatrixXd lower = Eigen::LLT<Eigen::MatrixXd>(model.correlation).matrixL();
      Eigen::VectorXd z(d);
      for (Index r = 0; r < n_rows; ++r) {
        for (Index c = 0; c < d; ++c) z[c] = rng.normal();
        const Eigen::VectorXd x = lower * z;
        for (Index c = 0; c < d; ++c) out(r, c) = normal_cdf(x[c]);
      }
      break;
    }
    case SynthTag::square_law:
      for (Index r = 0; r < n_rows; ++r) {
        const double x = rng.uniform(-1.0, 1.0);
        out(r, 0) = x;
        out(r, 1) = x * x;
      }
      break;
  }
  return out;
}

CheckerboardCopula mixture_copula(double theta, Index m) {
  require(theta >= 0.0 && theta <= 1.0, "mixture theta must lie in [0,1]");
  require(m >= 1, "resolution must be >= 1");
  const auto comonotone = make_comonotone(2, m);
  const auto independent = make_independence({m, m});
  return CheckerboardCopula({m, m}, theta * comonotone.mass() + (1.0 - theta) * independent.mass());
}

CheckerboardCopula random_copula(const std::vector<Index>& resolutions, std::uint64_t seed) {
  const auto base = make_independence(resolutions);
  CounterRng rng(seed);
  Eigen::VectorXd mass(base.cell_count());
  for (Index i = 0; i < mass.size(); ++i) mass[i] = rng.exponential();
  mass /= pairwise_sum(std::span<const double>(mass.data(), static_cast<std::size_t>(mass.size())));
  RebalanceOptions opts;
  opts.tolerance = 1e-14;
  opts.max_sweeps = 500;
  return rebalance_marginals(CheckerboardCopula(resolutions, std::move(mass)), opts);
}

CheckerboardCopula random_shuffle_copula(Index d, Index m, Index components, std::uint64_t seed) {
  require(d >= 2 && m >= 1 && components >= 1, "shuffle copula needs d >= 2, m >= 1, components >= 1");
  CounterRng rng(seed);
  const std::vector<Index> res(d, m);
  const auto shape = make_independence(res);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(shape.cell_count());
  std::vector<double> weights(components);
  for (auto& w : weights) w = rng.exponential();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (Index c = 0; c < components; ++c) {
    std::vector<std::vector<Index>> perms(d);
    for (Index k = 1; k < d; ++k) {
      perms[k].resize(m);
      std::iota(perms[k].begin(), perms[k].end(), Index(0));
      shuffle(perms[k], rng);
    }
    const double w = weights[c] / total / static_cast<double>(m);
    for (Index i = 0; i < m; ++i) {
      Index flat = i * shape.strides()[0];
      for (Index k = 1; k < d; ++k) flat += perms[k][i] * shape.strides()[k];
      mass[flat] += w;
    }
  }
  return CheckerboardCopula(res, std::move(mass));
}

CheckerboardCopula random_deterministic_copula(Index n_conditioning, Index m, std::uint64_t seed) {
  require(n_conditioning >= 1 && m >= 1, "need n_conditioning >= 1 and m >= 1");
  Index u_cells = 1;
  for (Index k = 0; k < n_conditioning; ++k) u_cells *= m;
  // Each target cell receives the same number of conditioning cells, which
  // keeps the target marginal uniform.
  std::vector<Index> target(u_cells);
  for (Index u = 0; u < u_cells; ++u) target[u] = u % m;
  CounterRng rng(seed);
  shuffle(target, rng);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(u_cells * m);
  for (Index u = 0; u < u_cells; ++u) mass[u * m + target[u]] = 1.0 / static_cast<double>(u_cells);
  return CheckerboardCopula(std::vector<Index>(n_conditioning + 1, m), std::move(mass));
}

MarkovOperands random_markov_operands(Index n, Index m, Index target_dims, std::uint64_t seed) {
  require(n >= 1 && target_dims >= 1, "need n >= 1 and target_dims >= 1");
  const std::vector<Index> res(2 * n + target_dims, m);
  const auto joint = random_copula(res, seed);
  std::vector<Index> us(2 * n);
  std::iota(us.begin(), us.end(), Index(0));
  std::vector<Index> sv(n + target_dims);
  std::iota(sv.begin(), sv.end(), n);
  return MarkovOperands{marginal(joint, us), marginal(joint, sv)};
}

}  // namespace copdep
