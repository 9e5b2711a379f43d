#ifndef COPDEP_GENERATORS_HPP
#define COPDEP_GENERATORS_HPP

#include "copdep/checkerboard.hpp"

#include <cstdint>
#include <string_view>

namespace copdep {

/// Counter-based generator: draw k of stream (seed) is the SplitMix64
/// finalizer applied to key(seed) + (k + 1) * golden-ratio increment. Output
/// depends only on (seed, k), so it is identical across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double exponential() { return -std::log(uniform()); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

enum class SynthTag { independent, comonotone, mixture, functional, gaussian, square_law };

/// Target function for the functional model, applied to inputs X_1..X_n.
enum class FunctionSpec {
  sin_plus_square,  // sin(X_1) + X_2^2
  sum,              // X_1 + ... + X_n
  product,          // X_1 * ... * X_n
  square,           // X_1^2
};

struct SynthModel {
  SynthTag tag = SynthTag::independent;
  Index dimension = 2;
  std::uint64_t seed = 0;
  double theta = 0.0;                                   // mixture weight on the comonotone part
  FunctionSpec function = FunctionSpec::sin_plus_square;  // functional model
  double sigma = 0.0;                                   // functional model noise
  Eigen::MatrixXd correlation;                          // gaussian model

  void check() const;
};

SynthTag parse_synth_tag(std::string_view name);
FunctionSpec parse_function_spec(std::string_view name);

/// N x d sample. Columns:
///   independent  - iid U(0,1)
///   comonotone   - increasing transforms x^(k+1) of one U(0,1)
///   mixture      - per row, with probability theta all columns share one
///                  uniform, otherwise independent (copula theta M + (1-theta) Pi)
///   functional   - inputs iid U(-1,1), last column f(inputs) + sigma * Z
///   gaussian     - Phi(L z) with L the Cholesky factor of the correlation
///   square_law   - X ~ U(-1,1), Y = X^2
Eigen::MatrixXd generate(const SynthModel& model, Index n_rows);

/// theta * comonotone + (1 - theta) * independence on an m x m grid.
CheckerboardCopula mixture_copula(double theta, Index m);

/// Strictly positive random grid: iid Exp(1) cell weights (a symmetric
/// Dirichlet(1) draw), then marginals restored by IPF.
CheckerboardCopula random_copula(const std::vector<Index>& resolutions, std::uint64_t seed);

/// Convex combination of `components` random permutation grids, each placing
/// mass 1/m on cells (i, pi_1(i), ..., pi_{d-1}(i)). Marginals are uniform
/// up to rounding without any fitting.
CheckerboardCopula random_shuffle_copula(Index d, Index m, Index components, std::uint64_t seed);

/// Grid where every conditioning cell sends all of its mass to one target
/// cell: a discrete complete dependence of the last axis on the rest.
CheckerboardCopula random_deterministic_copula(Index n_conditioning, Index m, std::uint64_t seed);

/// Star operands drawn from one random joint grid on (u, s, v) blocks with
/// n, n and target_dims axes: A is its (u, s) marginal, B its (s, v) marginal.
struct MarkovOperands {
  CheckerboardCopula a;
  CheckerboardCopula b;
};

MarkovOperands random_markov_operands(Index n, Index m, Index target_dims, std::uint64_t seed);

}  // namespace copdep

#endif  // COPDEP_GENERATORS_HPP
