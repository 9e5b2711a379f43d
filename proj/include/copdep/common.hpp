#ifndef COPDEP_COMMON_HPP
#define COPDEP_COMMON_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace copdep {

using Index = Eigen::Index;

/// Absolute tolerance for copula validity (mass, marginals).
inline constexpr double kValidityTolerance = 1e-9;
/// Absolute tolerance for identities that hold exactly in exact arithmetic.
inline constexpr double kIdentityTolerance = 1e-12;

enum class ErrorCode {
  invalid_argument,
  insufficient_data,
  invalid_data,
  io_error,
  rebalance_failed,
  degenerate_marginal,
  incompatible_operands,
  evaluation_failed,
  degenerate_bound,
  validation_failed,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::invalid_data: return "invalid-data";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::rebalance_failed: return "rebalance-failed";
    case ErrorCode::degenerate_marginal: return "degenerate-marginal";
    case ErrorCode::incompatible_operands: return "incompatible-operands";
    case ErrorCode::evaluation_failed: return "evaluation-failed";
    case ErrorCode::degenerate_bound: return "degenerate-bound";
    case ErrorCode::validation_failed: return "validation-failed";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::invalid_argument, what);
}

/// Pairwise (tree) sum of a contiguous range, left to right at every level.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    Scalar acc(0);
    for (const Scalar& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Order-independent reduction: sorts the terms, then sums pairwise.
/// Any relabeling of the terms (e.g. permuted conditioning axes) gives a
/// bit-identical result.
template <typename Scalar>
Scalar canonical_sum(std::vector<Scalar> terms) {
  std::sort(terms.begin(), terms.end());
  return pairwise_sum(std::span<const Scalar>(terms));
}

/// Order-independent accumulator: terms are truncated to a 2^-96 fixed-point
/// grid and added as integers, so any summation order gives the same bits.
/// Terms must be finite with magnitude below 2^30.
template <typename Scalar>
class FixedPointSum {
 public:
  void add(Scalar x) { acc_ += static_cast<__int128>(std::ldexp(x, kScaleBits)); }
  Scalar value() const { return std::ldexp(static_cast<Scalar>(acc_), -kScaleBits); }

 private:
  static constexpr int kScaleBits = 96;
  __int128 acc_ = 0;
};

/// Worker count, capped by COPDEP_THREADS when set.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COPDEP_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs body(i) for i in [0, count). Each index must write only its own
/// output slot; callers reduce the slots in a fixed order afterwards.
inline void parallel_for(Index count, const std::function<void(Index)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<Index>(thread_count(), count));
  if (workers <= 1 || count < 64) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      for (Index i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Golub-Welsch.
template <typename Scalar>
struct GaussLegendre {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  explicit GaussLegendre(int order) {
    require(order >= 1, "quadrature order must be >= 1");
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix jacobi = Matrix::Zero(order, order);
    for (int k = 1; k < order; ++k) {
      const Scalar kk(k);
      const Scalar beta = kk / std::sqrt(Scalar(4) * kk * kk - Scalar(1));
      jacobi(k, k - 1) = beta;
      jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
    nodes = solver.eigenvalues();
    weights = Scalar(2) * solver.eigenvectors().row(0).transpose().array().square().matrix();
  }

  /// Integral of f over [a, b].
  template <typename F>
  Scalar integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar half = (b - a) / Scalar(2);
    const Scalar mid = (a + b) / Scalar(2);
    Scalar acc(0);
    for (Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
  }
};

}  // namespace copdep

#endif  // COPDEP_COMMON_HPP
