#ifndef COPDEP_STAR_HPP
#define COPDEP_STAR_HPP

#include "copdep/measures.hpp"

namespace copdep {

// Operand layout: A has axes (u_1..u_n, s_1..s_n); B has axes
// (s_1..s_n, v_1..v_m). The shared s-block is the last n axes of A and the
// first n axes of B.

struct StarDiagnostics {
  double max_discrepancy = 0.0;  // max cellwise |D_A - D_B| over s-cells
  bool passed = true;
};

namespace detail {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct StarShape {
  Index u_cells = 1;
  Index s_cells = 1;
  Index v_cells = 1;
  std::vector<Index> u_res;
  std::vector<Index> v_res;
};

template <typename Scalar>
StarShape<Scalar> star_shape(const Checkerboard<Scalar>& a, const Checkerboard<Scalar>& b, Index n) {
  require(n >= 1, "s-block size n must be >= 1");
  require(a.dims() == 2 * n, "A must have 2n = " + std::to_string(2 * n) + " axes, has " + std::to_string(a.dims()));
  require(b.dims() > n, "B must have more than n axes");
  StarShape<Scalar> shape;
  for (Index k = 0; k < n; ++k) {
    require(a.resolution(n + k) == b.resolution(k),
            "s-block resolution mismatch on axis " + std::to_string(k) + ": " + std::to_string(a.resolution(n + k)) +
                " vs " + std::to_string(b.resolution(k)));
    shape.u_res.push_back(a.resolution(k));
    shape.u_cells *= a.resolution(k);
    shape.s_cells *= b.resolution(k);
  }
  for (Index k = n; k < b.dims(); ++k) {
    shape.v_res.push_back(b.resolution(k));
    shape.v_cells *= b.resolution(k);
  }
  return shape;
}

}  // namespace detail

/// Compares the s-marginals of A and B cellwise.
template <typename Scalar>
StarDiagnostics compatibility_check(const Checkerboard<Scalar>& a, const Checkerboard<Scalar>& b, Index n,
                                    double tolerance = kValidityTolerance) {
  const auto shape = detail::star_shape(a, b, n);
  using Matrix = detail::RowMatrix<Scalar>;
  const Eigen::Map<const Matrix> am(a.mass().data(), shape.u_cells, shape.s_cells);
  const Eigen::Map<const Matrix> bm(b.mass().data(), shape.s_cells, shape.v_cells);
  const auto da = am.colwise().sum().transpose().eval();
  const auto db = bm.rowwise().sum().eval();
  StarDiagnostics out;
  out.max_discrepancy = static_cast<double>((da - db).cwiseAbs().maxCoeff());
  out.passed = out.max_discrepancy < tolerance;
  return out;
}

/// Generalized * product. With conditionals taken cellwise, the integral over
/// the s-block is the exact finite sum
///   mass(u, v) = sum_s A(u, s) B(s, v) / D_B(s),
/// where s-cells with D_B(s) = 0 contribute nothing. The u-marginal of the
/// result equals A's u-marginal.
template <typename Scalar>
Checkerboard<Scalar> star(const Checkerboard<Scalar>& a, const Checkerboard<Scalar>& b, Index n) {
  const auto shape = detail::star_shape(a, b, n);
  const StarDiagnostics diag = compatibility_check(a, b, n);
  if (!diag.passed)
    fail(ErrorCode::incompatible_operands,
         "s-marginals of A and B differ by " + std::to_string(diag.max_discrepancy) + " (tolerance 1e-9)");
  using Matrix = detail::RowMatrix<Scalar>;
  using Vector = typename Checkerboard<Scalar>::Vector;
  const Eigen::Map<const Matrix> am(a.mass().data(), shape.u_cells, shape.s_cells);
  const Eigen::Map<const Matrix> bm(b.mass().data(), shape.s_cells, shape.v_cells);
  const Vector db = bm.rowwise().sum();
  const Vector inv = db.unaryExpr([](Scalar x) { return x > Scalar(0) ? Scalar(1) / x : Scalar(0); });
  Matrix out(shape.u_cells, shape.v_cells);
  out.noalias() = (am * inv.asDiagonal()) * bm;
  std::vector<Index> res(shape.u_res);
  res.insert(res.end(), shape.v_res.begin(), shape.v_res.end());
  Vector flat = Eigen::Map<const Vector>(out.data(), out.size());
  return Checkerboard<Scalar>(std::move(res), std::move(flat));
}

/// 2n-dimensional coupling with mass m^-n on cells whose u-index tuple equals
/// their s-index tuple; star(identity_coupling, B) reproduces B.
template <typename Scalar = double>
Checkerboard<Scalar> identity_coupling(Index n, Index m) {
  require(n >= 1 && m >= 1, "identity_coupling needs n >= 1 and m >= 1");
  Index block = 1;
  for (Index k = 0; k < n; ++k) block *= m;
  using Vector = typename Checkerboard<Scalar>::Vector;
  Vector mass = Vector::Zero(block * block);
  for (Index i = 0; i < block; ++i) mass[i * block + i] = Scalar(1) / Scalar(block);
  return Checkerboard<Scalar>(std::vector<Index>(2 * n, m), std::move(mass));
}

struct DpiReport {
  double tau_chain = 0.0;   // measure of A * B, conditioning on the u-block
  double tau_direct = 0.0;  // measure of B, conditioning on the s-block
  bool holds = true;
};

/// Data-processing check for a convex-phi measure kind.
template <typename Scalar>
DpiReport dpi_report(const Checkerboard<Scalar>& a, const Checkerboard<Scalar>& b, Index n, const MeasureKind& kind,
                     const MeasureOptions& options = {}) {
  const MeasureTag tag = kind.tag();
  require(tag == MeasureTag::tau_quadratic || tag == MeasureTag::tau_alpha || tag == MeasureTag::group_tau,
          "dpi_report needs a convex-phi measure (tau_quadratic, tau_alpha, group_tau), got " + kind.name());
  const Checkerboard<Scalar> chain = star(a, b, n);
  std::vector<Index> head(n);
  std::iota(head.begin(), head.end(), Index(0));
  std::vector<Index> tail(b.dims() - n);
  std::iota(tail.begin(), tail.end(), n);
  const GroupSplit split(head, tail);
  DpiReport report;
  report.tau_chain = measure(chain, split, kind, options).value;
  report.tau_direct = measure(b, split, kind, options).value;
  report.holds = report.tau_chain <= report.tau_direct + kValidityTolerance;
  return report;
}

}  // namespace copdep

#endif  // COPDEP_STAR_HPP
