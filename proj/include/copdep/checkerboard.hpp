#ifndef COPDEP_CHECKERBOARD_HPP
#define COPDEP_CHECKERBOARD_HPP

#include "copdep/common.hpp"

#include <initializer_list>
#include <numeric>
#include <optional>
#include <sstream>

namespace copdep {

/// A d-dimensional copula with piecewise-uniform density on an axis-aligned
/// grid. Cell masses are stored row-major with the last axis fastest.
template <typename Scalar_>
class Checkerboard {
 public:
  using Scalar = Scalar_;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Checkerboard(std::vector<Index> resolutions, Vector mass)
      : resolutions_(std::move(resolutions)), mass_(std::move(mass)) {
    require(!resolutions_.empty(), "copula needs at least one axis");
    Index total = 1;
    for (Index m : resolutions_) {
      require(m >= 1, "resolution must be >= 1, got " + std::to_string(m));
      total *= m;
    }
    require(mass_.size() == total, "mass length " + std::to_string(mass_.size()) +
                                       " does not match product of resolutions " + std::to_string(total));
    strides_.assign(resolutions_.size(), 1);
    for (Index k = dims() - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * resolutions_[k + 1];
  }

  Index dims() const { return static_cast<Index>(resolutions_.size()); }
  Index resolution(Index axis) const { return resolutions_[axis]; }
  const std::vector<Index>& resolutions() const { return resolutions_; }
  const std::vector<Index>& strides() const { return strides_; }
  Index cell_count() const { return mass_.size(); }
  const Vector& mass() const { return mass_; }

  Index flat_index(std::span<const Index> cell) const {
    require(static_cast<Index>(cell.size()) == dims(), "cell index has wrong dimension");
    Index flat = 0;
    for (Index k = 0; k < dims(); ++k) {
      require(cell[k] >= 0 && cell[k] < resolutions_[k], "cell index out of range");
      flat += cell[k] * strides_[k];
    }
    return flat;
  }

  std::vector<Index> cell_index(Index flat) const {
    std::vector<Index> cell(resolutions_.size());
    for (Index k = 0; k < dims(); ++k) {
      cell[k] = flat / strides_[k];
      flat %= strides_[k];
    }
    return cell;
  }

  Scalar mass_at(std::span<const Index> cell) const { return mass_[flat_index(cell)]; }
  Scalar mass_at(std::initializer_list<Index> cell) const {
    return mass_at(std::span<const Index>(cell.begin(), cell.size()));
  }

  template <typename NewScalar>
  Checkerboard<NewScalar> cast() const {
    return Checkerboard<NewScalar>(resolutions_, mass_.template cast<NewScalar>());
  }

  friend bool operator==(const Checkerboard& a, const Checkerboard& b) {
    return a.resolutions_ == b.resolutions_ && a.mass_ == b.mass_;
  }

 private:
  std::vector<Index> resolutions_;
  std::vector<Index> strides_;
  Vector mass_;
};

using CheckerboardCopula = Checkerboard<double>;

/// Closed box [lower, upper] in the unit cube.
template <typename Scalar>
struct GridBox {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lower;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> upper;

  GridBox(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lo, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hi)
      : lower(std::move(lo)), upper(std::move(hi)) {
    require(lower.size() == upper.size(), "box corners differ in dimension");
    for (Index k = 0; k < lower.size(); ++k) {
      require(lower[k] >= Scalar(0) && upper[k] <= Scalar(1), "box outside the unit cube");
      require(lower[k] <= upper[k], "box lower corner exceeds upper corner");
    }
  }

  static GridBox unit(Index d) {
    using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    return GridBox(V::Zero(d), V::Ones(d));
  }

  Index dims() const { return lower.size(); }
};

/// Partition of the axes into a conditioning block U and a target block V.
struct GroupSplit {
  std::vector<Index> u_axes;
  std::vector<Index> v_axes;

  GroupSplit(std::vector<Index> u, std::vector<Index> v) : u_axes(std::move(u)), v_axes(std::move(v)) {
    require(!u_axes.empty(), "conditioning block must be nonempty");
    require(!v_axes.empty(), "target block must be nonempty");
  }

  /// Last axis as target, the rest conditioning.
  static GroupSplit last_target(Index dims) {
    require(dims >= 2, "split needs at least two axes");
    std::vector<Index> u(dims - 1);
    std::iota(u.begin(), u.end(), Index(0));
    return GroupSplit(std::move(u), {dims - 1});
  }

  Index dims() const { return static_cast<Index>(u_axes.size() + v_axes.size()); }

  /// Throws unless the blocks are disjoint and cover [0, dims).
  void check(Index dims) const {
    std::vector<int> seen(static_cast<std::size_t>(std::max<Index>(dims, 0)), 0);
    for (const auto* block : {&u_axes, &v_axes}) {
      for (Index a : *block) {
        require(a >= 0 && a < dims, "split axis " + std::to_string(a) + " out of range");
        require(seen[a]++ == 0, "split axis " + std::to_string(a) + " appears twice");
      }
    }
    require(this->dims() == dims, "split must cover every axis");
  }

  /// Axes in arranged order: U block then V block.
  std::vector<Index> arranged() const {
    std::vector<Index> order(u_axes);
    order.insert(order.end(), v_axes.begin(), v_axes.end());
    return order;
  }
};

struct ValidationReport {
  double max_negative_mass = 0.0;
  std::optional<std::vector<Index>> negative_cell;
  double total_mass_error = 0.0;
  double worst_marginal_error = 0.0;
  Index worst_axis = -1;
  Index worst_slab = -1;
  bool passed = true;

  std::string summary() const {
    std::ostringstream out;
    out << (passed ? "valid" : "INVALID") << ": max negative mass " << max_negative_mass;
    if (negative_cell) {
      out << " at cell (";
      for (std::size_t k = 0; k < negative_cell->size(); ++k) out << (k ? "," : "") << (*negative_cell)[k];
      out << ")";
    }
    out << ", total-mass error " << total_mass_error << ", worst marginal error " << worst_marginal_error;
    if (worst_axis >= 0) out << " (axis " << worst_axis << ", slab " << worst_slab << ")";
    return out.str();
  }
};

namespace detail {

template <typename Derived>
void check_unit_point(const Eigen::MatrixBase<Derived>& point, Index dims) {
  require(point.size() == dims, "point has dimension " + std::to_string(point.size()) + ", expected " +
                                    std::to_string(dims));
  for (Index k = 0; k < point.size(); ++k) {
    const auto x = point[k];
    require(x >= 0 && x <= 1, "coordinate " + std::to_string(k) + " outside [0,1]");
  }
}

/// Cumulative mass of a row-major cell block below `point` under the
/// piecewise-uniform density: multilinear interpolation of the vertex sums.
template <typename Scalar, typename Derived>
Scalar interpolated_cdf(const Scalar* mass, std::span<const Index> resolutions, std::span<const Index> strides,
                        const Eigen::MatrixBase<Derived>& point) {
  const Index d = static_cast<Index>(resolutions.size());
  std::vector<std::vector<Scalar>> weights(d);
  for (Index k = 0; k < d; ++k) {
    const Index m = resolutions[k];
    const Scalar scaled = Scalar(point[k]) * Scalar(m);
    Index live = std::min<Index>(m, static_cast<Index>(std::ceil(scaled)));
    if (live <= 0) return Scalar(0);
    weights[k].resize(live);
    for (Index i = 0; i < live; ++i) weights[k][i] = std::clamp(scaled - Scalar(i), Scalar(0), Scalar(1));
  }
  std::function<Scalar(Index, Index)> contract = [&](Index axis, Index offset) -> Scalar {
    if (axis == d) return mass[offset];
    Scalar acc(0);
    const auto& w = weights[axis];
    for (Index i = 0; i < static_cast<Index>(w.size()); ++i) acc += w[i] * contract(axis + 1, offset + i * strides[axis]);
    return acc;
  };
  return contract(0, 0);
}

/// Advances a row-major multi-index; returns false after the last cell.
inline bool next_cell(std::vector<Index>& cell, std::span<const Index> resolutions) {
  for (Index k = static_cast<Index>(cell.size()) - 1; k >= 0; --k) {
    if (++cell[k] < resolutions[k]) return true;
    cell[k] = 0;
  }
  return false;
}

}  // namespace detail

/// Product copula: every cell has mass 1/(m_1 ... m_d).
template <typename Scalar = double>
Checkerboard<Scalar> make_independence(const std::vector<Index>& resolutions) {
  require(!resolutions.empty(), "independence copula needs at least one axis");
  Index total = 1;
  for (Index m : resolutions) {
    require(m >= 1, "resolution must be >= 1, got " + std::to_string(m));
    total *= m;
  }
  using Vector = typename Checkerboard<Scalar>::Vector;
  return Checkerboard<Scalar>(resolutions, Vector::Constant(total, Scalar(1) / Scalar(total)));
}

/// Grid approximation of the upper Frechet bound: mass 1/m on each diagonal cell.
template <typename Scalar = double>
Checkerboard<Scalar> make_comonotone(Index d, Index m) {
  require(d >= 2, "comonotone copula needs d >= 2");
  require(m >= 1, "resolution must be >= 1");
  Index total = 1;
  for (Index k = 0; k < d; ++k) total *= m;
  using Vector = typename Checkerboard<Scalar>::Vector;
  Vector mass = Vector::Zero(total);
  Index diagonal_stride = 0;
  for (Index k = 0, s = 1; k < d; ++k, s *= m) diagonal_stride += s;
  for (Index i = 0; i < m; ++i) mass[i * diagonal_stride] = Scalar(1) / Scalar(m);
  return Checkerboard<Scalar>(std::vector<Index>(d, m), std::move(mass));
}

/// Lower Frechet bound W^d. A bound function only; not a copula for d > 2.
template <typename Derived>
typename Derived::Scalar frechet_w_value(const Eigen::MatrixBase<Derived>& point) {
  using Scalar = typename Derived::Scalar;
  detail::check_unit_point(point, point.size());
  const Scalar s = point.sum() - Scalar(point.size()) + Scalar(1);
  return std::max(s, Scalar(0));
}

/// Upper Frechet bound M^d.
template <typename Derived>
typename Derived::Scalar frechet_m_value(const Eigen::MatrixBase<Derived>& point) {
  detail::check_unit_point(point, point.size());
  return point.minCoeff();
}

template <typename Scalar, typename Derived>
Scalar cdf_value(const Checkerboard<Scalar>& copula, const Eigen::MatrixBase<Derived>& point) {
  detail::check_unit_point(point, copula.dims());
  return detail::interpolated_cdf(copula.mass().data(), std::span<const Index>(copula.resolutions()),
                                  std::span<const Index>(copula.strides()), point);
}

/// C-volume of a box: signed sum of the copula over the 2^d vertices.
template <typename Scalar>
Scalar c_volume(const Checkerboard<Scalar>& copula, const GridBox<Scalar>& box) {
  const Index d = copula.dims();
  require(box.dims() == d, "box dimension does not match copula");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vertex(d);
  Scalar acc(0);
  for (Index corner = 0; corner < (Index(1) << d); ++corner) {
    int lower_count = 0;
    for (Index k = 0; k < d; ++k) {
      const bool upper = (corner >> k) & 1;
      vertex[k] = upper ? box.upper[k] : box.lower[k];
      lower_count += upper ? 0 : 1;
    }
    const Scalar value = cdf_value(copula, vertex);
    acc += (lower_count % 2 == 0) ? value : -value;
  }
  return acc;
}

/// k-th sub-C-volume: k-th order difference over a box on the first k axes
/// with the remaining coordinates fixed at `tail`.
template <typename Scalar, typename Derived>
Scalar sub_volume(const Checkerboard<Scalar>& copula, const GridBox<Scalar>& head_box,
                  const Eigen::MatrixBase<Derived>& tail) {
  const Index k = head_box.dims();
  const Index d = copula.dims();
  require(k >= 1 && k < d, "head box must cover between 1 and d-1 axes");
  detail::check_unit_point(tail, d - k);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vertex(d);
  vertex.tail(d - k) = tail.template cast<Scalar>();
  Scalar acc(0);
  for (Index corner = 0; corner < (Index(1) << k); ++corner) {
    int lower_count = 0;
    for (Index a = 0; a < k; ++a) {
      const bool upper = (corner >> a) & 1;
      vertex[a] = upper ? head_box.upper[a] : head_box.lower[a];
      lower_count += upper ? 0 : 1;
    }
    const Scalar value = cdf_value(copula, vertex);
    acc += (lower_count % 2 == 0) ? value : -value;
  }
  return acc;
}

/// Marginal copula on `axes`, in the given order.
template <typename Scalar>
Checkerboard<Scalar> marginal(const Checkerboard<Scalar>& copula, const std::vector<Index>& axes) {
  require(!axes.empty(), "marginal needs at least one axis");
  const Index d = copula.dims();
  std::vector<Index> position(d, -1);
  std::vector<Index> res;
  for (Index i = 0; i < static_cast<Index>(axes.size()); ++i) {
    const Index a = axes[i];
    require(a >= 0 && a < d, "marginal axis out of range");
    require(position[a] < 0, "marginal axes must be distinct");
    position[a] = i;
    res.push_back(copula.resolution(a));
  }
  using Vector = typename Checkerboard<Scalar>::Vector;
  Index total = 1;
  for (Index m : res) total *= m;
  std::vector<Index> out_stride(axes.size(), 1);
  for (Index i = static_cast<Index>(axes.size()) - 2; i >= 0; --i) out_stride[i] = out_stride[i + 1] * res[i + 1];
  // Contribution of each source axis to the output offset.
  std::vector<Index> axis_weight(d, 0);
  for (Index a = 0; a < d; ++a)
    if (position[a] >= 0) axis_weight[a] = out_stride[position[a]];

  // Fixed-point accumulation makes the sums independent of the source layout.
  std::vector<FixedPointSum<Scalar>> acc(total);
  Vector out(total);
  std::vector<Index> cell(d, 0);
  const auto& src = copula.mass();
  Index flat = 0;
  const bool keeps_all = static_cast<Index>(axes.size()) == d;
  do {
    Index target = 0;
    for (Index a = 0; a < d; ++a) target += cell[a] * axis_weight[a];
    if (keeps_all)
      out[target] = src[flat];
    else
      acc[target].add(src[flat]);
    ++flat;
  } while (detail::next_cell(cell, copula.resolutions()));
  if (!keeps_all)
    for (Index i = 0; i < total; ++i) out[i] = acc[i].value();
  return Checkerboard<Scalar>(std::move(res), std::move(out));
}

/// Slab sums along every axis: result[k][i] is the mass with index i on axis k.
/// Independent of cell order, hence invariant under axis relabeling.
template <typename Scalar>
std::vector<std::vector<Scalar>> slab_masses(const Checkerboard<Scalar>& copula) {
  const Index d = copula.dims();
  std::vector<std::vector<FixedPointSum<Scalar>>> acc(d);
  for (Index k = 0; k < d; ++k) acc[k].resize(copula.resolution(k));
  std::vector<Index> cell(d, 0);
  const auto& mass = copula.mass();
  Index flat = 0;
  do {
    const Scalar p = mass[flat++];
    if (std::isfinite(static_cast<double>(p)))
      for (Index k = 0; k < d; ++k) acc[k][cell[k]].add(p);
  } while (detail::next_cell(cell, copula.resolutions()));
  std::vector<std::vector<Scalar>> slabs(d);
  for (Index k = 0; k < d; ++k)
    for (const auto& s : acc[k]) slabs[k].push_back(s.value());
  return slabs;
}

/// Checks nonnegativity, total mass and uniform marginals. Never throws.
template <typename Scalar>
ValidationReport validate(const Checkerboard<Scalar>& copula, double tolerance = kValidityTolerance) {
  ValidationReport report;
  const auto& mass = copula.mass();
  Index most_negative = -1;
  for (Index i = 0; i < mass.size(); ++i) {
    const double p = static_cast<double>(mass[i]);
    if (!std::isfinite(p)) {
      report.max_negative_mass = std::numeric_limits<double>::infinity();
      most_negative = i;
      break;
    }
    if (-p > report.max_negative_mass) {
      report.max_negative_mass = -p;
      most_negative = i;
    }
  }
  if (most_negative >= 0) report.negative_cell = copula.cell_index(most_negative);

  const Scalar total = pairwise_sum(std::span<const Scalar>(mass.data(), static_cast<std::size_t>(mass.size())));
  report.total_mass_error = std::abs(static_cast<double>(total) - 1.0);

  const auto slabs = slab_masses(copula);
  for (Index k = 0; k < copula.dims(); ++k) {
    const double target = 1.0 / static_cast<double>(copula.resolution(k));
    for (Index i = 0; i < copula.resolution(k); ++i) {
      const double err = std::abs(static_cast<double>(slabs[k][i]) - target);
      if (!(err <= report.worst_marginal_error)) {
        report.worst_marginal_error = err;
        report.worst_axis = k;
        report.worst_slab = i;
      }
    }
  }
  report.passed = report.max_negative_mass <= tolerance && report.total_mass_error <= tolerance &&
                  report.worst_marginal_error <= tolerance;
  return report;
}

/// Relabels axes: axis k of the result is axis permutation[k] of the input.
template <typename Scalar>
Checkerboard<Scalar> axis_permute(const Checkerboard<Scalar>& copula, const std::vector<Index>& permutation) {
  const Index d = copula.dims();
  require(static_cast<Index>(permutation.size()) == d, "permutation length must equal dimension");
  std::vector<int> seen(d, 0);
  std::vector<Index> res(d);
  for (Index k = 0; k < d; ++k) {
    const Index a = permutation[k];
    require(a >= 0 && a < d && seen[a]++ == 0, "malformed permutation");
    res[k] = copula.resolution(a);
  }
  using Vector = typename Checkerboard<Scalar>::Vector;
  Vector out(copula.cell_count());
  std::vector<Index> cell(d, 0);
  const auto& src_stride = copula.strides();
  Index flat = 0;
  do {
    Index source = 0;
    for (Index k = 0; k < d; ++k) source += cell[k] * src_stride[permutation[k]];
    out[flat++] = copula.mass()[source];
  } while (detail::next_cell(cell, res));
  return Checkerboard<Scalar>(std::move(res), std::move(out));
}

/// Grid form of the strictly decreasing map u -> 1 - u on one axis.
template <typename Scalar>
Checkerboard<Scalar> axis_reverse(const Checkerboard<Scalar>& copula, Index axis) {
  require(axis >= 0 && axis < copula.dims(), "axis out of range");
  using Vector = typename Checkerboard<Scalar>::Vector;
  Vector out(copula.cell_count());
  const Index d = copula.dims();
  const Index m = copula.resolution(axis);
  const Index stride = copula.strides()[axis];
  std::vector<Index> cell(d, 0);
  Index flat = 0;
  do {
    out[flat + (m - 1 - 2 * cell[axis]) * stride] = copula.mass()[flat];
    ++flat;
  } while (detail::next_cell(cell, copula.resolutions()));
  return Checkerboard<Scalar>(copula.resolutions(), std::move(out));
}

/// Outer product C_U x C_V: axes of `left` first.
template <typename Scalar>
Checkerboard<Scalar> product_copula(const Checkerboard<Scalar>& left, const Checkerboard<Scalar>& right) {
  std::vector<Index> res(left.resolutions());
  res.insert(res.end(), right.resolutions().begin(), right.resolutions().end());
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Matrix outer = left.mass() * right.mass().transpose();
  typename Checkerboard<Scalar>::Vector flat = Eigen::Map<const typename Checkerboard<Scalar>::Vector>(
      outer.data(), outer.size());
  return Checkerboard<Scalar>(std::move(res), std::move(flat));
}

}  // namespace copdep

#endif  // COPDEP_CHECKERBOARD_HPP
