#ifndef COPDEP_MEASURES_HPP
#define COPDEP_MEASURES_HPP

#include "copdep/checkerboard.hpp"

#include <optional>
#include <string_view>

namespace copdep {

enum class MeasureTag {
  tau_quadratic,
  tau_alpha,
  renyi_alpha,
  renyi_limit,
  mutual_information,
  group_tau,
  group_tau_normalized,
  averaged_dependence,
};

inline const char* to_string(MeasureTag tag) {
  switch (tag) {
    case MeasureTag::tau_quadratic: return "tau_quadratic";
    case MeasureTag::tau_alpha: return "tau_alpha";
    case MeasureTag::renyi_alpha: return "renyi_alpha";
    case MeasureTag::renyi_limit: return "renyi_limit";
    case MeasureTag::mutual_information: return "mutual_information";
    case MeasureTag::group_tau: return "group_tau";
    case MeasureTag::group_tau_normalized: return "group_tau_normalized";
    case MeasureTag::averaged_dependence: return "averaged_dependence";
  }
  return "unknown";
}

/// Measure family plus its parameter, if it has one.
class MeasureKind {
 public:
  static MeasureKind tau_quadratic() { return MeasureKind(MeasureTag::tau_quadratic, std::nullopt); }
  static MeasureKind tau_alpha(double alpha) {
    require(alpha >= 1.0 && std::isfinite(alpha), "tau_alpha requires alpha >= 1");
    return MeasureKind(MeasureTag::tau_alpha, alpha);
  }
  static MeasureKind renyi_alpha(double alpha) {
    require(alpha > 0.0 && alpha < 2.0 && alpha != 1.0, "renyi_alpha requires 0 < alpha < 2 and alpha != 1");
    return MeasureKind(MeasureTag::renyi_alpha, alpha);
  }
  static MeasureKind renyi_limit() { return MeasureKind(MeasureTag::renyi_limit, std::nullopt); }
  static MeasureKind mutual_information() { return MeasureKind(MeasureTag::mutual_information, std::nullopt); }
  static MeasureKind group_tau() { return MeasureKind(MeasureTag::group_tau, std::nullopt); }
  static MeasureKind group_tau_normalized() { return MeasureKind(MeasureTag::group_tau_normalized, std::nullopt); }
  static MeasureKind averaged_dependence() { return MeasureKind(MeasureTag::averaged_dependence, std::nullopt); }

  /// Parses a kind name; alpha is required exactly for the parameterized kinds.
  static MeasureKind parse(std::string_view name, std::optional<double> alpha) {
    auto plain = [&](MeasureKind k) {
      require(!alpha, std::string(name) + " takes no alpha");
      return k;
    };
    auto with_alpha = [&](MeasureKind (*make)(double)) {
      require(alpha.has_value(), std::string(name) + " requires --alpha");
      return make(*alpha);
    };
    if (name == "tau_quadratic") return plain(tau_quadratic());
    if (name == "tau_alpha") return with_alpha(&MeasureKind::tau_alpha);
    if (name == "renyi_alpha") return with_alpha(&MeasureKind::renyi_alpha);
    if (name == "renyi_limit") return plain(renyi_limit());
    if (name == "mutual_information") return plain(mutual_information());
    if (name == "group_tau") return plain(group_tau());
    if (name == "group_tau_normalized") return plain(group_tau_normalized());
    if (name == "averaged_dependence") return plain(averaged_dependence());
    fail(ErrorCode::invalid_argument, "unknown measure kind '" + std::string(name) + "'");
  }

  MeasureTag tag() const { return tag_; }
  std::optional<double> alpha() const { return alpha_; }
  std::string name() const { return to_string(tag_); }

  /// True for the quadratic/distance families that carry the [0,1] range.
  bool is_tau_family() const {
    return tag_ == MeasureTag::tau_quadratic || tag_ == MeasureTag::tau_alpha || tag_ == MeasureTag::group_tau ||
           tag_ == MeasureTag::group_tau_normalized || tag_ == MeasureTag::averaged_dependence;
  }

  friend bool operator==(const MeasureKind&, const MeasureKind&) = default;

 private:
  MeasureKind(MeasureTag tag, std::optional<double> alpha) : tag_(tag), alpha_(alpha) {}

  MeasureTag tag_;
  std::optional<double> alpha_;
};

/// Where the group measures evaluate the target-block CDFs inside each
/// target cell.
enum class PointRule { cell_center, upper_corner };

struct MeasureOptions {
  int quad_order = 16;
  PointRule point_rule = PointRule::cell_center;
};

struct MeasureReport {
  MeasureKind kind;
  double value = 0.0;
  GroupSplit split;
  std::vector<Index> resolutions;
  std::optional<double> upper_bound;
  std::optional<double> normalized_value;
  std::optional<double> normalizer;
  std::optional<Index> sample_size;
  std::vector<std::string> diagnostics;
};

/// Step or piecewise-linear distribution function of C(V) on [0,1].
struct KendallCdf {
  enum class Shape { step, linear };

  std::vector<std::pair<double, double>> knots;  // (t, K(t)), t increasing
  Shape shape = Shape::step;

  static KendallCdf identity() { return KendallCdf{{{0.0, 0.0}, {1.0, 1.0}}, Shape::linear}; }

  double operator()(double t) const {
    if (knots.empty() || t < knots.front().first) return 0.0;
    if (t >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double x, const std::pair<double, double>& k) { return x < k.first; });
    const auto& right = *it;
    const auto& left = *(it - 1);
    if (shape == Shape::step) return left.second;
    const double frac = (t - left.first) / (right.first - left.first);
    return left.second + frac * (right.second - left.second);
  }
};

namespace detail {

/// The copula with axes reordered to (U block, V block), viewed as a
/// row-major U-cell x V-cell matrix.
template <typename Scalar>
class Arranged {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Arranged(const Checkerboard<Scalar>& copula, const GroupSplit& split) {
    split.check(copula.dims());
    const auto order = split.arranged();
    bool identity = true;
    for (Index k = 0; k < static_cast<Index>(order.size()); ++k) identity = identity && order[k] == k;
    if (identity) {
      grid_ = &copula;
    } else {
      owned_.emplace(axis_permute(copula, order));
      grid_ = &*owned_;
    }
    n_u_ = static_cast<Index>(split.u_axes.size());
    u_cells_ = 1;
    v_cells_ = 1;
    for (Index k = 0; k < grid_->dims(); ++k) {
      if (k < n_u_) {
        u_res_.push_back(grid_->resolution(k));
        u_cells_ *= grid_->resolution(k);
      } else {
        v_res_.push_back(grid_->resolution(k));
        v_cells_ *= grid_->resolution(k);
      }
    }
  }

  Arranged(const Arranged&) = delete;
  Arranged& operator=(const Arranged&) = delete;

  Index u_cells() const { return u_cells_; }
  Index v_cells() const { return v_cells_; }
  const std::vector<Index>& u_resolutions() const { return u_res_; }
  const std::vector<Index>& v_resolutions() const { return v_res_; }
  const Scalar* row(Index u) const { return grid_->mass().data() + u * v_cells_; }

  Eigen::Map<const Matrix> matrix() const { return Eigen::Map<const Matrix>(grid_->mass().data(), u_cells_, v_cells_); }

  Index u_flat(std::span<const Index> u_cell) const {
    require(static_cast<Index>(u_cell.size()) == n_u_, "conditioning cell index has wrong dimension");
    Index flat = 0;
    for (Index k = 0; k < n_u_; ++k) {
      require(u_cell[k] >= 0 && u_cell[k] < u_res_[k], "conditioning cell index out of range");
      flat = flat * u_res_[k] + u_cell[k];
    }
    return flat;
  }

 private:
  std::optional<Checkerboard<Scalar>> owned_;
  const Checkerboard<Scalar>* grid_ = nullptr;
  Index n_u_ = 0;
  Index u_cells_ = 0;
  Index v_cells_ = 0;
  std::vector<Index> u_res_;
  std::vector<Index> v_res_;
};

template <typename Scalar>
Scalar row_sum(const Scalar* p, Index m) {
  Scalar w(0);
  for (Index j = 0; j < m; ++j) w += p[j];
  return w;
}

/// A row whose masses are all equal has conditional CDF exactly v.
template <typename Scalar>
bool row_is_uniform(const Scalar* p, Index m) {
  for (Index j = 1; j < m; ++j)
    if (p[j] != p[0]) return false;
  return true;
}

/// Visits each target cell j with [lo, hi] and the conditional CDF values
/// (c0, c1) at its ends; the conditional is linear in between.
template <typename Scalar, typename Visit>
void for_each_target_cell(const Scalar* p, Index m, Scalar w, Visit&& visit) {
  Scalar cum(0);
  for (Index j = 0; j < m; ++j) {
    const Scalar lo = Scalar(j) / Scalar(m);
    const Scalar hi = Scalar(j + 1) / Scalar(m);
    const Scalar c0 = cum / w;
    cum += p[j];
    const Scalar c1 = cum / w;
    visit(j, lo, hi, c0, c1);
  }
}

/// Integral of |g|^alpha over an interval of length len where g is linear
/// from ga to gb without changing sign.
template <typename Scalar>
Scalar abs_power_segment(Scalar ga, Scalar gb, Scalar len, Scalar alpha, const GaussLegendre<Scalar>& gl) {
  const Scalar a = std::abs(ga);
  const Scalar b = std::abs(gb);
  const Scalar top = std::max(a, b);
  if (top == Scalar(0) || len <= Scalar(0)) return Scalar(0);
  if (a == b) return len * std::pow(a, alpha);
  if (std::min(a, b) == Scalar(0)) return len * std::pow(top, alpha) / (alpha + Scalar(1));
  if (std::abs(b - a) > Scalar(1e-3) * top)
    return len * (std::pow(b, alpha + Scalar(1)) - std::pow(a, alpha + Scalar(1))) / ((alpha + Scalar(1)) * (b - a));
  return len * gl.integrate([&](Scalar t) { return std::pow(a + (b - a) * t, alpha); }, Scalar(0), Scalar(1));
}

/// Splits [lo, hi] at the sign change of the linear g (if any) and calls
/// piece(a, b, ga, gb) for each sign-definite piece.
template <typename Scalar, typename Piece>
void split_at_root(Scalar lo, Scalar hi, Scalar g0, Scalar g1, Piece&& piece) {
  if ((g0 < Scalar(0) && g1 > Scalar(0)) || (g0 > Scalar(0) && g1 < Scalar(0))) {
    const Scalar root = lo + (hi - lo) * (g0 / (g0 - g1));
    piece(lo, root, g0, Scalar(0));
    piece(root, hi, Scalar(0), g1);
  } else {
    piece(lo, hi, g0, g1);
  }
}

/// Gauss-Legendre on [lo, hi], geometrically graded toward lo when the
/// integrand has an endpoint singularity there.
template <typename Scalar, typename F>
Scalar integrate_graded(F&& f, Scalar lo, Scalar hi, bool singular_at_lo, const GaussLegendre<Scalar>& gl) {
  if (!singular_at_lo) return gl.integrate(f, lo, hi);
  constexpr int kLevels = 40;
  const Scalar len = hi - lo;
  Scalar acc(0);
  Scalar right = hi;
  for (int k = 1; k <= kLevels; ++k) {
    const Scalar left = lo + len * std::ldexp(Scalar(1), -k);
    acc += gl.integrate(f, left, right);
    right = left;
  }
  acc += gl.integrate(f, lo, right);
  return acc;
}

template <typename Scalar>
Scalar quadratic_row(const Scalar* p, Index m, Scalar w) {
  if (row_is_uniform(p, m)) return Scalar(0);
  Scalar acc(0);
  for_each_target_cell(p, m, w, [&](Index, Scalar lo, Scalar hi, Scalar c0, Scalar c1) {
    const Scalar g0 = c0 - lo;
    const Scalar g1 = c1 - hi;
    acc += (hi - lo) * (g0 * g0 + g0 * g1 + g1 * g1) / Scalar(3);
  });
  return acc;
}

template <typename Scalar>
Scalar abs_power_row(const Scalar* p, Index m, Scalar w, Scalar alpha, const GaussLegendre<Scalar>& gl) {
  if (row_is_uniform(p, m)) return Scalar(0);
  Scalar acc(0);
  for_each_target_cell(p, m, w, [&](Index, Scalar lo, Scalar hi, Scalar c0, Scalar c1) {
    split_at_root(lo, hi, c0 - lo, c1 - hi,
                  [&](Scalar a, Scalar b, Scalar ga, Scalar gb) { acc += abs_power_segment(ga, gb, b - a, alpha, gl); });
  });
  return acc;
}

template <typename Scalar, typename Phi>
Scalar phi_row(const Scalar* p, Index m, Scalar w, Phi&& phi, const GaussLegendre<Scalar>& gl) {
  Scalar acc(0);
  for_each_target_cell(p, m, w, [&](Index, Scalar lo, Scalar hi, Scalar c0, Scalar c1) {
    const Scalar slope = (c1 - c0) / (hi - lo) - Scalar(1);
    const Scalar g0 = c0 - lo;
    split_at_root(lo, hi, g0, c1 - hi, [&](Scalar a, Scalar b, Scalar, Scalar) {
      acc += gl.integrate(
          [&](Scalar v) {
            const Scalar y = phi(g0 + slope * (v - lo));
            if (!std::isfinite(static_cast<double>(y)))
              fail(ErrorCode::evaluation_failed, "convex function returned a non-finite value");
            return y;
          },
          a, b);
    });
  });
  return acc;
}

/// Integral over v of (F(v)/v)^alpha for one conditioning row.
template <typename Scalar>
Scalar renyi_row(const Scalar* p, Index m, Scalar w, Scalar alpha, const GaussLegendre<Scalar>& gl) {
  if (row_is_uniform(p, m)) return Scalar(1);
  Scalar acc(0);
  for_each_target_cell(p, m, w, [&](Index j, Scalar lo, Scalar hi, Scalar c0, Scalar c1) {
    const Scalar slope = (c1 - c0) / (hi - lo);
    if (j == 0) {
      // F is linear through the origin: the ratio is the constant slope.
      if (slope > Scalar(0)) acc += (hi - lo) * std::pow(slope, alpha);
      return;
    }
    if (p[j] == Scalar(0)) {
      if (c0 > Scalar(0))
        acc += std::pow(c0, alpha) * (std::pow(hi, Scalar(1) - alpha) - std::pow(lo, Scalar(1) - alpha)) /
               (Scalar(1) - alpha);
      return;
    }
    acc += integrate_graded(
        [&](Scalar v) {
          const Scalar ratio = std::max(Scalar(0), c0 + slope * (v - lo)) / v;
          return std::pow(ratio, alpha);
        },
        lo, hi, c0 == Scalar(0), gl);
  });
  return acc;
}

/// Integral over v of (F/v) log(F/v) for one conditioning row, 0 log 0 = 0.
template <typename Scalar>
Scalar kl_row(const Scalar* p, Index m, Scalar w, const GaussLegendre<Scalar>& gl) {
  if (row_is_uniform(p, m)) return Scalar(0);
  auto xlogx = [](Scalar x) { return x > Scalar(0) ? x * std::log(x) : Scalar(0); };
  Scalar acc(0);
  for_each_target_cell(p, m, w, [&](Index j, Scalar lo, Scalar hi, Scalar c0, Scalar c1) {
    const Scalar slope = (c1 - c0) / (hi - lo);
    if (j == 0) {
      acc += (hi - lo) * xlogx(slope);
      return;
    }
    if (p[j] == Scalar(0)) {
      if (c0 > Scalar(0)) {
        const Scalar lh = std::log(hi);
        const Scalar ll = std::log(lo);
        acc += c0 * (std::log(c0) * (lh - ll) - (lh * lh - ll * ll) / Scalar(2));
      }
      return;
    }
    acc += integrate_graded([&](Scalar v) { return xlogx(std::max(Scalar(0), c0 + slope * (v - lo)) / v); }, lo, hi,
                            c0 == Scalar(0), gl);
  });
  return acc;
}

/// Sum over conditioning rows of w(row) * row_integral(row), reduced in
/// canonical order. Zero-mass rows contribute 0.
template <typename Scalar, typename RowIntegral>
std::pair<Scalar, Scalar> weighted_row_sum(const Arranged<Scalar>& view, RowIntegral&& row_integral) {
  const Index rows = view.u_cells();
  const Index m = view.v_cells();
  std::vector<Scalar> terms(rows, Scalar(0));
  std::vector<Scalar> weights(rows, Scalar(0));
  parallel_for(rows, [&](Index u) {
    const Scalar* p = view.row(u);
    const Scalar w = row_sum(p, m);
    weights[u] = w;
    if (w > Scalar(0)) terms[u] = w * row_integral(p, m, w);
  });
  return {canonical_sum(std::move(terms)), canonical_sum(std::move(weights))};
}

inline void require_single_target(const GroupSplit& split, const char* what) {
  require(split.v_axes.size() == 1, std::string(what) + " needs a single target axis; use group_tau for target groups");
}

/// Cumulative vertex sums of a row-major cell block and their evaluation at
/// one representative point per cell.
template <typename Scalar>
class VertexGrid {
 public:
  explicit VertexGrid(std::vector<Index> resolutions) : res_(std::move(resolutions)) {
    const Index d = static_cast<Index>(res_.size());
    vstride_.assign(d, 1);
    for (Index k = d - 2; k >= 0; --k) vstride_[k] = vstride_[k + 1] * (res_[k + 1] + 1);
    vertex_count_ = vstride_[0] * (res_[0] + 1);
    cells_ = 1;
    for (Index m : res_) cells_ *= m;
    base_.resize(cells_);
    upper_.resize(cells_);
    std::vector<Index> cell(d, 0);
    Index flat = 0;
    do {
      Index b = 0;
      for (Index k = 0; k < d; ++k) b += cell[k] * vstride_[k];
      base_[flat] = b;
      Index up = b;
      for (Index k = 0; k < d; ++k) up += vstride_[k];
      upper_[flat] = up;
      ++flat;
    } while (next_cell(cell, res_));
    for (Index corner = 0; corner < (Index(1) << d); ++corner) {
      Index off = 0;
      for (Index k = 0; k < d; ++k)
        if ((corner >> k) & 1) off += vstride_[k];
      corners_.push_back(off);
    }
  }

  Index cells() const { return cells_; }

  /// Value of the cumulative (multilinear) CDF of `mass` at each cell's
  /// representative point.
  std::vector<Scalar> point_values(const Scalar* mass, PointRule rule) const {
    std::vector<Scalar> g(vertex_count_, Scalar(0));
    for (Index c = 0; c < cells_; ++c) g[upper_[c]] = mass[c];
    const Index d = static_cast<Index>(res_.size());
    for (Index k = 0; k < d; ++k) {
      const Index s = vstride_[k];
      for (Index v = 0; v < vertex_count_; ++v) {
        if ((v / s) % (res_[k] + 1) != 0) g[v] += g[v - s];
      }
    }
    std::vector<Scalar> out(cells_);
    if (rule == PointRule::upper_corner) {
      for (Index c = 0; c < cells_; ++c) out[c] = g[upper_[c]];
    } else {
      const Scalar scale = Scalar(1) / Scalar(corners_.size());
      for (Index c = 0; c < cells_; ++c) {
        Scalar acc(0);
        for (Index off : corners_) acc += g[base_[c] + off];
        out[c] = acc * scale;
      }
    }
    return out;
  }

 private:
  std::vector<Index> res_;
  std::vector<Index> vstride_;
  Index vertex_count_ = 0;
  Index cells_ = 0;
  std::vector<Index> base_;
  std::vector<Index> upper_;
  std::vector<Index> corners_;
};

/// Sum over conditioning rows of w * sum over target cells of
/// w_V(c) * phi(F(point_c | row) - C_V(point_c)).
template <typename Scalar, typename Phi>
Scalar group_integral(const Arranged<Scalar>& view, PointRule rule, Phi&& phi) {
  const VertexGrid<Scalar> grid(view.v_resolutions());
  const Index cells = view.v_cells();
  std::vector<FixedPointSum<Scalar>> column(cells);
  for (Index u = 0; u < view.u_cells(); ++u) {
    const Scalar* p = view.row(u);
    for (Index c = 0; c < cells; ++c) column[c].add(p[c]);
  }
  std::vector<Scalar> target_mass(cells);
  for (Index c = 0; c < cells; ++c) target_mass[c] = column[c].value();
  const std::vector<Scalar> reference = grid.point_values(target_mass.data(), rule);
  std::vector<Scalar> terms(view.u_cells(), Scalar(0));
  parallel_for(view.u_cells(), [&](Index u) {
    const Scalar* p = view.row(u);
    const Scalar w = row_sum(p, cells);
    if (!(w > Scalar(0))) return;
    const std::vector<Scalar> joint = grid.point_values(p, rule);
    Scalar acc(0);
    for (Index c = 0; c < cells; ++c) {
      if (target_mass[c] == Scalar(0)) continue;
      const Scalar y = phi(joint[c] / w - reference[c]);
      if (!std::isfinite(static_cast<double>(y)))
        fail(ErrorCode::evaluation_failed, "convex function returned a non-finite value");
      acc += target_mass[c] * y;
    }
    terms[u] = w * acc;
  });
  return canonical_sum(std::move(terms));
}

inline void check_tau_range(MeasureReport& report) {
  if (report.value > 1.0 + kValidityTolerance)
    report.diagnostics.push_back("value " + std::to_string(report.value) + " exceeds 1 + 1e-9 (not clamped)");
  if (report.upper_bound && report.value > *report.upper_bound + kValidityTolerance)
    report.diagnostics.push_back("value exceeds its Kendall upper bound");
}

}  // namespace detail

/// F(v | U in cell) for a single target axis: cumulative target mass within
/// the conditioning cell, divided by the cell's mass. Zero-mass cells give 0.
template <typename Scalar>
Scalar conditional_cdf(const Checkerboard<Scalar>& copula, const GroupSplit& split, std::span<const Index> u_cell,
                       Scalar v) {
  detail::require_single_target(split, "conditional_cdf with a scalar v");
  require(v >= Scalar(0) && v <= Scalar(1), "v outside [0,1]");
  const detail::Arranged<Scalar> view(copula, split);
  const Scalar* p = view.row(view.u_flat(u_cell));
  const Index m = view.v_cells();
  const Scalar w = detail::row_sum(p, m);
  if (!(w > Scalar(0))) return Scalar(0);
  const Scalar scaled = v * Scalar(m);
  Scalar cum(0);
  for (Index j = 0; j < m; ++j) {
    const Scalar frac = std::clamp(scaled - Scalar(j), Scalar(0), Scalar(1));
    if (frac <= Scalar(0)) break;
    cum += frac * p[j];
  }
  return std::clamp(cum / w, Scalar(0), Scalar(1));
}

/// Group form: P(V <= v | U in cell) for a point v in the target block.
template <typename Scalar, typename Derived>
Scalar conditional_cdf(const Checkerboard<Scalar>& copula, const GroupSplit& split, std::span<const Index> u_cell,
                       const Eigen::MatrixBase<Derived>& v) {
  const detail::Arranged<Scalar> view(copula, split);
  detail::check_unit_point(v, static_cast<Index>(split.v_axes.size()));
  const Scalar* p = view.row(view.u_flat(u_cell));
  const Scalar w = detail::row_sum(p, view.v_cells());
  if (!(w > Scalar(0))) return Scalar(0);
  const auto& res = view.v_resolutions();
  std::vector<Index> strides(res.size(), 1);
  for (Index k = static_cast<Index>(res.size()) - 2; k >= 0; --k) strides[k] = strides[k + 1] * res[k + 1];
  const Scalar joint = detail::interpolated_cdf(p, std::span<const Index>(res), std::span<const Index>(strides), v);
  return std::clamp(joint / w, Scalar(0), Scalar(1));
}

template <typename Scalar>
MeasureReport tau_quadratic(const Checkerboard<Scalar>& copula, const GroupSplit& split) {
  detail::require_single_target(split, "tau_quadratic");
  const detail::Arranged<Scalar> view(copula, split);
  const auto [sum, mass] =
      detail::weighted_row_sum(view, [](const Scalar* p, Index m, Scalar w) { return detail::quadratic_row(p, m, w); });
  MeasureReport report{MeasureKind::tau_quadratic(), static_cast<double>(Scalar(6) * sum / mass), split,
                       copula.resolutions()};
  report.normalizer = 6.0;
  detail::check_tau_range(report);
  return report;
}

/// Distance family with normalizer (alpha+1)(alpha+2)/2, which maps complete
/// dependence to 1 for every alpha.
template <typename Scalar>
MeasureReport tau_alpha(const Checkerboard<Scalar>& copula, const GroupSplit& split, double alpha,
                        const MeasureOptions& options = {}) {
  const MeasureKind kind = MeasureKind::tau_alpha(alpha);
  detail::require_single_target(split, "tau_alpha");
  const double normalizer = (alpha + 1.0) * (alpha + 2.0) / 2.0;
  if (alpha == 2.0) {
    MeasureReport report = tau_quadratic(copula, split);
    report.kind = kind;
    return report;
  }
  const detail::Arranged<Scalar> view(copula, split);
  const GaussLegendre<Scalar> gl(options.quad_order);
  const Scalar a(alpha);
  const auto [sum, mass] = detail::weighted_row_sum(
      view, [&](const Scalar* p, Index m, Scalar w) { return detail::abs_power_row(p, m, w, a, gl); });
  MeasureReport report{kind, static_cast<double>(Scalar(normalizer) * sum / mass), split, copula.resolutions()};
  report.normalizer = normalizer;
  detail::check_tau_range(report);
  return report;
}

/// Entropy form (1/(alpha-1)) log of the integral of (F/v)^alpha. Unbounded above.
template <typename Scalar>
MeasureReport renyi_alpha(const Checkerboard<Scalar>& copula, const GroupSplit& split, double alpha,
                          const MeasureOptions& options = {}) {
  const MeasureKind kind = MeasureKind::renyi_alpha(alpha);
  detail::require_single_target(split, "renyi_alpha");
  const detail::Arranged<Scalar> view(copula, split);
  const GaussLegendre<Scalar> gl(options.quad_order);
  const Scalar a(alpha);
  const auto [sum, mass] = detail::weighted_row_sum(
      view, [&](const Scalar* p, Index m, Scalar w) { return detail::renyi_row(p, m, w, a, gl); });
  const Scalar value = std::log(sum / mass) / (a - Scalar(1)) + Scalar(0);
  return MeasureReport{kind, static_cast<double>(value), split, copula.resolutions()};
}

/// Limit alpha -> 1 of the entropy form (KL form). Unbounded above.
template <typename Scalar>
MeasureReport renyi_limit(const Checkerboard<Scalar>& copula, const GroupSplit& split,
                          const MeasureOptions& options = {}) {
  detail::require_single_target(split, "renyi_limit");
  const detail::Arranged<Scalar> view(copula, split);
  const GaussLegendre<Scalar> gl(options.quad_order);
  const auto [sum, mass] = detail::weighted_row_sum(
      view, [&](const Scalar* p, Index m, Scalar w) { return detail::kl_row(p, m, w, gl); });
  return MeasureReport{MeasureKind::renyi_limit(), static_cast<double>(sum / mass + Scalar(0)), split,
                       copula.resolutions()};
}

/// Plug-in grid mutual information. Grows without bound with the resolution
/// for singular copulas.
template <typename Scalar>
MeasureReport mutual_information(const Checkerboard<Scalar>& copula) {
  const auto slabs = slab_masses(copula);
  const Index d = copula.dims();
  std::vector<Scalar> terms;
  std::vector<Scalar> factors(d);
  std::vector<Index> cell(d, 0);
  const auto& mass = copula.mass();
  Index flat = 0;
  do {
    const Scalar p = mass[flat++];
    if (p > Scalar(0)) {
      for (Index k = 0; k < d; ++k) factors[k] = slabs[k][cell[k]];
      std::sort(factors.begin(), factors.end());
      Scalar independent(1);
      for (Scalar f : factors) independent *= f;
      terms.push_back(p * std::log(p / independent));
    }
  } while (detail::next_cell(cell, copula.resolutions()));
  GroupSplit split = d >= 2 ? GroupSplit::last_target(d) : GroupSplit({0}, {0});
  return MeasureReport{MeasureKind::mutual_information(), static_cast<double>(canonical_sum(std::move(terms))),
                       std::move(split), copula.resolutions()};
}

/// Unnormalized convex-phi measure. Single target: integral of
/// phi(F(v|u) - v); target group: phi(F(v|u) - C_V(v)) against dC_V.
template <typename Scalar, typename Phi>
double generic_measure(const Checkerboard<Scalar>& copula, const GroupSplit& split, Phi&& phi,
                       const MeasureOptions& options = {}) {
  const detail::Arranged<Scalar> view(copula, split);
  if (split.v_axes.size() == 1) {
    const GaussLegendre<Scalar> gl(options.quad_order);
    const auto [sum, mass] = detail::weighted_row_sum(
        view, [&](const Scalar* p, Index m, Scalar w) { return detail::phi_row(p, m, w, phi, gl); });
    return static_cast<double>(sum / mass);
  }
  return static_cast<double>(detail::group_integral(view, options.point_rule, phi));
}

/// Distribution of C(V) for the target block. A single axis gives K(t) = t.
template <typename Scalar>
KendallCdf kendall_cdf(const Checkerboard<Scalar>& copula, const std::vector<Index>& v_axes,
                       PointRule rule = PointRule::cell_center) {
  require(!v_axes.empty(), "kendall_cdf needs at least one axis");
  if (v_axes.size() == 1) return KendallCdf::identity();
  const Checkerboard<Scalar> target = marginal(copula, v_axes);
  const detail::VertexGrid<Scalar> grid(target.resolutions());
  const std::vector<Scalar> level = grid.point_values(target.mass().data(), rule);
  std::vector<std::pair<double, double>> atoms;
  for (Index c = 0; c < target.cell_count(); ++c)
    if (target.mass()[c] > Scalar(0))
      atoms.emplace_back(static_cast<double>(level[c]), static_cast<double>(target.mass()[c]));
  std::sort(atoms.begin(), atoms.end());
  KendallCdf out;
  out.shape = KendallCdf::Shape::step;
  double cum = 0.0;
  for (const auto& [t, w] : atoms) {
    cum += w;
    if (!out.knots.empty() && out.knots.back().first == t)
      out.knots.back().second = cum;
    else
      out.knots.emplace_back(t, cum);
  }
  // Normalize away accumulated rounding so that K(1) = 1.
  if (!out.knots.empty()) {
    for (auto& k : out.knots) k.second /= cum;
    out.knots.back().second = 1.0;
    if (out.knots.back().first < 1.0) out.knots.emplace_back(1.0, 1.0);
  }
  return out;
}

/// Upper bound 6 * integral of (t - t^2) dK(t) on the group measure.
inline double max_bound(const KendallCdf& kendall) {
  std::vector<double> terms;
  double prev_t = 0.0;
  double prev_k = 0.0;
  for (const auto& [t, k] : kendall.knots) {
    const double dk = k - prev_k;
    if (kendall.shape == KendallCdf::Shape::step) {
      terms.push_back(6.0 * (t - t * t) * dk);
    } else if (t > prev_t) {
      // Linear piece: slope * [3t^2 - 2t^3] between the knots.
      auto antiderivative = [](double x) { return 3.0 * x * x - 2.0 * x * x * x; };
      terms.push_back(dk / (t - prev_t) * (antiderivative(t) - antiderivative(prev_t)));
    }
    prev_t = t;
    prev_k = k;
  }
  return pairwise_sum(std::span<const double>(terms));
}

/// Quadratic group-on-group measure with its Kendall upper bound. A single
/// target axis falls back to tau_quadratic with bound 1.
template <typename Scalar>
MeasureReport group_tau(const Checkerboard<Scalar>& copula, const GroupSplit& split,
                        const MeasureOptions& options = {}) {
  if (split.v_axes.size() == 1) {
    MeasureReport report = tau_quadratic(copula, split);
    report.kind = MeasureKind::group_tau();
    report.upper_bound = max_bound(KendallCdf::identity());
    report.normalized_value = report.value / *report.upper_bound;
    return report;
  }
  const detail::Arranged<Scalar> view(copula, split);
  const Scalar sum = detail::group_integral(view, options.point_rule, [](Scalar x) { return x * x; });
  MeasureReport report{MeasureKind::group_tau(), static_cast<double>(Scalar(6) * sum), split, copula.resolutions()};
  report.normalizer = 6.0;
  report.upper_bound = max_bound(kendall_cdf(copula, split.v_axes, options.point_rule));
  if (*report.upper_bound >= 1e-12) report.normalized_value = report.value / *report.upper_bound;
  detail::check_tau_range(report);
  return report;
}

/// group_tau divided by its Kendall bound.
template <typename Scalar>
MeasureReport group_tau_normalized(const Checkerboard<Scalar>& copula, const GroupSplit& split,
                                   const MeasureOptions& options = {}) {
  MeasureReport report = group_tau(copula, split, options);
  if (!(*report.upper_bound >= 1e-12))
    fail(ErrorCode::degenerate_bound, "Kendall upper bound " + std::to_string(*report.upper_bound) + " below 1e-12");
  report.kind = MeasureKind::group_tau_normalized();
  report.value = report.value / *report.upper_bound;
  report.normalized_value = report.value;
  report.diagnostics.clear();
  detail::check_tau_range(report);
  return report;
}

/// Mean over target axes of tau_quadratic(U -> V_j).
template <typename Scalar>
MeasureReport averaged_dependence(const Checkerboard<Scalar>& copula, const GroupSplit& split) {
  split.check(copula.dims());
  const Index n = static_cast<Index>(split.u_axes.size());
  std::vector<Index> u_local(n);
  std::iota(u_local.begin(), u_local.end(), Index(0));
  const GroupSplit local(u_local, {n});
  std::vector<double> values;
  for (Index target : split.v_axes) {
    std::vector<Index> axes(split.u_axes);
    axes.push_back(target);
    values.push_back(tau_quadratic(marginal(copula, axes), local).value);
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  MeasureReport report{MeasureKind::averaged_dependence(), sum / static_cast<double>(values.size()), split,
                       copula.resolutions()};
  detail::check_tau_range(report);
  return report;
}

/// Dispatches on the kind.
template <typename Scalar>
MeasureReport measure(const Checkerboard<Scalar>& copula, const GroupSplit& split, const MeasureKind& kind,
                      const MeasureOptions& options = {}) {
  switch (kind.tag()) {
    case MeasureTag::tau_quadratic: return tau_quadratic(copula, split);
    case MeasureTag::tau_alpha: return tau_alpha(copula, split, *kind.alpha(), options);
    case MeasureTag::renyi_alpha: return renyi_alpha(copula, split, *kind.alpha(), options);
    case MeasureTag::renyi_limit: return renyi_limit(copula, split, options);
    case MeasureTag::mutual_information: {
      split.check(copula.dims());
      MeasureReport report = mutual_information(copula);
      report.split = split;
      return report;
    }
    case MeasureTag::group_tau: return group_tau(copula, split, options);
    case MeasureTag::group_tau_normalized: return group_tau_normalized(copula, split, options);
    case MeasureTag::averaged_dependence: return averaged_dependence(copula, split);
  }
  fail(ErrorCode::invalid_argument, "unhandled measure kind");
}

}  // namespace copdep

#endif  // COPDEP_MEASURES_HPP
