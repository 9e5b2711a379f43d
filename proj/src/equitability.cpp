#include "copdep/equitability.hpp"

#include "copdep/estimation.hpp"

#include <charconv>
#include <numeric>

namespace copdep {

namespace {

std::vector<Index> parse_indices(std::string_view text) {
  std::vector<Index> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    Index value = -1;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    require(ec == std::errc() && ptr == token.data() + token.size() && value >= 0,
            "bad index '" + std::string(token) + "' in transform");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

double apply_map(const std::string& map, double x) {
  if (map == "exp") return std::exp(x);
  if (map == "cube") return x * x * x;
  if (map == "atan") return std::atan(x);
  return 2.0 * x + 1.0;  // affine
}

bool symmetric_in_target(const MeasureKind& kind) {
  return kind.tag() == MeasureTag::tau_quadratic || kind.tag() == MeasureTag::tau_alpha;
}

/// Copula relabeled so that the U block reads in permuted order, with the
/// split rewritten to the arranged layout.
std::pair<CheckerboardCopula, GroupSplit> permute_conditioning(const CheckerboardCopula& copula,
                                                               const GroupSplit& split,
                                                               const std::vector<Index>& permutation) {
  const Index n = static_cast<Index>(split.u_axes.size());
  require(static_cast<Index>(permutation.size()) == n, "permutation must cover every conditioning axis");
  std::vector<int> seen(n, 0);
  std::vector<Index> order;
  for (Index p : permutation) {
    require(p >= 0 && p < n && seen[p]++ == 0, "malformed conditioning permutation");
    order.push_back(split.u_axes[p]);
  }
  order.insert(order.end(), split.v_axes.begin(), split.v_axes.end());
  std::vector<Index> u(n);
  std::iota(u.begin(), u.end(), Index(0));
  std::vector<Index> v(split.v_axes.size());
  std::iota(v.begin(), v.end(), n);
  return {axis_permute(copula, order), GroupSplit(u, v)};
}

TransformOutcome outcome(const Transform& t, double baseline, double value, double tolerance) {
  TransformOutcome out;
  out.label = t.label;
  out.transformed = value;
  out.deviation = std::abs(value - baseline);
  out.tolerance = tolerance;
  out.passed = out.deviation <= tolerance;
  return out;
}

std::optional<TransformOutcome> copula_transform(const CheckerboardCopula& copula, const GroupSplit& split,
                                                 const MeasureKind& kind, const Transform& t, double baseline,
                                                 const MeasureOptions& options) {
  switch (t.kind) {
    case Transform::Kind::permute_conditioning: {
      const auto [relabeled, relabeled_split] = permute_conditioning(copula, split, t.permutation);
      return outcome(t, baseline, measure(relabeled, relabeled_split, kind, options).value, 0.0);
    }
    case Transform::Kind::reverse_target: {
      require(split.v_axes.size() == 1, "reverse-target needs a single target axis");
      require(symmetric_in_target(kind), "reverse-target is exact only for tau_quadratic and tau_alpha, not " +
                                             kind.name());
      const auto reversed = axis_reverse(copula, split.v_axes.front());
      return outcome(t, baseline, measure(reversed, split, kind, options).value, kIdentityTolerance);
    }
    case Transform::Kind::monotone_column: return std::nullopt;
  }
  return std::nullopt;
}

void finish(EquitabilityReport& report) {
  for (const auto& o : report.outcomes) {
    report.max_deviation = std::max(report.max_deviation, o.deviation);
    report.passed = report.passed && o.passed;
  }
}

}  // namespace

Transform parse_transform(std::string_view spec) {
  Transform t;
  t.label = std::string(spec);
  if (spec == "reverse-target") {
    t.kind = Transform::Kind::reverse_target;
    return t;
  }
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "exp" || head == "cube" || head == "atan" || head == "affine") {
    const auto idx = parse_indices(args);
    require(idx.size() == 1, "monotone transform needs exactly one column: " + std::string(spec));
    t.kind = Transform::Kind::monotone_column;
    t.map = std::string(head);
    t.column = idx.front();
    return t;
  }
  if (head == "swap") {
    const auto idx = parse_indices(args);
    require(idx.size() == 2 && idx[0] != idx[1], "swap needs two distinct positions: " + std::string(spec));
    t.kind = Transform::Kind::permute_conditioning;
    t.permutation = idx;  // expanded against the split later
    t.label = std::string(spec);
    return t;
  }
  if (head == "permute") {
    t.kind = Transform::Kind::permute_conditioning;
    t.permutation = parse_indices(args);
    t.map = "permute";
    return t;
  }
  fail(ErrorCode::invalid_argument, "unsupported transform class '" + std::string(spec) +
                                        "' (supported: exp|cube|atan|affine:COL, swap:i,j, permute:..., "
                                        "reverse-target)");
}

namespace {

/// swap:i,j is stored as its two positions; expand to a full permutation.
Transform expand(const Transform& t, Index n_conditioning) {
  if (t.kind != Transform::Kind::permute_conditioning || t.map == "permute") return t;
  Transform full = t;
  full.permutation.resize(n_conditioning);
  std::iota(full.permutation.begin(), full.permutation.end(), Index(0));
  const Index i = t.permutation[0];
  const Index j = t.permutation[1];
  require(i < n_conditioning && j < n_conditioning, "swap position out of range");
  std::swap(full.permutation[i], full.permutation[j]);
  return full;
}

}  // namespace

EquitabilityReport equitability_suite(const Eigen::MatrixXd& data, const GroupSplit& split,
                                      const std::vector<Index>& resolutions, const MeasureKind& kind,
                                      const std::vector<Transform>& transforms, const MeasureOptions& options) {
  split.check(data.cols());
  const auto copula = fit_checkerboard(pseudo_observations(data), resolutions);
  EquitabilityReport report{kind, measure(copula, split, kind, options).value};
  for (const auto& raw : transforms) {
    const Transform t = expand(raw, static_cast<Index>(split.u_axes.size()));
    if (t.kind == Transform::Kind::monotone_column) {
      require(t.column >= 0 && t.column < data.cols(), "transform column out of range: " + t.label);
      Eigen::MatrixXd mapped = data;
      for (Index r = 0; r < mapped.rows(); ++r) mapped(r, t.column) = apply_map(t.map, mapped(r, t.column));
      const auto refit = fit_checkerboard(pseudo_observations(mapped), resolutions);
      report.outcomes.push_back(outcome(t, report.baseline, measure(refit, split, kind, options).value, 0.0));
    } else {
      report.outcomes.push_back(*copula_transform(copula, split, kind, t, report.baseline, options));
    }
  }
  finish(report);
  return report;
}

EquitabilityReport equitability_suite(const CheckerboardCopula& copula, const GroupSplit& split,
                                      const MeasureKind& kind, const std::vector<Transform>& transforms,
                                      const MeasureOptions& options) {
  split.check(copula.dims());
  EquitabilityReport report{kind, measure(copula, split, kind, options).value};
  for (const auto& raw : transforms) {
    const Transform t = expand(raw, static_cast<Index>(split.u_axes.size()));
    require(t.kind != Transform::Kind::monotone_column,
            "monotone column transforms need raw data, not a copula: " + t.label);
    report.outcomes.push_back(*copula_transform(copula, split, kind, t, report.baseline, options));
  }
  finish(report);
  return report;
}

}  // namespace copdep
