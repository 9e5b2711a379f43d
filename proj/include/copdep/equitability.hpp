#ifndef COPDEP_EQUITABILITY_HPP
#define COPDEP_EQUITABILITY_HPP

#include "copdep/measures.hpp"

#include <string_view>

namespace copdep {

/// Transforms whose effect on a measure is known exactly:
///   monotone_column      strictly increasing map of one raw-data column
///                        ("exp:C", "cube:C", "atan:C", "affine:C")
///   permute_conditioning relabeling of the conditioning axes
///                        ("swap:i,j" or "permute:p0,p1,..." over U positions)
///   reverse_target       u -> 1 - u on the single target axis ("reverse-target")
struct Transform {
  enum class Kind { monotone_column, permute_conditioning, reverse_target };

  Kind kind = Kind::monotone_column;
  std::string label;
  std::string map;                 // monotone_column
  Index column = -1;               // monotone_column
  std::vector<Index> permutation;  // permute_conditioning, over U positions
};

/// Parses one transform; anything outside the classes above is rejected
/// with invalid-argument.
Transform parse_transform(std::string_view spec);

struct TransformOutcome {
  std::string label;
  double transformed = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct EquitabilityReport {
  MeasureKind kind;
  double baseline = 0.0;
  std::vector<TransformOutcome> outcomes;
  double max_deviation = 0.0;
  bool passed = true;
};

/// Raw-data form: refits the copula after every monotone column map.
/// Column k of `data` becomes axis k; `resolutions` has one entry per column.
EquitabilityReport equitability_suite(const Eigen::MatrixXd& data, const GroupSplit& split,
                                      const std::vector<Index>& resolutions, const MeasureKind& kind,
                                      const std::vector<Transform>& transforms, const MeasureOptions& options = {});

/// Copula form: only relabeling and target reversal are available.
EquitabilityReport equitability_suite(const CheckerboardCopula& copula, const GroupSplit& split,
                                      const MeasureKind& kind, const std::vector<Transform>& transforms,
                                      const MeasureOptions& options = {});

}  // namespace copdep

#endif  // COPDEP_EQUITABILITY_HPP
