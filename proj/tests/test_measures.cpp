#include "copdep/generators.hpp"
#include "copdep/measures.hpp"
#include "copdep/star.hpp"
#include "support.hpp"

#include <cstdlib>

namespace copdep {
namespace {

using testing::error_code_of;
using testing::vec;

const GroupSplit kLast2({0}, {1});

/// Riemann-sum oracle for the quadratic measure: conditional CDFs come from
/// c_volume ratios of each conditioning strip, evaluated at `points`
/// midpoints in v.
double tau_by_riemann(const CheckerboardCopula& c, int points) {
  const Index d = c.dims();
  const Index n = d - 1;
  double total = 0.0;
  std::vector<Index> u_cell(n, 0);
  std::vector<Index> u_res(c.resolutions().begin(), c.resolutions().end() - 1);
  do {
    Eigen::VectorXd lo(d), hi(d);
    for (Index k = 0; k < n; ++k) {
      lo[k] = static_cast<double>(u_cell[k]) / static_cast<double>(c.resolution(k));
      hi[k] = static_cast<double>(u_cell[k] + 1) / static_cast<double>(c.resolution(k));
    }
    lo[n] = 0.0;
    hi[n] = 1.0;
    const double w = c_volume(c, GridBox<double>(lo, hi));
    if (w <= 0.0) continue;
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
      const double v = (i + 0.5) / points;
      hi[n] = v;
      const double f = c_volume(c, GridBox<double>(lo, hi)) / w;
      acc += (f - v) * (f - v);
    }
    total += w * acc / points;
  } while (detail::next_cell(u_cell, u_res));
  return 6.0 * total;
}

/// Midpoint-rule oracle for the distance family, same construction.
double abs_power_by_riemann(const CheckerboardCopula& c, double alpha, int points) {
  const Index m_u = c.resolution(0);
  double total = 0.0;
  for (Index i = 0; i < m_u; ++i) {
    const double a = static_cast<double>(i) / m_u;
    const double b = static_cast<double>(i + 1) / m_u;
    const double w = c_volume(c, GridBox<double>(vec({a, 0}), vec({b, 1})));
    if (w <= 0.0) continue;
    double acc = 0.0;
    for (int k = 0; k < points; ++k) {
      const double v = (k + 0.5) / points;
      acc += std::pow(std::abs(c_volume(c, GridBox<double>(vec({a, 0}), vec({b, v}))) / w - v), alpha);
    }
    total += w * acc / points;
  }
  return total;
}

TEST(ConditionalCdf, IndependenceIsIdentity) {
  const auto pi = make_independence({4, 5, 3});
  const GroupSplit split({0, 1}, {2});
  const std::vector<Index> cell{2, 3};
  for (double v : {0.0, 0.1, 0.5, 0.77, 1.0}) EXPECT_NEAR(conditional_cdf(pi, split, cell, v), v, 1e-15);
}

TEST(ConditionalCdf, ComonotoneRamp) {
  const auto c2 = make_comonotone(2, 4);
  for (Index i = 0; i < 4; ++i) {
    const std::vector<Index> cell{i};
    EXPECT_NEAR(conditional_cdf(c2, kLast2, cell, (i + 1) / 4.0), 1.0, 1e-15);
    EXPECT_NEAR(conditional_cdf(c2, kLast2, cell, i / 4.0), 0.0, 1e-15);
  }
  const auto c3 = make_comonotone(3, 4);
  const GroupSplit split({0, 1}, {2});
  for (Index i = 0; i < 4; ++i) {
    const std::vector<Index> cell{i, i};
    EXPECT_NEAR(conditional_cdf(c3, split, cell, (i + 0.5) / 4.0), 0.5, 1e-15);
  }
}

TEST(ConditionalCdf, ZeroMassCellGivesZero) {
  const auto c3 = make_comonotone(3, 4);
  const std::vector<Index> cell{0, 3};
  EXPECT_EQ(conditional_cdf(c3, GroupSplit({0, 1}, {2}), cell, 0.9), 0.0);
}

TEST(ConditionalCdf, GroupPointForm) {
  const auto pi = make_independence({3, 4, 4});
  const std::vector<Index> cell{1};
  EXPECT_NEAR(conditional_cdf(pi, GroupSplit({0}, {1, 2}), cell, vec({0.5, 0.3})), 0.15, 1e-15);
}

TEST(TauQuadratic, IndependenceIsExactlyZero) {
  for (Index n = 1; n <= 3; ++n)
    for (Index m : {1, 3, 8})
      EXPECT_EQ(tau_quadratic(make_independence(std::vector<Index>(n + 1, m)), GroupSplit::last_target(n + 1)).value,
                0.0);
}

TEST(TauQuadratic, ComonotoneClosedForm) {
  for (Index d : {2, 3})
    for (Index m : {4, 16, 64}) {
      const auto report = tau_quadratic(make_comonotone(d, m), GroupSplit::last_target(d));
      EXPECT_NEAR(report.value, 1.0 - 1.0 / m, 1e-12);
      EXPECT_EQ(report.normalizer, 6.0);
    }
}

TEST(TauQuadratic, MatchesRiemannOracle) {
  EXPECT_NEAR(tau_by_riemann(make_comonotone(2, 4), 10000), 0.75, 1e-6);
  EXPECT_NEAR(tau_by_riemann(make_comonotone(3, 4), 10000), 0.75, 1e-6);
  for (std::uint64_t seed : {1u, 2u}) {
    const auto c = random_copula({3, 4, 5}, seed);
    EXPECT_NEAR(tau_quadratic(c, GroupSplit({0, 1}, {2})).value, tau_by_riemann(c, 10000), 1e-6);
  }
}

TEST(TauQuadratic, MixtureApproachesThetaSquared) {
  for (double theta : {0.25, 0.5, 0.75}) {
    const double coarse = tau_quadratic(mixture_copula(theta, 64), kLast2).value;
    const double fine = tau_quadratic(mixture_copula(theta, 1024), kLast2).value;
    EXPECT_NEAR(coarse, theta * theta, 0.01);
    EXPECT_NEAR(fine, theta * theta, 0.001);
    EXPECT_LT(std::abs(fine - theta * theta), std::abs(coarse - theta * theta));
  }
}

TEST(TauQuadratic, RejectsTargetGroup) {
  EXPECT_EQ(error_code_of([] { tau_quadratic(make_independence({2, 2, 2}), GroupSplit({0}, {1, 2})); }),
            ErrorCode::invalid_argument);
}

TEST(TauAlpha, NormalizerOracle) {
  // Complete dependence: F(v | u) = 1{v >= u}. The double integral of
  // |1{v >= u} - v|^alpha must equal 1 / c_alpha.
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    const int n = 2000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = (i + 0.5) / n;
        const double v = (j + 0.5) / n;
        acc += std::pow(std::abs((v >= u ? 1.0 : 0.0) - v), alpha);
      }
    const double c_alpha = (alpha + 1.0) * (alpha + 2.0) / 2.0;
    EXPECT_NEAR(c_alpha * acc / (static_cast<double>(n) * n), 1.0, 1e-3) << "alpha " << alpha;
    EXPECT_DOUBLE_EQ(*tau_alpha(make_comonotone(2, 2), kLast2, alpha).normalizer, c_alpha);
  }
}

TEST(TauAlpha, TwoMatchesQuadratic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_copula({3, 4, 5}, seed);
    const GroupSplit split({0, 1}, {2});
    EXPECT_NEAR(tau_alpha(c, split, 2.0).value, tau_quadratic(c, split).value, 1e-12);
  }
}

TEST(TauAlpha, IndependenceAndComonotoneLimit) {
  EXPECT_EQ(tau_alpha(make_independence({5, 5}), kLast2, 1.0).value, 0.0);
  const double at512 = tau_alpha(make_comonotone(2, 512), kLast2, 1.0).value;
  EXPECT_NEAR(at512, 1.0, 0.01);
  EXPECT_GT(at512, tau_alpha(make_comonotone(2, 64), kLast2, 1.0).value);
}

TEST(TauAlpha, MatchesRiemannOracle) {
  const auto c = random_copula({5, 4}, 8);
  for (double alpha : {1.0, 1.5, 3.0}) {
    const double c_alpha = (alpha + 1.0) * (alpha + 2.0) / 2.0;
    EXPECT_NEAR(tau_alpha(c, kLast2, alpha).value, c_alpha * abs_power_by_riemann(c, alpha, 20000), 1e-6);
  }
}

TEST(TauAlpha, RejectsSmallAlpha) {
  EXPECT_EQ(error_code_of([] { tau_alpha(make_independence({2, 2}), kLast2, 0.5); }), ErrorCode::invalid_argument);
  EXPECT_EQ(error_code_of([] { MeasureKind::tau_alpha(0.99); }), ErrorCode::invalid_argument);
}

TEST(RenyiAlpha, IndependenceIsZero) {
  for (double alpha : {0.3, 0.5, 1.5, 1.9}) EXPECT_EQ(renyi_alpha(make_independence({7, 6}), kLast2, alpha).value, 0.0);
}

// Comonotone grid: in row i the target conditional is uniform on cell i, so
// the integrand (F(v|u)/v)^alpha is m^alpha on cell 0, ((m v - i)/v)^alpha on
// cell i and v^-alpha above it.
double comonotone_renyi_by_simpson(Index m, double alpha) {
  const double h = 1.0 / static_cast<double>(m);
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double lo = static_cast<double>(i) * h;
    double cell = 0.0;
    if (i == 0) {
      cell = std::pow(static_cast<double>(m), alpha) * h;
    } else {
      const int steps = 400;
      const double dx = h / steps;
      for (int k = 0; k <= steps; ++k) {
        const double v = lo + k * dx;
        const double f = std::pow((static_cast<double>(m) * v - static_cast<double>(i)) / v, alpha);
        cell += f * (k == 0 || k == steps ? 1.0 : (k % 2 ? 4.0 : 2.0));
      }
      cell *= dx / 3.0;
    }
    const double above = (1.0 - std::pow(lo + h, 1.0 - alpha)) / (1.0 - alpha);
    total += h * (cell + above);
  }
  return std::log(total) / (alpha - 1.0);
}

TEST(RenyiAlpha, ComonotoneLimit) {
  double prev = 0.0;
  for (Index m : {32, 128, 512}) {
    const double value = renyi_alpha(make_comonotone(2, m), kLast2, 1.5).value;
    EXPECT_NEAR(value, comonotone_renyi_by_simpson(m, 1.5), 1e-7) << m;
    EXPECT_GT(value, prev);
    prev = value;
  }
  // Continuous limit log(1/(2-alpha))/(alpha-1) = 2 ln 2, approached like m^-(2-alpha).
  EXPECT_NEAR(prev, 2.0 * std::log(2.0), 0.06);
}

TEST(RenyiAlpha, GrowsTowardAlphaTwo) {
  const auto c = make_comonotone(2, 512);
  const double a = renyi_alpha(c, kLast2, 1.5).value;
  const double b = renyi_alpha(c, kLast2, 1.9).value;
  const double e = renyi_alpha(c, kLast2, 1.99).value;
  EXPECT_LT(a, b);
  EXPECT_LT(b, e);
}

TEST(RenyiAlpha, RejectsOutOfRange) {
  for (double alpha : {0.0, 1.0, 2.0, 2.5})
    EXPECT_EQ(error_code_of([&] { renyi_alpha(make_independence({2, 2}), kLast2, alpha); }),
              ErrorCode::invalid_argument);
}

TEST(RenyiLimit, Values) {
  EXPECT_EQ(renyi_limit(make_independence({4, 9}), kLast2).value, 0.0);
  EXPECT_NEAR(renyi_limit(make_comonotone(2, 512), kLast2).value, 1.0, 0.05);
  const double half = renyi_limit(mixture_copula(0.5, 128), kLast2).value;
  EXPECT_GT(half, 0.0);
  EXPECT_LT(half, 1.0);
}

TEST(RenyiLimit, MatchesRenyiAlphaNearOne) {
  const auto c = random_copula({4, 6}, 3);
  const double limit = renyi_limit(c, kLast2).value;
  EXPECT_NEAR(renyi_alpha(c, kLast2, 1.0 + 1e-5).value, limit, 1e-4);
  EXPECT_NEAR(renyi_alpha(c, kLast2, 1.0 - 1e-5).value, limit, 1e-4);
}

TEST(MutualInformation, Values) {
  EXPECT_EQ(mutual_information(make_independence({3, 4, 5})).value, 0.0);
  for (Index m : {8, 64}) EXPECT_NEAR(mutual_information(make_comonotone(3, m)).value, 2.0 * std::log(m), 1e-9);
  EXPECT_NEAR(mutual_information(make_comonotone(2, 16)).value, std::log(16.0), 1e-12);
}

TEST(GenericMeasure, Relationships) {
  EXPECT_EQ(generic_measure(make_independence({4, 4}), kLast2, [](double x) { return x * x; }), 0.0);
  const auto c = random_copula({4, 5}, 12);
  EXPECT_NEAR(generic_measure(c, kLast2, [](double x) { return 6.0 * x * x; }), tau_quadratic(c, kLast2).value,
              1e-12);
  const auto co = make_comonotone(2, 64);
  EXPECT_NEAR(generic_measure(co, kLast2, [](double x) { return std::abs(x); }),
              tau_alpha(co, kLast2, 1.0).value / 3.0, 1e-12);
}

TEST(GenericMeasure, NonFiniteFails) {
  const auto c = random_copula({3, 3}, 1);
  EXPECT_EQ(error_code_of([&] { generic_measure(c, kLast2, [](double x) { return x > 0 ? 1.0 / 0.0 : 0.0; }); }),
            ErrorCode::evaluation_failed);
  const auto g = random_copula({3, 3, 3}, 1);
  EXPECT_EQ(error_code_of([&] {
              generic_measure(g, GroupSplit({0}, {1, 2}), [](double) { return std::nan(""); });
            }),
            ErrorCode::evaluation_failed);
}

TEST(GenericMeasure, GroupFormWithSquareIsGroupTauOverSix) {
  const auto c = random_copula({3, 4, 3}, 2);
  const GroupSplit split({0}, {1, 2});
  EXPECT_NEAR(6.0 * generic_measure(c, split, [](double x) { return x * x; }), group_tau(c, split).value, 1e-12);
}

TEST(KendallCdf, SingleAxisIsIdentity) {
  const auto k = kendall_cdf(random_copula({3, 5}, 1), {1});
  for (double t : {0.0, 0.2, 0.5, 0.9, 1.0}) EXPECT_DOUBLE_EQ(k(t), t);
  EXPECT_EQ(max_bound(k), 1.0);
}

TEST(KendallCdf, IndependenceMatchesClassicalForm) {
  const auto k = kendall_cdf(make_independence({64, 64}), {0, 1});
  double sup = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double t = i / 2000.0;
    sup = std::max(sup, std::abs(k(t) - (t - t * std::log(t))));
  }
  EXPECT_LT(sup, 0.01);
}

TEST(KendallCdf, IndependenceMatchesMonteCarlo) {
  CounterRng rng(99);
  std::vector<double> draws(1000000);
  for (auto& w : draws) w = rng.uniform() * rng.uniform();
  std::sort(draws.begin(), draws.end());
  const auto k = kendall_cdf(make_independence({64, 64}), {0, 1});
  for (double t : {0.05, 0.1, 0.25, 0.5, 0.75}) {
    const double empirical =
        static_cast<double>(std::upper_bound(draws.begin(), draws.end(), t) - draws.begin()) / draws.size();
    EXPECT_NEAR(k(t), empirical, 0.01);
  }
}

TEST(KendallCdf, ComonotonePairIsNearIdentity) {
  const Index m = 64;
  const auto k = kendall_cdf(make_comonotone(2, m), {0, 1});
  for (int i = 0; i <= 100; ++i) EXPECT_NEAR(k(i / 100.0), i / 100.0, 1.0 / m + 1e-12);
  EXPECT_EQ(k(1.0), 1.0);
}

TEST(KendallCdf, NondecreasingAndReachesOne) {
  const auto k = kendall_cdf(random_copula({3, 4, 5}, 6), {0, 1, 2});
  for (std::size_t i = 1; i < k.knots.size(); ++i) {
    EXPECT_LT(k.knots[i - 1].first, k.knots[i].first);
    EXPECT_LE(k.knots[i - 1].second, k.knots[i].second);
  }
  EXPECT_EQ(k(1.0), 1.0);
}

TEST(MaxBound, Values) {
  EXPECT_EQ(max_bound(KendallCdf::identity()), 1.0);
  const KendallCdf at_zero{{{0.0, 1.0}, {1.0, 1.0}}, KendallCdf::Shape::step};
  EXPECT_EQ(max_bound(at_zero), 0.0);
  // Stieltjes sum against the density -ln t of the classical independence form.
  double oracle = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    oracle += 6.0 * (t - t * t) * (-std::log(t)) / n;
  }
  EXPECT_NEAR(oracle, 5.0 / 6.0, 1e-6);
  EXPECT_NEAR(max_bound(kendall_cdf(make_independence({64, 64}), {0, 1})), oracle, 0.01);
}

TEST(GroupTau, ProductCopulaIsZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto cu = random_copula({3, 4}, seed);
    const auto cv = random_shuffle_copula(2, 4, 2, seed + 50);
    const auto report = group_tau(product_copula(cu, cv), GroupSplit({0, 1}, {2, 3}));
    EXPECT_NEAR(report.value, 0.0, 1e-12);
    EXPECT_GT(*report.upper_bound, 0.0);
  }
}

TEST(GroupTau, IdentityCouplingAttainsBound) {
  MeasureOptions corner;
  corner.point_rule = PointRule::upper_corner;
  for (Index n : {2, 3}) {
    std::vector<Index> u(n), v(n);
    std::iota(u.begin(), u.end(), Index(0));
    std::iota(v.begin(), v.end(), n);
    const auto report = group_tau(identity_coupling(n, 3), GroupSplit(u, v), corner);
    EXPECT_NEAR(report.value, *report.upper_bound, 1e-12);
  }
}

TEST(GroupTau, SingleTargetFallsBack) {
  const auto c = random_copula({4, 5}, 3);
  const auto report = group_tau(c, kLast2);
  EXPECT_EQ(report.value, tau_quadratic(c, kLast2).value);
  EXPECT_EQ(*report.upper_bound, 1.0);
}

TEST(GroupTau, BelowBoundOnRandomCopulas) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index v = 2 + seed % 2;
    const Index m = 2 + seed % 4;
    const auto c = seed % 3 == 0 ? random_shuffle_copula(1 + v, m, 1 + seed % 3, seed)
                                 : random_copula(std::vector<Index>(1 + v, m), seed);
    std::vector<Index> target(v);
    std::iota(target.begin(), target.end(), Index(1));
    for (auto rule : {PointRule::cell_center, PointRule::upper_corner}) {
      MeasureOptions options;
      options.point_rule = rule;
      const auto report = group_tau(c, GroupSplit({0}, target), options);
      EXPECT_GE(report.value, 0.0);
      EXPECT_LE(report.value, *report.upper_bound + 1e-9);
    }
  }
}

TEST(GroupTau, NormalizedDividesByBound) {
  const auto c = random_copula({3, 3, 4}, 5);
  const GroupSplit split({0}, {1, 2});
  const auto raw = group_tau(c, split);
  const auto norm = group_tau_normalized(c, split);
  EXPECT_DOUBLE_EQ(norm.value, raw.value / *raw.upper_bound);
  EXPECT_EQ(norm.kind.tag(), MeasureTag::group_tau_normalized);
}

TEST(AveragedDependence, Values) {
  EXPECT_EQ(averaged_dependence(make_independence({3, 3, 3}), GroupSplit({0}, {1, 2})).value, 0.0);
  const auto c = random_copula({3, 4, 5}, 9);
  EXPECT_EQ(averaged_dependence(c, GroupSplit({0, 1}, {2})).value, tau_quadratic(c, GroupSplit({0, 1}, {2})).value);
  // V1 a function of U, V2 independent of both.
  const auto both = product_copula(make_comonotone(2, 32), make_independence({32}));
  EXPECT_NEAR(averaged_dependence(both, GroupSplit({0}, {1, 2})).value, 0.5 * (1.0 - 1.0 / 32), 1e-12);
}

TEST(Properties, TauRangeOnRandomCopulas) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Index d = 2 + seed % 2;
    const Index m = 2 + seed % 6;
    const auto c = seed % 4 == 0 ? random_shuffle_copula(d, m, 1 + seed % 5, seed)
                                 : random_copula(std::vector<Index>(d, m), seed);
    const auto split = GroupSplit::last_target(d);
    for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
      const double v = tau_alpha(c, split, alpha).value;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-9);
    }
  }
}

TEST(Properties, ZeroCharacterization) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto product = product_copula(random_copula({3, 4}, seed), make_independence({5}));
    EXPECT_LE(std::abs(tau_quadratic(product, GroupSplit({0, 1}, {2})).value), 1e-12);
    const auto dependent = random_copula({3, 4, 5}, seed + 100);
    EXPECT_GT(tau_quadratic(dependent, GroupSplit({0, 1}, {2})).value, 1e-9);
  }
}

TEST(Properties, MaximumOnlyForDeterministicAssignments) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 1 + seed % 3;
    const Index m = 2 + seed % 5;
    const double cap = 1.0 - 1.0 / m;
    const auto det = random_deterministic_copula(n, m, seed);
    EXPECT_NEAR(tau_quadratic(det, GroupSplit::last_target(n + 1)).value, cap, 1e-12);
    // Moving any mass off the single target cell drops below the cap.
    const auto spread = CheckerboardCopula(det.resolutions(),
                                           0.99 * det.mass() + 0.01 * make_independence(det.resolutions()).mass());
    EXPECT_LT(tau_quadratic(spread, GroupSplit::last_target(n + 1)).value, cap - 1e-9);
  }
}

TEST(Properties, ConditioningPermutationBitIdentical) {
  const auto c = random_copula({3, 4, 5, 4}, 31);
  const auto p = axis_permute(c, {1, 2, 0, 3});
  const GroupSplit split({0, 1, 2}, {3});
  for (const auto& kind : {MeasureKind::tau_quadratic(), MeasureKind::tau_alpha(1.0), MeasureKind::tau_alpha(2.5),
                           MeasureKind::renyi_alpha(0.7), MeasureKind::renyi_limit(), MeasureKind::mutual_information()})
    EXPECT_EQ(measure(c, split, kind).value, measure(p, split, kind).value) << kind.name();
  // The same relabeling through the split instead of the grid.
  EXPECT_EQ(tau_quadratic(c, GroupSplit({2, 0, 1}, {3})).value, tau_quadratic(c, split).value);
}

TEST(Properties, TargetReversal) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_copula({3, 4, 6}, seed);
    const GroupSplit split({0, 1}, {2});
    const auto r = axis_reverse(c, 2);
    EXPECT_NEAR(tau_quadratic(r, split).value, tau_quadratic(c, split).value, 1e-12);
    EXPECT_NEAR(tau_alpha(r, split, 1.5).value, tau_alpha(c, split, 1.5).value, 1e-12);
  }
}

TEST(Properties, ThreadCountDoesNotChangeBits) {
  const auto c = random_copula({8, 8, 8, 6}, 4);
  const GroupSplit split({0, 1, 2}, {3});
  setenv("COPDEP_THREADS", "1", 1);
  const double one = tau_alpha(c, split, 1.5).value;
  const double g1 = group_tau(c, GroupSplit({0, 1}, {2, 3})).value;
  setenv("COPDEP_THREADS", "7", 1);
  const double many = tau_alpha(c, split, 1.5).value;
  const double g7 = group_tau(c, GroupSplit({0, 1}, {2, 3})).value;
  unsetenv("COPDEP_THREADS");
  EXPECT_EQ(one, many);
  EXPECT_EQ(g1, g7);
}

TEST(Properties, LongDoubleAgrees) {
  const auto c = random_copula({4, 5, 3}, 2);
  const GroupSplit split({0, 1}, {2});
  const auto wide = c.cast<long double>();
  EXPECT_NEAR(tau_quadratic(wide, split).value, tau_quadratic(c, split).value, 1e-12);
  EXPECT_NEAR(tau_alpha(wide, split, 1.5).value, tau_alpha(c, split, 1.5).value, 1e-12);
}

TEST(Report, RangeDiagnosticInsteadOfClamp) {
  MeasureReport r{MeasureKind::tau_quadratic(), 1.0 + 1e-6, kLast2, {2, 2}};
  detail::check_tau_range(r);
  EXPECT_EQ(r.value, 1.0 + 1e-6);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Kind, Parse) {
  EXPECT_EQ(MeasureKind::parse("tau_alpha", 1.5), MeasureKind::tau_alpha(1.5));
  EXPECT_EQ(MeasureKind::parse("renyi_limit", std::nullopt), MeasureKind::renyi_limit());
  EXPECT_EQ(error_code_of([] { MeasureKind::parse("tau_alpha", std::nullopt); }), ErrorCode::invalid_argument);
  EXPECT_EQ(error_code_of([] { MeasureKind::parse("tau_quadratic", 2.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(error_code_of([] { MeasureKind::parse("spearman", std::nullopt); }), ErrorCode::invalid_argument);
}

}  // namespace
}  // namespace copdep
