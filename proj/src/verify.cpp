#include "copdep/verify.hpp"

#include "copdep/equitability.hpp"
#include "copdep/estimation.hpp"
#include "copdep/generators.hpp"
#include "copdep/star.hpp"

#include <numeric>
#include <sstream>

namespace copdep {

namespace {

class Recorder {
 public:
  explicit Recorder(SuiteReport& report) : report_(report) {}

  void check(std::string name, bool passed, const std::string& detail) {
    report_.properties.push_back({std::move(name), passed, detail});
  }

 private:
  SuiteReport& report_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<Index> iota(Index from, Index count) {
  std::vector<Index> out(count);
  std::iota(out.begin(), out.end(), from);
  return out;
}

/// Largest |mass - mass_U * mass_V| over all cells.
double factorization_gap(const CheckerboardCopula& copula, const GroupSplit& split) {
  const auto cu = marginal(copula, split.u_axes);
  const auto cv = marginal(copula, split.v_axes);
  const auto arranged = axis_permute(copula, [&] {
    auto order = split.u_axes;
    order.insert(order.end(), split.v_axes.begin(), split.v_axes.end());
    return order;
  }());
  const Index nv = cv.cell_count();
  double gap = 0.0;
  for (Index i = 0; i < cu.cell_count(); ++i)
    for (Index j = 0; j < nv; ++j)
      gap = std::max(gap, std::abs(arranged.mass()[i * nv + j] - cu.mass()[i] * cv.mass()[j]));
  return gap;
}

void axioms(Recorder& rec, std::uint64_t seed, Index trials) {
  {
    double worst = 0.0;
    for (Index n = 1; n <= 3; ++n) {
      const auto pi = make_independence(std::vector<Index>(n + 1, 8));
      worst = std::max(worst, std::abs(tau_quadratic(pi, GroupSplit::last_target(n + 1)).value));
    }
    rec.check("independence_zero", worst <= kIdentityTolerance, "max |tau(Pi^{n+1})| = " + fmt(worst));
  }
  {
    double worst = 0.0;
    bool increasing = true;
    for (Index d : {2, 3}) {
      double prev = -1.0;
      for (Index m : {4, 16, 64}) {
        const double t = tau_quadratic(make_comonotone(d, m), GroupSplit::last_target(d)).value;
        worst = std::max(worst, std::abs(t - (1.0 - 1.0 / static_cast<double>(m))));
        increasing = increasing && t > prev;
        prev = t;
      }
    }
    rec.check("comonotone_maximum", worst <= kIdentityTolerance && increasing,
              "max |tau - (1 - 1/m)| = " + fmt(worst) + (increasing ? ", increasing in m" : ", NOT increasing"));
  }
  {
    const std::vector<MeasureKind> kinds{MeasureKind::tau_quadratic(), MeasureKind::tau_alpha(1.0),
                                         MeasureKind::tau_alpha(1.5), MeasureKind::tau_alpha(3.0)};
    double lo = 0.0;
    double hi = 0.0;
    for (Index t = 0; t < trials; ++t) {
      const Index d = 2 + t % 2;
      const Index m = 2 + t % 5;
      const auto c = t % 3 == 0 ? random_shuffle_copula(d, m, 1 + t % 4, seed + t)
                                : random_copula(std::vector<Index>(d, m), seed + t);
      for (const auto& kind : kinds) {
        const double v = measure(c, GroupSplit::last_target(d), kind).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    rec.check("tau_range", lo >= 0.0 && hi <= 1.0 + kValidityTolerance,
              std::to_string(trials) + " copulas, values in [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  {
    bool ok = true;
    for (Index t = 0; t < trials; ++t) {
      const auto c = random_copula({3 + t % 3, 4, 2 + t % 4}, seed + 1000 + t);
      const GroupSplit split({0, 1}, {2});
      ok = ok && std::abs(tau_alpha(c, split, 2.0).value - tau_quadratic(c, split).value) <= kIdentityTolerance;
    }
    rec.check("tau_alpha_two_matches_quadratic", ok, "|tau_alpha(2) - tau_quadratic| <= 1e-12");
  }
  {
    bool ok = true;
    std::string detail;
    for (Index t = 0; t < trials; ++t) {
      const Index m = 2 + t % 4;
      const auto product = product_copula(random_copula({m, m + 1}, seed + 2000 + t), make_independence({m}));
      const auto mixed = random_copula({m, m + 1, m}, seed + 3000 + t);
      const GroupSplit split({0, 1}, {2});
      for (const auto* c : {&product, &mixed}) {
        const bool zero = std::abs(tau_quadratic(*c, split).value) <= kIdentityTolerance;
        const bool factorizes = factorization_gap(*c, split) <= kValidityTolerance;
        if (zero != factorizes) {
          ok = false;
          detail = "trial " + std::to_string(t) + ": tau zero=" + std::to_string(zero) +
                   " factorizes=" + std::to_string(factorizes);
        }
      }
    }
    rec.check("zero_characterization", ok, ok ? "tau = 0 exactly on product grids only" : detail);
  }
  {
    double worst_det = 0.0;
    double best_other = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < trials; ++t) {
      const Index n = 1 + t % 2;
      const Index m = 2 + t % 6;
      const double cap = 1.0 - 1.0 / static_cast<double>(m);
      const auto det = random_deterministic_copula(n, m, seed + 4000 + t);
      worst_det = std::max(worst_det, std::abs(tau_quadratic(det, GroupSplit::last_target(n + 1)).value - cap));
      const auto other = random_copula(std::vector<Index>(n + 1, m), seed + 5000 + t);
      best_other = std::max(best_other, tau_quadratic(other, GroupSplit::last_target(n + 1)).value - cap);
    }
    rec.check("max_characterization", worst_det <= kIdentityTolerance && best_other < -kValidityTolerance,
              "deterministic |tau - cap| <= " + fmt(worst_det) + ", spread grids tau - cap <= " + fmt(best_other));
  }
  {
    bool ok = true;
    const std::vector<MeasureKind> kinds{MeasureKind::tau_quadratic(), MeasureKind::tau_alpha(1.5),
                                         MeasureKind::renyi_alpha(0.5), MeasureKind::renyi_limit(),
                                         MeasureKind::mutual_information(), MeasureKind::averaged_dependence()};
    for (Index t = 0; t < std::min<Index>(trials, 20); ++t) {
      const auto c = random_copula({3, 4, 5, 3}, seed + 6000 + t);
      const auto swapped = axis_permute(c, {2, 0, 1, 3});
      const GroupSplit split({0, 1, 2}, {3});
      for (const auto& kind : kinds) ok = ok && measure(c, split, kind).value == measure(swapped, split, kind).value;
      const auto g = random_copula({3, 4, 3, 2}, seed + 7000 + t);
      const auto gs = axis_permute(g, {1, 0, 2, 3});
      const GroupSplit gsplit({0, 1}, {2, 3});
      const auto r1 = group_tau(g, gsplit);
      const auto r2 = group_tau(gs, gsplit);
      ok = ok && r1.value == r2.value && *r1.upper_bound == *r2.upper_bound;
    }
    rec.check("conditioning_permutation", ok, "every measure bit-identical under U-axis relabeling");
  }
  {
    const SynthModel model{SynthTag::square_law, 2, seed};
    const auto data = generate(model, 20000);
    const auto c = fit_checkerboard(pseudo_observations(data), {32, 32});
    const double forward = tau_quadratic(c, GroupSplit({0}, {1})).value;
    const double backward = tau_quadratic(c, GroupSplit({1}, {0})).value;
    rec.check("nonsymmetry", forward > 0.9 && std::abs(backward - 0.25) < 0.05,
              "tau(X->Y) = " + fmt(forward) + ", tau(Y->X) = " + fmt(backward));
  }
  {
    double worst = 0.0;
    for (Index m : {8, 64}) {
      const auto c = make_comonotone(3, m);
      worst = std::max(worst, std::abs(mutual_information(c).value - 2.0 * std::log(static_cast<double>(m))));
    }
    const auto pi = make_independence({6, 5});
    const GroupSplit split({0}, {1});
    const bool zero = renyi_alpha(pi, split, 0.5).value == 0.0 && renyi_alpha(pi, split, 1.5).value == 0.0 &&
                      renyi_limit(pi, split).value == 0.0 && mutual_information(pi).value == 0.0;
    rec.check("entropy_forms", worst <= kValidityTolerance && zero,
              "|MI(comonotone d=3) - 2 ln m| <= " + fmt(worst) + (zero ? ", Pi gives 0" : ", Pi NOT 0"));
  }
}

/// (s..., v) operand whose s-marginal is uniform, as the identity coupling
/// and the independence copula require: a random mix of a deterministic
/// assignment and independence.
CheckerboardCopula uniform_s_operand(Index n, Index m, std::uint64_t seed) {
  CounterRng rng(seed);
  const double theta = rng.uniform();
  const auto det = random_deterministic_copula(n, m, seed);
  const auto pi = make_independence(det.resolutions());
  return CheckerboardCopula(det.resolutions(), theta * det.mass() + (1.0 - theta) * pi.mass());
}

void dpi(Recorder& rec, std::uint64_t seed, Index trials) {
  const std::vector<MeasureKind> kinds{MeasureKind::tau_quadratic(), MeasureKind::tau_alpha(1.0)};
  Index violations = 0;
  double worst_margin = -1.0;
  double worst_star = 0.0;
  for (Index t = 0; t < trials; ++t) {
    const Index n = 1 + t % 2;
    const auto ops = random_markov_operands(n, 8, 1, seed + t);
    const auto chain = star(ops.a, ops.b, n);
    worst_star = std::max(worst_star,
                          (marginal(chain, iota(0, n)).mass() - marginal(ops.a, iota(0, n)).mass()).cwiseAbs().maxCoeff());
    if (!validate(chain).passed) worst_star = std::numeric_limits<double>::infinity();
    for (const auto& kind : kinds) {
      const auto r = dpi_report(ops.a, ops.b, n, kind);
      worst_margin = std::max(worst_margin, r.tau_chain - r.tau_direct);
      if (!r.holds) ++violations;
    }
  }
  rec.check("dpi_random_pairs", violations == 0,
            std::to_string(trials) + " pairs, " + std::to_string(violations) +
                " violations, max tau_chain - tau_direct = " + fmt(worst_margin));
  rec.check("star_validates_and_keeps_u_marginal", worst_star <= kIdentityTolerance,
            "max u-marginal deviation " + fmt(worst_star));

  double worst_identity = 0.0;
  for (Index n : {1, 2}) {
    const auto b = uniform_s_operand(n, 4, seed + 10000 + n);
    const auto out = star(identity_coupling(n, 4), b, n);
    worst_identity = std::max(worst_identity, (out.mass() - b.mass()).cwiseAbs().maxCoeff());
    for (const auto& kind : kinds) {
      const auto r = dpi_report(identity_coupling(n, 4), b, n, kind);
      worst_identity = std::max(worst_identity, std::abs(r.tau_chain - r.tau_direct));
    }
  }
  rec.check("identity_coupling_equality", worst_identity <= kIdentityTolerance,
            "max deviation " + fmt(worst_identity));

  double worst_indep = 0.0;
  for (Index n : {1, 2}) {
    const auto b = uniform_s_operand(n, 4, seed + 20000 + n);
    const auto r = dpi_report(make_independence(std::vector<Index>(2 * n, 4)), b, n, MeasureKind::tau_quadratic());
    worst_indep = std::max(worst_indep, std::abs(r.tau_chain));
  }
  rec.check("independent_first_link", worst_indep <= kIdentityTolerance, "max |tau_chain| = " + fmt(worst_indep));
}

void equitability(Recorder& rec, std::uint64_t seed, Index trials) {
  std::vector<Transform> common;
  for (const char* spec : {"exp:0", "cube:1", "atan:2", "affine:0", "swap:0,1"}) common.push_back(parse_transform(spec));
  auto with_reverse = common;
  with_reverse.push_back(parse_transform("reverse-target"));

  const std::vector<MeasureKind> kinds{MeasureKind::tau_quadratic(),     MeasureKind::tau_alpha(1.0),
                                       MeasureKind::tau_alpha(1.5),      MeasureKind::renyi_alpha(0.5),
                                       MeasureKind::renyi_limit(),       MeasureKind::mutual_information(),
                                       MeasureKind::averaged_dependence()};
  double monotone_dev = 0.0;
  double reverse_dev = 0.0;
  bool ok = true;
  for (Index t = 0; t < trials; ++t) {
    SynthModel model{SynthTag::functional, 3, seed + t};
    model.sigma = 0.1 * static_cast<double>(t % 3);
    const auto data = generate(model, 4000);
    for (const auto& kind : kinds) {
      const bool symmetric = kind.tag() == MeasureTag::tau_quadratic || kind.tag() == MeasureTag::tau_alpha;
      const auto report =
          equitability_suite(data, GroupSplit({0, 1}, {2}), {8, 8, 8}, kind, symmetric ? with_reverse : common);
      for (const auto& o : report.outcomes) {
        if (o.label == "reverse-target")
          reverse_dev = std::max(reverse_dev, o.deviation);
        else
          monotone_dev = std::max(monotone_dev, o.deviation);
      }
      ok = ok && report.passed;
    }
  }
  rec.check("monotone_and_relabel_exact", monotone_dev == 0.0, "max deviation " + fmt(monotone_dev));
  rec.check("target_reversal", reverse_dev < kIdentityTolerance, "max deviation " + fmt(reverse_dev));

  double group_dev = 0.0;
  for (Index t = 0; t < trials; ++t) {
    SynthModel model{SynthTag::mixture, 4, seed + 100 + t};
    model.theta = 0.5;
    const auto data = generate(model, 3000);
    std::vector<Transform> ts;
    for (const char* spec : {"exp:0", "cube:2", "atan:3", "swap:0,1"}) ts.push_back(parse_transform(spec));
    for (const auto& kind : {MeasureKind::group_tau(), MeasureKind::group_tau_normalized()}) {
      const auto report = equitability_suite(data, GroupSplit({0, 1}, {2, 3}), {4, 4, 4, 4}, kind, ts);
      group_dev = std::max(group_dev, report.max_deviation);
      ok = ok && report.passed;
    }
  }
  rec.check("group_invariance", group_dev == 0.0, "max deviation " + fmt(group_dev));

  bool rejected = false;
  try {
    parse_transform("rotate:0,1");
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::invalid_argument;
  }
  rec.check("unsupported_transform_rejected", rejected, "rotation is refused with invalid-argument");
  (void)ok;
}

void bounds(Recorder& rec, std::uint64_t seed, Index trials) {
  {
    const auto c = random_copula({4, 5}, seed);
    const double b = max_bound(kendall_cdf(c, {1}));
    rec.check("single_target_bound_one", b == 1.0, "max_bound = " + fmt(b));
  }
  {
    const double grid = max_bound(kendall_cdf(make_independence({64, 64}), {0, 1}));
    CounterRng rng(seed);
    FixedPointSum<double> acc;
    const Index draws = 1000000;
    for (Index i = 0; i < draws; ++i) {
      const double w = rng.uniform() * rng.uniform();
      acc.add(6.0 * (w - w * w));
    }
    const double mc = acc.value() / static_cast<double>(draws);
    rec.check("independence_bound", std::abs(grid - 5.0 / 6.0) < 0.01 && std::abs(mc - 5.0 / 6.0) < 0.005,
              "grid m=64: " + fmt(grid) + ", Monte Carlo 1e6: " + fmt(mc));
  }
  {
    double worst = -1.0;
    for (Index t = 0; t < trials; ++t) {
      const Index v = 2 + t % 2;
      std::vector<Index> res(2 + v, 3 + t % 3);
      const auto c = t % 4 == 0 ? random_shuffle_copula(2 + v, res[0], 1 + t % 3, seed + t)
                                : random_copula(res, seed + t);
      const auto r = group_tau(c, GroupSplit({0, 1}, iota(2, v)));
      worst = std::max(worst, r.value - *r.upper_bound);
    }
    rec.check("group_tau_below_bound", worst <= kValidityTolerance,
              std::to_string(trials) + " copulas, max group_tau - bound = " + fmt(worst));
  }
  {
    double worst = 0.0;
    for (Index t = 0; t < std::min<Index>(trials, 20); ++t) {
      const auto cv = random_copula({4, 3}, seed + 500 + t);
      const auto cu = random_copula({3, 5}, seed + 700 + t);
      worst = std::max(worst, std::abs(group_tau(product_copula(cu, cv), GroupSplit({0, 1}, {2, 3})).value));
    }
    rec.check("group_independence", worst <= kIdentityTolerance, "max |group_tau(C_U x C_V)| = " + fmt(worst));
  }
  {
    MeasureOptions corner;
    corner.point_rule = PointRule::upper_corner;
    double worst = 0.0;
    for (Index n : {2, 3}) {
      const auto c = identity_coupling(n, 3);
      const auto r = group_tau(c, GroupSplit(iota(0, n), iota(n, n)), corner);
      worst = std::max(worst, std::abs(r.value - *r.upper_bound));
    }
    rec.check("identity_coupling_attains_bound", worst <= kIdentityTolerance, "max |value - bound| = " + fmt(worst));
  }
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json doc;
  doc["suite"] = suite;
  doc["seed"] = seed;
  doc["trials"] = trials;
  doc["passed"] = passed();
  doc["properties"] = nlohmann::json::array();
  for (const auto& p : properties)
    doc["properties"].push_back({{"name", p.name}, {"passed", p.passed}, {"detail", p.detail}});
  return doc;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"axioms", "dpi", "equitability", "bounds"};
  return names;
}

SuiteReport run_suite(std::string_view name, std::uint64_t seed, Index trials) {
  require(trials >= 0, "trial count must be >= 0");
  SuiteReport report;
  report.suite = std::string(name);
  report.seed = seed;
  Recorder rec(report);
  if (name == "axioms") {
    report.trials = trials ? trials : 500;
    axioms(rec, seed, report.trials);
  } else if (name == "dpi") {
    report.trials = trials ? trials : 200;
    dpi(rec, seed, report.trials);
  } else if (name == "equitability") {
    report.trials = trials ? trials : 3;
    equitability(rec, seed, report.trials);
  } else if (name == "bounds") {
    report.trials = trials ? trials : 100;
    bounds(rec, seed, report.trials);
  } else {
    fail(ErrorCode::invalid_argument, "unknown suite '" + std::string(name) + "' (axioms|dpi|equitability|bounds)");
  }
  return report;
}

}  // namespace copdep
