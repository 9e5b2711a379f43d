#include "copdep/cli.hpp"

#include "copdep/estimation.hpp"
#include "copdep/generators.hpp"
#include "copdep/io.hpp"
#include "copdep/star.hpp"
#include "copdep/verify.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <numeric>

namespace copdep {

namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output;
  std::vector<std::string> u_cols;
  std::vector<std::string> v_cols;
  Index resolution = 0;
  bool auto_resolution = false;
  std::string kind = "auto";
  std::optional<double> alpha;
  bool normalize = false;
  std::uint64_t seed = 42;
  Index trials = 0;
  std::string suite;
  int quad_order = 16;
  std::string point_rule = "center";
  Index n_coupling = 0;

  std::string model = "independent";
  Index rows = 1000;
  Index dim = 2;
  double theta = 0.5;
  double sigma = 0.0;
  std::string function = "sin_plus_square";
  std::vector<double> correlation;
};

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

/// Writes to the --output path, or to `out` when none is given.
template <typename Emit>
void emit(const RunConfig& cfg, std::ostream& out, Emit&& body) {
  if (cfg.output.empty()) {
    body(out);
    return;
  }
  std::ofstream file(cfg.output);
  if (!file) fail(ErrorCode::io_error, "cannot write '" + cfg.output + "'");
  body(file);
  if (!file) fail(ErrorCode::io_error, "write to '" + cfg.output + "' failed");
}

const std::string& single_input(const RunConfig& cfg) {
  require(cfg.inputs.size() == 1, "exactly one --input is required");
  return cfg.inputs.front();
}

std::vector<Index> resolve_resolutions(const RunConfig& cfg, Index n_rows, Index dims) {
  require(!(cfg.auto_resolution && cfg.resolution > 0), "--resolution and --auto-resolution are exclusive");
  ResolutionPolicy policy;
  if (cfg.resolution > 0) policy = ResolutionPolicy::fixed(cfg.resolution);
  return choose_resolution(n_rows, dims, policy);
}

/// Data columns in (U..., V...) order with the matching local split. The
/// target defaults to the last column, the conditioning block to the rest.
struct Selection {
  Eigen::MatrixXd data;
  std::vector<std::string> names;
  GroupSplit split;
};

Selection select(const Table& table, const RunConfig& cfg) {
  std::vector<Index> v = cfg.v_cols.empty() ? std::vector<Index>{table.columns() - 1} : select_columns(table, cfg.v_cols);
  std::vector<Index> u;
  if (cfg.u_cols.empty()) {
    for (Index c = 0; c < table.columns(); ++c)
      if (std::find(v.begin(), v.end(), c) == v.end()) u.push_back(c);
  } else {
    u = select_columns(table, cfg.u_cols);
  }
  std::vector<Index> all = u;
  all.insert(all.end(), v.begin(), v.end());
  require(all.size() >= 2, "need at least two selected columns");
  std::vector<Index> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "a column is selected twice");
  Selection sel{Eigen::MatrixXd(table.values.rows(), static_cast<Index>(all.size())), {},
                GroupSplit(std::vector<Index>(u.size()), std::vector<Index>(v.size()))};
  for (std::size_t k = 0; k < all.size(); ++k) {
    sel.data.col(static_cast<Index>(k)) = table.values.col(all[k]);
    sel.names.push_back(table.column_name(all[k]));
  }
  for (Index c = 0; c < sel.data.cols(); ++c)
    for (Index r = 0; r < sel.data.rows(); ++r)
      if (!std::isfinite(sel.data(r, c)))
        fail(ErrorCode::invalid_data,
             "non-finite value in column '" + sel.names[c] + "' (data row " + std::to_string(r + 1) + ")");
  std::iota(sel.split.u_axes.begin(), sel.split.u_axes.end(), Index(0));
  std::iota(sel.split.v_axes.begin(), sel.split.v_axes.end(), static_cast<Index>(u.size()));
  return sel;
}

std::vector<Index> parse_axes(const std::vector<std::string>& cols) {
  std::vector<Index> out;
  for (const auto& c : cols) {
    Index idx = -1;
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), idx);
    require(ec == std::errc() && ptr == c.data() + c.size(), "copula axes must be 0-based integers, got '" + c + "'");
    out.push_back(idx);
  }
  return out;
}

GroupSplit copula_split(const CheckerboardCopula& copula, const RunConfig& cfg) {
  std::vector<Index> v = cfg.v_cols.empty() ? std::vector<Index>{copula.dims() - 1} : parse_axes(cfg.v_cols);
  std::vector<Index> u;
  if (cfg.u_cols.empty()) {
    for (Index a = 0; a < copula.dims(); ++a)
      if (std::find(v.begin(), v.end(), a) == v.end()) u.push_back(a);
  } else {
    u = parse_axes(cfg.u_cols);
  }
  GroupSplit split(u, v);
  split.check(copula.dims());
  return split;
}

MeasureKind resolve_kind(const RunConfig& cfg, const GroupSplit& split) {
  std::string name = cfg.kind;
  if (name == "auto") name = split.v_axes.size() > 1 ? "group_tau" : "tau_quadratic";
  MeasureKind kind = MeasureKind::parse(name, cfg.alpha);
  if (cfg.normalize) {
    require(kind.tag() == MeasureTag::group_tau || kind.tag() == MeasureTag::tau_quadratic ||
                kind.tag() == MeasureTag::group_tau_normalized,
            "--normalize applies to tau_quadratic and group_tau only");
    kind = MeasureKind::group_tau_normalized();
  }
  return kind;
}

MeasureOptions resolve_options(const RunConfig& cfg) {
  require(cfg.quad_order >= 1 && cfg.quad_order <= 64, "--quad-order must lie in [1, 64]");
  MeasureOptions options;
  options.quad_order = cfg.quad_order;
  if (cfg.point_rule == "center")
    options.point_rule = PointRule::cell_center;
  else if (cfg.point_rule == "corner")
    options.point_rule = PointRule::upper_corner;
  else
    fail(ErrorCode::invalid_argument, "--point-rule must be center or corner");
  return options;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Table table = read_csv(single_input(cfg));
  const Selection sel = select(table, cfg);
  const auto pseudo = pseudo_observations(sel.data);
  const auto res = resolve_resolutions(cfg, sel.data.rows(), sel.data.cols());
  const auto copula = fit_checkerboard(pseudo, res);
  const auto report = validate(copula);
  err << "estimate: " << sel.data.rows() << " rows, columns";
  for (const auto& n : sel.names) err << ' ' << n;
  err << ", resolution " << res.front() << ", ties " << pseudo.tie_count << '\n';
  err << "validate: " << report.summary() << '\n';
  if (!report.passed) return exit_numerical;
  emit(cfg, out, [&](std::ostream& os) { os << copula_to_json(copula).dump() << '\n'; });
  return exit_ok;
}

int cmd_measure(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string& path = single_input(cfg);
  const MeasureOptions options = resolve_options(cfg);
  MeasureReport report{MeasureKind::tau_quadratic(), 0.0, GroupSplit({0}, {1}), {}};
  if (is_json_path(path)) {
    const auto copula = read_copula(path);
    const auto split = copula_split(copula, cfg);
    report = measure(copula, split, resolve_kind(cfg, split), options);
  } else {
    const Table table = read_csv(path);
    const Selection sel = select(table, cfg);
    const auto pseudo = pseudo_observations(sel.data);
    const auto copula = fit_checkerboard(pseudo, resolve_resolutions(cfg, sel.data.rows(), sel.data.cols()));
    report = measure(copula, sel.split, resolve_kind(cfg, sel.split), options);
    report.sample_size = sel.data.rows();
  }
  err << "measure: " << report.kind.name() << " = " << report.value;
  if (report.upper_bound) err << ", upper bound " << *report.upper_bound;
  if (report.normalized_value) err << ", normalized " << *report.normalized_value;
  err << '\n';
  for (const auto& d : report.diagnostics) err << "diagnostic: " << d << '\n';
  emit(cfg, out, [&](std::ostream& os) { os << report_to_json(report).dump() << '\n'; });
  return exit_ok;
}

int cmd_star(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.inputs.size() == 2, "star needs two inputs: --input A.json --input B.json");
  const auto a = read_copula(cfg.inputs[0]);
  const auto b = read_copula(cfg.inputs[1]);
  const Index n = cfg.n_coupling > 0 ? cfg.n_coupling : a.dims() / 2;
  const auto diag = compatibility_check(a, b, n);
  err << "star: n = " << n << ", s-marginal discrepancy " << diag.max_discrepancy << '\n';
  const auto result = star(a, b, n);
  const auto report = validate(result);
  err << "validate: " << report.summary() << '\n';
  if (!report.passed) return exit_numerical;
  emit(cfg, out, [&](std::ostream& os) { os << copula_to_json(result).dump() << '\n'; });
  return exit_ok;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SynthModel model;
  model.tag = parse_synth_tag(cfg.model);
  model.dimension = cfg.dim;
  model.seed = cfg.seed;
  model.theta = cfg.theta;
  model.sigma = cfg.sigma;
  model.function = parse_function_spec(cfg.function);
  if (model.tag == SynthTag::gaussian) {
    const Index d = cfg.dim;
    if (cfg.correlation.size() == 1) {
      model.correlation = Eigen::MatrixXd::Constant(d, d, cfg.correlation.front());
      model.correlation.diagonal().setOnes();
    } else {
      require(static_cast<Index>(cfg.correlation.size()) == d * d,
              "--correlation takes one equicorrelation value or d*d row-major entries");
      model.correlation = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          cfg.correlation.data(), d, d);
    }
  }
  const auto data = generate(model, cfg.rows);
  std::vector<std::string> header;
  for (Index c = 0; c < data.cols(); ++c) header.push_back("x" + std::to_string(c));
  err << "synth: " << cfg.model << ", " << data.rows() << " rows x " << data.cols() << " columns, seed " << cfg.seed
      << '\n';
  emit(cfg, out, [&](std::ostream& os) { write_csv(os, data, header); });
  return exit_ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto report = run_suite(cfg.suite, cfg.seed, cfg.trials);
  for (const auto& p : report.properties)
    err << (p.passed ? "PASS " : "FAIL ") << report.suite << '.' << p.name << ": " << p.detail << '\n';
  emit(cfg, out, [&](std::ostream& os) { os << report.to_json().dump(2) << '\n'; });
  return report.passed() ? exit_ok : exit_property_failure;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::insufficient_data:
    case ErrorCode::invalid_data:
    case ErrorCode::io_error:
    case ErrorCode::incompatible_operands: return exit_invalid_input;
    default: return exit_numerical;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"copula-based nonsymmetric dependence measures", "copdep"};
  app.require_subcommand(1);

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.inputs, "input file (CSV, or copula .json)")->required();
    sub->add_option("--output", cfg.output, "output file (default: standard output)");
  };
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--u-cols", cfg.u_cols, "conditioning columns, by name or 0-based index")->delimiter(',');
    sub->add_option("--v-cols", cfg.v_cols, "target columns (default: last column)")->delimiter(',');
  };
  auto add_resolution = [&](CLI::App* sub) {
    sub->add_option("--resolution", cfg.resolution, "grid resolution m on every axis");
    sub->add_flag("--auto-resolution", cfg.auto_resolution, "m = floor(N^(1/(d+1))) clamped to [2,128]");
  };

  auto* estimate = app.add_subcommand("estimate", "fit a checkerboard copula from CSV data");
  add_io(estimate);
  add_split(estimate);
  add_resolution(estimate);

  auto* measure_cmd = app.add_subcommand("measure", "compute a dependence measure");
  add_io(measure_cmd);
  add_split(measure_cmd);
  add_resolution(measure_cmd);
  measure_cmd->add_option("--kind", cfg.kind,
                          "tau_quadratic | tau_alpha | renyi_alpha | renyi_limit | mutual_information | group_tau | "
                          "group_tau_normalized | averaged_dependence (default: by target size)");
  measure_cmd->add_option("--alpha", cfg.alpha, "parameter for tau_alpha and renyi_alpha");
  measure_cmd->add_flag("--normalize", cfg.normalize, "divide the quadratic measure by its Kendall bound");
  measure_cmd->add_option("--quad-order", cfg.quad_order, "Gauss-Legendre order per target cell");
  measure_cmd->add_option("--point-rule", cfg.point_rule, "group evaluation point: center | corner");

  auto* star_cmd = app.add_subcommand("star", "generalized * product of two copula files");
  add_io(star_cmd);
  star_cmd->add_option("--n", cfg.n_coupling, "size of the shared s-block (default: dims(A)/2)");

  auto* synth = app.add_subcommand("synth", "generate a synthetic CSV sample");
  synth->add_option("--output", cfg.output, "output CSV (default: standard output)");
  synth->add_option("--model", cfg.model, "independent | comonotone | mixture | functional | gaussian | square_law");
  synth->add_option("--rows", cfg.rows, "sample size");
  synth->add_option("--dim", cfg.dim, "number of columns");
  synth->add_option("--seed", cfg.seed, "generator seed");
  synth->add_option("--theta", cfg.theta, "mixture weight");
  synth->add_option("--sigma", cfg.sigma, "functional noise level");
  synth->add_option("--function", cfg.function, "sin_plus_square | sum | product | square");
  synth->add_option("--correlation", cfg.correlation, "gaussian correlation: one value or d*d entries")
      ->delimiter(',');

  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("--suite", cfg.suite, "axioms | dpi | equitability | bounds")->required();
  verify->add_option("--seed", cfg.seed, "suite seed");
  verify->add_option("--trials", cfg.trials, "randomized trial count (0: suite default)");
  verify->add_option("--output", cfg.output, "report file (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid_input;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(cfg, out, err);
    if (measure_cmd->parsed()) return cmd_measure(cfg, out, err);
    if (star_cmd->parsed()) return cmd_star(cfg, out, err);
    if (synth->parsed()) return cmd_synth(cfg, out, err);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
  } catch (const Error& e) {
    err << "error " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_invalid_input;
}

}  // namespace copdep
