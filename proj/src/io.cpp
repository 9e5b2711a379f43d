#include "copdep/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace copdep {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(trim(field));
  return out;
}

std::optional<double> parse_number(const std::string& token) {
  if (token.empty()) return std::nullopt;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

Table parse_csv(std::istream& in) {
  Table table;
  std::vector<std::vector<double>> rows;
  std::string line;
  Index width = -1;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (width < 0) {
      width = static_cast<Index>(fields.size());
      bool numeric = true;
      for (const auto& f : fields) numeric = numeric && parse_number(f).has_value();
      if (!numeric) {
        table.header = fields;
        continue;
      }
    }
    if (static_cast<Index>(fields.size()) != width)
      fail(ErrorCode::invalid_data, "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                        " fields, expected " + std::to_string(width));
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_number(fields[c]);
      if (!v)
        fail(ErrorCode::invalid_data, "non-numeric value '" + fields[c] + "' in column " + std::to_string(c) +
                                          " on line " + std::to_string(line_no));
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (width < 0) fail(ErrorCode::insufficient_data, "empty CSV input");
  table.values.resize(static_cast<Index>(rows.size()), width);
  for (Index r = 0; r < static_cast<Index>(rows.size()); ++r)
    for (Index c = 0; c < width; ++c) table.values(r, c) = rows[r][c];
  return table;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot read '" + path + "'");
  return parse_csv(in);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  if (!header.empty()) {
    require(static_cast<Index>(header.size()) == values.cols(), "header width does not match data");
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  char buf[64];
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), values(r, c));
      if (c) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

std::vector<Index> select_columns(const Table& table, const std::vector<std::string>& selectors) {
  std::vector<Index> out;
  for (const auto& sel : selectors) {
    auto it = std::find(table.header.begin(), table.header.end(), sel);
    if (it != table.header.end()) {
      out.push_back(static_cast<Index>(it - table.header.begin()));
      continue;
    }
    Index idx = -1;
    const auto [ptr, ec] = std::from_chars(sel.data(), sel.data() + sel.size(), idx);
    if (ec != std::errc() || ptr != sel.data() + sel.size() || idx < 0 || idx >= table.columns())
      fail(ErrorCode::invalid_argument, "unknown column '" + sel + "'");
    out.push_back(idx);
  }
  return out;
}

nlohmann::json copula_to_json(const CheckerboardCopula& copula) {
  nlohmann::json doc;
  doc["dims"] = copula.dims();
  doc["resolutions"] = copula.resolutions();
  const auto& mass = copula.mass();
  doc["mass"] = std::vector<double>(mass.data(), mass.data() + mass.size());
  return doc;
}

CheckerboardCopula copula_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("resolutions") || !doc.contains("mass"))
    fail(ErrorCode::invalid_data, "copula JSON needs keys dims, resolutions, mass");
  std::vector<Index> res;
  std::vector<double> mass;
  Index dims = 0;
  try {
    dims = doc.at("dims").get<Index>();
    res = doc.at("resolutions").get<std::vector<Index>>();
    mass = doc.at("mass").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_data, std::string("malformed copula JSON: ") + e.what());
  }
  if (dims != static_cast<Index>(res.size()))
    fail(ErrorCode::invalid_data, "dims does not match the number of resolutions");
  Index total = 1;
  for (Index m : res) {
    if (m < 1) fail(ErrorCode::invalid_data, "resolutions must be >= 1");
    total *= m;
  }
  if (static_cast<Index>(mass.size()) != total)
    fail(ErrorCode::invalid_data, "mass length " + std::to_string(mass.size()) + " != product of resolutions " +
                                      std::to_string(total));
  CheckerboardCopula copula(std::move(res), Eigen::Map<const Eigen::VectorXd>(mass.data(), total));
  const auto report = validate(copula);
  if (!report.passed) fail(ErrorCode::validation_failed, report.summary());
  return copula;
}

CheckerboardCopula read_copula(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot read '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_data, "'" + path + "' is not valid JSON: " + e.what());
  }
  return copula_from_json(doc);
}

void write_copula(const std::string& path, const CheckerboardCopula& copula) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
  out << copula_to_json(copula).dump() << '\n';
}

nlohmann::json report_to_json(const MeasureReport& report) {
  auto opt = [](const auto& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json doc;
  doc["kind"] = report.kind.name();
  doc["alpha"] = opt(report.kind.alpha());
  doc["value"] = report.value;
  doc["upper_bound"] = opt(report.upper_bound);
  doc["normalizer"] = opt(report.normalizer);
  doc["u_axes"] = report.split.u_axes;
  doc["v_axes"] = report.split.v_axes;
  doc["resolutions"] = report.resolutions;
  doc["sample_size"] = opt(report.sample_size);
  if (report.normalized_value) doc["normalized_value"] = *report.normalized_value;
  if (!report.diagnostics.empty()) doc["diagnostics"] = report.diagnostics;
  return doc;
}

}  // namespace copdep
