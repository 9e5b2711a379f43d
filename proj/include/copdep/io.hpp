#ifndef COPDEP_IO_HPP
#define COPDEP_IO_HPP

#include "copdep/measures.hpp"

#include <iosfwd>
#include <json.hpp>

namespace copdep {

/// Numeric CSV table. The first row is a header when any of its tokens is
/// not a number.
struct Table {
  std::vector<std::string> header;  // empty when the file has none
  Eigen::MatrixXd values;           // rows x columns

  Index columns() const { return values.cols(); }
  std::string column_name(Index c) const { return header.empty() ? std::to_string(c) : header[c]; }
};

Table parse_csv(std::istream& in);
Table read_csv(const std::string& path);
void write_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& header = {});

/// Resolves column selectors: a header name, else a 0-based index.
std::vector<Index> select_columns(const Table& table, const std::vector<std::string>& selectors);

nlohmann::json copula_to_json(const CheckerboardCopula& copula);
/// Rejects mismatched mass length and copulas that fail validate.
CheckerboardCopula copula_from_json(const nlohmann::json& doc);
CheckerboardCopula read_copula(const std::string& path);
void write_copula(const std::string& path, const CheckerboardCopula& copula);

nlohmann::json report_to_json(const MeasureReport& report);

}  // namespace copdep

#endif  // COPDEP_IO_HPP
