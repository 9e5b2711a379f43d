#include "copdep/io.hpp"
#include "copdep/generators.hpp"
#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace copdep {
namespace {

using testing::error_code_of;

Table parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string temp_path(const std::string& name) {
  const char* dir = std::getenv("COPDEP_TEST_DATA");
  return (std::filesystem::path(dir ? dir : ".") / name).string();
}

TEST(Csv, HeaderDetection) {
  const auto with = parse("x,y\n1,2\n3,4\n");
  ASSERT_EQ(with.header.size(), 2u);
  EXPECT_EQ(with.header[1], "y");
  EXPECT_EQ(with.values.rows(), 2);
  EXPECT_EQ(with.values(1, 0), 3.0);
  EXPECT_EQ(with.column_name(0), "x");

  const auto without = parse("1,2\n3,4\n");
  EXPECT_TRUE(without.header.empty());
  EXPECT_EQ(without.values.rows(), 2);
  EXPECT_EQ(without.column_name(1), "1");

  const auto spaced = parse(" 1.5 , -2e-3\r\n\n+3,4\n");
  EXPECT_EQ(spaced.values(0, 0), 1.5);
  EXPECT_EQ(spaced.values(0, 1), -2e-3);
  EXPECT_EQ(spaced.values(1, 0), 3.0);
}

TEST(Csv, Errors) {
  EXPECT_EQ(error_code_of([] { parse("a,b\n1,2\n3\n"); }), ErrorCode::invalid_data);
  EXPECT_EQ(error_code_of([] { parse("a,b\n1,2\n3,oops\n"); }), ErrorCode::invalid_data);
  EXPECT_EQ(error_code_of([] { parse(""); }), ErrorCode::insufficient_data);
  EXPECT_EQ(error_code_of([] { read_csv(temp_path("does-not-exist.csv")); }), ErrorCode::io_error);
  try {
    parse("a,b\n1,2\n3,x\n");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Csv, HeaderOnlyGivesNoRows) {
  EXPECT_EQ(parse("a,b\n").values.rows(), 0);
}

TEST(Csv, WriteRoundTripsExactly) {
  SynthModel model{SynthTag::gaussian, 2, 3};
  model.correlation = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd data = generate(model, 100);
  std::ostringstream out;
  write_csv(out, data, {"a", "b"});
  const auto back = parse(out.str());
  EXPECT_EQ(back.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ((back.values - data).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Csv, SelectColumns) {
  const auto t = parse("x,y,z\n1,2,3\n");
  EXPECT_EQ(select_columns(t, {"z", "0"}), (std::vector<Index>{2, 0}));
  EXPECT_EQ(error_code_of([&] { select_columns(t, {"w"}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(error_code_of([&] { select_columns(t, {"3"}); }), ErrorCode::invalid_argument);
}

TEST(CopulaJson, RoundTrip) {
  const auto c = random_copula({3, 4, 2}, 8);
  const auto doc = copula_to_json(c);
  EXPECT_EQ(doc["dims"], 3);
  EXPECT_TRUE(copula_from_json(nlohmann::json::parse(doc.dump())) == c);
  const auto path = temp_path("roundtrip.json");
  write_copula(path, c);
  EXPECT_TRUE(read_copula(path) == c);
  std::remove(path.c_str());
}

TEST(CopulaJson, Rejections) {
  auto doc = copula_to_json(make_independence({2, 2}));
  auto bad_length = doc;
  bad_length["mass"] = {0.25, 0.25, 0.5};
  EXPECT_EQ(error_code_of([&] { copula_from_json(bad_length); }), ErrorCode::invalid_data);
  auto bad_dims = doc;
  bad_dims["dims"] = 3;
  EXPECT_EQ(error_code_of([&] { copula_from_json(bad_dims); }), ErrorCode::invalid_data);
  auto not_copula = doc;
  not_copula["mass"] = {0.5, 0.0, 0.25, 0.25};
  EXPECT_EQ(error_code_of([&] { copula_from_json(not_copula); }), ErrorCode::validation_failed);
  EXPECT_EQ(error_code_of([] { copula_from_json(nlohmann::json::parse("{\"dims\":2}")); }), ErrorCode::invalid_data);
  EXPECT_EQ(error_code_of([] { copula_from_json(nlohmann::json::parse("{\"dims\":2,\"resolutions\":\"x\",\"mass\":[]}")); }),
            ErrorCode::invalid_data);
  const auto path = temp_path("broken.json");
  std::ofstream(path) << "{ not json";
  EXPECT_EQ(error_code_of([&] { read_copula(path); }), ErrorCode::invalid_data);
  std::remove(path.c_str());
}

TEST(ReportJson, Keys) {
  const auto c = make_independence({4, 4, 4});
  auto report = group_tau(c, GroupSplit({0}, {1, 2}));
  report.sample_size = 100;
  const auto doc = report_to_json(report);
  for (const char* key : {"kind", "alpha", "value", "upper_bound", "normalizer", "u_axes", "v_axes", "resolutions",
                          "sample_size"})
    EXPECT_TRUE(doc.contains(key)) << key;
  EXPECT_EQ(doc["kind"], "group_tau");
  EXPECT_TRUE(doc["alpha"].is_null());
  EXPECT_TRUE(doc["upper_bound"].is_number());
  EXPECT_EQ(doc["v_axes"], (std::vector<Index>{1, 2}));
  EXPECT_EQ(doc["sample_size"], 100);

  const auto alpha = report_to_json(tau_alpha(make_comonotone(2, 4), GroupSplit({0}, {1}), 1.5));
  EXPECT_EQ(alpha["alpha"], 1.5);
}

}  // namespace
}  // namespace copdep
