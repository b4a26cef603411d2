#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tlrisk/io/canonical_json.hpp"
#include "tlrisk/io/csv.hpp"
#include "tlrisk/io/report.hpp"
#include "tlrisk/io/task_spec.hpp"
#include "tlrisk/signature.hpp"

using namespace tlrisk;
using namespace tlrisk::io;

TEST(CanonicalJson, NumbersAndLayout) {
  EXPECT_EQ(format_double(1.0), "1.0");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, format_double(NAN));
  for (double v : {0.3, 1.0 / 3.0, 6.02214076e23, -1e-17, 0.09000000000000002})
    EXPECT_EQ(std::stod(format_double(v)), v);

  const Json doc = Json::parse(R"({"b": [1, 2.5, "x"], "a": {"z": true, "y": null}, "c": [[1.0], {"k": 3}]})");
  const std::string text = to_canonical(doc);
  EXPECT_EQ(text,
            "{\n"
            "  \"a\": {\n"
            "    \"y\": null,\n"
            "    \"z\": true\n"
            "  },\n"
            "  \"b\": [1, 2.5, \"x\"],\n"
            "  \"c\": [\n"
            "    [1.0],\n"
            "    {\n"
            "      \"k\": 3\n"
            "    }\n"
            "  ]\n"
            "}\n");
  EXPECT_EQ(to_canonical(parse_json(text, "roundtrip")), text);
  EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_json("{\"a\": ", "broken"));
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, to_canonical(Json{{"x", INFINITY}}));
  EXPECT_FALSE(all_finite(Json{{"x", Json::array({1.0, NAN})}}));
}

TEST(Iso8601, ParseAndFormat) {
  EXPECT_EQ(parse_iso8601("1970-01-01"), 0);
  EXPECT_EQ(parse_iso8601("2020-01-01"), tlrisk::testing::kEpoch2020);
  EXPECT_EQ(parse_iso8601("2020-02-29T12:30"), parse_iso8601("2020-02-29") + 12 * 3600 + 30 * 60);
  EXPECT_EQ(parse_iso8601("2020-02-29 12:30:15"), parse_iso8601("2020-02-29") + 45015);
  EXPECT_EQ(format_iso8601(parse_iso8601("2021-07-04T09:05:01")), "2021-07-04T09:05:01");
  EXPECT_EQ(format_iso8601(parse_iso8601("1999-12-31")), "1999-12-31");
  for (const char* bad : {"2020-13-01", "2020-02-30", "20-01-01", "2020-01-01T25:00", "2020/01/01", "2020-01-01x"})
    EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_iso8601(bad)) << bad;
}

TEST(Csv, PlainAndDated) {
  const PlainCsv p = parse_plain_csv("a,b\n1,2\n3,4\n\n", "mem");
  EXPECT_EQ(p.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(p.rows.size(), 2u);
  EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_plain_csv("a,b\n1\n", "mem"));
  EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_plain_csv("", "mem"));
  EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_plain_csv("a,b\n1,2\n\n3,4\n", "mem"));

  const DatedTable t = parse_dated_csv(
      "date,close,volume\n2020-01-01,10,100\n2020-01-02,11,90\n2020-01-03,12.5,80\n2020-01-06,12,85\n", "mem");
  EXPECT_EQ(t.rows(), 4);
  EXPECT_EQ(t.period_seconds, 86400);
  EXPECT_EQ(period_label(t.period_seconds), "1d");
  EXPECT_EQ(period_label(300), "5m");
  EXPECT_EQ(t.column("volume"), 1);
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, t.column("open"));
  EXPECT_EQ(t.first_at_or_after(parse_iso8601("2020-01-04")), 3);
  EXPECT_EQ(t.values(2, 0), 12.5);
  const AssetSeries a = asset_from_table(t, "x");
  EXPECT_EQ(a.close.size(), 4);

  EXPECT_THROWS_KIND(ErrorKind::ParseError,
                     parse_dated_csv("date,close\n2020-01-02,1\n2020-01-01,2\n", "mem"));
  EXPECT_THROWS_KIND(ErrorKind::ParseError, parse_dated_csv("date,close\n2020-01-01,1\n2020-01-02,abc\n", "mem"));
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_dated_csv("when,close\n2020-01-01,1\n2020-01-02,2\n", "mem"));
  EXPECT_THROWS_KIND(ErrorKind::IoError, read_dated_csv("/nonexistent/file.csv"));
}

TEST(Csv, SignatureFeatureHeader) {
  Matrix series(4, 1);
  series << 0.0, 1.0, 0.5, 2.0;
  const Matrix f = windowed_signature_features(series, 3, 2);
  const std::string csv = signature_features_csv(f, 2, 2);
  const PlainCsv back = parse_plain_csv(csv, "features");
  EXPECT_EQ(back.header, signature_labels(2, 2));
  ASSERT_EQ(back.rows.size(), 2u);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < back.header.size(); ++c)
      EXPECT_EQ(std::stod(back.rows[r][c]), f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  EXPECT_THROWS_KIND(ErrorKind::DimensionMismatch, matrix_to_csv({"a"}, Matrix::Zero(1, 2)));
}

namespace {

Json gaussian_doc() {
  return Json::parse(R"({
    "kind": "gaussian", "version": 1, "case": "output_aug",
    "source": {"dim_x": 1, "dim_y": 1, "mean": [0.0, 0.1], "cov": [[1.0, 0.3], [0.3, 1.0]]},
    "target": {"dim_x": 1, "dim_y": 2, "mean": [0.0, 0.1, -0.2],
               "cov": [[1.0, 0.3, 0.2], [0.3, 1.0, 0.1], [0.2, 0.1, 1.0]]},
    "init_model": {"weight": [[0.4]], "intercept": [0.05]}
  })");
}

}  // namespace

TEST(TaskSpec, RoundTripsEveryKind) {
  const std::vector<Json> docs{
      gaussian_doc(),
      Json::parse(R"({"kind": "regression", "version": 1, "sources": ["a.csv", "b.csv"], "target": "t.csv",
                      "split_date": "2021-01-01", "lags": [3, 5], "orders": [1, 2], "lambda_source": 2.0,
                      "lambda_target": 4.0, "lambda_direct": 0.5})"),
      Json::parse(R"({"kind": "portfolio", "version": 1, "source": "s.csv", "target": "t.csv",
                      "split_date": "2021-01-01", "penalty": 0.3, "seed": 7})"),
  };
  for (const Json& d : docs) {
    const Json once = to_json(parse_task_spec(d));
    const Json twice = to_json(parse_task_spec(once));
    EXPECT_EQ(to_canonical(once), to_canonical(twice));
    EXPECT_EQ(once, d) << to_canonical(once);
  }
}

TEST(TaskSpec, RejectsUnknownAndMalformedFields) {
  Json d = gaussian_doc();
  d["extra"] = 1;
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_task_spec(d));
  d = gaussian_doc();
  d["source"]["colour"] = "red";
  try {
    parse_task_spec(d);
    FAIL() << "accepted an unknown nested field";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("$.source"), std::string::npos) << e.what();
  }
  d = gaussian_doc();
  d["version"] = 2;
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_task_spec(d));
  d = gaussian_doc();
  d["case"] = "basic";
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_task_spec(d));
  d = gaussian_doc();
  d["target"]["cov"][0][1] = 0.9;
  EXPECT_THROWS_KIND(ErrorKind::NotSymmetric, parse_task_spec(d));
  d = gaussian_doc();
  d.erase("init_model");
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_task_spec(d));
  d["init_model"] = "neutralizing";
  EXPECT_FALSE(std::get<GaussianSpec>(parse_task_spec(d)).init_model.has_value());
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, parse_task_spec(Json::parse(R"({"kind": "other", "version": 1})")));
}

TEST(ReportSchema, SubsetValidator) {
  const Json schema = Json::parse(R"({
    "$defs": {"pos": {"type": "number", "minimum": 0}},
    "type": "object", "required": ["a"], "additionalProperties": false,
    "properties": {
      "a": {"$ref": "#/$defs/pos"},
      "b": {"type": "array", "items": {"enum": ["x", "y"]}},
      "c": {"oneOf": [{"type": "string"}, {"type": "integer"}]},
      "d": {"const": 1}
    }
  })");
  EXPECT_TRUE(schema_violations(Json{{"a", 0.5}, {"b", {"x"}}, {"c", 3}, {"d", 1}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"b", {"x"}}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"a", -1.0}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"a", 1.0}, {"b", {"z"}}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"a", 1.0}, {"c", 2.5}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"a", 1.0}, {"d", 2}}, schema).empty());
  EXPECT_FALSE(schema_violations(Json{{"a", 1.0}, {"e", 0}}, schema).empty());
  EXPECT_TRUE(report_schema().contains("$defs"));
}

TEST(ReportSchema, RejectsMismatchedResult) {
  Json r = make_report("office-table", Json::object(), Json{{"rows", Json::array()}}, 0, 1);
  EXPECT_THROWS_KIND(ErrorKind::SchemaError, validate_report(r));
}
