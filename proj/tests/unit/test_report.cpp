#include "unfold/report.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

using namespace unfold;

TEST(Numbers, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2), "2");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(parse_format("csv"), Format::Csv);
  EXPECT_THROW(parse_format("xml"), Error);
}

TEST(JsonWriter, ProducesParseableDocuments) {
  JsonWriter j;
  j.begin_object();
  j.key("a").value(1.25).key("s").value("q\"uote\n");
  j.key("list").begin_array().value(1).value(true).null().end_array();
  j.key("empty").begin_object().end_object();
  j.key("inf").value(std::numeric_limits<double>::infinity());
  j.end_object();
  const auto doc = nlohmann::json::parse(j.str());
  EXPECT_EQ(doc["a"].get<double>(), 1.25);
  EXPECT_EQ(doc["s"].get<std::string>(), "q\"uote\n");
  EXPECT_EQ(doc["list"].size(), 3u);
  EXPECT_TRUE(doc["list"][2].is_null());
  EXPECT_TRUE(doc["empty"].empty());
  EXPECT_EQ(doc["inf"].get<std::string>(), "inf");
}

TEST(Tables, JsonAndCsvAgree) {
  ConvergenceTable t;
  t.name = "demo";
  t.info = {{"a", "2"}};
  t.rows.push_back({8, 1.99, "1.99", 8, 0.5, 1e-16, {{"extra", 3}}});
  t.notes.push_back("n=9: NoRootInBracket");
  const auto doc = nlohmann::json::parse(table_json(t));
  EXPECT_EQ(doc["rows"][0]["period"].get<int>(), 8);
  EXPECT_EQ(doc["rows"][0]["extra"].get<double>(), 3);
  EXPECT_EQ(doc["notes"][0].get<std::string>(), "n=9: NoRootInBracket");
  EXPECT_EQ(table_csv(t), "n,a_n,period,w1,residual\n8,1.99,8,0.5,9.9999999999999998e-17\n");
}

TEST(Measures, JsonPairsAndHistogramCsv) {
  const auto mu = EmpiricalMeasure::from_atoms({{-0.5, 0.5}, {0.5, 0.5}});
  const auto doc = nlohmann::json::parse(measure_json(mu));
  ASSERT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[1][0].get<double>(), 0.5);
  EXPECT_EQ(histogram_csv(histogram(mu, 2)), "bin_left,bin_right,mass\n-1,0,0.5\n0,1,0.5\n");
}

TEST(Hashing, MatchesGitBlobIds) {
  // `printf 'hello\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Manifest, RoundTrips) {
  RunManifest m;
  m.command = "thm-d";
  m.argv = {"--seed", "3", "thm-d"};
  m.seed = 3;
  m.precision = "double";
  m.version = "0.3.0";
  m.input_hash = git_blob_hash("x");
  m.outputs = {"out.json"};
  m.output_hashes = {git_blob_hash("y")};
  const auto back = RunManifest::parse(m.to_json());
  EXPECT_EQ(back.argv, m.argv);
  EXPECT_EQ(back.seed, 3u);
  EXPECT_EQ(back.output_hashes, m.output_hashes);
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_THROW(RunManifest::parse("{not json"), Error);
  EXPECT_EQ(manifest_path("dir/out.csv").string(), "dir/out.csv.manifest.json");
}

TEST(Files, WriteCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "unfold_report_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "f.txt";
  EXPECT_EQ(write_report("abc", path), 3u);
  EXPECT_EQ(read_file(path), "abc");
  EXPECT_THROW(read_file(dir / "missing"), Error);
  std::filesystem::remove_all(dir);
}
