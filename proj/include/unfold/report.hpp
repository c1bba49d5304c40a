#pragma once

// Deterministic JSON/CSV serialization and run manifests. Floating-point
// values are always written with 17 significant digits.

#include "unfold/bc_diagnostics.hpp"
#include "unfold/experiments.hpp"
#include "unfold/measures.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace unfold {

enum class Format { Json, Csv };
std::string_view to_string(Format f);
/// "json" or "csv"; throws Error(Domain) otherwise.
Format parse_format(std::string_view text);

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

/// Streaming writer with two-space indentation. Non-finite numbers become
/// strings since JSON has no literal for them.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double x);
  JsonWriter& value(int x);
  JsonWriter& value(long x);
  JsonWriter& value(std::uint64_t x);
  JsonWriter& value(bool x);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& null();

  /// The document followed by a newline.
  std::string str() const { return out_ + "\n"; }

 private:
  void before_value();
  void newline();

  std::string out_;
  std::vector<bool> first_;  ///< per open container: no element written yet
  bool after_key_ = false;
};

std::string escape_json(std::string_view s);

std::string table_json(const ConvergenceTable& t);
void write_table(JsonWriter& j, const ConvergenceTable& t);
/// Header "n,a_n,period,w1,residual" and one line per row.
std::string table_csv(const ConvergenceTable& t);

/// Array of [position, weight] pairs.
std::string measure_json(const EmpiricalMeasure& mu);
/// Header "bin_left,bin_right,mass".
std::string histogram_csv(const DensityHistogram& h);

void write_ce(JsonWriter& j, const CEReport& r);
void write_itinerary(JsonWriter& j, const ReturnItinerary& it);
void write_image(JsonWriter& j, const WindowImage& img);

/// Writes content to path, creating parent directories. Returns bytes
/// written; throws Error(Io) on failure.
std::size_t write_report(std::string_view content, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(std::string_view content);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  ///< arguments after the program name
  std::uint64_t seed = 0;
  std::string precision;
  std::string version;
  std::string input_hash;  ///< git blob hash of the canonical argument list
  std::vector<std::string> outputs;
  std::vector<std::string> output_hashes;

  std::string to_json() const;
  static RunManifest parse(std::string_view json);
};

/// The manifest file that accompanies an output path.
std::filesystem::path manifest_path(const std::filesystem::path& output);

}  // namespace unfold
