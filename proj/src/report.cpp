#include "unfold/report.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace unfold {

std::string_view to_string(Format f) { return f == Format::Json ? "json" : "csv"; }

Format parse_format(std::string_view text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  throw Error(ErrorKind::Domain, "format must be json or csv, got '" + std::string(text) + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string escape_json(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(first_.size() * 2, ' ');
}

void JsonWriter::before_value() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (first_.empty()) return;
  if (!first_.back()) out_ += ',';
  first_.back() = false;
  newline();
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  before_value();
  out_ += '"' + escape_json(k) + "\": ";
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  if (!std::isfinite(x)) return value(std::string_view(format_number(x)));
  before_value();
  out_ += format_number(x);
  return *this;
}

JsonWriter& JsonWriter::value(int x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(long x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
  before_value();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool x) {
  before_value();
  out_ += x ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  before_value();
  out_ += '"' + escape_json(s) + '"';
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

std::string table_json(const ConvergenceTable& t) {
  JsonWriter j;
  write_table(j, t);
  return j.str();
}

void write_table(JsonWriter& j, const ConvergenceTable& t) {
  j.begin_object().key("name").value(t.name);
  j.key("info").begin_object();
  for (const auto& [k, v] : t.info) j.key(k).value(v);
  j.end_object();
  j.key("rows").begin_array();
  for (const auto& r : t.rows) {
    j.begin_object();
    j.key("n").value(r.n).key("a_n").value(r.a).key("a_text").value(r.a_text);
    j.key("period").value(r.period).key("w1").value(r.w1).key("residual").value(r.residual);
    for (const auto& [k, v] : r.extras) j.key(k).value(v);
    j.end_object();
  }
  j.end_array();
  j.key("notes").begin_array();
  for (const auto& n : t.notes) j.value(n);
  j.end_array();
  j.end_object();
}

std::string table_csv(const ConvergenceTable& t) {
  std::string out = "n,a_n,period,w1,residual\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.n) + ',' + r.a_text + ',' + std::to_string(r.period) + ',' + format_number(r.w1) + ',' +
           format_number(r.residual) + '\n';
  }
  return out;
}

std::string measure_json(const EmpiricalMeasure& mu) {
  std::string out = "[";
  bool first = true;
  for (const auto& atom : mu.atoms()) {
    out += first ? "\n  [" : ",\n  [";
    out += format_number(atom.position) + ", " + format_number(atom.weight) + "]";
    first = false;
  }
  out += first ? "]\n" : "\n]\n";
  return out;
}

std::string histogram_csv(const DensityHistogram& h) {
  std::string out = "bin_left,bin_right,mass\n";
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    out += format_number(h.bin_edges[i]) + ',' + format_number(h.bin_edges[i + 1]) + ',' + format_number(h.masses[i]) +
           '\n';
  }
  return out;
}

void write_ce(JsonWriter& j, const CEReport& r) {
  j.begin_object();
  j.key("depth").value(r.depth).key("min_exponent").value(r.min_exponent);
  j.key("first_violation");
  if (r.first_violation) {
    j.value(*r.first_violation);
  } else {
    j.null();
  }
  j.key("recurrence_violations").begin_array();
  for (int n : r.recurrence_violations) j.value(n);
  j.end_array();
  j.end_object();
}

void write_image(JsonWriter& j, const WindowImage& img) {
  j.begin_object();
  j.key("n").value(img.n).key("hull_lo").value(img.hull_lo).key("hull_hi").value(img.hull_hi);
  j.key("monotone").value(img.monotone).key("samples").value(img.samples);
  j.end_object();
}

void write_itinerary(JsonWriter& j, const ReturnItinerary& it) {
  j.begin_object();
  j.key("events").begin_array();
  for (const auto& ev : it.events) {
    j.begin_object();
    j.key("time").value(ev.time).key("kind").value(to_string(ev.kind));
    j.key("index");
    if (ev.index) {
      j.begin_object().key("mu").value(ev.index->mu).key("nu").value(ev.index->nu);
      j.key("extended").value(ev.index->extended).end_object();
    } else {
      j.null();
    }
    j.key("hull");
    write_image(j, ev.hull);
    j.end_object();
  }
  j.end_array();
  j.key("bound_periods").begin_array();
  for (const auto& bp : it.bound_periods) j.begin_object().key("start").value(bp.start).key("length").value(bp.length).end_object();
  j.end_array();
  j.end_object();
}

std::size_t write_report(std::string_view content, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
  return content.size();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error(ErrorKind::Io, "hash context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorKind::Io, "SHA-1 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

std::string RunManifest::to_json() const {
  JsonWriter j;
  j.begin_object();
  j.key("command").value(command);
  j.key("argv").begin_array();
  for (const auto& a : argv) j.value(a);
  j.end_array();
  j.key("seed").value(seed).key("precision").value(precision).key("version").value(version);
  j.key("input_hash").value(input_hash);
  j.key("outputs").begin_array();
  for (const auto& o : outputs) j.value(o);
  j.end_array();
  j.key("output_hashes").begin_array();
  for (const auto& h : output_hashes) j.value(h);
  j.end_array();
  j.end_object();
  return j.str();
}

RunManifest RunManifest::parse(std::string_view json) {
  try {
    const auto doc = nlohmann::json::parse(json);
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.argv = doc.at("argv").get<std::vector<std::string>>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.precision = doc.at("precision").get<std::string>();
    m.version = doc.at("version").get<std::string>();
    m.input_hash = doc.value("input_hash", "");
    m.outputs = doc.value("outputs", std::vector<std::string>{});
    m.output_hashes = doc.value("output_hashes", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed manifest: ") + e.what());
  }
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

}  // namespace unfold
