#include "curveflow/cli_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "curveflow/error.hpp"
#include "curveflow/text.hpp"

namespace curveflow {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- config text

struct Value {
  enum class Kind { String, Number, Bool, Array, Table };
  Kind kind = Kind::Number;
  std::string str;
  double num = 0.0;
  bool flag = false;
  std::vector<double> arr;
  std::vector<std::pair<std::string, Value>> table;
};

std::string line_prefix(int line) { return "line " + std::to_string(line) + ": "; }

class LineReader {
 public:
  LineReader(std::string_view s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Parse, line_prefix(line_) + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string key() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '_' || s_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  Value value() {
    const char c = peek();
    Value v;
    if (c == '"') {
      v.kind = Value::Kind::String;
      v.str = string_literal();
    } else if (c == '[') {
      v.kind = Value::Kind::Array;
      ++pos_;
      if (peek() != ']') {
        while (true) {
          v.arr.push_back(number());
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(']');
    } else if (c == '{') {
      v.kind = Value::Kind::Table;
      ++pos_;
      if (peek() != '}') {
        while (true) {
          std::string k = key();
          expect('=');
          v.table.emplace_back(std::move(k), value());
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect('}');
    } else if (s_.substr(pos_).starts_with("true") || s_.substr(pos_).starts_with("false")) {
      v.kind = Value::Kind::Bool;
      v.flag = s_[pos_] == 't';
      pos_ += v.flag ? 4 : 5;
    } else {
      v.num = number();
    }
    return v;
  }

 private:
  std::string string_literal() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        c = s_[pos_++];
        if (c == 'n') c = '\n';
        else if (c == 't') c = '\t';
        else if (c != '"' && c != '\\') fail(std::string("unknown escape '\\") + c + "'");
      }
      out += c;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  double number() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::string_view(",]} \t#").find(s_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    const auto token = s_.substr(start, pos_ - start);
    const auto parsed = text::parse_number(token);
    if (!parsed || !std::isfinite(*parsed)) fail("bad number '" + std::string(token) + "'");
    return *parsed;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::String: return "a string";
    case Value::Kind::Number: return "a number";
    case Value::Kind::Bool: return "a boolean";
    case Value::Kind::Array: return "a number array";
    case Value::Kind::Table: return "an inline table";
  }
  return "a value";
}

class ConfigBuilder {
 public:
  void apply(const std::string& section, const std::string& key, const Value& v, int line) {
    const std::string field = section.empty() ? key : section + "." + key;
    if (!seen_.emplace(field, line).second) {
      fail(line, "duplicate field '" + field + "'");
    }
    if (section.empty()) {
      top_level(key, v, line);
    } else if (section == "initial") {
      initial(key, v, line);
    } else if (section == "controls") {
      controls(key, v, line);
    } else {
      outputs(key, v, line);
    }
  }

  RunConfig finish() {
    if (!flow_) throw Error(ErrorCode::Parse, "missing field 'flow'");
    config_.flow = *flow_;
    if (sources_.empty()) throw Error(ErrorCode::Parse, "missing initial curve source");
    if (sources_.size() > 1) {
      fail(sources_[1].second, "more than one initial source ('" + sources_[0].first + "' and '" +
                                   sources_[1].first + "')");
    }
    auto& init = config_.initial;
    if (init.kind == InitialKind::Inline) {
      if (!has_mean_) {
        fail(sources_[0].second, "malformed coefficient record: field 'mean' is required");
      }
      const std::size_t n = std::max<std::size_t>({2, init.cos.size(), init.sin.size()});
      init.cos.resize(n, 0.0);
      init.sin.resize(n, 0.0);
      if (init.truncation && *init.truncation < n) {
        fail(seen_.at("initial.truncation"), "field 'truncation' is below the record length " +
                                                 std::to_string(n));
      }
    }
    try {
      config_.controls.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, std::string("[controls]: ") + e.what());
    }
    return config_;
  }

 private:
  [[noreturn]] static void fail(int line, const std::string& msg) {
    throw Error(ErrorCode::Parse, line_prefix(line) + msg);
  }

  static void require(const Value& v, Value::Kind kind, const std::string& field, int line) {
    if (v.kind != kind) {
      fail(line, "field '" + field + "' must be " + kind_name(kind) + ", got " + kind_name(v.kind));
    }
  }

  static std::size_t integer(const Value& v, const std::string& field, int line, std::size_t min) {
    require(v, Value::Kind::Number, field, line);
    if (std::floor(v.num) != v.num || v.num < static_cast<double>(min) || v.num > 1e9) {
      fail(line, "field '" + field + "' must be an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(v.num);
  }

  void add_source(const std::string& name, InitialKind kind, int line) {
    // mean/cos/sin together form one record.
    for (const auto& s : sources_) {
      if (s.first == name) return;
    }
    sources_.emplace_back(name, line);
    if (sources_.size() == 1) config_.initial.kind = kind;
  }

  void top_level(const std::string& key, const Value& v, int line) {
    if (key == "flow") {
      require(v, Value::Kind::String, key, line);
      try {
        flow_ = parse_nonlocal_term(v.str);
      } catch (const Error& e) {
        fail(line, "field 'flow': " + std::string(e.what()));
      }
    } else if (key == "frame_count") {
      config_.frame_count = integer(v, key, line, 2);
    } else if (key == "initial") {
      require(v, Value::Kind::Table, key, line);
      for (const auto& [k, inner] : v.table) apply("initial", k, inner, line);
    } else {
      fail(line, "unknown field '" + key + "'");
    }
  }

  void initial(const std::string& key, const Value& v, int line) {
    const std::string field = "initial." + key;
    auto& init = config_.initial;
    if (key == "mean") {
      require(v, Value::Kind::Number, field, line);
      init.mean = v.num;
      has_mean_ = true;
      add_source("coefficient record", InitialKind::Inline, line);
    } else if (key == "cos" || key == "sin") {
      if (v.kind != Value::Kind::Array) {
        fail(line, "malformed coefficient record: field '" + field + "' must be a number array");
      }
      (key == "cos" ? init.cos : init.sin) = v.arr;
      add_source("coefficient record", InitialKind::Inline, line);
    } else if (key == "samples" || key == "polygon" || key == "coefficients") {
      require(v, Value::Kind::String, field, line);
      if (v.str.empty()) fail(line, "field '" + field + "' is empty");
      init.path = v.str;
      add_source(key, key == "samples"   ? InitialKind::Samples
                      : key == "polygon" ? InitialKind::Polygon
                                         : InitialKind::Coefficients,
                 line);
    } else if (key == "truncation") {
      init.truncation = integer(v, field, line, 2);
    } else if (key == "smoothing") {
      require(v, Value::Kind::String, field, line);
      if (v.str == "none") init.smoothing = Smoothing::None;
      else if (v.str == "fejer") init.smoothing = Smoothing::Fejer;
      else fail(line, "field '" + field + "' must be \"none\" or \"fejer\"");
    } else {
      fail(line, "unknown field '" + field + "'");
    }
  }

  void controls(const std::string& key, const Value& v, int line) {
    auto& c = config_.controls;
    const std::map<std::string, double*> fields = {
        {"rel_tol", &c.rel_tol},
        {"abs_tol", &c.abs_tol},
        {"t_max", &c.t_max},
        {"length_blowup", &c.length_blowup},
        {"length_vanish", &c.length_vanish},
        {"area_vanish", &c.area_vanish},
        {"singularity_eps", &c.singularity_eps},
        {"sample_interval", &c.sample_interval},
    };
    const auto it = fields.find(key);
    if (it == fields.end()) fail(line, "unknown field 'controls." + key + "'");
    require(v, Value::Kind::Number, "controls." + key, line);
    *it->second = v.num;
  }

  void outputs(const std::string& key, const Value& v, int line) {
    auto& o = config_.outputs;
    if (key == "frame_points") {
      o.frame_points = integer(v, "outputs." + key, line, 3);
      return;
    }
    const std::map<std::string, std::string*> fields = {
        {"dir", &o.dir},         {"timeseries", &o.timeseries}, {"trajectory", &o.trajectory},
        {"frames", &o.frames},   {"svg", &o.svg},               {"reports", &o.reports},
    };
    const auto it = fields.find(key);
    if (it == fields.end()) fail(line, "unknown field 'outputs." + key + "'");
    require(v, Value::Kind::String, "outputs." + key, line);
    *it->second = v.str;
  }

  RunConfig config_;
  std::optional<NonlocalTerm> flow_;
  bool has_mean_ = false;
  std::vector<std::pair<std::string, int>> sources_;
  std::map<std::string, int> seen_;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

std::string number_array(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += text::format_number(values[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------- files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct NumericRow {
  int line = 0;
  std::vector<double> fields;
};

// Comma- or whitespace-separated numeric rows; '#' starts a comment. A first
// row that is not numeric is taken as a header and skipped.
std::vector<NumericRow> read_numeric_rows(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<NumericRow> rows;
  int line_no = 0;
  bool first_content = true;
  for (auto raw : text::split(content, '\n')) {
    ++line_no;
    std::string line(raw.substr(0, raw.find('#')));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream tokens(line);
    NumericRow row{line_no, {}};
    std::string tok;
    bool header = false;
    while (tokens >> tok) {
      const auto v = text::parse_number(tok);
      if (!v || !std::isfinite(*v)) {
        if (first_content) {
          header = true;
          break;
        }
        throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) +
                                          ": bad number '" + tok + "'");
      }
      row.fields.push_back(*v);
    }
    if (header) {
      first_content = false;
      continue;
    }
    if (row.fields.empty()) continue;
    first_content = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

SupportSpectrum spectrum_from_record(double mean, std::vector<double> c, std::vector<double> s) {
  const std::size_t n = std::max<std::size_t>({2, c.size(), s.size()});
  c.resize(n, 0.0);
  s.resize(n, 0.0);
  return SupportSpectrum(mean, std::move(c), std::move(s));
}

// ---------------------------------------------------------------- writers

std::ofstream open_output(const fs::path& path) {
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::Io, e.what());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

fs::path resolve(const fs::path& dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : dir / path;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

double state_ipr(const FlowState& state, double ipd) { return 1.0 + ipd / (4.0 * kPi * state.area); }

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v == 0.0 ? 0.0 : v);
  return buf;
}

SupportSpectrum apply_axis_value(const SupportSpectrum& base, const std::string& key, double v) {
  if (key == "scale") return base.scaled(v);
  if (key == "mean") return base.with_mean(v);
  const std::size_t n = static_cast<std::size_t>(std::stoul(key.substr(3)));
  const SupportSpectrum padded = base.padded(n);
  std::vector<double> c(padded.cos_coeffs().begin(), padded.cos_coeffs().end());
  std::vector<double> s(padded.sin_coeffs().begin(), padded.sin_coeffs().end());
  (key.starts_with("cos") ? c : s)[n - 1] = v;
  return SupportSpectrum(padded.mean(), std::move(c), std::move(s));
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig parse_config(std::string_view text) {
  ConfigBuilder builder;
  std::string section;
  int line_no = 0;
  for (auto raw : text::split(text, '\n')) {
    ++line_no;
    LineReader reader(raw, line_no);
    if (reader.at_end()) continue;
    if (reader.peek() == '[') {
      reader.expect('[');
      section = reader.key();
      reader.expect(']');
      if (!reader.at_end()) reader.fail("trailing text after section header");
      if (section != "initial" && section != "controls" && section != "outputs") {
        reader.fail("unknown section [" + section + "]");
      }
      continue;
    }
    const std::string key = reader.key();
    reader.expect('=');
    const Value v = reader.value();
    if (!reader.at_end()) reader.fail("trailing text after value of '" + key + "'");
    builder.apply(section, key, v, line_no);
  }
  return builder.finish();
}

RunConfig load_config(const fs::path& path) {
  RunConfig config = parse_config(read_file(path));
  auto& init = config.initial;
  if (init.kind != InitialKind::Inline && fs::path(init.path).is_relative()) {
    init.path = (path.parent_path() / init.path).lexically_normal().string();
  }
  return config;
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream out;
  out << "flow = " << quote(to_string(config.flow)) << '\n';
  out << "frame_count = " << config.frame_count << "\n\n";

  const auto& init = config.initial;
  out << "[initial]\n";
  switch (init.kind) {
    case InitialKind::Inline:
      out << "mean = " << text::format_number(init.mean) << '\n';
      out << "cos = " << number_array(init.cos) << '\n';
      out << "sin = " << number_array(init.sin) << '\n';
      break;
    case InitialKind::Samples: out << "samples = " << quote(init.path) << '\n'; break;
    case InitialKind::Polygon: out << "polygon = " << quote(init.path) << '\n'; break;
    case InitialKind::Coefficients: out << "coefficients = " << quote(init.path) << '\n'; break;
  }
  if (init.truncation) out << "truncation = " << *init.truncation << '\n';
  out << "smoothing = " << (init.smoothing == Smoothing::Fejer ? "\"fejer\"" : "\"none\"") << "\n\n";

  const auto& c = config.controls;
  out << "[controls]\n";
  out << "rel_tol = " << text::format_number(c.rel_tol) << '\n';
  out << "abs_tol = " << text::format_number(c.abs_tol) << '\n';
  out << "t_max = " << text::format_number(c.t_max) << '\n';
  out << "length_blowup = " << text::format_number(c.length_blowup) << '\n';
  out << "length_vanish = " << text::format_number(c.length_vanish) << '\n';
  out << "area_vanish = " << text::format_number(c.area_vanish) << '\n';
  out << "singularity_eps = " << text::format_number(c.singularity_eps) << '\n';
  out << "sample_interval = " << text::format_number(c.sample_interval) << "\n\n";

  const auto& o = config.outputs;
  out << "[outputs]\n";
  out << "dir = " << quote(o.dir) << '\n';
  out << "timeseries = " << quote(o.timeseries) << '\n';
  out << "trajectory = " << quote(o.trajectory) << '\n';
  out << "frames = " << quote(o.frames) << '\n';
  out << "svg = " << quote(o.svg) << '\n';
  out << "reports = " << quote(o.reports) << '\n';
  out << "frame_points = " << o.frame_points << '\n';
  return out.str();
}

// ---------------------------------------------------------------- initial curve

std::vector<double> read_samples_file(const fs::path& path) {
  std::vector<double> out;
  for (const auto& row : read_numeric_rows(path)) {
    out.insert(out.end(), row.fields.begin(), row.fields.end());
  }
  if (out.empty()) throw Error(ErrorCode::Parse, path.string() + ": no samples");
  return out;
}

std::vector<Point2> read_polygon_file(const fs::path& path) {
  std::vector<Point2> out;
  for (const auto& row : read_numeric_rows(path)) {
    if (row.fields.size() != 2) {
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(row.line) +
                                        ": expected two fields x,y");
    }
    out.push_back({row.fields[0], row.fields[1]});
  }
  if (out.size() < 3) throw Error(ErrorCode::Parse, path.string() + ": a polygon needs 3 vertices");
  return out;
}

SupportSpectrum read_coefficients_file(const fs::path& path) {
  if (path.extension() == ".json") {
    try {
      return spectrum_from_json(read_file(path));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Io) throw;
      throw Error(e.code(), path.string() + ": " + e.what());
    }
  }
  std::map<std::size_t, std::pair<double, double>> modes;
  for (const auto& row : read_numeric_rows(path)) {
    const std::string where = path.string() + ":" + std::to_string(row.line) + ": ";
    if (row.fields.size() != 3) throw Error(ErrorCode::Parse, where + "expected three fields n,a_n,b_n");
    const double n = row.fields[0];
    if (n < 0 || std::floor(n) != n || n > 1e6) {
      throw Error(ErrorCode::Parse, where + "mode index must be a non-negative integer");
    }
    if (!modes.emplace(static_cast<std::size_t>(n), std::pair{row.fields[1], row.fields[2]}).second) {
      throw Error(ErrorCode::Parse, where + "duplicate mode " + text::format_number(n));
    }
  }
  const auto zero = modes.find(0);
  if (zero == modes.end()) throw Error(ErrorCode::Parse, path.string() + ": missing row for n = 0");
  const std::size_t n_max = modes.rbegin()->first;
  std::vector<double> c(n_max, 0.0), s(n_max, 0.0);
  for (const auto& [n, ab] : modes) {
    if (n == 0) continue;
    c[n - 1] = ab.first;
    s[n - 1] = ab.second;
  }
  return spectrum_from_record(zero->second.first, std::move(c), std::move(s));
}

SupportSpectrum spectrum_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad spectrum JSON: ") + e.what());
  }
  auto numbers = [&](const char* key) {
    std::vector<double> out;
    if (!doc.contains(key)) return out;
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be an array");
    for (const auto& v : arr) {
      if (!v.is_number()) throw Error(ErrorCode::Parse, std::string("field '") + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (!doc.is_object() || !doc.contains("mean") || !doc.at("mean").is_number()) {
    throw Error(ErrorCode::Parse, "spectrum JSON needs a numeric 'mean'");
  }
  return spectrum_from_record(doc.at("mean").get<double>(), numbers("cos"), numbers("sin"));
}

std::string spectrum_to_json(const SupportSpectrum& spec) {
  nlohmann::ordered_json doc;
  doc["mean"] = spec.mean();
  doc["cos"] = std::vector<double>(spec.cos_coeffs().begin(), spec.cos_coeffs().end());
  doc["sin"] = std::vector<double>(spec.sin_coeffs().begin(), spec.sin_coeffs().end());
  return doc.dump();
}

SupportSpectrum load_initial(const InitialSource& source) {
  const std::size_t n = source.truncation.value_or(kDefaultTruncation);
  SupportSpectrum spec = [&] {
    switch (source.kind) {
      case InitialKind::Inline:
        return spectrum_from_record(source.mean, source.cos, source.sin).padded(source.truncation.value_or(0));
      case InitialKind::Samples: {
        const auto samples = read_samples_file(source.path);
        if (!source.truncation && samples.size() < 2 * n + 2) {
          if (samples.size() < 6) {
            throw Error(ErrorCode::InvalidArgument, source.path + ": need at least 6 samples");
          }
          return project_from_samples(samples, (samples.size() - 2) / 2);
        }
        return project_from_samples(samples, n);
      }
      case InitialKind::Polygon: return spectrum_from_polygon(read_polygon_file(source.path), n);
      case InitialKind::Coefficients:
        return read_coefficients_file(source.path).padded(source.truncation.value_or(0));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown initial source");
  }();
  if (source.truncation && spec.truncation() > *source.truncation) {
    throw Error(ErrorCode::InvalidArgument,
                "coefficient record is longer than truncation " + std::to_string(*source.truncation));
  }
  return source.smoothing == Smoothing::Fejer ? fejer_smoothed(spec) : spec;
}

// ---------------------------------------------------------------- writers

std::vector<std::size_t> frame_indices(std::size_t state_count, std::size_t frame_count) {
  std::vector<std::size_t> out;
  if (state_count == 0) return out;
  if (state_count == 1 || frame_count < 2) return {0};
  for (std::size_t k = 0; k < frame_count; ++k) {
    const std::size_t idx = (k * (state_count - 1) + (frame_count - 1) / 2) / (frame_count - 1);
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

void write_timeseries_csv(std::ostream& out, const Trajectory& trajectory, const NonlocalTerm& term) {
  using text::format_number;
  out << "t,L,A,ipd,ipr,k_min,k_max,H\n";
  for (const auto& s : trajectory.states) {
    const GeometricSummary g = geometric_summary(s.spectrum);
    double h = std::numeric_limits<double>::quiet_NaN();
    try {
      h = evaluate_h(term, s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Domain) throw;
    }
    out << format_number(s.t) << ',' << format_number(s.length) << ',' << format_number(s.area) << ','
        << format_number(g.ipd) << ',' << format_number(state_ipr(s, g.ipd)) << ','
        << format_number(g.k_min) << ',' << format_number(g.k_max) << ',' << format_number(h) << '\n';
  }
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory) {
  for (const auto& s : trajectory.states) {
    const GeometricSummary g = geometric_summary(s.spectrum);
    nlohmann::ordered_json rec;
    rec["t"] = s.t;
    rec["L"] = s.length;
    rec["A"] = s.area;
    rec["ipd"] = g.ipd;
    rec["ipr"] = state_ipr(s, g.ipd);
    rec["k_min"] = g.k_min;
    rec["k_max"] = g.k_max;
    out << rec.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["event"] = to_string(trajectory.event.kind);
  summary["t"] = trajectory.event.t;
  if (trajectory.event.kind == EventKind::Singularity) summary["theta"] = trajectory.event.theta;
  if (!trajectory.event.diagnostic.empty()) summary["diagnostic"] = trajectory.event.diagnostic;
  summary["outcome"] = outcome_name(trajectory.outcome);
  summary["verdict"] = verdict(trajectory.outcome);
  out << summary.dump() << '\n';
}

void write_frames_jsonl(std::ostream& out, const Trajectory& trajectory,
                        const std::vector<std::size_t>& indices, std::size_t points) {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const FlowState& s = trajectory.states.at(indices[k]);
    const CurveSamples curve = curve_position(s.spectrum, points);
    std::vector<double> xs, ys;
    for (const auto& p : curve.points) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
    }
    nlohmann::ordered_json rec;
    rec["frame"] = k;
    rec["t"] = s.t;
    rec["theta"] = curve.thetas;
    rec["x"] = xs;
    rec["y"] = ys;
    out << rec.dump() << '\n';
  }
}

void write_curve_csv(std::ostream& out, const CurveSamples& curve) {
  using text::format_number;
  out << "theta,x,y\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out << format_number(curve.thetas[i]) << ',' << format_number(curve.points[i][0]) << ','
        << format_number(curve.points[i][1]) << '\n';
  }
}

void write_reports_csv(std::ostream& out, const std::vector<InequalityReport>& reports) {
  using text::format_number;
  out << "name,lhs,rhs,slack,satisfied\n";
  for (const auto& r : reports) {
    out << csv_field(r.name) << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
        << format_number(r.slack) << ',' << bool_text(r.satisfied) << '\n';
  }
}

std::vector<fs::path> write_svg_frames(const fs::path& dir, const Trajectory& trajectory,
                                       const std::vector<std::size_t>& indices, std::size_t points) {
  std::vector<CurveSamples> curves;
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (std::size_t idx : indices) {
    curves.push_back(curve_position(trajectory.states.at(idx).spectrum, points));
    for (const auto& p : curves.back().points) {
      lo_x = std::min(lo_x, p[0]);
      hi_x = std::max(hi_x, p[0]);
      lo_y = std::min(lo_y, p[1]);
      hi_y = std::max(hi_y, p[1]);
    }
  }
  const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double pad = 0.1 * extent;
  // SVG's y axis points down; plot (x, -y).
  const std::string view = svg_number(lo_x - pad) + " " + svg_number(-hi_y - pad) + " " +
                           svg_number(hi_x - lo_x + 2 * pad) + " " + svg_number(hi_y - lo_y + 2 * pad);
  const std::string stroke = svg_number(0.005 * extent);

  std::vector<fs::path> written;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.svg", k);
    const fs::path path = dir / name;
    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << view << "\">\n";
    out << "<title>t=" << text::format_number(trajectory.states.at(indices[k]).t) << "</title>\n";
    out << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\" points=\"";
    for (std::size_t i = 0; i < curves[k].points.size(); ++i) {
      const auto& p = curves[k].points[i];
      out << (i ? " " : "") << svg_number(p[0]) << ',' << svg_number(-p[1]);
    }
    out << "\"/>\n</svg>\n";
    close_output(out, path);
    written.push_back(path);
  }
  return written;
}

// ---------------------------------------------------------------- orchestration

RunResult run(const RunConfig& config, const std::optional<fs::path>& out_dir) {
  return run(config, load_initial(config.initial), out_dir);
}

RunResult run(const RunConfig& config, const SupportSpectrum& initial,
              const std::optional<fs::path>& out_dir) {
  RunResult result;
  result.trajectory = integrate(initial, config.flow, config.controls);
  const Trajectory& traj = result.trajectory;
  result.verdict = verdict(traj.outcome);

  result.reports = inequality_suite(initial, ":initial");
  const auto final_reports = inequality_suite(traj.states.back().spectrum, ":final");
  result.reports.insert(result.reports.end(), final_reports.begin(), final_reports.end());

  const fs::path dir = out_dir.value_or(fs::path(config.outputs.dir));
  const auto& o = config.outputs;
  const auto frames = frame_indices(traj.states.size(), config.frame_count);

  auto emit = [&](const std::string& name, auto&& writer) {
    if (name.empty()) return;
    const fs::path path = resolve(dir, name);
    auto out = open_output(path);
    writer(out);
    close_output(out, path);
    result.files.push_back(path);
  };
  emit(o.timeseries, [&](std::ostream& out) { write_timeseries_csv(out, traj, config.flow); });
  emit(o.trajectory, [&](std::ostream& out) { write_trajectory_jsonl(out, traj); });
  emit(o.frames, [&](std::ostream& out) { write_frames_jsonl(out, traj, frames, o.frame_points); });
  emit(o.reports, [&](std::ostream& out) { write_reports_csv(out, result.reports); });
  if (!o.svg.empty()) {
    const auto svgs = write_svg_frames(resolve(dir, o.svg), traj, frames, o.frame_points);
    result.files.insert(result.files.end(), svgs.begin(), svgs.end());
  }
  return result;
}

SweepAxis parse_axis(std::string_view raw) {
  const auto eq = raw.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::Parse, "axis '" + std::string(raw) + "' must look like key=v1|v2");
  }
  SweepAxis axis{std::string(text::trim(raw.substr(0, eq))), {}};
  const auto& key = axis.key;
  const bool mode_key = (key.starts_with("cos") || key.starts_with("sin")) && key.size() > 3 &&
                        std::all_of(key.begin() + 3, key.end(), [](char c) { return std::isdigit(c); }) &&
                        key[3] != '0';
  if (key != "flow" && key != "scale" && key != "mean" && !mode_key) {
    throw Error(ErrorCode::Parse, "unknown axis key '" + key + "'");
  }
  const auto body = text::trim(raw.substr(eq + 1));
  if (!body.empty()) {
    for (auto v : text::split(body, '|')) {
      const auto value = text::trim(v);
      if (value.empty()) throw Error(ErrorCode::InvalidArgument, "axis '" + key + "' has an empty value");
      if (key == "flow") {
        parse_nonlocal_term(value);
      } else if (const auto num = text::parse_number(value); !num || !std::isfinite(*num)) {
        throw Error(ErrorCode::Parse, "axis '" + key + "': bad number '" + std::string(value) + "'");
      }
      axis.values.emplace_back(value);
    }
  }
  if (axis.values.empty()) throw Error(ErrorCode::InvalidArgument, "axis '" + key + "' is empty");
  return axis;
}

std::vector<SweepRow> sweep(const RunConfig& base, const SweepAxis& axis,
                            const std::optional<fs::path>& out_dir) {
  if (axis.values.empty()) throw Error(ErrorCode::InvalidArgument, "axis '" + axis.key + "' is empty");
  const SupportSpectrum base_spec = load_initial(base.initial);
  const fs::path dir = out_dir.value_or(fs::path(base.outputs.dir));

  std::vector<std::future<SweepRow>> jobs;
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      SweepRow row;
      row.index = i;
      row.value = axis.values[i];
      try {
        RunConfig config = base;
        SupportSpectrum spec = base_spec;
        if (axis.key == "flow") {
          config.flow = parse_nonlocal_term(row.value);
        } else {
          spec = apply_axis_value(base_spec, axis.key, *text::parse_number(row.value));
        }
        char sub[32];
        std::snprintf(sub, sizeof(sub), "run_%03zu", i);
        const RunResult r = run(config, spec, dir / sub);
        const auto& traj = r.trajectory;
        row.ok = true;
        row.outcome = outcome_name(traj.outcome);
        row.event = to_string(traj.event.kind);
        row.t_end = traj.states.back().t;
        row.length_start = traj.states.front().length;
        row.length_end = traj.states.back().length;
        row.area_end = traj.states.back().area;
        row.ipd_end = isoperimetric_deficit(traj.states.back().spectrum);
        row.ipr_non_increasing = ipr_monotone(traj, config.flow).non_increasing;
        row.verdict = r.verdict;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& job : jobs) rows.push_back(job.get());

  const fs::path summary = dir / "summary.csv";
  auto out = open_output(summary);
  write_sweep_csv(out, rows);
  close_output(out, summary);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  using text::format_number;
  out << "index,value,outcome,event,t_end,L_start,L_end,A_end,ipd_end,ipr_non_increasing,verdict,error\n";
  for (const auto& r : rows) {
    out << r.index << ',' << csv_field(r.value) << ',';
    if (r.ok) {
      out << r.outcome << ',' << r.event << ',' << format_number(r.t_end) << ','
          << format_number(r.length_start) << ',' << format_number(r.length_end) << ','
          << format_number(r.area_end) << ',' << format_number(r.ipd_end) << ','
          << bool_text(r.ipr_non_increasing) << ',' << csv_field(r.verdict) << ",\n";
    } else {
      out << "error,,,,,,,,," << csv_field(r.error) << '\n';
    }
  }
}

std::vector<InequalityReport> check(const RunConfig& config) {
  return inequality_suite(load_initial(config.initial), "");
}

}  // namespace curveflow
