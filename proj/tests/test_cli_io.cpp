#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "curveflow/cli_io.hpp"
#include "curveflow/error.hpp"
#include "oracles.hpp"

using namespace curveflow;
namespace fs = std::filesystem;
using oracle::kPi;

namespace {

// Fresh scratch directory removed at scope exit.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("curveflow_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

constexpr const char* kMinimal = "flow = \"pan-yang\"\ninitial = {mean = 1, cos = [0, 0.2]}\n";

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.flow == NonlocalTerm{flows::PanYang{}});
  CHECK(c.initial.kind == InitialKind::Inline);
  CHECK(c.initial.mean == 1.0);
  CHECK(c.initial.cos == std::vector<double>{0.0, 0.2});
  CHECK(c.initial.sin == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(c.initial.truncation.has_value());
  CHECK(c.controls == IntegratorControls{});
  CHECK(c.outputs == OutputOptions{});
  CHECK(c.frame_count == 20);
}

TEST_CASE("section form and comments") {
  const auto c = parse_config(R"(# comment line
flow = "powersum:1,1,0"   # H = L
frame_count = 5

[initial]
mean = 2
sin = [0.1]
truncation = 16
smoothing = "fejer"

[controls]
t_max = 3
sample_interval = 0.1

[outputs]
dir = "out dir"
svg = "frames"
frames = ""
frame_points = 64
)");
  CHECK(c.flow == NonlocalTerm{flows::PowerSum{{{1.0, 1.0, 0.0}}}});
  CHECK(c.frame_count == 5);
  CHECK(c.initial.mean == 2.0);
  CHECK(c.initial.sin == std::vector<double>{0.1, 0.0});
  CHECK(c.initial.truncation == 16u);
  CHECK(c.initial.smoothing == Smoothing::Fejer);
  CHECK(c.controls.t_max == 3.0);
  CHECK(c.controls.sample_interval == 0.1);
  CHECK(c.outputs.dir == "out dir");
  CHECK(c.outputs.svg == "frames");
  CHECK(c.outputs.frames.empty());
  CHECK(c.outputs.frame_points == 64);
}

TEST_CASE("config errors name the line and field") {
  const auto banana = parse_error("flow = \"banana\"\ninitial = {mean = 1}\n");
  CHECK(banana.find("line 1") != std::string::npos);
  CHECK(banana.find("banana") != std::string::npos);

  CHECK(parse_error("flow = \"pan-yang\"\n").find("missing initial") != std::string::npos);
  CHECK(parse_error("initial = {mean = 1}\n").find("flow") != std::string::npos);

  const auto record = parse_error("flow = \"pan-yang\"\n[initial]\nmean = 1\ncos = \"zero\"\n");
  CHECK(record.find("line 4") != std::string::npos);
  CHECK(record.find("malformed coefficient record") != std::string::npos);
  CHECK(parse_error("flow = \"pan-yang\"\n[initial]\ncos = [0, 0.2]\n").find("'mean' is required") != std::string::npos);
  CHECK(parse_error("flow = \"pan-yang\"\n[initial]\nmean = 1\ncos = [0, x]\n").find("bad number 'x'") != std::string::npos);

  const auto two = parse_error("flow = \"pan-yang\"\n[initial]\nmean = 1\npolygon = \"p.csv\"\n");
  CHECK(two.find("more than one initial source") != std::string::npos);
  CHECK(two.find("line 4") != std::string::npos);

  CHECK(parse_error(std::string(kMinimal) + "flow = \"lin-tsai\"\n").find("duplicate field 'flow'") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[extras]\n").find("unknown section [extras]") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[controls]\nspeed = 3\n").find("controls.speed") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[controls]\nt_max = -1\n").find("[controls]") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "frame_count = 1\n").find("frame_count") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "frame_count = 2 3\n").find("trailing text") != std::string::npos);
  CHECK(parse_error("flow = \"pan-yang\ninitial = {mean = 1}\n").find("unterminated string") != std::string::npos);
  CHECK(parse_error("flow = \"pan-yang\"\n[initial]\nmean = 1\ncos = [0, 0.2, 0.1]\ntruncation = 2\n")
            .find("truncation") != std::string::npos);
}

TEST_CASE("canonical emission round-trips") {
  std::vector<RunConfig> configs = {parse_config(kMinimal)};
  configs.push_back(parse_config(R"(flow = "powersum:0.5,1,0;-2,0.5,1"
frame_count = 7
[initial]
polygon = "shapes/hex \"A\".csv"
truncation = 24
smoothing = "fejer"
[controls]
rel_tol = 1e-10
t_max = 0.1
[outputs]
svg = "svg"
trajectory = ""
)"));
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    RunConfig c = parse_config(kMinimal);
    c.flow = flows::Constant{u(rng) * 1e3};
    c.initial.mean = 1.0 + u(rng);
    c.initial.cos = {u(rng) / 7, u(rng) / 3e5, u(rng)};
    c.initial.sin = {u(rng), 0.0, -u(rng) * 1e-17};
    c.controls.abs_tol = std::abs(u(rng)) * 1e-11 + 1e-15;
    c.controls.sample_interval = std::abs(u(rng)) + 0.01;
    c.frame_count = 2 + i;
    configs.push_back(c);
  }
  for (const auto& c : configs) {
    const std::string text = emit_config(c);
    CHECK(parse_config(text) == c);
    CHECK(emit_config(parse_config(text)) == text);
  }
}

TEST_CASE("initial curves from files") {
  ScratchDir dir("files");

  SUBCASE("coefficient CSV with header") {
    write_text(dir.path / "coeffs.csv", "n,a,b\n0,1,0\n2,0.2,0\n# trailing comment\n3,0,0.01\n");
    const auto s = read_coefficients_file(dir.path / "coeffs.csv");
    CHECK(s.mean() == 1.0);
    CHECK(s.truncation() == 3);
    CHECK(s.cos_coeff(2) == 0.2);
    CHECK(s.sin_coeff(3) == 0.01);
    write_text(dir.path / "dup.csv", "0,1,0\n2,0.1,0\n2,0.1,0\n");
    CHECK_THROWS_WITH_AS(read_coefficients_file(dir.path / "dup.csv"), doctest::Contains("duplicate mode"), Error);
    write_text(dir.path / "nomean.csv", "2,0.1,0\n");
    CHECK_THROWS_WITH_AS(read_coefficients_file(dir.path / "nomean.csv"), doctest::Contains("n = 0"), Error);
  }
  SUBCASE("coefficient JSON") {
    write_text(dir.path / "c.json", R"({"mean": 1.5, "cos": [0.3, 0.2]})");
    const auto s = read_coefficients_file(dir.path / "c.json");
    CHECK(s.mean() == 1.5);
    CHECK(s.cos_coeff(1) == 0.3);
    CHECK(s.sin_coeff(2) == 0.0);
    CHECK(spectrum_from_json(spectrum_to_json(s)) == s);
    CHECK_THROWS_AS(spectrum_from_json("{\"cos\": [1]}"), Error);
    CHECK_THROWS_AS(spectrum_from_json("not json"), Error);
  }
  SUBCASE("support samples") {
    std::ostringstream text;
    text.precision(17);
    for (double th : uniform_grid(128)) text << 1.0 + 0.2 * std::cos(2 * th) << '\n';
    write_text(dir.path / "u.txt", text.str());
    InitialSource src;
    src.kind = InitialKind::Samples;
    src.path = (dir.path / "u.txt").string();
    const auto s = load_initial(src);
    CHECK(s.truncation() == 63);
    CHECK(std::abs(s.cos_coeff(2) - 0.2) < 1e-12);
    src.truncation = 8;
    CHECK(load_initial(src).truncation() == 8);
  }
  SUBCASE("polygon through a config file with a relative path") {
    write_text(dir.path / "square.csv", "x,y\n-1,-1\n1,-1\n1,1\n-1,1\n");
    write_text(dir.path / "run.toml", "flow = \"pan-yang\"\n[initial]\npolygon = \"square.csv\"\ntruncation = 16\n");
    const auto c = load_config(dir.path / "run.toml");
    CHECK(fs::path(c.initial.path).is_absolute());
    const auto s = load_initial(c.initial);
    CHECK(std::abs(s.mean() - 4 / kPi) < 1e-13);
    try {
      run(c, dir.path / "out");
      FAIL("square must be rejected");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotConvex);
      CHECK(std::string(e.what()).find("initial curve fails convexity validation") != std::string::npos);
    }
  }
  SUBCASE("missing files surface as I/O errors") {
    InitialSource src;
    src.kind = InitialKind::Polygon;
    src.path = (dir.path / "nope.csv").string();
    try {
      load_initial(src);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
  }
}

TEST_CASE("frame selection") {
  CHECK(frame_indices(0, 5).empty());
  CHECK(frame_indices(1, 5) == std::vector<std::size_t>{0});
  CHECK(frame_indices(11, 3) == std::vector<std::size_t>{0, 5, 10});
  CHECK(frame_indices(3, 10) == std::vector<std::size_t>{0, 1, 2});
  const auto many = frame_indices(201, 20);
  CHECK(many.size() == 20);
  CHECK(many.front() == 0);
  CHECK(many.back() == 200);
}

TEST_CASE("run writes deterministic artifacts") {
  ScratchDir dir("run");
  RunConfig c = parse_config(kMinimal);
  c.controls.t_max = 2.0;
  c.outputs.svg = "svg";
  c.frame_count = 4;
  const auto a = run(c, dir.path / "a");
  const auto b = run(c, dir.path / "b");
  CHECK(a.verdict == "ConvergesToCircle center=(0,0) limit_L=6.28319");
  CHECK(a.files.size() == 8);

  for (const char* name : {"timeseries.csv", "trajectory.jsonl", "frames.jsonl", "reports.csv", "svg/frame_00003.svg"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }

  std::istringstream ts(slurp(dir.path / "a" / "timeseries.csv"));
  std::string line;
  std::getline(ts, line);
  CHECK(line == "t,L,A,ipd,ipr,k_min,k_max,H");
  std::getline(ts, line);
  CHECK(line.starts_with("0,6.283185307179586,"));
  std::size_t rows = 1;
  while (std::getline(ts, line)) ++rows;
  CHECK(rows == 41);

  std::istringstream tj(slurp(dir.path / "a" / "trajectory.jsonl"));
  std::vector<nlohmann::json> records;
  while (std::getline(tj, line)) records.push_back(nlohmann::json::parse(line));
  REQUIRE(records.size() == 42);
  CHECK(records.front().contains("k_max"));
  CHECK(records.back()["event"] == "reached-horizon");
  CHECK(records.back()["outcome"] == "ConvergesToCircle");

  std::istringstream fr(slurp(dir.path / "a" / "frames.jsonl"));
  std::size_t frames = 0;
  while (std::getline(fr, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec["x"].size() == c.outputs.frame_points);
    ++frames;
  }
  CHECK(frames == 4);

  const auto svg0 = slurp(dir.path / "a" / "svg" / "frame_00000.svg");
  const auto svg3 = slurp(dir.path / "a" / "svg" / "frame_00003.svg");
  const auto view = [](const std::string& s) { 
    const auto at = s.find("viewBox");
    return s.substr(at, s.find('>', at) - at);
  };
  CHECK(view(svg0) == view(svg3));
  // Widest frame is the initial one, x in [-1.2, 1.2]; padding is 10% of 2.4.
  CHECK(svg0.find("viewBox=\"-1.440000 ") != std::string::npos);

  const auto reports = slurp(dir.path / "a" / "reports.csv");
  CHECK(reports.starts_with("name,lhs,rhs,slack,satisfied\n"));
  CHECK(reports.find("go1:initial,") != std::string::npos);
  CHECK(reports.find(",false\n") == std::string::npos);
}

TEST_CASE("run with H = L reports the singularity") {
  ScratchDir dir("singular");
  RunConfig c = parse_config("flow = \"powersum:1,1,0\"\ninitial = {mean = 1, cos = [0, 0.2]}\n");
  c.outputs = OutputOptions{};
  c.outputs.timeseries = "ts.csv";
  c.outputs.trajectory = "";
  c.outputs.frames = "";
  c.outputs.reports = "";
  const auto r = run(c, dir.path);
  CHECK(r.verdict.starts_with("CurvatureSingularity t*=0.22373"));
  CHECK(r.files.size() == 1);
  CHECK(fs::exists(dir.path / "ts.csv"));
}

TEST_CASE("unwritable outputs surface the filesystem error") {
  ScratchDir dir("unwritable");
  write_text(dir.path / "blocker", "file, not a directory");
  RunConfig c = parse_config(kMinimal);
  c.controls.t_max = 0.1;
  try {
    run(c, dir.path / "blocker" / "out");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("sweep axis grammar") {
  const auto flows_axis = parse_axis("flow=pan-yang|lin-tsai|ma-cheng");
  CHECK(flows_axis.key == "flow");
  CHECK(flows_axis.values.size() == 3);
  CHECK(parse_axis("cos2 = 0.1 | 0.2").values == std::vector<std::string>{"0.1", "0.2"});
  CHECK_THROWS_AS(parse_axis("flow="), Error);
  CHECK_THROWS_AS(parse_axis("flow=pan-yang||lin-tsai"), Error);
  CHECK_THROWS_AS(parse_axis("flow=banana"), Error);
  CHECK_THROWS_AS(parse_axis("speed=1|2"), Error);
  CHECK_THROWS_AS(parse_axis("cos0=1"), Error);
  CHECK_THROWS_AS(parse_axis("scale=big"), Error);
  CHECK_THROWS_AS(parse_axis("no equals sign"), Error);
  CHECK_THROWS_AS(sweep(parse_config(kMinimal), SweepAxis{"flow", {}}), Error);
}

TEST_CASE("sweep over flows") {
  ScratchDir dir("sweep_flows");
  RunConfig c = parse_config(kMinimal);
  c.controls.t_max = 3.0;
  c.outputs.frames = "";
  const auto rows = sweep(c, parse_axis("flow=pan-yang|lin-tsai|ma-cheng"), dir.path);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].index == i);
    CHECK(rows[i].ok);
    CHECK(rows[i].outcome == "ConvergesToCircle");
    CHECK(rows[i].ipr_non_increasing);
  }
  CHECK(rows[0].value == "pan-yang");
  CHECK(fs::exists(dir.path / "summary.csv"));
  CHECK(fs::exists(dir.path / "run_002" / "timeseries.csv"));
  const auto summary = slurp(dir.path / "summary.csv");
  CHECK(summary.starts_with("index,value,outcome,event,"));
  CHECK(summary.find("\"ConvergesToCircle center=(0,0) limit_L=6.28319\"") != std::string::npos);
}

TEST_CASE("sweep over the second harmonic with H = L") {
  ScratchDir dir("sweep_cos2");
  RunConfig c = parse_config("flow = \"powersum:1,1,0\"\ninitial = {mean = 1, cos = [0, 0.2]}\n");
  c.outputs = OutputOptions{};
  c.outputs.timeseries = "";
  c.outputs.trajectory = "";
  c.outputs.frames = "";
  c.outputs.reports = "";
  const auto rows = sweep(c, parse_axis("cos2=0.1|0.2|0.3|0.5"), dir.path);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(rows[i].ok);
    CHECK(rows[i].outcome == "CurvatureSingularity");
    const double expected = std::log(3 * std::stod(rows[i].value)) / (4 - 2 * kPi);
    CHECK(std::abs(rows[i].t_end - expected) < 1e-8);
  }
  CHECK(rows[0].t_end > rows[1].t_end);
  CHECK(rows[1].t_end > rows[2].t_end);
  // a2 = 0.5 is not convex: the row records the failure and the sweep goes on.
  CHECK_FALSE(rows[3].ok);
  CHECK(rows[3].error.find("convexity") != std::string::npos);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  CHECK(csv.str().find("3,0.5,error,,,,,,,,,") != std::string::npos);
}

TEST_CASE("scale and mean axes") {
  ScratchDir dir("sweep_scale");
  RunConfig c = parse_config(kMinimal);
  c.controls.t_max = 0.5;
  c.outputs = OutputOptions{};
  c.outputs.timeseries = "";
  c.outputs.trajectory = "";
  c.outputs.frames = "";
  c.outputs.reports = "";
  const auto rows = sweep(c, parse_axis("scale=1|2"), dir.path);
  CHECK(rows[1].length_start == doctest::Approx(2 * rows[0].length_start));
  const auto mean_rows = sweep(c, parse_axis("mean=3"), dir.path);
  CHECK(mean_rows[0].length_start == doctest::Approx(6 * kPi));
}

TEST_CASE("curve samples as CSV") {
  const SupportSpectrum circle = SupportSpectrum::circle(2.0, 2);
  std::ostringstream csv;
  write_curve_csv(csv, curve_position(circle, 4));
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta,x,y");
  std::getline(in, line);
  CHECK(line == "0,2,0");
  std::size_t rows = 1;
  while (std::getline(in, line)) {
    double th = 0, x = 0, y = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &th, &x, &y) == 3);
    CHECK(std::abs(x - 2 * std::cos(th)) < 1e-15);
    CHECK(std::abs(y - 2 * std::sin(th)) < 1e-15);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("check runs the inequality suite on the initial curve") {
  const auto reports = check(parse_config(kMinimal));
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].name == "go1");
  CHECK(std::abs(reports[0].slack - 0.24 * kPi) < 1e-13);
  for (const auto& r : reports) CHECK(r.satisfied);
  std::ostringstream csv;
  write_reports_csv(csv, reports);
  CHECK(csv.str().find("go2,") != std::string::npos);
}
