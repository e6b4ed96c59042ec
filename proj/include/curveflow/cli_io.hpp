#pragma once

// Config ingestion, run orchestration and artifact writers.
//
// Config text is a small TOML subset: `key = value` lines, `[initial]`,
// `[controls]` and `[outputs]` sections, strings, numbers, booleans, one-line
// number arrays and one-line inline tables (`initial = {mean = 1, cos = [0, 0.2]}`).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curveflow/diagnostics.hpp"
#include "curveflow/flow_integrator.hpp"
#include "curveflow/nonlocal_flows.hpp"
#include "curveflow/support_geometry.hpp"

namespace curveflow {

enum class InitialKind { Inline, Samples, Polygon, Coefficients };
enum class Smoothing { None, Fejer };

struct InitialSource {
  InitialKind kind = InitialKind::Inline;
  // Inline coefficient record.
  double mean = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;
  // Samples / polygon / coefficient file.
  std::string path;
  // Inline and coefficient records keep their own length unless this is set.
  std::optional<std::size_t> truncation;
  Smoothing smoothing = Smoothing::None;

  friend bool operator==(const InitialSource&, const InitialSource&) = default;
};

// Relative output paths resolve against `dir` (or the --out override); an
// empty path disables that artifact.
struct OutputOptions {
  std::string dir = "curveflow_out";
  std::string timeseries = "timeseries.csv";
  std::string trajectory = "trajectory.jsonl";
  std::string frames = "frames.jsonl";
  std::string svg;
  std::string reports = "reports.csv";
  std::size_t frame_points = 256;

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct RunConfig {
  NonlocalTerm flow;
  InitialSource initial;
  IntegratorControls controls;
  OutputOptions outputs;
  std::size_t frame_count = 20;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Errors are Parse errors prefixed with "line N" and the offending field.
RunConfig parse_config(std::string_view text);
// Reads the file and resolves relative initial-source paths against its directory.
RunConfig load_config(const std::filesystem::path& path);
// Canonical text; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

SupportSpectrum load_initial(const InitialSource& source);

std::vector<double> read_samples_file(const std::filesystem::path& path);
std::vector<Point2> read_polygon_file(const std::filesystem::path& path);
// CSV rows n,a_n,b_n (row 0 carries the mean) or, for *.json, {mean, cos, sin}.
SupportSpectrum read_coefficients_file(const std::filesystem::path& path);

SupportSpectrum spectrum_from_json(std::string_view json_text);
std::string spectrum_to_json(const SupportSpectrum& spec);

// Evenly spaced state indices, first and last included, deduplicated.
std::vector<std::size_t> frame_indices(std::size_t state_count, std::size_t frame_count);

void write_timeseries_csv(std::ostream& out, const Trajectory& trajectory, const NonlocalTerm& term);
void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory);
void write_frames_jsonl(std::ostream& out, const Trajectory& trajectory,
                        const std::vector<std::size_t>& indices, std::size_t points);
void write_curve_csv(std::ostream& out, const CurveSamples& curve);
void write_reports_csv(std::ostream& out, const std::vector<InequalityReport>& reports);
// One SVG per frame, frame_00000.svg onwards, sharing one viewBox.
std::vector<std::filesystem::path> write_svg_frames(const std::filesystem::path& dir,
                                                    const Trajectory& trajectory,
                                                    const std::vector<std::size_t>& indices,
                                                    std::size_t points);

struct RunResult {
  Trajectory trajectory;
  std::vector<InequalityReport> reports;
  std::string verdict;
  std::vector<std::filesystem::path> files;
};

RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& out_dir = {});
RunResult run(const RunConfig& config, const SupportSpectrum& initial,
              const std::optional<std::filesystem::path>& out_dir);

// `flow=a|b`, `scale=s1|s2`, `mean=..`, `cosN=..`, `sinN=..`
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

SweepAxis parse_axis(std::string_view text);

struct SweepRow {
  std::size_t index = 0;
  std::string value;
  bool ok = false;
  std::string outcome;
  std::string event;
  double t_end = 0.0;
  double length_start = 0.0;
  double length_end = 0.0;
  double area_end = 0.0;
  double ipd_end = 0.0;
  bool ipr_non_increasing = false;
  std::string verdict;
  std::string error;
};

// One run per axis value, executed concurrently; per-run artifacts go to
// <out>/run_NNN and the summary table to <out>/summary.csv.
std::vector<SweepRow> sweep(const RunConfig& base, const SweepAxis& axis,
                            const std::optional<std::filesystem::path>& out_dir = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Inequality suite on the initial curve only.
std::vector<InequalityReport> check(const RunConfig& config);

}  // namespace curveflow
