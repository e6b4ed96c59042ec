#include "curveflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "curveflow/error.hpp"

namespace curveflow {

namespace {

constexpr double kPi = std::numbers::pi;

bool negative_everywhere(const NonlocalTerm& term) {
  if (const auto* c = std::get_if<flows::Constant>(&term)) return c->c < 0.0;
  if (const auto* sum = std::get_if<flows::PowerSum>(&term)) {
    return !sum->terms.empty() &&
           std::all_of(sum->terms.begin(), sum->terms.end(),
                       [](const flows::PowerTerm& t) { return t.coeff < 0.0; });
  }
  return false;
}

}  // namespace

InequalityReport make_report(std::string name, double lhs, double rhs) {
  return make_report(std::move(name), lhs, rhs, lhs - rhs);
}

InequalityReport make_report(std::string name, double lhs, double rhs, double slack) {
  const double tol = 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return InequalityReport{std::move(name), lhs, rhs, slack, slack >= -tol};
}

GeometricSummary summarize(const FlowState& state) { return geometric_summary(state.spectrum); }

InequalityReport go1(const SupportSpectrum& spec) {
  const double length = curve_length(spec);
  const double area = enclosed_area(spec);
  return make_report("go1", total_inverse_curvature(spec), (length * length - 2.0 * kPi * area) / kPi);
}

InequalityReport go1(const FlowState& state) { return go1(state.spectrum); }

double go2_spectral_slack(const SupportSpectrum& spec) {
  double acc = 0.0;
  for (std::size_t n = 3; n <= spec.truncation(); ++n) {
    const double a = spec.cos_coeff(n), b = spec.sin_coeff(n);
    const double nn = static_cast<double>(n * n);
    acc += (nn - 1.0) * (nn - 4.0) * (a * a + b * b);
  }
  return kPi * acc;
}

Go2Report go2(const SupportSpectrum& spec) {
  const double area = enclosed_area(spec);
  const double rhs = 2.0 / kPi * isoperimetric_deficit(spec) + 2.0 * area;
  Go2Report out{make_report("go2", total_inverse_curvature(spec), rhs), true};
  for (std::size_t n = 3; n <= spec.truncation(); ++n) {
    if (std::abs(spec.cos_coeff(n)) > 1e-10 || std::abs(spec.sin_coeff(n)) > 1e-10) {
      out.equality_case = false;
      break;
    }
  }
  return out;
}

Go2Report go2(const FlowState& state) { return go2(state.spectrum); }

InequalityReport gage(const SupportSpectrum& spec) {
  const double length = curve_length(spec);
  const double area = enclosed_area(spec);
  return make_report("gage", sq_curvature_integral(spec), kPi * length / area);
}

InequalityReport gage(const FlowState& state) { return gage(state.spectrum); }

InequalityReport isoperimetric(const SupportSpectrum& spec) {
  const double length = curve_length(spec);
  return make_report("isoperimetric", length * length, 4.0 * kPi * enclosed_area(spec),
                     isoperimetric_deficit(spec));
}

std::vector<InequalityReport> inequality_suite(const SupportSpectrum& spec, const std::string& label) {
  std::vector<InequalityReport> out;
  out.push_back(go1(spec));
  out.push_back(go2(spec).report);
  if (is_strictly_convex(spec)) out.push_back(gage(spec));
  out.push_back(isoperimetric(spec));
  for (auto& r : out) r.name += label;
  return out;
}

IpdDecay ipd_decay_ratio(const Trajectory& trajectory) {
  IpdDecay out;
  if (trajectory.states.empty()) return out;
  const double ipd0 = isoperimetric_deficit(trajectory.states.front().spectrum);
  if (ipd0 <= 0.0) {
    out.zero_initial = true;
    return out;
  }
  for (const auto& s : trajectory.states) {
    const double ratio = isoperimetric_deficit(s.spectrum) * std::exp(2.0 * s.t) / ipd0;
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

IprMonotonicity ipr_monotone(const Trajectory& trajectory, const NonlocalTerm& term) {
  IprMonotonicity out;
  out.applicable = std::holds_alternative<flows::PanYang>(term) ||
                   std::holds_alternative<flows::LinTsai>(term) ||
                   std::holds_alternative<flows::MaCheng>(term) || negative_everywhere(term);
  double prev = 0.0;
  bool first = true;
  for (const auto& s : trajectory.states) {
    const double ipr = 1.0 + isoperimetric_deficit(s.spectrum) / (4.0 * kPi * s.area);
    if (!first) out.max_increase = std::max(out.max_increase, ipr - prev);
    prev = ipr;
    first = false;
  }
  out.non_increasing = out.max_increase <= kIprSlack;
  return out;
}

Point2 limit_circle(const SupportSpectrum& initial) {
  return {initial.cos_coeff(1), initial.sin_coeff(1)};
}

double convergence_residual(const FlowState& state, const SupportSpectrum& initial) {
  const SupportSpectrum& now = state.spectrum;
  std::vector<double> c(now.cos_coeffs().begin(), now.cos_coeffs().end());
  std::vector<double> s(now.sin_coeffs().begin(), now.sin_coeffs().end());
  c[0] -= initial.cos_coeff(1);
  s[0] -= initial.sin_coeff(1);
  const SupportSpectrum remainder(0.0, std::move(c), std::move(s));
  const SpectralGrid grid(remainder.truncation(), validation_grid_size(remainder.truncation()));
  double sup = 0.0;
  for (double v : grid.support_derivative(remainder, 0)) sup = std::max(sup, std::abs(v));
  return sup;
}

std::vector<double> derivative_sup_norms(const SupportSpectrum& spec, int max_order) {
  const SpectralGrid grid(spec.truncation(), validation_grid_size(spec.truncation()));
  std::vector<double> out;
  for (int m = 1; m <= max_order; ++m) {
    double sup = 0.0;
    for (double v : grid.support_derivative(spec, m)) sup = std::max(sup, std::abs(v));
    out.push_back(sup);
  }
  return out;
}

}  // namespace curveflow
