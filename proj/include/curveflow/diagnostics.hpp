#pragma once

// Inequalities and limit statements evaluated on flow states and trajectories:
// isoperimetric deficit decay, Green-Osher (plain and refined), Gage,
// isoperimetric-ratio monotonicity and convergence to the limit circle.

#include <string>
#include <vector>

#include "curveflow/flow_integrator.hpp"
#include "curveflow/nonlocal_flows.hpp"
#include "curveflow/support_geometry.hpp"

namespace curveflow {

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool satisfied = true;
};

// satisfied <=> slack >= -1e-9 * max(1, |lhs|, |rhs|)
InequalityReport make_report(std::string name, double lhs, double rhs);
InequalityReport make_report(std::string name, double lhs, double rhs, double slack);

GeometricSummary summarize(const FlowState& state);

// integral(1/k) ds >= (L^2 - 2 pi A) / pi
InequalityReport go1(const SupportSpectrum& spec);
InequalityReport go1(const FlowState& state);

struct Go2Report {
  InequalityReport report;
  // All harmonics of order >= 3 vanish (to 1e-10), the equality case.
  bool equality_case = false;
};

// integral(1/k) ds >= (2/pi)(L^2 - 4 pi A) + 2A
Go2Report go2(const SupportSpectrum& spec);
Go2Report go2(const FlowState& state);
// Spectral form of the refined slack: pi sum_{n>=3} (n^2-1)(n^2-4)(a_n^2+b_n^2).
double go2_spectral_slack(const SupportSpectrum& spec);

// integral(k^2) ds >= pi L / A; throws NotConvex for non-convex spectra.
InequalityReport gage(const SupportSpectrum& spec);
InequalityReport gage(const FlowState& state);

// L^2 >= 4 pi A, slack taken from the cancellation-free deficit.
InequalityReport isoperimetric(const SupportSpectrum& spec);

// GO1, GO2, Gage (when convex) and isoperimetric, with `label` appended to names.
std::vector<InequalityReport> inequality_suite(const SupportSpectrum& spec, const std::string& label);

struct IpdDecay {
  // IPD(0) == 0: the circle case, where IPD stays identically zero.
  bool zero_initial = false;
  double max_ratio = 0.0;
};

// max over samples of IPD(t) / (IPD(0) e^{-2t})
IpdDecay ipd_decay_ratio(const Trajectory& trajectory);

struct IprMonotonicity {
  // True for pan-yang, lin-tsai, ma-cheng and everywhere-negative H.
  bool applicable = false;
  bool non_increasing = true;
  double max_increase = 0.0;
};

inline constexpr double kIprSlack = 1e-10;

IprMonotonicity ipr_monotone(const Trajectory& trajectory, const NonlocalTerm& term);

// Center of the limit circle, (a1, b1) of the initial spectrum.
Point2 limit_circle(const SupportSpectrum& initial);

// Grid sup-norm of (u - L/2pi) - (a1 cos + b1 sin) at the state's time.
double convergence_residual(const FlowState& state, const SupportSpectrum& initial);

// sup |d^m u / dtheta^m| on the validation grid for m = 1..max_order.
std::vector<double> derivative_sup_norms(const SupportSpectrum& spec, int max_order = 4);

}  // namespace curveflow
