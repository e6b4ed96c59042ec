#include "curveflow/flow_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "curveflow/error.hpp"
#include "curveflow/heat_propagator.hpp"
#include "curveflow/text.hpp"

namespace curveflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct StepResult {
  double value = 0.0;
  double error = 0.0;
};

// One Dormand-Prince 5(4) step; returns the 5th-order value and the embedded
// error estimate.
template <class Rhs>
StepResult dopri5_step(const Rhs& f, double t, double y, double h) {
  const double k1 = f(t, y);
  const double k2 = f(t + h / 5.0, y + h * (k1 / 5.0));
  const double k3 = f(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
  const double k4 =
      f(t + 4.0 * h / 5.0, y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
  const double k5 = f(t + 8.0 * h / 9.0,
                      y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                               64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
  const double k6 =
      f(t + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                        49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5));
  const double y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                             2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
  const double k7 = f(t + h, y5);
  const double err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 -
                          17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
  return {y5, err};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << (std::abs(v) < 1e-300 ? 0.0 : v);
  return os.str();
}

}  // namespace

void IntegratorControls::validate() const {
  const double fields[] = {rel_tol,      abs_tol,       t_max,           length_blowup,
                           length_vanish, area_vanish, singularity_eps, sample_interval};
  for (double v : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "integrator controls must be positive and finite");
    }
  }
  if (rel_tol >= 1.0) throw Error(ErrorCode::InvalidArgument, "rel_tol must be below 1");
  if (length_vanish >= length_blowup) {
    throw Error(ErrorCode::InvalidArgument, "length_vanish must be below length_blowup");
  }
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ReachedHorizon: return "reached-horizon";
    case EventKind::Singularity: return "singularity";
    case EventKind::LengthBlowup: return "length-blowup";
    case EventKind::LengthVanish: return "length-vanish";
    case EventKind::AreaVanish: return "area-vanish";
    case EventKind::HDomainExit: return "H-domain-exit";
    case EventKind::StepCollapse: return "step-collapse";
  }
  return "unknown";
}

std::string outcome_name(const Outcome& outcome) {
  return std::visit(overloaded{
                        [](const outcomes::ConvergesToCircle&) { return "ConvergesToCircle"; },
                        [](const outcomes::CurvatureSingularity&) { return "CurvatureSingularity"; },
                        [](const outcomes::LengthBlowupRescaledCircle&) {
                          return "LengthBlowupRescaledCircle";
                        },
                        [](const outcomes::LengthVanishesSingularityForced&) {
                          return "LengthVanishesSingularityForced";
                        },
                        [](const outcomes::AreaVanishesCurvatureBlowup&) {
                          return "AreaVanishesCurvatureBlowup";
                        },
                        [](const outcomes::Undetermined&) { return "Undetermined"; },
                    },
                    outcome);
}

std::string verdict(const Outcome& outcome) {
  std::string head = outcome_name(outcome);
  return head + " " +
         std::visit(overloaded{
                        [](const outcomes::ConvergesToCircle& o) {
                          return "center=(" + fmt(o.center[0]) + "," + fmt(o.center[1]) +
                                 ") limit_L=" + (o.limit_infinite ? "inf" : fmt(o.limit_length));
                        },
                        [](const outcomes::CurvatureSingularity& o) {
                          return "t*=" + fmt(o.t_star) + " theta*=" + fmt(o.theta_star);
                        },
                        [](const outcomes::LengthBlowupRescaledCircle& o) {
                          return "T_max=" + fmt(o.t_max);
                        },
                        [](const outcomes::LengthVanishesSingularityForced& o) {
                          return "T_max=" + fmt(o.t_max) +
                                 (o.theorem_violation ? " theorem-violation" : "");
                        },
                        [](const outcomes::AreaVanishesCurvatureBlowup& o) {
                          return "T_max=" + fmt(o.t_max) + " ell=" + fmt(o.ell);
                        },
                        [](const outcomes::Undetermined& o) { return o.diagnostic; },
                    },
                    outcome);
}

RadiusMonitor::RadiusMonitor(const SupportSpectrum& initial)
    : initial_(initial), grid_size_(validation_grid_size(initial.truncation())) {
  const std::size_t n_max = initial.truncation();
  mode_values_.assign((n_max - 1) * grid_size_, 0.0);
  for (std::size_t n = 2; n <= n_max; ++n) {
    const double f = 1.0 - static_cast<double>(n * n);
    const double a = initial.cos_coeff(n), b = initial.sin_coeff(n);
    if (a == 0.0 && b == 0.0) continue;
    for (std::size_t j = 0; j < grid_size_; ++j) {
      // Reduce n*j mod grid so the tabulated angle is exact on the grid.
      const std::size_t k = (n * j) % grid_size_;
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(grid_size_);
      mode_values_[(n - 2) * grid_size_ + j] = f * (a * std::cos(ang) + b * std::sin(ang));
    }
  }
}

std::vector<double> RadiusMonitor::radius_values(double length, double t) const {
  std::vector<double> out(grid_size_, length / kTwoPi);
  for (std::size_t n = 2; n <= initial_.truncation(); ++n) {
    if (initial_.cos_coeff(n) == 0.0 && initial_.sin_coeff(n) == 0.0) continue;
    const double factor = mode_factor(n, t);
    if (factor == 0.0) continue;
    const double* row = &mode_values_[(n - 2) * grid_size_];
    for (std::size_t j = 0; j < grid_size_; ++j) out[j] += factor * row[j];
  }
  return out;
}

double RadiusMonitor::min_radius(double length, double t) const {
  const auto values = radius_values(length, t);
  return *std::min_element(values.begin(), values.end());
}

double RadiusMonitor::argmin_theta(double length, double t) const {
  const auto values = radius_values(length, t);
  const double lowest = *std::min_element(values.begin(), values.end());
  const double tie = 1e-13 * std::max(1.0, std::abs(length / kTwoPi));
  std::size_t index = 0;
  while (values[index] > lowest + tie) ++index;

  const double spacing = kTwoPi / static_cast<double>(grid_size_);
  const double start = spacing * static_cast<double>(index);
  const SupportSpectrum spec = propagate(DeviationSpectrum(initial_), t).with_mean(length / kTwoPi);
  double theta = start;
  for (int iter = 0; iter < 8; ++iter) {
    const double slope = radius_of_curvature_slope(spec, theta);
    const double curvature = support_derivative(spec, theta, 4) + support_derivative(spec, theta, 2);
    if (!(curvature > 0.0)) break;
    const double next = theta - slope / curvature;
    if (std::abs(next - start) > spacing) break;
    if (std::abs(next - theta) < 1e-15) {
      theta = next;
      break;
    }
    theta = next;
  }
  return normalize_angle(theta);
}

Trajectory integrate(const SupportSpectrum& initial, const NonlocalTerm& term,
                     const IntegratorControls& controls) {
  controls.validate();
  const double initial_min = validate_convexity(initial);
  if (!(initial_min > kConvexityThreshold)) {
    throw Error(ErrorCode::NotConvex,
                "initial curve fails convexity validation (min radius of curvature " +
                    fmt(initial_min) + ")");
  }

  const RadiusMonitor monitor(initial);
  auto rhs = [&](double t, double length) {
    return length_rate(term, make_flow_state(initial, length, t));
  };

  Trajectory traj;
  double t = 0.0;
  double length = curve_length(initial);
  traj.states.push_back(make_flow_state(initial, length, t));

  const double dt_sample = controls.sample_interval;
  std::size_t sample_index = 1;
  auto sample_time = [&](std::size_t k) {
    return std::min(controls.t_max, dt_sample * static_cast<double>(k));
  };
  double h = std::min(1e-3, dt_sample);

  // Event functions are positive while the run may continue.
  // Ties within the bisection tolerance go to the lower slot, so a circle
  // shrinking to a point reports vanishing rather than a singularity.
  enum EventSlot { kLengthVanish, kAreaVanish, kSingular, kLengthBlowup, kSlotCount };
  constexpr EventKind slot_kind[kSlotCount] = {EventKind::LengthVanish, EventKind::AreaVanish,
                                               EventKind::Singularity, EventKind::LengthBlowup};
  auto event_value = [&](int slot, double at, double len) {
    switch (slot) {
      case kSingular: return monitor.min_radius(len, at) - controls.singularity_eps;
      // L^2/4pi is even in L, so an overshoot past L = 0 must still count.
      case kAreaVanish: return len <= 0.0 ? -1.0 : area_along_flow(initial, len, at) - controls.area_vanish;
      case kLengthVanish: return len - controls.length_vanish;
      default: return controls.length_blowup - len;
    }
  };

  auto finish = [&](EventKind kind, double at, double len, double theta, std::string diag) {
    if (at > traj.states.back().t) traj.states.push_back(make_flow_state(initial, len, at));
    traj.event = TerminationEvent{kind, at, theta, std::move(diag)};
    try {
      traj.final_length_rate = rhs(at, len);
    } catch (const Error&) {
      traj.final_length_rate = std::numeric_limits<double>::quiet_NaN();
    }
    traj.outcome = classify(traj);
    return std::move(traj);
  };

  while (true) {
    if (t >= controls.t_max) {
      return finish(EventKind::ReachedHorizon, t, length, 0.0, {});
    }
    const double target = sample_time(sample_index);
    bool lands_on_sample = false;
    if (t + h >= target) {
      h = target - t;
      lands_on_sample = true;
    }

    StepResult step;
    try {
      step = dopri5_step(rhs, t, length, h);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Domain) throw;
      h *= 0.5;
      if (h < kMinStepSize) return finish(EventKind::HDomainExit, t, length, 0.0, e.what());
      continue;
    }
    const double scale =
        controls.abs_tol + controls.rel_tol * std::max(std::abs(length), std::abs(step.value));
    const double err = std::abs(step.error) / scale;
    if (!std::isfinite(step.value) || !(err <= 1.0)) {
      h *= std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.1;
      if (h < kMinStepSize) {
        return finish(EventKind::StepCollapse, t, length, 0.0,
                      "step size collapsed below 1e-14 at t=" + fmt(t));
      }
      continue;
    }

    const double t_next = lands_on_sample ? target : t + h;
    const double length_next = step.value;

    // Locate the earliest crossing among all event functions that fired.
    double first_time = std::numeric_limits<double>::infinity();
    int first_slot = -1;
    for (int slot = 0; slot < kSlotCount; ++slot) {
      if (event_value(slot, t_next, length_next) > 0.0) continue;
      double lo = 0.0, hi = t_next - t;
      while (hi - lo > kEventTimeTolerance) {
        const double mid = 0.5 * (lo + hi);
        bool crossed = true;
        try {
          crossed = event_value(slot, t + mid, dopri5_step(rhs, t, length, mid).value) <= 0.0;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::Domain) throw;
        }
        (crossed ? hi : lo) = mid;
      }
      if (t + hi < first_time) {
        first_time = t + hi;
        first_slot = slot;
      }
    }
    if (first_slot >= 0) {
      const double len = dopri5_step(rhs, t, length, first_time - t).value;
      const double theta = first_slot == kSingular ? monitor.argmin_theta(len, first_time) : 0.0;
      return finish(slot_kind[first_slot], first_time, len, theta, {});
    }

    t = t_next;
    length = length_next;
    if (lands_on_sample) {
      traj.states.push_back(make_flow_state(initial, length, t));
      ++sample_index;
    }
    const double grow = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h = std::min(h * grow, dt_sample);
  }
}

std::optional<SingularityHit> detect_singularity(const SupportSpectrum& initial,
                                                 const std::function<double(double)>& length_of_t,
                                                 double horizon, double eps) {
  const RadiusMonitor monitor(initial);
  auto g = [&](double t) { return monitor.min_radius(length_of_t(t), t) - eps; };
  if (g(0.0) <= 0.0) return SingularityHit{0.0, monitor.argmin_theta(length_of_t(0.0), 0.0)};
  const double dt = std::min(1e-2, horizon / 100.0);
  double prev = 0.0;
  while (prev < horizon) {
    const double next = std::min(horizon, prev + dt);
    if (g(next) <= 0.0) {
      double lo = prev, hi = next;
      while (hi - lo > kEventTimeTolerance) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? hi : lo) = mid;
      }
      return SingularityHit{hi, monitor.argmin_theta(length_of_t(hi), hi)};
    }
    prev = next;
  }
  return std::nullopt;
}

Outcome classify(const Trajectory& trajectory) {
  if (trajectory.states.empty()) return outcomes::Undetermined{"empty trajectory"};
  const FlowState& first = trajectory.states.front();
  const FlowState& last = trajectory.states.back();
  const TerminationEvent& ev = trajectory.event;
  switch (ev.kind) {
    case EventKind::ReachedHorizon: {
      const bool infinite = std::isfinite(trajectory.final_length_rate) &&
                            trajectory.final_length_rate >= 0.5 * last.length;
      return outcomes::ConvergesToCircle{
          {first.spectrum.cos_coeff(1), first.spectrum.sin_coeff(1)}, last.length, infinite};
    }
    case EventKind::Singularity: return outcomes::CurvatureSingularity{ev.t, ev.theta};
    case EventKind::LengthBlowup: return outcomes::LengthBlowupRescaledCircle{ev.t};
    case EventKind::LengthVanish: {
      const double l0 = first.length;
      const bool circle = isoperimetric_deficit(first.spectrum) <= 1e-12 * l0 * l0;
      return outcomes::LengthVanishesSingularityForced{ev.t, !circle};
    }
    case EventKind::AreaVanish: return outcomes::AreaVanishesCurvatureBlowup{ev.t, last.length};
    case EventKind::HDomainExit:
      return outcomes::Undetermined{"H left its domain at t=" + fmt(ev.t) + ": " + ev.diagnostic};
    case EventKind::StepCollapse: return outcomes::Undetermined{ev.diagnostic};
  }
  return outcomes::Undetermined{"unknown event"};
}

SupportSpectrum rescaled_support(const FlowState& state) {
  if (!(state.length > 0.0)) {
    throw Error(ErrorCode::Domain, "rescaling needs a positive length");
  }
  return state.spectrum.scaled(kTwoPi / state.length);
}

}  // namespace curveflow
