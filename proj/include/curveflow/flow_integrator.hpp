#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curveflow/nonlocal_flows.hpp"
#include "curveflow/support_geometry.hpp"

namespace curveflow {

struct IntegratorControls {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double t_max = 50.0;
  double length_blowup = 1e12;
  double length_vanish = 1e-12;
  double area_vanish = 1e-12;
  double singularity_eps = 1e-9;
  double sample_interval = 0.05;

  // Throws InvalidArgument unless every field is positive and rel_tol < 1.
  void validate() const;
  friend bool operator==(const IntegratorControls&, const IntegratorControls&) = default;
};

inline constexpr double kEventTimeTolerance = 1e-10;
inline constexpr double kMinStepSize = 1e-14;

enum class EventKind {
  ReachedHorizon,
  Singularity,
  LengthBlowup,
  LengthVanish,
  AreaVanish,
  HDomainExit,
  StepCollapse,
};

std::string to_string(EventKind kind);

struct TerminationEvent {
  EventKind kind = EventKind::ReachedHorizon;
  double t = 0.0;
  // Normal angle of the singular point; only meaningful for Singularity.
  double theta = 0.0;
  std::string diagnostic;
};

namespace outcomes {

struct ConvergesToCircle {
  Point2 center{};
  double limit_length = 0.0;
  // Set when L is still growing at rate >= L/2 at the horizon.
  bool limit_infinite = false;
};
struct CurvatureSingularity {
  double t_star = 0.0;
  double theta_star = 0.0;
};
struct LengthBlowupRescaledCircle {
  double t_max = 0.0;
};
struct LengthVanishesSingularityForced {
  double t_max = 0.0;
  // A non-circular curve reached L -> 0 with no prior singularity. Shrinking
  // to a point forces a singularity first, so this flags an inconsistency.
  bool theorem_violation = false;
};
struct AreaVanishesCurvatureBlowup {
  double t_max = 0.0;
  double ell = 0.0;
};
struct Undetermined {
  std::string diagnostic;
};

}  // namespace outcomes

using Outcome = std::variant<outcomes::ConvergesToCircle, outcomes::CurvatureSingularity,
                             outcomes::LengthBlowupRescaledCircle,
                             outcomes::LengthVanishesSingularityForced,
                             outcomes::AreaVanishesCurvatureBlowup, outcomes::Undetermined>;

std::string outcome_name(const Outcome& outcome);
// One-line human verdict, e.g. "ConvergesToCircle center=(0,0) limit_L=6.28319".
std::string verdict(const Outcome& outcome);

struct Trajectory {
  std::vector<FlowState> states;
  TerminationEvent event;
  Outcome outcome;
  double final_length_rate = 0.0;
};

struct SingularityHit {
  double t = 0.0;
  double theta = 0.0;
};

// Minimum radius of curvature over the validation grid as a function of (L, t),
// with the initial spectrum's modes cached on the grid.
class RadiusMonitor {
 public:
  explicit RadiusMonitor(const SupportSpectrum& initial);

  double min_radius(double length, double t) const;
  // Smallest grid angle attaining the minimum, refined by Newton on the slope.
  double argmin_theta(double length, double t) const;

 private:
  std::vector<double> radius_values(double length, double t) const;

  SupportSpectrum initial_;
  std::size_t grid_size_;
  // mode_values_[(n-2) * grid + j] = (1-n^2)(a_n cos n theta_j + b_n sin n theta_j)
  std::vector<double> mode_values_;
};

Trajectory integrate(const SupportSpectrum& initial, const NonlocalTerm& term,
                     const IntegratorControls& controls = {});

// Scans [0, horizon] for the first time the grid minimum of the radius of
// curvature drops to eps along the given length path, then bisects to 1e-10.
std::optional<SingularityHit> detect_singularity(const SupportSpectrum& initial,
                                                 const std::function<double(double)>& length_of_t,
                                                 double horizon, double eps = 1e-9);

Outcome classify(const Trajectory& trajectory);

// Support spectrum of 2 pi gamma / L: mean becomes 1.
SupportSpectrum rescaled_support(const FlowState& state);

}  // namespace curveflow
