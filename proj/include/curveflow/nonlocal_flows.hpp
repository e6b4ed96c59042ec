#pragma once

// Nonlocal speed offsets H for the flow dX/dt = (H - 1/k) N_in, and the
// self-contained length ODE dL/dt = L - 2 pi H(L, A(t)) they induce.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curveflow/support_geometry.hpp"

namespace curveflow {

namespace flows {

struct Constant {
  double c = 0.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};
// H = L / 2pi (length preserving).
struct PanYang {
  friend bool operator==(const PanYang&, const PanYang&) = default;
};
// H = 2A / L.
struct LinTsai {
  friend bool operator==(const LinTsai&, const LinTsai&) = default;
};
// H = (1/L) * integral of (1/k) ds (area preserving). Reads the spectrum, not just (L, A).
struct MaCheng {
  friend bool operator==(const MaCheng&, const MaCheng&) = default;
};
struct PowerTerm {
  double coeff = 0.0;
  double p = 0.0;
  double q = 0.0;
  friend bool operator==(const PowerTerm&, const PowerTerm&) = default;
};
// H = sum coeff * L^p * A^q.
struct PowerSum {
  std::vector<PowerTerm> terms;
  friend bool operator==(const PowerSum&, const PowerSum&) = default;
};

}  // namespace flows

using NonlocalTerm =
    std::variant<flows::Constant, flows::PanYang, flows::LinTsai, flows::MaCheng, flows::PowerSum>;

// pan-yang | lin-tsai | ma-cheng | const:<c> | powersum:<c,p,q>[;<c,p,q>...]
NonlocalTerm parse_nonlocal_term(std::string_view text);
std::string to_string(const NonlocalTerm& term);
bool reads_spectrum(const NonlocalTerm& term);

struct FlowState {
  double t = 0.0;
  double length = 0.0;
  // Mean L/2pi plus the propagated initial deviation.
  SupportSpectrum spectrum;
  // A = L^2/4pi + area_offset, where area_offset = E(t) <= 0.
  double area = 0.0;
  double area_offset = 0.0;
};

FlowState make_flow_state(const SupportSpectrum& initial, double length, double t);

double evaluate_h(const NonlocalTerm& term, const FlowState& state);
double length_rate(const NonlocalTerm& term, const FlowState& state);
// A(t) = L^2/4pi + E1(t) - L0^2 e^{2t}/4pi.
double area_along_flow(const SupportSpectrum& initial, double length, double t);
// dA/dt = (L/2pi) dL/dt + dE/dt.
double area_rate(const NonlocalTerm& term, const FlowState& state);
// d(L^2 - 4 pi A)/dt = 2 L dL/dt - 4 pi dA/dt.
double ipd_rate(const NonlocalTerm& term, const FlowState& state);

}  // namespace curveflow
