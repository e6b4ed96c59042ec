#include "curveflow/nonlocal_flows.hpp"

#include <cmath>
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

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

double power_sum(const flows::PowerSum& h, double length, double area) {
  double total = 0.0;
  for (const auto& term : h.terms) {
    if ((length <= 0.0 && !is_integer(term.p)) || (area <= 0.0 && !is_integer(term.q))) {
      throw Error(ErrorCode::Domain, "power-sum H evaluated outside L > 0, A > 0");
    }
    total += term.coeff * std::pow(length, term.p) * std::pow(area, term.q);
  }
  if (!std::isfinite(total)) throw Error(ErrorCode::Domain, "power-sum H is not finite");
  return total;
}

double parse_field(std::string_view field, std::string_view context) {
  auto value = text::parse_number(field);
  if (!value || !std::isfinite(*value)) {
    throw Error(ErrorCode::Parse, "bad number '" + std::string(field) + "' in flow term '" +
                                      std::string(context) + "'");
  }
  return *value;
}

// Sum of (n^2-1)^2 (a_n^2 + b_n^2) over n >= 2.
double curvature_energy(const SupportSpectrum& spec) {
  double acc = 0.0;
  for (std::size_t n = 2; n <= spec.truncation(); ++n) {
    const double a = spec.cos_coeff(n), b = spec.sin_coeff(n);
    const double f = static_cast<double>(n * n) - 1.0;
    acc += f * f * (a * a + b * b);
  }
  return acc;
}

}  // namespace

NonlocalTerm parse_nonlocal_term(std::string_view raw) {
  const std::string_view s = text::trim(raw);
  if (s == "pan-yang") return flows::PanYang{};
  if (s == "lin-tsai") return flows::LinTsai{};
  if (s == "ma-cheng") return flows::MaCheng{};
  if (s.starts_with("const:")) return flows::Constant{parse_field(s.substr(6), s)};
  if (s.starts_with("powersum:")) {
    flows::PowerSum sum;
    for (auto group : text::split(s.substr(9), ';')) {
      const auto fields = text::split(group, ',');
      if (fields.size() != 3) {
        throw Error(ErrorCode::Parse, "power-sum term '" + std::string(text::trim(group)) +
                                          "' needs exactly three fields c,p,q");
      }
      sum.terms.push_back({parse_field(fields[0], s), parse_field(fields[1], s),
                           parse_field(fields[2], s)});
    }
    return sum;
  }
  throw Error(ErrorCode::Parse, "unknown flow tag '" + std::string(s) + "'");
}

std::string to_string(const NonlocalTerm& term) {
  return std::visit(
      overloaded{
          [](const flows::Constant& h) { return "const:" + text::format_number(h.c); },
          [](const flows::PanYang&) { return std::string("pan-yang"); },
          [](const flows::LinTsai&) { return std::string("lin-tsai"); },
          [](const flows::MaCheng&) { return std::string("ma-cheng"); },
          [](const flows::PowerSum& h) {
            std::string out = "powersum:";
            for (std::size_t i = 0; i < h.terms.size(); ++i) {
              if (i > 0) out += ';';
              out += text::format_number(h.terms[i].coeff) + ',' +
                     text::format_number(h.terms[i].p) + ',' + text::format_number(h.terms[i].q);
            }
            return out;
          },
      },
      term);
}

bool reads_spectrum(const NonlocalTerm& term) {
  return std::holds_alternative<flows::MaCheng>(term);
}

FlowState make_flow_state(const SupportSpectrum& initial, double length, double t) {
  const DeviationSpectrum dev = propagate(DeviationSpectrum(initial), t);
  const double offset = known_scalars(initial, t).e;
  return FlowState{
      .t = t,
      .length = length,
      .spectrum = dev.with_mean(length / kTwoPi),
      .area = length * length / (4.0 * std::numbers::pi) + offset,
      .area_offset = offset,
  };
}

double evaluate_h(const NonlocalTerm& term, const FlowState& state) {
  const double length = state.length;
  const double area = state.area;
  return std::visit(
      overloaded{
          [&](const flows::Constant& h) { return h.c; },
          [&](const flows::PanYang&) { return length / kTwoPi; },
          [&](const flows::LinTsai&) {
            if (!(length > 0.0)) throw Error(ErrorCode::Domain, "lin-tsai H needs L > 0");
            return 2.0 * area / length;
          },
          [&](const flows::MaCheng&) {
            if (!(length > 0.0)) throw Error(ErrorCode::Domain, "ma-cheng H needs L > 0");
            return total_inverse_curvature(state.spectrum) / length;
          },
          [&](const flows::PowerSum& h) { return power_sum(h, length, area); },
      },
      term);
}

double length_rate(const NonlocalTerm& term, const FlowState& state) {
  if (std::holds_alternative<flows::PanYang>(term)) return 0.0;
  if (std::holds_alternative<flows::MaCheng>(term)) {
    if (!(state.length > 0.0)) throw Error(ErrorCode::Domain, "ma-cheng H needs L > 0");
    // L - (2pi/L)(L^2/2pi + pi S) = -(2 pi^2 / L) S
    return -2.0 * std::numbers::pi * std::numbers::pi * curvature_energy(state.spectrum) /
           state.length;
  }
  return state.length - kTwoPi * evaluate_h(term, state);
}

double area_along_flow(const SupportSpectrum& initial, double length, double t) {
  return length * length / (4.0 * std::numbers::pi) + known_scalars(initial, t).e;
}

double area_rate(const NonlocalTerm& term, const FlowState& state) {
  return state.length / kTwoPi * length_rate(term, state) +
         std::numbers::pi * curvature_energy(state.spectrum);
}

double ipd_rate(const NonlocalTerm& term, const FlowState& state) {
  return 2.0 * state.length * length_rate(term, state) -
         4.0 * std::numbers::pi * area_rate(term, state);
}

}  // namespace curveflow
