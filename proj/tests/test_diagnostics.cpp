#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curveflow/diagnostics.hpp"
#include "curveflow/error.hpp"
#include "oracles.hpp"

using namespace curveflow;
using oracle::kPi;

namespace {

const SupportSpectrum kEllipse(1.0, {0.0, 0.2}, {0.0, 0.0});
const SupportSpectrum kTriangular(1.0, {0.0, 0.0, 0.1}, {0.0, 0.0, 0.0});
const SupportSpectrum kCircle = SupportSpectrum::circle(1.0, 4);

IntegratorControls horizon(double t_max) {
  IntegratorControls c;
  c.t_max = t_max;
  return c;
}

// Quadrature versions of the three inequalities' slacks.
double go1_slack_by_quadrature(const SupportSpectrum& s) {
  const double l = oracle::length(s), a = oracle::area(s);
  return oracle::inverse_curvature(s) - (l * l - 2 * kPi * a) / kPi;
}

double go2_slack_by_quadrature(const SupportSpectrum& s) {
  const double l = oracle::length(s), a = oracle::area(s);
  return oracle::inverse_curvature(s) - (2 / kPi * (l * l - 4 * kPi * a) + 2 * a);
}

}  // namespace

TEST_CASE("report tolerance") {
  CHECK(make_report("x", 1.0, 1.0 + 1e-10).satisfied);
  CHECK_FALSE(make_report("x", 1.0, 1.0 + 1e-8).satisfied);
  CHECK(make_report("x", 1e6, 1e6 + 1e-4).satisfied);
  CHECK_FALSE(make_report("x", 1e6, 1e6 + 1e-2).satisfied);
  const auto r = make_report("y", 3.0, 2.0);
  CHECK(r.slack == 1.0);
  CHECK(r.name == "y");
}

TEST_CASE("summaries of flow states") {
  const auto s = summarize(make_flow_state(kEllipse, 2 * kPi, 0.0));
  CHECK(s.ipd == doctest::Approx(0.24 * kPi * kPi));
  CHECK(s.ipr == doctest::Approx(1 / 0.94));
  CHECK(s.k_min == doctest::Approx(0.625));
  CHECK(s.k_max == doctest::Approx(2.5));
  const auto moved = summarize(make_flow_state(SupportSpectrum(1.0, {0.3, 0.2}, {0.0, 0.0}), 2 * kPi, 0.0));
  CHECK(moved.ipd == s.ipd);
  CHECK(moved.area == s.area);
  CHECK(moved.k_max == doctest::Approx(s.k_max).epsilon(1e-14));
}

TEST_CASE("plain Green-Osher inequality") {
  CHECK(std::abs(go1(kCircle).slack) < 1e-14);
  CHECK(std::abs(go1(kEllipse).slack - 0.24 * kPi) < 1e-13);
  CHECK(std::abs(go1_slack_by_quadrature(kEllipse) - 0.24 * kPi) < 1e-11);
  // 2.64 pi - (4 pi^2 - 2 pi * 0.96 pi) / pi = 0.56 pi
  CHECK(std::abs(go1(kTriangular).slack - 0.56 * kPi) < 1e-13);
  CHECK(std::abs(go1_slack_by_quadrature(kTriangular) - 0.56 * kPi) < 1e-11);
}

TEST_CASE("refined Green-Osher inequality") {
  const auto e = go2(kEllipse);
  CHECK(std::abs(e.report.slack) <= 1e-10);
  CHECK(e.equality_case);
  CHECK(std::abs(go2_slack_by_quadrature(kEllipse)) < 1e-11);

  const auto t = go2(kTriangular);
  CHECK(std::abs(t.report.slack - 0.4 * kPi) < 1e-13);
  CHECK_FALSE(t.equality_case);
  CHECK(std::abs(go2_slack_by_quadrature(kTriangular) - 0.4 * kPi) < 1e-11);

  CHECK(std::abs(go2(kCircle).report.slack) < 1e-14);
  CHECK(go2(kCircle).equality_case);
}

TEST_CASE("spectral GO2 slack matches quadrature on random convex curves") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = oracle::random_convex_spectrum(rng, 2 + trial % 10);
    CHECK(std::abs(go2_spectral_slack(s) - go2_slack_by_quadrature(s)) < 1e-8);
    CHECK(std::abs(go2(s).report.slack - go2_spectral_slack(s)) < 1e-9);
    // GO2 improves GO1 by exactly (L^2 - 4 pi A) / pi.
    CHECK(std::abs(go1(s).slack - go2(s).report.slack - isoperimetric_deficit(s) / kPi) < 1e-9);
  }
}

TEST_CASE("Gage inequality") {
  CHECK(std::abs(gage(kCircle).slack) < 1e-12);
  const double ellipse_slack = 2.5 * kPi - 2 * kPi / 0.94;
  CHECK(std::abs(gage(kEllipse).slack - ellipse_slack) < 1e-12);
  CHECK(std::abs(oracle::sq_curvature(kEllipse) - 2.5 * kPi) < 1e-12);

  const SupportSpectrum wide(1.0, {0.0, 0.3}, {0.0, 0.0});
  const double wide_slack = 2 * kPi / std::sqrt(0.19) - 2 * kPi / 0.865;
  CHECK(std::abs(gage(wide).slack - wide_slack) < 1e-10);
  CHECK(gage(wide).slack > gage(kEllipse).slack);
  CHECK_THROWS_AS(gage(SupportSpectrum(1.0, {0.0, 0.5}, {0.0, 0.0})), Error);
}

TEST_CASE("all inequalities hold on random convex spectra") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = oracle::random_convex_spectrum(rng, 2 + trial % 14);
    const auto reports = inequality_suite(s, ":r");
    CHECK(reports.size() == 4);
    for (const auto& r : reports) {
      CHECK(r.slack >= -1e-9);
      CHECK(r.satisfied);
      CHECK(r.name.ends_with(":r"));
    }
  }
  CHECK(inequality_suite(SupportSpectrum(1.0, {0.0, 0.5}, {0.0, 0.0}), "").size() == 3);
}

TEST_CASE("isoperimetric deficit decay") {
  const auto py = integrate(kEllipse, flows::PanYang{}, horizon(3.0));
  const auto d = ipd_decay_ratio(py);
  CHECK_FALSE(d.zero_initial);
  CHECK(d.max_ratio <= 1.0 + 1e-12);
  // IPD = 0.24 pi^2 e^{-6t} exactly, so the ratio at the last sample is e^{-4t}.
  const auto& last = py.states.back();
  CHECK(isoperimetric_deficit(last.spectrum) * std::exp(2 * last.t) / isoperimetric_deficit(kEllipse) ==
        doctest::Approx(std::exp(-4 * last.t)).epsilon(1e-9));

  CHECK(ipd_decay_ratio(integrate(kCircle, flows::PanYang{}, horizon(1.0))).zero_initial);
  CHECK(ipd_decay_ratio(integrate(kEllipse, flows::Constant{-1.0}, horizon(5.0))).max_ratio <= 1.0 + 1e-12);

  std::mt19937_64 rng(53);
  const std::vector<NonlocalTerm> terms = {flows::LinTsai{}, flows::MaCheng{}, flows::Constant{0.5},
                                           flows::PowerSum{{{1.0, 1.0, 0.0}}}};
  for (int trial = 0; trial < 4; ++trial) {
    const auto s = oracle::random_convex_spectrum(rng, 5);
    for (const auto& term : terms) {
      CHECK(ipd_decay_ratio(integrate(s, term, horizon(3.0))).max_ratio <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("isoperimetric ratio monotonicity") {
  for (const NonlocalTerm& term : {NonlocalTerm{flows::PanYang{}}, NonlocalTerm{flows::MaCheng{}},
                                   NonlocalTerm{flows::LinTsai{}}, NonlocalTerm{flows::Constant{-1.0}}}) {
    const auto m = ipr_monotone(integrate(kEllipse, term, horizon(5.0)), term);
    CHECK(m.applicable);
    CHECK(m.non_increasing);
  }
  CHECK_FALSE(ipr_monotone(Trajectory{}, flows::Constant{1.0}).applicable);
  CHECK(ipr_monotone(Trajectory{}, flows::PowerSum{{{-1.0, 1.0, 0.0}, {-2.0, 0.0, 1.0}}}).applicable);
  CHECK_FALSE(ipr_monotone(Trajectory{}, flows::PowerSum{{{1.0, 1.0, 0.0}}}).applicable);
}

TEST_CASE("limit circle and convergence residual") {
  CHECK(limit_circle(kCircle) == Point2{0.0, 0.0});
  const SupportSpectrum shifted(1.0, {0.3, 0.2}, {0.0, 0.0});
  CHECK(limit_circle(shifted) == Point2{0.3, 0.0});
  CHECK(limit_circle(SupportSpectrum(1.0, {0.0, 0.0}, {-0.1, 0.0})) == Point2{0.0, -0.1});
  // The center is the mean of the support point position over the normal angle.
  const auto pts = curve_position(shifted, 256);
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts.points) {
    cx += p[0] / 256.0;
    cy += p[1] / 256.0;
  }
  CHECK(std::abs(cx - 0.3) < 1e-14);
  CHECK(std::abs(cy) < 1e-14);

  CHECK(convergence_residual(make_flow_state(kCircle, 2 * kPi, 3.0), kCircle) == 0.0);
  CHECK(std::abs(convergence_residual(make_flow_state(shifted, 2 * kPi, 0.0), shifted) - 0.2) < 1e-15);
  CHECK(std::abs(convergence_residual(make_flow_state(shifted, 2 * kPi, 1.0), shifted) - 0.2 * std::exp(-3.0)) < 1e-15);

  const auto traj = integrate(shifted, flows::PanYang{}, horizon(4.0));
  const double r0 = convergence_residual(traj.states.front(), shifted);
  for (const auto& s : traj.states) {
    CHECK(convergence_residual(s, shifted) <= r0 * std::exp(-3 * s.t) * (1 + 1e-9));
  }
}

TEST_CASE("derivative sup norms") {
  const auto norms = derivative_sup_norms(kEllipse);
  REQUIRE(norms.size() == 4);
  CHECK(norms[0] == doctest::Approx(0.4));
  CHECK(norms[1] == doctest::Approx(0.8));
  CHECK(norms[2] == doctest::Approx(1.6));
  CHECK(norms[3] == doctest::Approx(3.2));
  // Along a converging run they stay bounded by their initial values.
  const auto traj = integrate(kEllipse, flows::LinTsai{}, horizon(2.0));
  for (const auto& s : traj.states) {
    const auto n = derivative_sup_norms(s.spectrum);
    for (std::size_t m = 0; m < 4; ++m) CHECK(n[m] <= norms[m] * (1 + 1e-12));
  }
}
