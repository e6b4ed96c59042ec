#include "curveflow/heat_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curveflow/error.hpp"

namespace curveflow {

namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "propagation time must be finite and non-negative");
  }
}

}  // namespace

DeviationSpectrum::DeviationSpectrum(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (cos_.size() != sin_.size()) {
    throw Error(ErrorCode::InvalidArgument, "cosine and sine coefficient counts differ");
  }
}

DeviationSpectrum::DeviationSpectrum(const SupportSpectrum& spec)
    : cos_(spec.cos_coeffs().begin(), spec.cos_coeffs().end()),
      sin_(spec.sin_coeffs().begin(), spec.sin_coeffs().end()) {}

double DeviationSpectrum::evaluate(double theta) const {
  double acc = 0.0;
  for (std::size_t n = 1; n <= cos_.size(); ++n) {
    const double nt = static_cast<double>(n) * theta;
    acc += cos_[n - 1] * std::cos(nt) + sin_[n - 1] * std::sin(nt);
  }
  return acc;
}

SupportSpectrum DeviationSpectrum::with_mean(double mean) const {
  return SupportSpectrum(mean, cos_, sin_);
}

double mode_factor(std::size_t n, double t) {
  return std::exp((1.0 - static_cast<double>(n * n)) * t);
}

DeviationSpectrum propagate(const DeviationSpectrum& initial, double t) {
  require_nonnegative_time(t);
  std::vector<double> c(initial.cos_coeffs().begin(), initial.cos_coeffs().end());
  std::vector<double> s(initial.sin_coeffs().begin(), initial.sin_coeffs().end());
  if (t == 0.0) return DeviationSpectrum(std::move(c), std::move(s));
  // Mode 1 has factor exactly 1.
  for (std::size_t n = 2; n <= c.size(); ++n) {
    const double f = mode_factor(n, t);
    c[n - 1] *= f;
    s[n - 1] *= f;
  }
  return DeviationSpectrum(std::move(c), std::move(s));
}

double heat_kernel_smoothing(const std::function<double(double)>& f, double theta, double t,
                             const KernelQuadrature& quad) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "heat kernel needs t > 0");
  }
  const double root = std::sqrt(t);
  const double half_width = quad.window_sqrt_t * root;
  auto panels = static_cast<std::size_t>(std::ceil(2.0 * quad.window_sqrt_t * quad.panels_per_sqrt_t));
  panels = std::max(panels, quad.min_panels);
  if (panels % 2 != 0) ++panels;
  const double h = 2.0 * half_width / static_cast<double>(panels);
  const double norm = 1.0 / (2.0 * std::sqrt(std::numbers::pi * t));

  auto integrand = [&](double xi) {
    const double d = theta - xi;
    return std::exp(-d * d / (4.0 * t)) * f(xi);
  };
  const double lo = theta - half_width;
  double acc = integrand(lo) + integrand(theta + half_width);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(lo + h * static_cast<double>(i));
  }
  return std::exp(t) * norm * acc * h / 3.0;
}

double kernel_oracle(const std::function<double(double)>& u0, double theta, double t,
                     const KernelQuadrature& quad) {
  constexpr std::size_t kMeanGrid = 4096;
  double mean = 0.0;
  for (std::size_t j = 0; j < kMeanGrid; ++j) {
    mean += u0(2.0 * std::numbers::pi * static_cast<double>(j) / kMeanGrid);
  }
  mean /= static_cast<double>(kMeanGrid);
  return heat_kernel_smoothing([&](double xi) { return u0(xi) - mean; }, theta, t, quad);
}

double kernel_oracle(std::span<const double> u0_samples, double theta, double t,
                     const KernelQuadrature& quad) {
  const std::size_t m = u0_samples.size();
  if (m < 6) throw Error(ErrorCode::InvalidArgument, "need at least 6 support samples");
  // Band-limited interpolant through the samples, highest mode (m-1)/2 ... m/2-1.
  const SupportSpectrum interp = project_from_samples(u0_samples, (m - 2) / 2);
  const DeviationSpectrum dev(interp);
  return heat_kernel_smoothing([&](double xi) { return dev.evaluate(xi); }, theta, t, quad);
}

double e1(const SupportSpectrum& initial, double t) {
  require_nonnegative_time(t);
  double acc = 0.0;
  for (std::size_t n = 1; n <= initial.truncation(); ++n) {
    const double a = initial.cos_coeff(n), b = initial.sin_coeff(n);
    const double f = 1.0 - static_cast<double>(n * n);
    acc += f * std::exp(2.0 * f * t) * (a * a + b * b);
  }
  const double a0 = initial.mean();
  return std::numbers::pi * a0 * a0 * std::exp(2.0 * t) + 0.5 * std::numbers::pi * acc;
}

KnownScalars known_scalars(const SupportSpectrum& initial, double t) {
  require_nonnegative_time(t);
  double acc = 0.0;
  for (std::size_t n = 2; n <= initial.truncation(); ++n) {
    const double a = initial.cos_coeff(n), b = initial.sin_coeff(n);
    const double f = static_cast<double>(n * n) - 1.0;
    acc += f * std::exp(-2.0 * f * t) * (a * a + b * b);
  }
  return {0.0, -0.5 * std::numbers::pi * acc};
}

double known_scalar_rate(const SupportSpectrum& initial, double t) {
  require_nonnegative_time(t);
  double acc = 0.0;
  for (std::size_t n = 2; n <= initial.truncation(); ++n) {
    const double a = initial.cos_coeff(n), b = initial.sin_coeff(n);
    const double f = static_cast<double>(n * n) - 1.0;
    acc += f * f * std::exp(-2.0 * f * t) * (a * a + b * b);
  }
  return std::numbers::pi * acc;
}

double deviation_sup_norm(const DeviationSpectrum& initial, double t) {
  const DeviationSpectrum dev = propagate(initial, t);
  const std::size_t n = std::max<std::size_t>(dev.truncation(), 2);
  std::vector<double> c(dev.cos_coeffs().begin(), dev.cos_coeffs().end());
  std::vector<double> s(dev.sin_coeffs().begin(), dev.sin_coeffs().end());
  c.resize(n, 0.0);
  s.resize(n, 0.0);
  const SpectralGrid grid(n, validation_grid_size(n));
  const auto values = grid.support_derivative(SupportSpectrum(0.0, std::move(c), std::move(s)), 0);
  double sup = 0.0;
  for (double v : values) sup = std::max(sup, std::abs(v));
  return sup;
}

double deviation_bound_constant(const DeviationSpectrum& initial) {
  double acc = 0.0;
  for (std::size_t n = 1; n <= initial.truncation(); ++n) {
    acc += std::abs(initial.cos_coeff(n)) + std::abs(initial.sin_coeff(n));
  }
  return acc;
}

}  // namespace curveflow
