#pragma once

// Closed-form propagation of the zero-mean part B = u - L/2pi of the support
// function. B solves B_t = B_thth + B, so mode n is multiplied by exp((1-n^2) t)
// independently of the nonlocal term. The Gaussian heat-kernel quadrature is
// kept alongside as an independent oracle for the spectral route.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "curveflow/support_geometry.hpp"

namespace curveflow {

class DeviationSpectrum {
 public:
  DeviationSpectrum(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  explicit DeviationSpectrum(const SupportSpectrum& spec);

  std::size_t truncation() const noexcept { return cos_.size(); }
  double cos_coeff(std::size_t n) const noexcept { return n >= 1 && n <= cos_.size() ? cos_[n - 1] : 0.0; }
  double sin_coeff(std::size_t n) const noexcept { return n >= 1 && n <= sin_.size() ? sin_[n - 1] : 0.0; }
  std::span<const double> cos_coeffs() const noexcept { return cos_; }
  std::span<const double> sin_coeffs() const noexcept { return sin_; }

  double evaluate(double theta) const;
  SupportSpectrum with_mean(double mean) const;

  friend bool operator==(const DeviationSpectrum&, const DeviationSpectrum&) = default;

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Gaussian quadrature settings for the kernel oracle. The integration window is
// |xi - theta| <= window_sqrt_t * sqrt(t); composite Simpson uses
// panels_per_sqrt_t panels per unit sqrt(t), never fewer than min_panels.
struct KernelQuadrature {
  double window_sqrt_t = 16.0;
  double panels_per_sqrt_t = 64.0;
  std::size_t min_panels = 2048;
};

inline constexpr double kOracleAbsTolerance = 1e-8;

// exp((1 - n^2) t)
double mode_factor(std::size_t n, double t);

DeviationSpectrum propagate(const DeviationSpectrum& initial, double t);

// e^t * integral over the line of (4 pi t)^{-1/2} exp(-(theta-xi)^2 / 4t) f(xi) dxi.
double heat_kernel_smoothing(const std::function<double(double)>& f, double theta, double t,
                             const KernelQuadrature& quad = {});

// B(theta, t) from the raw initial support function, by quadrature. The initial
// mean is taken from a 4096-point trapezoid rule.
double kernel_oracle(const std::function<double(double)>& u0, double theta, double t,
                     const KernelQuadrature& quad = {});
// Same, for support samples on the uniform grid (trigonometric interpolation).
double kernel_oracle(std::span<const double> u0_samples, double theta, double t,
                     const KernelQuadrature& quad = {});

// E1(t) = pi a0^2 e^{2t} + (pi/2) sum (1-n^2) e^{2(1-n^2)t} (a_n^2 + b_n^2).
double e1(const SupportSpectrum& initial, double t);

struct KnownScalars {
  double d = 0.0;
  double e = 0.0;
};

// D(t) = 0 and E(t) = E1(t) - L0^2 e^{2t} / 4pi, the latter evaluated in the
// cancellation-free form -(pi/2) sum_{n>=2} (n^2-1) e^{2(1-n^2)t} (a_n^2+b_n^2).
KnownScalars known_scalars(const SupportSpectrum& initial, double t);
// dE/dt = pi sum_{n>=2} (n^2-1)^2 e^{2(1-n^2)t} (a_n^2+b_n^2) >= 0.
double known_scalar_rate(const SupportSpectrum& initial, double t);

// Grid sup-norm of the propagated deviation (grid max(4N, 512)).
double deviation_sup_norm(const DeviationSpectrum& initial, double t);
// sum (|a_n| + |b_n|): the constant C in |u - L/2pi| <= C e^t.
double deviation_bound_constant(const DeviationSpectrum& initial);

}  // namespace curveflow
