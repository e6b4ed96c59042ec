#pragma once

// Convex closed plane curves represented by the Fourier spectrum of their
// support function u(theta) = <X(theta), (cos theta, sin theta)>, where theta is
// the outward normal angle. Radius of curvature is u'' + u, length is the
// integral of u, and the curve itself is recovered from (u, u').

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace curveflow {

using Point2 = std::array<double, 2>;

inline constexpr std::size_t kDefaultTruncation = 64;
inline constexpr std::size_t kMinConvexityGrid = 512;
inline constexpr double kConvexityThreshold = 1e-9;

// u(theta) = mean + sum_{n=1..N} (cos_n cos(n theta) + sin_n sin(n theta)).
class SupportSpectrum {
 public:
  SupportSpectrum(double mean, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

  static SupportSpectrum circle(double radius, std::size_t truncation = 2);

  double mean() const noexcept { return mean_; }
  std::size_t truncation() const noexcept { return cos_.size(); }
  // Coefficient of mode n (1-based); zero beyond the truncation.
  double cos_coeff(std::size_t n) const noexcept { return n >= 1 && n <= cos_.size() ? cos_[n - 1] : 0.0; }
  double sin_coeff(std::size_t n) const noexcept { return n >= 1 && n <= sin_.size() ? sin_[n - 1] : 0.0; }
  std::span<const double> cos_coeffs() const noexcept { return cos_; }
  std::span<const double> sin_coeffs() const noexcept { return sin_; }

  // Copy with the truncation raised to `truncation` (zero padding); never shrinks.
  SupportSpectrum padded(std::size_t truncation) const;
  SupportSpectrum scaled(double factor) const;
  SupportSpectrum with_mean(double mean) const;

  friend bool operator==(const SupportSpectrum&, const SupportSpectrum&) = default;

 private:
  double mean_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct CurveSamples {
  std::vector<double> thetas;
  std::vector<Point2> points;
};

struct GeometricSummary {
  double length = 0.0;
  double area = 0.0;
  double ipd = 0.0;
  double ipr = 1.0;
  double k_min = 0.0;
  double k_max = 0.0;
  double inv_curv_integral = 0.0;
  double sq_curv_integral = 0.0;
  // False when the spectrum is not strictly convex; k_min, k_max and
  // sq_curv_integral are then NaN.
  bool curvature_valid = true;
};

// theta_j = 2 pi j / count, j = 0..count-1.
std::vector<double> uniform_grid(std::size_t count);
double normalize_angle(double theta);

// Cached cos/sin tables for evaluating spectra of a fixed truncation on a
// uniform grid. Construction is O(grid * N); evaluations are O(grid * N).
class SpectralGrid {
 public:
  SpectralGrid(std::size_t truncation, std::size_t grid_size);

  std::size_t truncation() const noexcept { return truncation_; }
  std::size_t size() const noexcept { return size_; }
  double theta(std::size_t j) const;

  // Values of the m-th theta derivative of u on the grid.
  std::vector<double> support_derivative(const SupportSpectrum& spec, int order) const;
  std::vector<double> radius_of_curvature(const SupportSpectrum& spec) const;

 private:
  std::size_t truncation_;
  std::size_t size_;
  std::vector<double> cos_table_;  // [j * N + (n-1)]
  std::vector<double> sin_table_;
};

// Grid size used for convexity checks and curvature extrema: max(4N, 512).
std::size_t validation_grid_size(std::size_t truncation);

SupportSpectrum project_from_samples(std::span<const double> samples, std::size_t truncation);

// Exact Fourier projection of the (piecewise-linear in cos/sin) support
// function of a convex counterclockwise polygon. The truncated series of a
// polygon is generally not strictly convex; callers must validate.
SupportSpectrum spectrum_from_polygon(std::span<const Point2> vertices, std::size_t truncation);

// Multiplies modes n >= 2 by the Fejer weights 1 - n/(N+1). The radius of
// curvature of a projected polygon then becomes a non-negative kernel sum.
SupportSpectrum fejer_smoothed(const SupportSpectrum& spec);

double evaluate_support(const SupportSpectrum& spec, double theta);
double support_derivative(const SupportSpectrum& spec, double theta, int order);
double radius_of_curvature(const SupportSpectrum& spec, double theta);
// d/dtheta of the radius of curvature.
double radius_of_curvature_slope(const SupportSpectrum& spec, double theta);

// Minimum radius of curvature over a uniform grid; requires grid_size >= 4N.
double validate_convexity(const SupportSpectrum& spec, std::size_t grid_size);
double validate_convexity(const SupportSpectrum& spec);
bool is_strictly_convex(const SupportSpectrum& spec);

double curve_length(const SupportSpectrum& spec);
double enclosed_area(const SupportSpectrum& spec);
// L^2 - 4 pi A = 2 pi^2 sum_{n>=2} (n^2-1)(a_n^2+b_n^2), evaluated without cancellation.
double isoperimetric_deficit(const SupportSpectrum& spec);
// Integral of (1/k) ds = integral of (u''+u)^2 dtheta.
double total_inverse_curvature(const SupportSpectrum& spec);
// Integral of k^2 ds = integral of dtheta / (u''+u), by trapezoid quadrature.
double sq_curvature_integral(const SupportSpectrum& spec, std::size_t grid_size);
double sq_curvature_integral(const SupportSpectrum& spec);

// P(theta) = u (cos, sin) + u' (-sin, cos).
CurveSamples curve_position(const SupportSpectrum& spec, std::span<const double> thetas);
CurveSamples curve_position(const SupportSpectrum& spec, std::size_t count);

GeometricSummary geometric_summary(const SupportSpectrum& spec);

}  // namespace curveflow
