#include "curveflow/support_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "curveflow/error.hpp"

namespace curveflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (cos, sin) coefficient pair of the order-th derivative of a cos(n t) + b sin(n t).
std::array<double, 2> differentiate_mode(double a, double b, std::size_t n, int order) {
  const double scale = std::pow(static_cast<double>(n), order);
  switch (order % 4) {
    case 0: return {scale * a, scale * b};
    case 1: return {scale * b, -scale * a};
    case 2: return {-scale * a, -scale * b};
    default: return {-scale * b, scale * a};
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

SupportSpectrum::SupportSpectrum(double mean, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs)
    : mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (cos_.size() != sin_.size()) {
    throw Error(ErrorCode::InvalidArgument, "cosine and sine coefficient counts differ");
  }
  if (cos_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
  }
  if (!std::isfinite(mean_)) throw Error(ErrorCode::InvalidArgument, "mean is not finite");
  require_finite(cos_, "cosine coefficients");
  require_finite(sin_, "sine coefficients");
}

SupportSpectrum SupportSpectrum::circle(double radius, std::size_t truncation) {
  return SupportSpectrum(radius, std::vector<double>(truncation, 0.0),
                         std::vector<double>(truncation, 0.0));
}

SupportSpectrum SupportSpectrum::padded(std::size_t truncation) const {
  if (truncation <= cos_.size()) return *this;
  auto c = cos_;
  auto s = sin_;
  c.resize(truncation, 0.0);
  s.resize(truncation, 0.0);
  return SupportSpectrum(mean_, std::move(c), std::move(s));
}

SupportSpectrum SupportSpectrum::scaled(double factor) const {
  auto c = cos_;
  auto s = sin_;
  for (auto& v : c) v *= factor;
  for (auto& v : s) v *= factor;
  return SupportSpectrum(mean_ * factor, std::move(c), std::move(s));
}

SupportSpectrum SupportSpectrum::with_mean(double mean) const {
  return SupportSpectrum(mean, cos_, sin_);
}

std::vector<double> uniform_grid(std::size_t count) {
  std::vector<double> thetas(count);
  for (std::size_t j = 0; j < count; ++j) {
    thetas[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(count);
  }
  return thetas;
}

double normalize_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

SpectralGrid::SpectralGrid(std::size_t truncation, std::size_t grid_size)
    : truncation_(truncation),
      size_(grid_size),
      cos_table_(truncation * grid_size),
      sin_table_(truncation * grid_size) {
  for (std::size_t j = 0; j < size_; ++j) {
    const double th = theta(j);
    for (std::size_t n = 1; n <= truncation_; ++n) {
      cos_table_[j * truncation_ + n - 1] = std::cos(static_cast<double>(n) * th);
      sin_table_[j * truncation_ + n - 1] = std::sin(static_cast<double>(n) * th);
    }
  }
}

double SpectralGrid::theta(std::size_t j) const {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(size_);
}

std::vector<double> SpectralGrid::support_derivative(const SupportSpectrum& spec, int order) const {
  if (spec.truncation() > truncation_) {
    throw Error(ErrorCode::InvalidArgument, "spectrum truncation exceeds grid tables");
  }
  const std::size_t n_max = spec.truncation();
  std::vector<double> ca(n_max), sa(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto [c, s] = differentiate_mode(spec.cos_coeff(n), spec.sin_coeff(n), n, order);
    ca[n - 1] = c;
    sa[n - 1] = s;
  }
  std::vector<double> out(size_, order == 0 ? spec.mean() : 0.0);
  for (std::size_t j = 0; j < size_; ++j) {
    const double* ct = &cos_table_[j * truncation_];
    const double* st = &sin_table_[j * truncation_];
    double acc = 0.0;
    for (std::size_t k = 0; k < n_max; ++k) acc += ca[k] * ct[k] + sa[k] * st[k];
    out[j] += acc;
  }
  return out;
}

std::vector<double> SpectralGrid::radius_of_curvature(const SupportSpectrum& spec) const {
  if (spec.truncation() > truncation_) {
    throw Error(ErrorCode::InvalidArgument, "spectrum truncation exceeds grid tables");
  }
  const std::size_t n_max = spec.truncation();
  std::vector<double> ca(n_max), sa(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double f = 1.0 - static_cast<double>(n * n);
    ca[n - 1] = f * spec.cos_coeff(n);
    sa[n - 1] = f * spec.sin_coeff(n);
  }
  std::vector<double> out(size_);
  for (std::size_t j = 0; j < size_; ++j) {
    const double* ct = &cos_table_[j * truncation_];
    const double* st = &sin_table_[j * truncation_];
    double acc = 0.0;
    for (std::size_t k = 1; k < n_max; ++k) acc += ca[k] * ct[k] + sa[k] * st[k];
    out[j] = spec.mean() + acc;
  }
  return out;
}

std::size_t validation_grid_size(std::size_t truncation) {
  return std::max<std::size_t>(4 * truncation, kMinConvexityGrid);
}

SupportSpectrum project_from_samples(std::span<const double> samples, std::size_t truncation) {
  const std::size_t m = samples.size();
  if (truncation < 2) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
  if (m < 2 * truncation + 2) {
    std::ostringstream os;
    os << "need at least " << 2 * truncation + 2 << " samples for truncation " << truncation
       << ", got " << m;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  require_finite(samples, "support samples");

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(m);

  std::vector<double> c(truncation, 0.0), s(truncation, 0.0);
  const double w = 2.0 / static_cast<double>(m);
  for (std::size_t n = 1; n <= truncation; ++n) {
    double ac = 0.0, as = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      // Reduce n*j mod m so the angle stays small and exact on the grid.
      const std::size_t k = (n * j) % m;
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
      ac += samples[j] * std::cos(ang);
      as += samples[j] * std::sin(ang);
    }
    c[n - 1] = w * ac;
    s[n - 1] = w * as;
  }
  return SupportSpectrum(mean, std::move(c), std::move(s));
}

namespace {

double integral_cos(long m, double lo, double hi) {
  if (m == 0) return hi - lo;
  const double md = static_cast<double>(m);
  return (std::sin(md * hi) - std::sin(md * lo)) / md;
}

double integral_sin(long m, double lo, double hi) {
  if (m == 0) return 0.0;
  const double md = static_cast<double>(m);
  return (std::cos(md * lo) - std::cos(md * hi)) / md;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - a[1]) - (a[1] - o[1]) * (b[0] - a[0]);
}

}  // namespace

SupportSpectrum spectrum_from_polygon(std::span<const Point2> vertices, std::size_t truncation) {
  const std::size_t count = vertices.size();
  if (count < 3) throw Error(ErrorCode::InvalidArgument, "polygon needs at least 3 vertices");
  if (truncation < 2) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
  double scale = 0.0;
  for (const auto& v : vertices) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
      throw Error(ErrorCode::InvalidArgument, "polygon vertex is not finite");
    }
    scale = std::max({scale, std::abs(v[0]), std::abs(v[1])});
  }
  const double tol = 1e-12 * std::max(1.0, scale * scale);

  // Outward normal angle of edge i (v_i -> v_{i+1}), unwrapped to increase.
  std::vector<double> normal(count);
  double turning = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % count];
    const auto& c = vertices[(i + 2) % count];
    if (cross(a, b, c) <= tol) {
      std::ostringstream os;
      os << "polygon is not strictly convex counterclockwise at vertices (" << i << ", "
         << (i + 1) % count << ", " << (i + 2) % count << ")";
      throw Error(ErrorCode::NotConvex, os.str());
    }
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    normal[i] = std::atan2(-dx, dy);
    if (i > 0) {
      double step = normal[i] - normal[i - 1];
      while (step <= 0.0) step += kTwoPi;
      normal[i] = normal[i - 1] + step;
      turning += step;
    }
  }
  {
    double closing = normal[0] + kTwoPi - normal[count - 1];
    turning += closing;
  }
  if (std::abs(turning - kTwoPi) > 1e-9) {
    throw Error(ErrorCode::NotConvex, "polygon winds more than once (self-intersecting)");
  }

  double total = 0.0;
  std::vector<double> c(truncation, 0.0), s(truncation, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    // Vertex i+1 supports the normal arc between edges i and i+1.
    const auto& v = vertices[(i + 1) % count];
    const double lo = normal[i];
    const double hi = (i + 1 < count) ? normal[i + 1] : normal[0] + kTwoPi;
    const double x = v[0];
    const double y = v[1];
    total += x * integral_cos(1, lo, hi) + y * integral_sin(1, lo, hi);
    for (std::size_t n = 1; n <= truncation; ++n) {
      const long nm = static_cast<long>(n) - 1;
      const long np = static_cast<long>(n) + 1;
      const double ic_m = integral_cos(nm, lo, hi), ic_p = integral_cos(np, lo, hi);
      const double is_m = integral_sin(nm, lo, hi), is_p = integral_sin(np, lo, hi);
      c[n - 1] += 0.5 * (x * (ic_m + ic_p) + y * (is_p - is_m));
      s[n - 1] += 0.5 * (x * (is_p + is_m) + y * (ic_m - ic_p));
    }
  }
  for (auto& v : c) v /= std::numbers::pi;
  for (auto& v : s) v /= std::numbers::pi;
  return SupportSpectrum(total / kTwoPi, std::move(c), std::move(s));
}

SupportSpectrum fejer_smoothed(const SupportSpectrum& spec) {
  const std::size_t n_max = spec.truncation();
  std::vector<double> c(spec.cos_coeffs().begin(), spec.cos_coeffs().end());
  std::vector<double> s(spec.sin_coeffs().begin(), spec.sin_coeffs().end());
  for (std::size_t n = 2; n <= n_max; ++n) {
    const double w = 1.0 - static_cast<double>(n) / static_cast<double>(n_max + 1);
    c[n - 1] *= w;
    s[n - 1] *= w;
  }
  return SupportSpectrum(spec.mean(), std::move(c), std::move(s));
}

double support_derivative(const SupportSpectrum& spec, double theta, int order) {
  double acc = order == 0 ? spec.mean() : 0.0;
  for (std::size_t n = 1; n <= spec.truncation(); ++n) {
    auto [c, s] = differentiate_mode(spec.cos_coeff(n), spec.sin_coeff(n), n, order);
    const double nt = static_cast<double>(n) * theta;
    acc += c * std::cos(nt) + s * std::sin(nt);
  }
  return acc;
}

double evaluate_support(const SupportSpectrum& spec, double theta) {
  return support_derivative(spec, theta, 0);
}

double radius_of_curvature(const SupportSpectrum& spec, double theta) {
  double acc = spec.mean();
  for (std::size_t n = 2; n <= spec.truncation(); ++n) {
    const double f = 1.0 - static_cast<double>(n * n);
    const double nt = static_cast<double>(n) * theta;
    acc += f * (spec.cos_coeff(n) * std::cos(nt) + spec.sin_coeff(n) * std::sin(nt));
  }
  return acc;
}

double radius_of_curvature_slope(const SupportSpectrum& spec, double theta) {
  return support_derivative(spec, theta, 3) + support_derivative(spec, theta, 1);
}

double validate_convexity(const SupportSpectrum& spec, std::size_t grid_size) {
  if (grid_size < 4 * spec.truncation()) {
    throw Error(ErrorCode::InvalidArgument, "convexity grid must have at least 4N points");
  }
  const SpectralGrid grid(spec.truncation(), grid_size);
  const auto rho = grid.radius_of_curvature(spec);
  return *std::min_element(rho.begin(), rho.end());
}

double validate_convexity(const SupportSpectrum& spec) {
  return validate_convexity(spec, validation_grid_size(spec.truncation()));
}

bool is_strictly_convex(const SupportSpectrum& spec) {
  return validate_convexity(spec) > kConvexityThreshold;
}

double curve_length(const SupportSpectrum& spec) { return kTwoPi * spec.mean(); }

double enclosed_area(const SupportSpectrum& spec) {
  double acc = 0.0;
  for (std::size_t n = 2; n <= spec.truncation(); ++n) {
    const double a = spec.cos_coeff(n), b = spec.sin_coeff(n);
    acc += (static_cast<double>(n * n) - 1.0) * (a * a + b * b);
  }
  return std::numbers::pi * spec.mean() * spec.mean() - 0.5 * std::numbers::pi * acc;
}

double isoperimetric_deficit(const SupportSpectrum& spec) {
  double acc = 0.0;
  for (std::size_t n = 2; n <= spec.truncation(); ++n) {
    const double a = spec.cos_coeff(n), b = spec.sin_coeff(n);
    acc += (static_cast<double>(n * n) - 1.0) * (a * a + b * b);
  }
  return 2.0 * std::numbers::pi * std::numbers::pi * acc;
}

double total_inverse_curvature(const SupportSpectrum& spec) {
  const double length = curve_length(spec);
  double acc = 0.0;
  for (std::size_t n = 2; n <= spec.truncation(); ++n) {
    const double a = spec.cos_coeff(n), b = spec.sin_coeff(n);
    const double f = static_cast<double>(n * n) - 1.0;
    acc += f * f * (a * a + b * b);
  }
  return length * length / kTwoPi + std::numbers::pi * acc;
}

double sq_curvature_integral(const SupportSpectrum& spec, std::size_t grid_size) {
  const SpectralGrid grid(spec.truncation(), grid_size);
  const auto rho = grid.radius_of_curvature(spec);
  double acc = 0.0;
  for (double r : rho) {
    if (!(r > kConvexityThreshold)) {
      throw Error(ErrorCode::NotConvex, "curvature integral requires a strictly convex curve");
    }
    acc += 1.0 / r;
  }
  return acc * kTwoPi / static_cast<double>(grid_size);
}

double sq_curvature_integral(const SupportSpectrum& spec) {
  return sq_curvature_integral(spec, std::max<std::size_t>(2048, 8 * spec.truncation()));
}

CurveSamples curve_position(const SupportSpectrum& spec, std::span<const double> thetas) {
  CurveSamples out;
  out.thetas.assign(thetas.begin(), thetas.end());
  out.points.reserve(thetas.size());
  for (double th : thetas) {
    const double u = support_derivative(spec, th, 0);
    const double du = support_derivative(spec, th, 1);
    const double c = std::cos(th), s = std::sin(th);
    out.points.push_back({u * c - du * s, u * s + du * c});
  }
  return out;
}

CurveSamples curve_position(const SupportSpectrum& spec, std::size_t count) {
  const auto thetas = uniform_grid(count);
  return curve_position(spec, thetas);
}

GeometricSummary geometric_summary(const SupportSpectrum& spec) {
  GeometricSummary g;
  g.length = curve_length(spec);
  g.area = enclosed_area(spec);
  g.ipd = isoperimetric_deficit(spec);
  g.ipr = 1.0 + g.ipd / (4.0 * std::numbers::pi * g.area);
  g.inv_curv_integral = total_inverse_curvature(spec);

  const SpectralGrid grid(spec.truncation(), validation_grid_size(spec.truncation()));
  const auto rho = grid.radius_of_curvature(spec);
  const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
  if (*lo > kConvexityThreshold) {
    g.k_min = 1.0 / *hi;
    g.k_max = 1.0 / *lo;
    g.sq_curv_integral = sq_curvature_integral(spec);
  } else {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    g.curvature_valid = false;
    g.k_min = g.k_max = g.sq_curv_integral = nan;
  }
  return g;
}

}  // namespace curveflow
