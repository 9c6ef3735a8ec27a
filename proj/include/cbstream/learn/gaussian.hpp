#pragma once

#include <cmath>
#include <limits>

#include "cbstream/core/binary_io.hpp"

namespace cbstream::learn {

inline constexpr double kVarianceFloor = 1e-9;

/// Weighted single-pass mean/variance (Welford, West's weighted form) with
/// observed range.
struct GaussianEstimator {
  double weight = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void update(double x, double w = 1.0) {
    if (w <= 0.0) return;
    const double next = weight + w;
    const double delta = x - mean;
    mean += w * delta / next;
    m2 += w * delta * (x - mean);
    if (m2 < 0.0) m2 = 0.0;
    weight = next;
    if (x < min) min = x;
    if (x > max) max = x;
  }

  /// Population variance M2 / n.
  double variance() const { return weight > 0.0 ? m2 / weight : 0.0; }
  double std_dev() const { return std::sqrt(variance()); }

  double log_pdf(double x, double floor = kVarianceFloor) const {
    const double var = variance() < floor ? floor : variance();
    const double d = x - mean;
    return -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - d * d / (2.0 * var);
  }

  /// Weight expected at or below `x` under the Gaussian fit, clipped to the
  /// observed range.
  double weight_at_or_below(double x) const {
    if (weight <= 0.0 || x < min) return 0.0;
    if (x >= max) return weight;
    const double sd = std_dev();
    if (sd <= 0.0) return mean <= x ? weight : 0.0;
    return weight * 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
  }

  void save(BinaryWriter& out) const {
    out.f64(weight);
    out.f64(mean);
    out.f64(m2);
    out.f64(min);
    out.f64(max);
  }
  static GaussianEstimator load(BinaryReader& in) {
    GaussianEstimator g;
    g.weight = in.f64();
    g.mean = in.f64();
    g.m2 = in.f64();
    g.min = in.f64();
    g.max = in.f64();
    return g;
  }
};

}  // namespace cbstream::learn
