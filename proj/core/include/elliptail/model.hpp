#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elliptail/radial.hpp"

namespace elliptail {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Bivariate elliptical law: (X, Y) = mu + sigma * R (cos U, rho cos U +
/// sqrt(1 - rho^2) sin U) with U uniform on [-pi/2, 3pi/2] independent of R.
class EllipticalModel {
 public:
  /// Throws Error(invalid_argument) unless sigma_x, sigma_y > 0 and |rho| < 1.
  EllipticalModel(double mu_x, double mu_y, double sigma_x, double sigma_y,
                  double rho, RadialLaw radial);

  /// Location 0, scale 1.
  static EllipticalModel standard(double rho, RadialLaw radial);

  double mu_x() const noexcept { return mu_x_; }
  double mu_y() const noexcept { return mu_y_; }
  double sigma_x() const noexcept { return sigma_x_; }
  double sigma_y() const noexcept { return sigma_y_; }
  double rho() const noexcept { return rho_; }
  const RadialLaw& radial() const noexcept { return radial_; }

  Point standardize(Point p) const noexcept;
  Point unstandardize(Point p) const noexcept;

  /// Model of (X, -Y): correlation -rho, location -mu_y.
  EllipticalModel flipped() const;

 private:
  double mu_x_;
  double mu_y_;
  double sigma_x_;
  double sigma_y_;
  double rho_;
  RadialLaw radial_;
};

/// Observed (x, y) pairs. Values must be finite and the sample non-empty;
/// estimators enforce their own minimum sizes.
class PairedSample {
 public:
  explicit PairedSample(std::vector<Point> pairs);

  std::size_t size() const noexcept { return pairs_.size(); }
  std::span<const Point> pairs() const noexcept { return pairs_; }
  const Point& operator[](std::size_t i) const noexcept { return pairs_[i]; }

  std::vector<double> xs() const;
  std::vector<double> ys() const;

 private:
  std::vector<Point> pairs_;
};

/// Maps a radius and an angle through the elliptical representation and
/// the model's location/scale.
Point represent(const EllipticalModel& model, double radius, double angle) noexcept;

/// n pairs drawn from the model. Pair i is a pure function of (seed, i), so
/// the result is identical for any `jobs` >= 1.
PairedSample sample_pairs(const EllipticalModel& model, std::uint64_t seed,
                          std::size_t n, unsigned jobs = 1);

/// Deterministic hook: builds the sample from given radii and angles (equal
/// lengths) instead of random draws.
PairedSample pairs_from_representation(const EllipticalModel& model,
                                       std::span<const double> radii,
                                       std::span<const double> angles);

}  // namespace elliptail
