#include "elliptail/model.hpp"

#include <cmath>
#include <thread>

#include "elliptail/errors.hpp"
#include "elliptail/rng.hpp"
#include "elliptail/special.hpp"

namespace elliptail {

EllipticalModel::EllipticalModel(double mu_x, double mu_y, double sigma_x,
                                 double sigma_y, double rho, RadialLaw radial)
    : mu_x_(mu_x), mu_y_(mu_y), sigma_x_(sigma_x), sigma_y_(sigma_y), rho_(rho),
      radial_(std::move(radial)) {
  if (!std::isfinite(mu_x) || !std::isfinite(mu_y)) {
    throw Error(ErrorKind::invalid_argument, "model locations must be finite");
  }
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !std::isfinite(sigma_x) ||
      !std::isfinite(sigma_y)) {
    throw Error(ErrorKind::invalid_argument, "model scales must be positive");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "model correlation must satisfy |rho| < 1");
  }
}

EllipticalModel EllipticalModel::standard(double rho, RadialLaw radial) {
  return EllipticalModel(0.0, 0.0, 1.0, 1.0, rho, std::move(radial));
}

Point EllipticalModel::standardize(Point p) const noexcept {
  return {(p.x - mu_x_) / sigma_x_, (p.y - mu_y_) / sigma_y_};
}

Point EllipticalModel::unstandardize(Point p) const noexcept {
  return {mu_x_ + sigma_x_ * p.x, mu_y_ + sigma_y_ * p.y};
}

EllipticalModel EllipticalModel::flipped() const {
  return EllipticalModel(mu_x_, -mu_y_, sigma_x_, sigma_y_, -rho_, radial_);
}

PairedSample::PairedSample(std::vector<Point> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) {
    throw Error(ErrorKind::insufficient_data, "paired sample is empty");
  }
  for (const Point& p : pairs_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::invalid_argument, "paired sample contains a non-finite value");
    }
  }
}

std::vector<double> PairedSample::xs() const {
  std::vector<double> out;
  out.reserve(pairs_.size());
  for (const Point& p : pairs_) out.push_back(p.x);
  return out;
}

std::vector<double> PairedSample::ys() const {
  std::vector<double> out;
  out.reserve(pairs_.size());
  for (const Point& p : pairs_) out.push_back(p.y);
  return out;
}

Point represent(const EllipticalModel& model, double radius, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double rho = model.rho();
  const Point standard{radius * c, radius * (rho * c + std::sqrt(1.0 - rho * rho) * s)};
  return model.unstandardize(standard);
}

PairedSample sample_pairs(const EllipticalModel& model, std::uint64_t seed,
                          std::size_t n, unsigned jobs) {
  if (n == 0) {
    throw Error(ErrorKind::invalid_argument, "sample_pairs requires n >= 1");
  }
  std::vector<Point> pairs(n);
  const RadialLaw& law = model.radial();
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const CounterRng rng(derive_seed(seed, i));
      const double radius = law.survival_inverse(rng.uniform_at(0));
      const double angle = -0.5 * kPi + 2.0 * kPi * rng.uniform_at(1);
      pairs[i] = represent(model, radius, angle);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    fill(0, n);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      const std::size_t begin = j * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end) workers.emplace_back(fill, begin, end);
    }
  }
  return PairedSample(std::move(pairs));
}

PairedSample pairs_from_representation(const EllipticalModel& model,
                                       std::span<const double> radii,
                                       std::span<const double> angles) {
  if (radii.size() != angles.size()) {
    throw Error(ErrorKind::invalid_argument, "radii and angles must have equal length");
  }
  std::vector<Point> pairs;
  pairs.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    pairs.push_back(represent(model, radii[i], angles[i]));
  }
  return PairedSample(std::move(pairs));
}

}  // namespace elliptail
