#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "elliptail/errors.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/special.hpp"

namespace elliptail {

namespace {

constexpr std::size_t kNaiveLimit = 5000;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Number of pairs within runs of equal keys in a sorted range.
template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first + 1;
    while (run != last && eq(*first, *run)) ++run;
    const std::int64_t len = run - first;
    total += len * (len - 1) / 2;
    first = run;
  }
  return total;
}

// Merge sort on y counting inversions (pairs with y strictly decreasing).
std::int64_t sort_count_swaps(std::vector<double>& y, std::vector<double>& buf,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_count_swaps(y, buf, lo, mid) + sort_count_swaps(y, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[j] < y[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = y[j++];
    } else {
      buf[k++] = y[i++];
    }
  }
  while (i < mid) buf[k++] = y[i++];
  while (j < hi) buf[k++] = y[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, y.begin() + lo);
  return swaps;
}

}  // namespace

double kendall_tau_naive(std::span<const Point> pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw Error(ErrorKind::insufficient_data, "Kendall tau needs n >= 2");
  std::int64_t score = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      score += sign(pairs[j].x - pairs[i].x) * sign(pairs[j].y - pairs[i].y);
    }
  }
  const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(score) / total;
}

double kendall_tau_merge(std::span<const Point> pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw Error(ErrorKind::insufficient_data, "Kendall tau needs n >= 2");
  std::vector<Point> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t ties_x =
      tied_pairs(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a.x == b.x; });
  const std::int64_t ties_xy = tied_pairs(sorted.begin(), sorted.end(),
                                          [](const Point& a, const Point& b) { return a == b; });
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = sorted[i].y;
  std::vector<double> buf(n);
  const std::int64_t discordant = sort_count_swaps(y, buf, 0, n);
  const std::int64_t ties_y =
      tied_pairs(y.begin(), y.end(), [](double a, double b) { return a == b; });
  // Pairs untied in both coordinates split into concordant + discordant.
  const std::int64_t untied = n0 - ties_x - ties_y + ties_xy;
  const std::int64_t score = untied - 2 * discordant;
  return static_cast<double>(score) / static_cast<double>(n0);
}

double kendall_tau(std::span<const Point> pairs) {
  return pairs.size() > kNaiveLimit ? kendall_tau_merge(pairs) : kendall_tau_naive(pairs);
}

double kendall_rho(const PairedSample& sample) {
  return std::sin(0.5 * kPi * kendall_tau(sample.pairs()));
}

}  // namespace elliptail
