#include "shapepose/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapepose/errors.hpp"

namespace shapepose::stats {

double percentile_sorted(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) {
    throw Error(ErrorKind::TooFewPoints, "percentile of an empty sample");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw Error(ErrorKind::DegenerateInput, "percentile rank outside [0, 1]");
  }
  const double pos = alpha * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::TooFewPoints, "median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::TooFewPoints, "median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

double mean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::TooFewPoints, "mean of an empty sample");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

TrimmedMean upper_trimmed_mean(std::vector<double> values, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) {
    throw Error(ErrorKind::DegenerateInput, "trim fraction must lie in [0, 0.5)");
  }
  if (values.empty()) {
    throw Error(ErrorKind::TooFewPoints, "trimmed mean of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  // The epsilon keeps products such as 0.1 * 30 = 3.0000000000000004 from
  // rounding up to an extra dropped value.
  const auto drop =
      static_cast<std::size_t>(std::ceil(trim * static_cast<double>(k) - 1e-9));
  TrimmedMean out;
  out.dropped = drop;
  out.kept = k - drop;
  out.value = mean(std::span<const double>(values.data(), out.kept));
  return out;
}

}  // namespace shapepose::stats
