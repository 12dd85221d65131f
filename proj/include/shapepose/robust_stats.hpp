#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shapepose::stats {

/// Percentile of an ascending-sorted sample with linear interpolation between
/// the two closest order statistics (inclusive ranks: position alpha*(K-1)).
double percentile_sorted(std::span<const double> sorted, double alpha);

/// Median; mean of the two middle order statistics for even counts.
double median(std::vector<double> values);

/// Lower-middle element for even counts.
double lower_median(std::vector<double> values);

double mean(std::span<const double> values);

struct TrimmedMean {
  double value = 0.0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

/// Sorts ascending, drops the largest ceil(trim*K) values and averages the rest.
/// trim must lie in [0, 0.5).
TrimmedMean upper_trimmed_mean(std::vector<double> values, double trim);

}  // namespace shapepose::stats
