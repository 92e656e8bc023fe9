#pragma once

#include <optional>
#include <span>

namespace qcsm {

struct Interval {
  double low;
  double high;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t count = 0;
  /// Two-sided 95% Student-t interval; empty with fewer than two samples.
  std::optional<Interval> ci95;
};

Summary summarize_samples(std::span<const double> values);
/// Two-sided 95% t quantile with `df` degrees of freedom.
double t_quantile_975(std::size_t df);

}  // namespace qcsm
