#include "qcsm/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "qcsm/errors.hpp"

namespace qcsm {

double t_quantile_975(std::size_t df) {
  if (df == 0) throw ContractViolation("t quantile needs at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.975);
}

Summary summarize_samples(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  const double half = t_quantile_975(values.size() - 1) * s.stddev / std::sqrt(static_cast<double>(values.size()));
  s.ci95 = Interval{s.mean - half, s.mean + half};
  return s;
}

}  // namespace qcsm
