#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qdatabus/errors.hpp"

namespace qdatabus {

inline std::vector<double> linspace(double start, double stop, int samples) {
  detail::require(samples >= 2, "a time grid needs at least 2 samples");
  std::vector<double> out(static_cast<std::size_t>(samples));
  const double step = (stop - start) / (samples - 1);
  for (int i = 0; i < samples; ++i) out[i] = start + step * i;
  out.back() = stop;
  return out;
}

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a maximum of a unimodal f on [lo, hi].
inline Extremum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                        double hi, double tolerance = 1e-6) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

inline std::size_t argmax(std::span<const double> values) {
  detail::require(!values.empty(), "argmax of an empty series");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

// Grid maximum refined by golden-section search between its neighbours.
inline Extremum refined_maximum(std::span<const double> grid, std::span<const double> values,
                                const std::function<double(double)>& f, double tolerance = 1e-6) {
  const std::size_t i = argmax(values);
  const double lo = grid[i == 0 ? 0 : i - 1];
  const double hi = grid[std::min(i + 1, grid.size() - 1)];
  Extremum best{grid[i], values[i]};
  const Extremum refined = golden_section_maximize(f, lo, hi, tolerance);
  return refined.value > best.value ? refined : best;
}

// First interior local maximum whose topographic prominence reaches
// `min_prominence`. Plateaus count at their first sample.
inline std::optional<std::size_t> first_prominent_peak(std::span<const double> v,
                                                       double min_prominence) {
  const std::size_t n = v.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    double left_min = v[i];
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] > v[i]) break;
      left_min = std::min(left_min, v[j]);
    }
    double right_min = v[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] > v[i]) break;
      right_min = std::min(right_min, v[j]);
    }
    if (v[i] - std::max(left_min, right_min) >= min_prominence) return i;
  }
  return std::nullopt;
}

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

// Least squares on log y = log A + k log x.
inline PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size(), "fit needs paired samples");
  detail::require(x.size() >= 3, "power-law fit requires at least 3 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require(x[i] > 0.0 && y[i] > 0.0, "power-law fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  detail::require(denom > 0.0, "power-law fit needs at least two distinct abscissae");
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]);
    const double pred = intercept + fit.exponent * std::log(x[i]);
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - mean) * (ly - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

inline double median(std::vector<double> values) {
  detail::require(!values.empty(), "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace qdatabus
