#include "stqos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "stqos/error.hpp"
#include "stqos/random.hpp"

namespace stqos::metrics {

std::vector<double> empirical_tail(std::span<const double> samples, std::span<const double> thresholds) {
  if (samples.empty()) throw DomainError("empirical_tail: empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> probs;
  probs.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    probs.push_back(static_cast<double>(above) / n);
  }
  return probs;
}

namespace {

struct Point {
  double t;
  double p;
};

// OLS slope of ln p on t; nullopt when the abscissae are degenerate.
std::optional<double> ols_slope(std::span<const Point> pts) {
  const double m = static_cast<double>(pts.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (const auto& q : pts) {
    t_mean += q.t;
    y_mean += std::log(q.p);
  }
  t_mean /= m;
  y_mean /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& q : pts) {
    sxx += (q.t - t_mean) * (q.t - t_mean);
    sxy += (q.t - t_mean) * (std::log(q.p) - y_mean);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return sxy / sxx;
}

// First-order variance of the slope from nested exceedance counts:
//   cov(ln p_i, ln p_j) ~ (1 - p_i) / (N p_i) for t_i <= t_j.
double nested_binomial_variance(const std::vector<double>& t, const std::vector<double>& p, double t_mean,
                                double sxx, std::size_t sample_count) {
  const std::size_t m = t.size();
  const double n = static_cast<double>(sample_count);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  // sum_{i,j} w_i w_j c_{min(i,j)} = sum_k c_k (W_k^2 - W_{k+1}^2), W_k = suffix sum of w
  std::vector<double> suffix(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] + (t[order[k]] - t_mean) / sxx;
  double v = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double pk = p[order[k]];
    v += (1.0 - pk) / (n * pk) * (suffix[k] * suffix[k] - suffix[k + 1] * suffix[k + 1]);
  }
  return std::max(0.0, v);
}

constexpr int kResamples = 1000;
constexpr double kTwoSigmaCoverage = 0.9545;

// Squared spread of refitted slopes around `fitted_slope` when the N
// underlying samples are redrawn: the larger of the RMS deviation and half the
// 95.45% quantile of |deviation|. Resampling bias is included.
// Exceedance counts on a fixed grid are multinomial in the cell masses, drawn
// here as a chain X_{i+1} ~ Bin(X_i, p_{i+1} / p_i). The window is reapplied to
// every replicate. nullopt when the tail is not non-increasing or too few
// replicates admit a fit.
std::optional<double> resampled_slope_variance(std::span<const double> thresholds, std::span<const double> probs,
                                               const FitOptions& options, double fitted_slope) {
  std::vector<Point> all;
  all.reserve(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) all.push_back({thresholds[i], probs[i]});
  std::stable_sort(all.begin(), all.end(), [](const Point& a, const Point& b) { return a.t < b.t; });
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!(all[i].p >= 0.0 && all[i].p <= 1.0)) return std::nullopt;
    if (i > 0 && all[i].p > all[i - 1].p) return std::nullopt;
  }

  const auto n = static_cast<std::int64_t>(options.sample_count);
  const double nd = static_cast<double>(n);
  Rng rng(derive_seed(options.sample_count, all.size(), kResamples));
  std::vector<double> slopes;
  slopes.reserve(kResamples);
  std::vector<Point> window;
  for (int r = 0; r < kResamples; ++r) {
    window.clear();
    std::int64_t count = n;
    double prev = 1.0;
    for (const auto& pt : all) {
      const double ratio = prev > 0.0 ? std::min(1.0, pt.p / prev) : 0.0;
      count = count > 0 && ratio > 0.0 ? std::binomial_distribution<std::int64_t>(count, ratio)(rng) : 0;
      prev = pt.p;
      const double q = static_cast<double>(count) / nd;
      if (q > 0.0 && q >= options.prob_lo && q <= options.prob_hi) window.push_back({pt.t, q});
    }
    if (window.size() < kMinFitPoints) continue;
    if (const auto s = ols_slope(window)) slopes.push_back(*s);
  }
  if (slopes.size() < kResamples / 2) return std::nullopt;
  std::vector<double> dev(slopes.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    dev[i] = std::fabs(slopes[i] - fitted_slope);
    ss += dev[i] * dev[i];
  }
  const double rms = std::sqrt(ss / static_cast<double>(slopes.size()));
  // half the 2-sigma quantile of |deviation|; equals sigma for Gaussian refits
  const auto q = static_cast<std::size_t>(std::ceil(kTwoSigmaCoverage * static_cast<double>(dev.size()))) - 1;
  std::nth_element(dev.begin(), dev.begin() + static_cast<std::ptrdiff_t>(q), dev.end());
  const double spread = std::max(rms, 0.5 * dev[q]);
  return spread * spread;
}

}  // namespace

QosExponentEstimate fit_qos_exponent(std::span<const double> thresholds, std::span<const double> probs,
                                     const FitOptions& options) {
  if (thresholds.size() != probs.size()) {
    throw DomainError("fit_qos_exponent: thresholds and probabilities differ in length");
  }
  std::vector<double> t;
  std::vector<double> p;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (probs[i] > 0.0 && probs[i] >= options.prob_lo && probs[i] <= options.prob_hi) {
      t.push_back(thresholds[i]);
      p.push_back(probs[i]);
    }
  }
  const std::size_t m = t.size();
  if (m < kMinFitPoints) throw InsufficientDataError(m, kMinFitPoints);

  std::vector<double> y(m);
  std::transform(p.begin(), p.end(), y.begin(), [](double v) { return std::log(v); });
  const double md = static_cast<double>(m);
  const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / md;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / md;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (t[i] - t_mean) * (t[i] - t_mean);
    sxy += (t[i] - t_mean) * (y[i] - y_mean);
    syy += (y[i] - y_mean) * (y[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError(1, kMinFitPoints);
  const auto [y_lo, y_hi] = std::minmax_element(y.begin(), y.end());
  const bool flat = *y_lo == *y_hi;
  if (flat) syy = 0.0;

  // slope is exactly 0 when every ln p is identical
  const double slope = flat ? 0.0 : sxy / sxx;
  QosExponentEstimate est;
  est.theta = 0.0 - slope;  // avoids printing -0
  est.intercept = y_mean - slope * t_mean;
  est.window_lo = *std::min_element(t.begin(), t.end());
  est.window_hi = *std::max_element(t.begin(), t.end());
  est.n_points = m;
  est.n_samples = options.sample_count;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (est.intercept + slope * t[i]);
    ss_res += r * r;
  }
  est.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 0.0;

  double var = ss_res / (md - 2.0) / sxx;
  if (options.sample_count > 0) {
    const auto sampling = resampled_slope_variance(thresholds, probs, options, slope);
    var += sampling.value_or(nested_binomial_variance(t, p, t_mean, sxx, options.sample_count));
  }
  est.std_error = std::sqrt(var);
  return est;
}

std::vector<double> linear_thresholds(std::span<const double> samples, std::size_t count) {
  if (samples.empty()) throw DomainError("linear_thresholds: empty sample set");
  if (count < 2) throw DomainError("linear_thresholds: need at least two thresholds");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

QosExponentEstimate fit_sample_tail(std::span<const double> samples, std::size_t grid_points,
                                    FitOptions options) {
  const auto grid = linear_thresholds(samples, grid_points);
  const auto probs = empirical_tail(samples, grid);
  options.sample_count = samples.size();
  return fit_qos_exponent(grid, probs, options);
}

double peak_aoi_violation(std::span<const double> peaks, double threshold_cu, std::int64_t blocklength) {
  if (peaks.empty()) throw DomainError("peak_aoi_violation: empty peak list");
  if (blocklength < 1) throw DomainError("peak_aoi_violation: blocklength must be >= 1");
  // peak / n > A_th / n  <=>  peak > A_th for n > 0; compared unscaled to avoid rounding ties
  const auto above = std::count_if(peaks.begin(), peaks.end(), [&](double a) { return a > threshold_cu; });
  return static_cast<double>(above) / static_cast<double>(peaks.size());
}

double peak_aoi_violation_model(double threshold_cu, std::int64_t blocklength, double theta_aoi) {
  return std::exp(-(threshold_cu / static_cast<double>(blocklength)) * theta_aoi);
}

QosExponentEstimate fit_peak_aoi_exponent(std::span<const double> peaks, std::int64_t blocklength,
                                          std::size_t grid_points, FitOptions options) {
  if (blocklength < 1) throw DomainError("fit_peak_aoi_exponent: blocklength must be >= 1");
  std::vector<double> normalized(peaks.begin(), peaks.end());
  for (double& v : normalized) v /= static_cast<double>(blocklength);
  return fit_sample_tail(normalized, grid_points, options);
}

double delay_violation(std::span<const double> delays, double threshold_cu) {
  if (delays.empty()) throw DomainError("delay_violation: empty sample set");
  const auto above = std::count_if(delays.begin(), delays.end(), [&](double d) { return d > threshold_cu; });
  return static_cast<double>(above) / static_cast<double>(delays.size());
}

double mellin(std::span<const double> samples, double s) {
  if (samples.empty()) throw DomainError("mellin: empty sample set");
  double sum = 0.0;
  for (double x : samples) {
    if (!(x > 0.0)) throw DomainError("mellin: samples must be > 0");
    sum += std::pow(x, s - 1.0);
  }
  return sum / static_cast<double>(samples.size());
}

MeanCi mean_ci95(std::span<const double> samples) {
  MeanCi r;
  r.count = samples.size();
  if (samples.empty()) {
    r.mean = std::numeric_limits<double>::quiet_NaN();
    r.half_width = r.mean;
    return r;
  }
  const double n = static_cast<double>(samples.size());
  r.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) return r;
  double ss = 0.0;
  for (double x : samples) ss += (x - r.mean) * (x - r.mean);
  r.half_width = 1.96 * std::sqrt(ss / (n - 1.0) / n);
  return r;
}

}  // namespace stqos::metrics
