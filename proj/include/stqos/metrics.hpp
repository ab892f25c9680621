#pragma once

// Empirical tails, log-linear QoS exponent fits, violation probabilities and
// the empirical Mellin transform. Exceedance is strict (>) everywhere.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stqos::metrics {

// p_i = #{x > t_i} / N. Throws DomainError on empty samples.
std::vector<double> empirical_tail(std::span<const double> samples, std::span<const double> thresholds);

struct FitOptions {
  // Points are used when the empirical probability lies in [prob_lo, prob_hi].
  double prob_lo = 1e-4;
  double prob_hi = 1e-1;
  // Size of the sample behind `probs`, or 0 if unknown. When known, std_error
  // also carries the sampling noise of the exceedance counts, estimated by
  // redrawing them (fixed internal seed, so the fit stays deterministic).
  std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinFitPoints = 4;

struct QosExponentEstimate {
  double theta = 0.0;
  double intercept = 0.0;  // fitted ln p at threshold 0
  double window_lo = 0.0;  // smallest threshold used
  double window_hi = 0.0;  // largest threshold used
  double r_squared = 0.0;
  double std_error = 0.0;
  std::size_t n_points = 0;
  std::size_t n_samples = 0;

  bool valid() const { return theta > 0.0; }
};

// OLS of ln p against threshold over the window; theta = -slope.
// Throws InsufficientDataError when fewer than kMinFitPoints remain.
QosExponentEstimate fit_qos_exponent(std::span<const double> thresholds, std::span<const double> probs,
                                     const FitOptions& options = {});

// `count` evenly spaced thresholds from min(samples) to max(samples).
std::vector<double> linear_thresholds(std::span<const double> samples, std::size_t count);

// Tail of `samples` on a linear grid, then fit_qos_exponent with sample_count = N.
QosExponentEstimate fit_sample_tail(std::span<const double> samples, std::size_t grid_points = 200,
                                    FitOptions options = {});

// Fraction of peaks with peak / n > A_th / n.
double peak_aoi_violation(std::span<const double> peaks, double threshold_cu, std::int64_t blocklength);

// exp(-(A_th / n) theta_aoi).
double peak_aoi_violation_model(double threshold_cu, std::int64_t blocklength, double theta_aoi);

// theta_AoI fitted against the blocklength-normalized threshold A_th / n.
QosExponentEstimate fit_peak_aoi_exponent(std::span<const double> peaks, std::int64_t blocklength,
                                          std::size_t grid_points = 200, FitOptions options = {});

// Fraction of delays strictly above d_th.
double delay_violation(std::span<const double> delays, double threshold_cu);

// (1/N) sum x_i^(s-1). Throws DomainError on a non-positive sample.
double mellin(std::span<const double> samples, double s);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sd / sqrt(N)
  std::size_t count = 0;
};

MeanCi mean_ci95(std::span<const double> samples);

}  // namespace stqos::metrics
