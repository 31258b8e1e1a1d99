#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace rram {

/// Mean relative deviation (1/N) sum |model_i - measured_i| / |measured_i|.
/// Throws ContractViolation on empty or unequal inputs and
/// UndefinedMetricError when a measured value is zero.
[[nodiscard]] double average_deviation(std::span<const double> model, std::span<const double> measured);
/// Largest single relative deviation, same preconditions.
[[nodiscard]] double max_deviation(std::span<const double> model, std::span<const double> measured);

struct GaussianFit {
    double mean = 0.0;
    double sigma = 0.0;  // maximum-likelihood estimate (divides by N)
};

/// Throws ContractViolation on empty input.
[[nodiscard]] GaussianFit fit_gaussian(std::span<const double> samples);

struct Histogram {
    std::vector<double> edges;         // bins + 1 entries
    std::vector<std::size_t> counts;
    GaussianFit fit;
    std::size_t total = 0;

    [[nodiscard]] std::size_t bins() const { return counts.size(); }
    /// Expected count in bin k under the fitted gaussian (0 when sigma is 0).
    [[nodiscard]] double fitted_count(std::size_t k) const;
};

/// Equal-width bins spanning [min, max]. All-equal samples give one bin.
/// Throws ContractViolation on empty input or n_bins == 0.
[[nodiscard]] Histogram histogram(std::span<const double> samples, std::size_t n_bins);
/// Bins of the given width anchored at floor(min / width) * width.
[[nodiscard]] Histogram histogram_by_width(std::span<const double> samples, double bin_width);

/// Writes `bin_low,bin_high,count`.
void write_histogram_csv(std::ostream& os, const Histogram& h);

/// y(t) ~ offset + amplitude * exp(-t / tau).
struct ExpFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double tau = 0.0;
    double rms = 0.0;  // root-mean-square residual
};

/// Least-squares fit over tau (bracketed scan plus golden-section search on
/// log tau), with offset and amplitude solved linearly for each candidate.
/// Needs at least three points with distinct times.
[[nodiscard]] ExpFit fit_exponential(std::span<const double> t, std::span<const double> y);

struct ThresholdOptions {
    double delta_i = 2.0;   // A/s
    /// Width of the centred moving average applied before differencing. 1 disables smoothing.
    int smoothing = 5;
    /// Per-sample backward difference instead of the smoothed central one.
    bool raw_difference = false;
};

struct ThresholdResult {
    std::optional<double> v_plus;   // empty: no threshold detected
    std::optional<double> v_minus;
    std::optional<std::size_t> index_plus;
    std::optional<std::size_t> index_minus;
};

/// First sample of each voltage polarity at which |di/dt| exceeds
/// delta_i; the voltage there is the threshold. `sample_dt` is the uniform
/// sample spacing of the trace.
[[nodiscard]] ThresholdResult extract_thresholds(std::span<const double> v, std::span<const double> i,
                                                 double sample_dt, const ThresholdOptions& opt = {});

}  // namespace rram
