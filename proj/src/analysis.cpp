#include "rram/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rram/errors.hpp"

namespace rram {

namespace {

void check_pair(std::span<const double> model, std::span<const double> measured) {
    if (model.empty()) throw ContractViolation("deviation needs at least one point");
    if (model.size() != measured.size()) throw ContractViolation("deviation needs series of equal length");
}

double relative(double m, double x) {
    if (x == 0.0) throw UndefinedMetricError("relative deviation undefined for a zero reference value");
    return std::abs(m - x) / std::abs(x);
}

Histogram fill(std::span<const double> samples, std::vector<double> edges) {
    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    h.total = samples.size();
    h.fit = fit_gaussian(samples);
    const std::size_t n = h.counts.size();
    for (double x : samples) {
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
        std::size_t k = it == h.edges.begin() ? 0 : static_cast<std::size_t>(it - h.edges.begin()) - 1;
        h.counts[std::min(k, n - 1)] += 1;
    }
    return h;
}

struct LinearFit {
    double offset, amplitude, sse;
};

LinearFit solve_linear(std::span<const double> t, std::span<const double> y, double tau) {
    double s1 = 0, se = 0, see = 0, sy = 0, sey = 0;
    const double n = static_cast<double>(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = std::exp(-(t[k] - t[0]) / tau);
        se += e;
        see += e * e;
        sy += y[k];
        sey += e * y[k];
    }
    s1 = n;
    const double det = s1 * see - se * se;
    LinearFit f{sy / n, 0.0, 0.0};
    if (std::abs(det) > 1e-300) {
        f.offset = (see * sy - se * sey) / det;
        f.amplitude = (s1 * sey - se * sy) / det;
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double r = y[k] - f.offset - f.amplitude * std::exp(-(t[k] - t[0]) / tau);
        f.sse += r * r;
    }
    return f;
}

}  // namespace

double average_deviation(std::span<const double> model, std::span<const double> measured) {
    check_pair(model, measured);
    double sum = 0.0;
    for (std::size_t k = 0; k < model.size(); ++k) sum += relative(model[k], measured[k]);
    return sum / static_cast<double>(model.size());
}

double max_deviation(std::span<const double> model, std::span<const double> measured) {
    check_pair(model, measured);
    double worst = 0.0;
    for (std::size_t k = 0; k < model.size(); ++k) worst = std::max(worst, relative(model[k], measured[k]));
    return worst;
}

GaussianFit fit_gaussian(std::span<const double> samples) {
    if (samples.empty()) throw ContractViolation("statistics of an empty sample are undefined");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

double Histogram::fitted_count(std::size_t k) const {
    if (!(fit.sigma > 0.0)) return 0.0;
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - fit.mean) / (fit.sigma * std::numbers::sqrt2)); };
    return static_cast<double>(total) * (cdf(edges[k + 1]) - cdf(edges[k]));
}

Histogram histogram(std::span<const double> samples, std::size_t n_bins) {
    if (samples.empty()) throw ContractViolation("histogram of an empty sample is undefined");
    if (n_bins == 0) throw ContractViolation("histogram needs at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) {
        const double half = std::max(std::abs(lo) * 1e-9, 1e-300);
        return fill(samples, {lo - half, hi + half});
    }
    std::vector<double> edges(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_bins);
    }
    edges.back() = hi;
    return fill(samples, std::move(edges));
}

Histogram histogram_by_width(std::span<const double> samples, double bin_width) {
    if (samples.empty()) throw ContractViolation("histogram of an empty sample is undefined");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ContractViolation("bin width must be > 0");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double start = std::floor(*lo_it / bin_width) * bin_width;
    const auto n = static_cast<std::size_t>(std::floor((*hi_it - start) / bin_width)) + 1;
    std::vector<double> edges(n + 1);
    for (std::size_t k = 0; k <= n; ++k) edges[k] = start + static_cast<double>(k) * bin_width;
    return fill(samples, std::move(edges));
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
    const auto old = os.precision(12);
    os << "bin_low,bin_high,count\n";
    for (std::size_t k = 0; k < h.bins(); ++k) os << h.edges[k] << ',' << h.edges[k + 1] << ',' << h.counts[k] << '\n';
    os.precision(old);
}

ExpFit fit_exponential(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw ContractViolation("fit needs equal-length series");
    if (t.size() < 3) throw ContractViolation("exponential fit needs at least three points");
    const double span = t.back() - t.front();
    if (!(span > 0.0)) throw ContractViolation("exponential fit needs increasing times");

    auto cost = [&](double log_tau) { return solve_linear(t, y, std::exp(log_tau)).sse; };
    double lo = std::log(span * 1e-4);
    double hi = std::log(span * 1e3);
    constexpr int kScan = 200;
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kScan; ++k) {
        const double c = cost(lo + (hi - lo) * k / kScan);
        if (c < best_cost) {
            best_cost = c;
            best = k;
        }
    }
    const double step = (hi - lo) / kScan;
    double a = lo + step * std::max(best - 1, 0);
    double b = lo + step * std::min(best + 1, kScan);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = cost(x1);
    double f2 = cost(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = cost(x2);
        }
    }
    const double tau = std::exp(0.5 * (a + b));
    const LinearFit lf = solve_linear(t, y, tau);
    ExpFit out;
    out.tau = tau;
    out.offset = lf.offset;
    // Re-express the amplitude relative to t = 0 rather than the first sample.
    out.amplitude = lf.amplitude * std::exp(t[0] / tau);
    out.rms = std::sqrt(lf.sse / static_cast<double>(t.size()));
    return out;
}

ThresholdResult extract_thresholds(std::span<const double> v, std::span<const double> i, double sample_dt,
                                   const ThresholdOptions& opt) {
    if (v.size() != i.size()) throw ContractViolation("voltage and current traces differ in length");
    if (!(sample_dt > 0.0)) throw ContractViolation("sample_dt must be > 0");
    if (opt.smoothing < 1) throw ContractViolation("smoothing window must be >= 1");
    ThresholdResult res;
    const std::size_t n = v.size();
    if (n < 3 || !(opt.delta_i < std::numeric_limits<double>::infinity())) return res;

    std::vector<double> slope(n, 0.0);
    if (opt.raw_difference) {
        for (std::size_t k = 1; k < n; ++k) slope[k] = (i[k] - i[k - 1]) / sample_dt;
    } else {
        const std::size_t half = static_cast<std::size_t>(opt.smoothing / 2);
        std::vector<double> smooth(n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t a = k >= half ? k - half : 0;
            const std::size_t b = std::min(n - 1, k + half);
            double s = 0.0;
            for (std::size_t j = a; j <= b; ++j) s += i[j];
            smooth[k] = s / static_cast<double>(b - a + 1);
        }
        for (std::size_t k = 1; k + 1 < n; ++k) slope[k] = (smooth[k + 1] - smooth[k - 1]) / (2.0 * sample_dt);
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (!(std::abs(slope[k]) > opt.delta_i)) continue;
        if (v[k] > 0.0 && !res.v_plus) {
            res.v_plus = v[k];
            res.index_plus = k;
        } else if (v[k] < 0.0 && !res.v_minus) {
            res.v_minus = v[k];
            res.index_minus = k;
        }
        if (res.v_plus && res.v_minus) break;
    }
    return res;
}

}  // namespace rram
