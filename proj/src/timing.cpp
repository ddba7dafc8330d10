#include "effbench/timing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "effbench/errors.hpp"

namespace effbench {

void HarnessConfig::validate() const {
    if (!(timeout_factor > 1.0)) {
        throw ConfigError("timeout factor must exceed 1 (got " + std::to_string(timeout_factor) + ")");
    }
    if (repeats < 1) throw ConfigError("repeats must be >= 1 (got " + std::to_string(repeats) + ")");
    for (double h : hardness_weights) {
        if (!(h > 0.0)) throw ConfigError("hardness weights must be positive");
    }
    if (!(hard_kill_margin > 0.0)) throw ConfigError("hard kill margin must be positive");
    if (!(reference_ceiling > 0.0)) throw ConfigError("reference ceiling must be positive");
}

double hodges_lehmann(std::span<const double> samples) {
    if (samples.empty()) throw ParameterError("hodges_lehmann: empty sample");
    for (double s : samples) {
        if (!std::isfinite(s) || s < 0.0) throw ParameterError("hodges_lehmann: samples must be finite and >= 0");
    }
    const std::size_t n = samples.size();
    std::vector<double> walsh;
    walsh.reserve(n * (n + 1) / 2);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) walsh.push_back((samples[a] + samples[b]) / 2.0);
    }
    const std::size_t m = walsh.size();
    auto mid = walsh.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(walsh.begin(), mid, walsh.end());
    if (m % 2 == 1) return *mid;
    double upper = *mid;
    double lower = *std::max_element(walsh.begin(), mid);
    return (lower + upper) / 2.0;
}

double compute_time_limit(std::span<const double> reference_times, double timeout_factor) {
    if (!(timeout_factor > 1.0)) {
        throw ConfigError("timeout factor must exceed 1 (got " + std::to_string(timeout_factor) + ")");
    }
    if (reference_times.empty()) throw DataError("no reference times to derive a time limit from");
    double worst = 0.0;
    for (double t : reference_times) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw DataError("reference time " + std::to_string(t) + " s is not positive; manifest is uncalibrated");
        }
        worst = std::max(worst, t);
    }
    return timeout_factor * worst;
}

std::vector<CensoredTime> apply_calibration(std::span<const CensoredTime> measurements, double stored_reference,
                                            double fresh_reference) {
    if (!(stored_reference > 0.0) || !(fresh_reference > 0.0)) {
        throw ParameterError("calibration references must be positive");
    }
    const double ratio = stored_reference / fresh_reference;
    std::vector<CensoredTime> out(measurements.begin(), measurements.end());
    for (auto& m : out) {
        if (!m.censored) m.value *= ratio;
    }
    return out;
}

}  // namespace effbench
