#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace effbench {

// A measured duration that may be right-censored: when `censored` is set the
// run was killed at the limit and the true duration is at least `value`.
struct CensoredTime {
    double value = 0.0;  // seconds
    bool censored = false;

    static CensoredTime observed(double seconds) { return {seconds, false}; }
    static CensoredTime killed_at(double limit) { return {limit, true}; }

    friend bool operator==(const CensoredTime&, const CensoredTime&) = default;
};

// Hardness weights of levels 1..3 used by the shipped demo problemset.
inline const std::vector<double> kDefaultHardness{3.0, 3.0, 4.0};

struct HarnessConfig {
    double timeout_factor = 2.0;  // time limit = factor * slowest reference time
    int repeats = 6;              // timed runs per test case
    // Overrides the manifest's per-level hardness when non-empty.
    std::vector<double> hardness_weights;
    double hard_kill_margin = 10.0;  // seconds added to each worker's budget
    std::uint64_t memory_limit_bytes = 4ULL << 30;
    // Upper bound for a single reference run while calibrating.
    double reference_ceiling = 60.0;

    // Throws ConfigError.
    void validate() const;
};

// Median of the Walsh averages (x_a + x_b) / 2 over all index pairs a <= b.
// Throws ParameterError on an empty or non-finite/negative sample.
double hodges_lehmann(std::span<const double> samples);

// timeout_factor * max(reference_times). Throws ConfigError when the factor
// is not above 1 and DataError on an empty list or a non-positive time.
double compute_time_limit(std::span<const double> reference_times, double timeout_factor);

// Rescales observed times by stored_reference / fresh_reference so they read
// as if measured on the machine that produced the stored references.
// Censored entries are returned untouched.
std::vector<CensoredTime> apply_calibration(std::span<const CensoredTime> measurements, double stored_reference,
                                            double fresh_reference);

}  // namespace effbench
