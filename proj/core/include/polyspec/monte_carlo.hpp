#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polyspec {

/// Root seed -> independent stream seed for batch `counter` (SplitMix64).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) noexcept;

/// `count` independent draws of |t_1 w_1 + ... + t_m w_m|, w_j uniform on
/// S^{n-1}, from the stream seeded by `seed`.
[[nodiscard]] std::vector<double> sample_resultant_lengths(int n, std::span<const double> steps,
                                                           std::uint64_t count, std::uint64_t seed);

struct KdeEstimate {
    double density = 0.0;
    double std_error = 0.0;
    double bandwidth = 0.0;
    std::uint64_t samples = 0;
};

inline constexpr unsigned kde_batches = 32;

/// Epanechnikov kernel density estimate of the resultant length at `at`,
/// averaged over 32 independently seeded batches (stderr by batch means).
/// Bandwidth: 2.34 * (support width / 4) * N^{-1/5}, capped at one eighth of
/// the distance from `at` to the nearest singular radius of the density.
[[nodiscard]] KdeEstimate resultant_density_kde(int n, std::span<const double> steps, double at,
                                                std::span<const double> singular_radii,
                                                double support_lower, double support_upper,
                                                std::uint64_t samples, std::uint64_t seed,
                                                unsigned threads);

}  // namespace polyspec
