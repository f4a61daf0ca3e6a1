#include "polyspec/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "polyspec/errors.hpp"
#include "polyspec/parallel.hpp"

namespace polyspec {

namespace {

class DirectionSampler {
public:
    DirectionSampler(int n, std::uint64_t seed) : n_(n), engine_(seed), buffer_(n) {}

    // Uniform in the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    // Returns a uniformly distributed unit vector (valid until the next call).
    const std::vector<double>& next() {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (n_ == 2) {
            const double theta = two_pi * uniform();
            buffer_[0] = std::cos(theta);
            buffer_[1] = std::sin(theta);
        } else if (n_ == 3) {
            const double z = 2.0 * uniform() - 1.0;
            const double phi = two_pi * uniform();
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            buffer_[0] = rho * std::cos(phi);
            buffer_[1] = rho * std::sin(phi);
            buffer_[2] = z;
        } else {
            double norm2 = 0.0;
            for (int i = 0; i < n_; i += 2) {
                const double radius = std::sqrt(-2.0 * std::log(uniform()));
                const double angle = two_pi * uniform();
                buffer_[i] = radius * std::cos(angle);
                if (i + 1 < n_) buffer_[i + 1] = radius * std::sin(angle);
            }
            for (double x : buffer_) norm2 += x * x;
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& x : buffer_) x *= inv;
        }
        return buffer_;
    }

private:
    int n_;
    std::mt19937_64 engine_;
    std::vector<double> buffer_;
};

void check_walk(int n, std::span<const double> steps) {
    if (n < 2) throw ValidationError("ambient dimension must be >= 2");
    if (steps.empty()) throw ValidationError("walk needs at least one step");
    for (double t : steps)
        if (!std::isfinite(t) || !(t > 0.0)) throw ValidationError("walk steps must be positive");
}

template <class Sink>
void draw_resultants(int n, std::span<const double> steps, std::uint64_t count,
                     std::uint64_t seed, Sink&& sink) {
    DirectionSampler sampler(n, seed);
    std::vector<double> total(n);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::fill(total.begin(), total.end(), 0.0);
        for (double t : steps) {
            const auto& w = sampler.next();
            for (int d = 0; d < n; ++d) total[d] += t * w[d];
        }
        double norm2 = 0.0;
        for (double x : total) norm2 += x * x;
        sink(std::sqrt(norm2));
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) noexcept {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<double> sample_resultant_lengths(int n, std::span<const double> steps,
                                             std::uint64_t count, std::uint64_t seed) {
    check_walk(n, steps);
    std::vector<double> out;
    out.reserve(count);
    draw_resultants(n, steps, count, seed, [&](double r) { out.push_back(r); });
    return out;
}

KdeEstimate resultant_density_kde(int n, std::span<const double> steps, double at,
                                  std::span<const double> singular_radii, double support_lower,
                                  double support_upper, std::uint64_t samples,
                                  std::uint64_t seed, unsigned threads) {
    check_walk(n, steps);
    if (samples < kde_batches) throw ValidationError("need at least 32 Monte Carlo samples");

    KdeEstimate out;
    out.samples = samples;
    const double spread = (support_upper - support_lower) / 4.0;
    double h = 2.34 * spread * std::pow(static_cast<double>(samples), -0.2);
    double nearest = INFINITY;
    for (double c : singular_radii) nearest = std::min(nearest, std::abs(at - c));
    if (nearest > 0.0) h = std::min(h, nearest / 8.0);
    out.bandwidth = h;
    if (!(h > 0.0)) return out;

    std::vector<double> estimates(kde_batches, 0.0);
    std::vector<std::uint64_t> sizes(kde_batches, samples / kde_batches);
    for (std::uint64_t b = 0; b < samples % kde_batches; ++b) ++sizes[b];

    parallel_for(kde_batches, threads, [&](std::size_t b) {
        double acc = 0.0;
        draw_resultants(n, steps, sizes[b], derive_seed(seed, b), [&](double r) {
            const double u = (r - at) / h;
            if (std::abs(u) < 1.0) acc += 0.75 * (1.0 - u * u);
        });
        estimates[b] = acc / (static_cast<double>(sizes[b]) * h);
    });

    double mean = 0.0;
    for (std::size_t b = 0; b < kde_batches; ++b)
        mean += estimates[b] * static_cast<double>(sizes[b]);
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(kde_batches - 1);
    out.density = mean;
    out.std_error = std::sqrt(var / kde_batches);
    return out;
}

}  // namespace polyspec
