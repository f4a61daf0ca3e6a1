#pragma once

#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polyspec/cones.hpp"
#include "polyspec/polygon_volume.hpp"
#include "polyspec/torus_measure.hpp"

namespace polyspec {

/// Fourier convention used throughout:
///   rho_hat(xi) = int rho(t) e^{-i t xi} dt,   rho(t) = (2 pi)^{-1} int rho_hat(xi) e^{i t xi} dxi,
/// so int rho = rho_hat(0). The 1D factor has rho_hat_1 = b with the bump
///   b(xi) = exp(1 - 1/(1 - (xi/a)^2)) on (-a, a), b(0) = 1,
/// hence int rho_1 = 1 exactly, and rho(t) = prod_j rho_1(t_j) on R^{k+1}.
/// The torus has injectivity radius pi, so a must lie in (0, pi).
inline constexpr double torus_injectivity_radius = std::numbers::pi;
inline constexpr double default_kernel_halfwidth = 0.9 * std::numbers::pi;

struct KernelOptions {
    /// Spacing of the cubic Hermite profile table.
    double profile_step = 0.005;
    /// Smoothing sums drop atoms farther than the radius beyond which
    /// |rho_1| <= cutoff_tol.
    double cutoff_tol = 1e-6;
    /// Reported decay radius: |rho_1(t)| < tail_tol for |t| >= tail_radius.
    double tail_tol = 1e-12;
    /// Trapezoid nodes on [0, a] for the inverse transform.
    std::size_t quadrature_nodes = 2048;
    /// The decay scan covers [0, scan_limit] with step scan_step.
    double scan_limit = 400.0;
    double scan_step = 0.05;
};

class SmoothingKernel {
public:
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] double halfwidth() const noexcept { return a_; }
    [[nodiscard]] const KernelOptions& options() const noexcept { return options_; }

    /// b(xi), the Fourier transform of rho_1.
    [[nodiscard]] double fourier(double xi) const noexcept;
    /// rho_1(t): table interpolation inside the cutoff radius, direct
    /// quadrature outside.
    [[nodiscard]] double profile(double t) const;
    /// rho_1(t) by direct quadrature of the inverse transform.
    [[nodiscard]] double direct(double t) const;
    [[nodiscard]] double direct_derivative(double t) const;
    /// prod_j rho_1(t_j) over k+1 coordinates.
    [[nodiscard]] double value(std::span<const double> t) const;

    [[nodiscard]] double cutoff_radius() const noexcept { return cutoff_radius_; }
    [[nodiscard]] double tail_radius() const noexcept { return tail_radius_; }
    /// max |rho_1'| over the table.
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }

    friend SmoothingKernel build_kernel(int k, double a, const KernelOptions& options);

private:
    SmoothingKernel() = default;

    int k_ = 0;
    double a_ = 0.0;
    KernelOptions options_;
    std::vector<double> nodes_;    // xi_i on [0, a]
    std::vector<double> weights_;  // trapezoid weight * b(xi_i) / pi
    std::vector<double> table_;
    std::vector<double> table_slope_;
    double cutoff_radius_ = 0.0;
    double tail_radius_ = 0.0;
    double lipschitz_ = 0.0;
};

/// Throws HypothesisViolation unless 0 < a < pi.
[[nodiscard]] SmoothingKernel build_kernel(int k, double a = default_kernel_halfwidth,
                                           const KernelOptions& options = {});

/// rho * mu(tau) = (2 pi)^{-(k-1)n} sum_atoms count * prod_j rho_1(tau_j - sqrt(q_j)),
/// atoms outside the cutoff box skipped, compensated summation in key order.
/// Throws ValidationError when the measure window does not cover
/// [tau_j - cutoff, tau_j + cutoff] in every coordinate.
[[nodiscard]] double smoothed_mass(const JointMeasure& measure, const SmoothingKernel& kernel,
                                   const ConeVector& tau);

/// The same truncated sum evaluated without materializing atoms: with
/// W_j(m) = rho_1(tau_j - |m|), it equals
///   (2 pi)^{-(k-1)n} sum_s W_{k+1}(s) (W_1 * ... * W_k)(s)
/// over Z^n, computed by dense lattice convolutions.
[[nodiscard]] double smoothed_lattice_sum(int n, const SmoothingKernel& kernel, const ConeVector& tau,
                                          unsigned threads = 0);

/// (2 pi)^{-kn} vol(T^n) vol F^{-1}(tau) = (2 pi)^{-(k-1)n} vol F^{-1}(tau).
/// Throws ValidationError unless tau is Good.
[[nodiscard]] double main_term(const AmbientSpec& spec, const ConeVector& tau,
                               const VolumeOptions& options = {});

enum class SmoothingRoute { Lattice, Atoms };

[[nodiscard]] std::string_view to_string(SmoothingRoute route) noexcept;
[[nodiscard]] SmoothingRoute parse_smoothing_route(std::string_view name);

struct SweepOptions {
    SmoothingRoute route = SmoothingRoute::Lattice;
    EnumerationLimits limits;
    VolumeOptions volume;
    unsigned threads = 0;
};

struct SweepRow {
    double r = 0.0;
    double smoothed = 0.0;
    double main = 0.0;
    double ratio = 0.0;
};

struct AsymptoticReport {
    int n = 0;
    int k = 0;
    std::vector<double> tau0;
    std::vector<SweepRow> rows;
    int d_expected = 0;
    /// OLS fit of log(smoothed) against log(r).
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
    double kernel_halfwidth = 0.0;
    double cutoff_radius = 0.0;
    double tail_radius = 0.0;
    SmoothingRoute route = SmoothingRoute::Lattice;
};

/// For each r: smoothed mass at r*tau0 versus the main term, which is
/// computed once at tau0 and scaled by r^d. Requires Good tau0 and an
/// increasing r list.
[[nodiscard]] AsymptoticReport asymptotic_sweep(int n, const ConeVector& tau0, std::span<const double> r_values,
                                                const SmoothingKernel& kernel, const SweepOptions& options = {});

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> residuals;
};

[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// CSV with columns r,smoothed,main,ratio; `header` lines are written first
/// as "# ..." comments.
void write_report_csv(std::ostream& out, const AsymptoticReport& report,
                      const std::vector<std::string>& header = {});
/// {"slope", "slope_stderr", "d_expected", ...} plus the sweep configuration.
[[nodiscard]] std::string report_summary_json(const AsymptoticReport& report);

}  // namespace polyspec
