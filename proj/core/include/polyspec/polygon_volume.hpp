#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "polyspec/cones.hpp"

namespace polyspec {

/// Ambient dimension n and number of free sides k of the (k+1)-gon.
struct AmbientSpec {
    int n = 2;
    int k = 2;

    /// Throws ValidationError unless n >= 2 and k >= 2.
    static AmbientSpec make(int n, int k);

    /// Dimension of a regular fiber F^{-1}(tau): k(n-1) - 1.
    [[nodiscard]] int fiber_dimension() const noexcept { return k * (n - 1) - 1; }
};

enum class VolumeMethod { Quadrature, MonteCarlo, ClosedForm };

[[nodiscard]] std::string_view to_string(VolumeMethod m) noexcept;
[[nodiscard]] VolumeMethod parse_volume_method(std::string_view name);

struct VolumeEstimate {
    double value = 0.0;
    /// Monte Carlo standard error (batch means); 0 for deterministic methods.
    double std_error = 0.0;
    /// Quadrature: absolute discretization-error estimate. Otherwise 0.
    double error_proxy = 0.0;
    VolumeMethod method = VolumeMethod::Quadrature;
    /// Integrand evaluations (quadrature) or sample count (Monte Carlo).
    std::uint64_t effort = 0;
    /// KDE bandwidth used by the Monte Carlo method.
    double bandwidth = 0.0;
    ConeTag cone = ConeTag::Good;
    /// Set for Degenerate tau: the regular-value hypothesis fails and the
    /// fiber density may be unbounded at tau_{k+1}.
    bool degenerate = false;
};

/// Density of |s e + t w| where e is a fixed unit vector and w is uniform on
/// S^{n-1}:  C_n (1-u^2)^{(n-3)/2} r/(s t) on |s-t| <= r <= s+t, with
/// u = (r^2 - s^2 - t^2)/(2 s t) and C_n = Gamma(n/2)/(Gamma((n-1)/2) sqrt(pi)).
[[nodiscard]] double chord_step_density(double r, double s, double t, int n);

/// Distribution function P(|s e + t w| <= r) of the same step.
[[nodiscard]] double chord_step_cdf(double r, double s, double t, int n);

/// Surface area of the unit sphere S^{n-1} in R^n.
[[nodiscard]] double sphere_area(int n);

/// Resultant length R = |t_1 w_1 + ... + t_m w_m| of a Pearson walk with
/// independent uniform directions. Point evaluation of its density and
/// distribution function by nested adaptive quadrature over the recursion
///   p_m(r) = int p_{m-1}(s) chord_step_density(r, s, t_m, n) ds,
/// with every integral split at the singular radii |+-t_1 +- ... +- t_{m-1}|
/// and mapped through s = c + h sin(phi) to absorb inverse-square-root
/// endpoint singularities.
class PearsonWalk {
public:
    PearsonWalk(int n, std::vector<double> steps, double rel_tol = 1e-10);

    [[nodiscard]] int dimension() const noexcept { return n_; }
    [[nodiscard]] std::span<const double> steps() const noexcept { return steps_; }
    [[nodiscard]] double support_lower() const noexcept { return lower_.back(); }
    [[nodiscard]] double support_upper() const noexcept { return upper_.back(); }
    /// Sorted radii where the density is not smooth (includes support ends).
    [[nodiscard]] std::span<const double> singular_radii() const noexcept {
        return critical_.back();
    }

    /// Density of R at r. Requires at least two steps.
    [[nodiscard]] double density(double r) const;
    /// P(R <= r).
    [[nodiscard]] double cdf(double r) const;

    /// Estimated absolute quadrature error accumulated by the calls so far.
    [[nodiscard]] double error_estimate() const noexcept { return error_; }
    [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
    double density_level(std::size_t m, double r) const;
    double cdf_level(std::size_t m, double r) const;
    template <class Integrand>
    double integrate_over_level(std::size_t m, double lo, double hi,
                                std::vector<double> extra_breaks, Integrand&& g) const;

    int n_;
    std::vector<double> steps_;
    double rel_tol_;
    // Per level m = number of steps used (index m-1).
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::vector<double>> critical_;
    mutable double error_ = 0.0;
    mutable std::uint64_t evaluations_ = 0;
};

/// Binned density of the resultant length: values[i] is the exact average
/// density over [edges[i], edges[i+1]] (difference of the distribution
/// function), so integrable endpoint singularities stay finite.
struct RadialDensity {
    std::vector<double> edges;
    std::vector<double> values;

    [[nodiscard]] std::size_t bins() const noexcept { return values.size(); }
    [[nodiscard]] double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    [[nodiscard]] double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
    [[nodiscard]] double mass() const;
};

inline constexpr std::size_t default_radial_bins = 4096;

/// Density of |sides_1 w_1 + ... + sides_k w_k| on a uniform grid spanning its
/// support. Throws ValidationError for fewer than 8 bins or nonpositive sides.
[[nodiscard]] RadialDensity radial_density(const AmbientSpec& spec, std::span<const double> sides,
                                           std::size_t bins = default_radial_bins);

struct VolumeOptions {
    VolumeMethod method = VolumeMethod::Quadrature;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    double rel_tol = 1e-10;
};

/// Leray volume of F^{-1}(tau) = {(xi_1..xi_k) : |xi_j| = tau_j, |sum xi| = tau_{k+1}}:
///   prod_j tau_j^{n-1} * |S^{n-1}|^k * p_R(tau_{k+1}).
/// Bad tau returns exactly 0 without computation.
[[nodiscard]] VolumeEstimate leray_volume(const AmbientSpec& spec, const ConeVector& tau,
                                          const VolumeOptions& options = {});

/// k = 2 closed forms: 2 pi t1 t2 t3 / Area (n = 2), 8 pi^2 t1 t2 t3 (n = 3).
[[nodiscard]] double closed_form_k2(int n, const ConeVector& tau);

/// Heron's formula.
[[nodiscard]] double triangle_area(double a, double b, double c);

struct ScalingReport {
    double ratio = 0.0;     // vol(r tau) / vol(tau)
    double expected = 0.0;  // r^d
    double rel_discrepancy = 0.0;
    /// Relative error budget of the ratio from the two estimates.
    double rel_uncertainty = 0.0;
    int dimension = 0;
};

[[nodiscard]] ScalingReport scaling_check(const AmbientSpec& spec, const ConeVector& tau,
                                          double r, const VolumeOptions& options = {});

}  // namespace polyspec
