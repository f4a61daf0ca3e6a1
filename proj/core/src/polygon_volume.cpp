#include "polyspec/polygon_volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "polyspec/errors.hpp"
#include "polyspec/monte_carlo.hpp"

namespace polyspec {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_walk_steps = 16;

double sphere_constant(int n) {
    return std::exp(std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1))) / std::sqrt(pi);
}

void check_positive(double x, const char* what) {
    if (!std::isfinite(x) || !(x > 0.0)) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

AmbientSpec AmbientSpec::make(int n, int k) {
    if (n < 2) throw ValidationError("ambient dimension n must be >= 2");
    if (k < 2) throw ValidationError("k must be >= 2");
    return AmbientSpec{n, k};
}

std::string_view to_string(VolumeMethod m) noexcept {
    switch (m) {
        case VolumeMethod::Quadrature: return "quadrature";
        case VolumeMethod::MonteCarlo: return "mc";
        case VolumeMethod::ClosedForm: return "closed-form";
    }
    return "?";
}

VolumeMethod parse_volume_method(std::string_view name) {
    if (name == "quadrature" || name == "quad") return VolumeMethod::Quadrature;
    if (name == "mc" || name == "montecarlo" || name == "monte-carlo") return VolumeMethod::MonteCarlo;
    if (name == "closed-form" || name == "closed") return VolumeMethod::ClosedForm;
    throw ValidationError("unknown volume method '" + std::string(name) + "'");
}

double chord_step_density(double r, double s, double t, int n) {
    if (!std::isfinite(r) || r < 0.0) throw ValidationError("chord_step_density: r must be >= 0");
    check_positive(s, "chord_step_density: s");
    check_positive(t, "chord_step_density: t");
    if (n < 2) throw ValidationError("chord_step_density: n must be >= 2");
    if (r < std::abs(s - t) || r > s + t) return 0.0;
    // 1 - u^2 in factored form, accurate near both ends of the support.
    const double one_minus_u2 =
        (s + t - r) * (s + t + r) * (r - (s - t)) * (r - (t - s)) / (4.0 * s * s * t * t);
    const double shape = n == 3 ? 1.0 : std::pow(std::max(one_minus_u2, 0.0), 0.5 * (n - 3));
    return sphere_constant(n) * shape * r / (s * t);
}

double chord_step_cdf(double r, double s, double t, int n) {
    if (!std::isfinite(r) || r < 0.0) throw ValidationError("chord_step_cdf: r must be >= 0");
    check_positive(s, "chord_step_cdf: s");
    check_positive(t, "chord_step_cdf: t");
    if (n < 2) throw ValidationError("chord_step_cdf: n must be >= 2");
    if (r <= std::abs(s - t)) return 0.0;
    if (r >= s + t) return 1.0;
    const double u = std::clamp((r - s - t) * (r + s + t) / (2.0 * s * t) + 1.0, -1.0, 1.0);
    if (n == 2) return 0.5 + std::asin(u) / pi;
    if (n == 3) return 0.5 * (1.0 + u);
    const double half = 0.5 * (n - 1);
    return boost::math::ibeta(half, half, 0.5 * (1.0 + u));
}

double sphere_area(int n) {
    if (n < 1) throw ValidationError("sphere_area: n must be >= 1");
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

PearsonWalk::PearsonWalk(int n, std::vector<double> steps, double rel_tol)
    : n_(n), steps_(std::move(steps)), rel_tol_(rel_tol) {
    if (n_ < 2) throw ValidationError("ambient dimension n must be >= 2");
    if (steps_.empty() || steps_.size() > max_walk_steps)
        throw ValidationError("walk needs between 1 and 16 steps");
    for (double t : steps_) check_positive(t, "walk step");
    if (!(rel_tol_ > 0.0)) throw ValidationError("quadrature tolerance must be positive");

    double total = 0.0;
    double largest = 0.0;
    for (std::size_t m = 1; m <= steps_.size(); ++m) {
        total += steps_[m - 1];
        largest = std::max(largest, steps_[m - 1]);
        upper_.push_back(total);
        lower_.push_back(std::max(0.0, 2.0 * largest - total));

        std::vector<double> radii;
        const std::uint64_t combos = std::uint64_t{1} << (m - 1);
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            double s = steps_[0];
            for (std::size_t j = 1; j < m; ++j) s += ((mask >> (j - 1)) & 1U) ? -steps_[j] : steps_[j];
            radii.push_back(std::abs(s));
        }
        radii.push_back(lower_.back());
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        critical_.push_back(std::move(radii));
    }
}

template <class Integrand>
double PearsonWalk::integrate_over_level(std::size_t m, double lo, double hi,
                                         std::vector<double> extra_breaks, Integrand&& g) const {
    std::vector<double> pts{lo, hi};
    for (double c : critical_[m - 1])
        if (c > lo && c < hi) pts.push_back(c);
    for (double c : extra_breaks)
        if (c > lo && c < hi) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        if (!(half > 0.0)) continue;
        auto mapped = [&](double phi) {
            ++evaluations_;
            const double s = std::clamp(mid + half * std::sin(phi), std::nextafter(a, b), std::nextafter(b, a));
            const double v = g(s) * half * std::cos(phi);
            return std::isfinite(v) ? v : 0.0;
        };
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            mapped, -0.5 * pi, 0.5 * pi, 15, rel_tol_, &err);
        error_ += err;
    }
    return total;
}

double PearsonWalk::density_level(std::size_t m, double r) const {
    const double t = steps_[m - 1];
    if (m == 2) return chord_step_density(r, steps_[0], t, n_);
    const double lo = std::max(lower_[m - 2], std::abs(r - t));
    const double hi = std::min(upper_[m - 2], r + t);
    if (!(lo < hi)) return 0.0;
    return integrate_over_level(m - 1, lo, hi, {}, [&](double s) {
        return density_level(m - 1, s) * chord_step_density(r, s, t, n_);
    });
}

double PearsonWalk::cdf_level(std::size_t m, double r) const {
    if (m == 1) return r >= steps_[0] ? 1.0 : 0.0;
    const double t = steps_[m - 1];
    if (m == 2) return chord_step_cdf(r, steps_[0], t, n_);
    if (r <= lower_[m - 1]) return 0.0;
    if (r >= upper_[m - 1]) return 1.0;
    const double value = integrate_over_level(
        m - 1, lower_[m - 2], upper_[m - 2], {std::abs(r - t), r + t},
        [&](double s) { return density_level(m - 1, s) * chord_step_cdf(r, s, t, n_); });
    return std::clamp(value, 0.0, 1.0);
}

double PearsonWalk::density(double r) const {
    if (steps_.size() < 2) throw ValidationError("density needs at least two steps (one step is an atom)");
    if (!std::isfinite(r) || r < 0.0) throw ValidationError("radius must be >= 0");
    return density_level(steps_.size(), r);
}

double PearsonWalk::cdf(double r) const {
    if (!std::isfinite(r)) throw ValidationError("radius must be finite");
    if (r < 0.0) return 0.0;
    return cdf_level(steps_.size(), r);
}

double RadialDensity::mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * width(i);
    return m;
}

RadialDensity radial_density(const AmbientSpec& spec, std::span<const double> sides, std::size_t bins) {
    const AmbientSpec checked = AmbientSpec::make(spec.n, spec.k);
    if (sides.size() != static_cast<std::size_t>(checked.k))
        throw ValidationError("radial_density: expected k side lengths");
    if (bins < 8) throw ValidationError("radial_density: grid too coarse to resolve support (< 8 bins)");
    const PearsonWalk walk(checked.n, std::vector<double>(sides.begin(), sides.end()));

    RadialDensity out;
    const double lo = walk.support_lower();
    const double hi = walk.support_upper();
    out.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        out.edges[i] = i == bins ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    std::vector<double> cdf(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) cdf[i] = walk.cdf(out.edges[i]);
    cdf.front() = 0.0;
    cdf.back() = 1.0;
    out.values.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        out.values[i] = std::max(0.0, cdf[i + 1] - cdf[i]) / out.width(i);
    return out;
}

double triangle_area(double a, double b, double c) {
    double s[3] = {a, b, c};
    std::sort(s, s + 3, std::greater<>());
    const double x = s[0], y = s[1], z = s[2];
    const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return 0.25 * std::sqrt(std::max(p, 0.0));
}

double closed_form_k2(int n, const ConeVector& tau) {
    if (tau.k() != 2) throw ValidationError("closed_form_k2 requires k = 2");
    if (classify(tau).tag != ConeTag::Good) throw ValidationError("closed_form_k2 requires a Good triangle");
    const double product = tau[0] * tau[1] * tau[2];
    if (n == 2) return 2.0 * pi * product / triangle_area(tau[0], tau[1], tau[2]);
    if (n == 3) return 8.0 * pi * pi * product;
    throw ValidationError("closed_form_k2 is available for n = 2 and n = 3 only");
}

VolumeEstimate leray_volume(const AmbientSpec& spec, const ConeVector& tau, const VolumeOptions& options) {
    const AmbientSpec checked = AmbientSpec::make(spec.n, spec.k);
    if (tau.k() != checked.k) throw ValidationError("tau has " + std::to_string(tau.size()) +
                                                    " entries, expected k+1 = " + std::to_string(checked.k + 1));
    VolumeEstimate est;
    est.method = options.method;
    est.cone = classify(tau).tag;
    if (est.cone == ConeTag::Bad) return est;  // empty fiber
    est.degenerate = est.cone == ConeTag::Degenerate;

    const auto k = static_cast<std::size_t>(checked.k);
    const double closing = tau[k];
    double prefactor = std::pow(sphere_area(checked.n), checked.k);
    for (std::size_t j = 0; j < k; ++j) prefactor *= std::pow(tau[j], checked.n - 1);

    switch (options.method) {
        case VolumeMethod::ClosedForm: {
            if (est.degenerate) throw ValidationError("closed form requires a Good triangle");
            est.value = closed_form_k2(checked.n, tau);
            est.effort = 1;
            return est;
        }
        case VolumeMethod::Quadrature: {
            const PearsonWalk walk(checked.n, std::vector<double>(tau.entries().begin(), tau.entries().begin() + k),
                                   options.rel_tol);
            est.value = prefactor * walk.density(closing);
            est.error_proxy = prefactor * walk.error_estimate();
            est.effort = std::max<std::uint64_t>(1, walk.evaluations());
            return est;
        }
        case VolumeMethod::MonteCarlo: {
            const PearsonWalk walk(checked.n, std::vector<double>(tau.entries().begin(), tau.entries().begin() + k));
            const auto kde = resultant_density_kde(checked.n, walk.steps(), closing, walk.singular_radii(),
                                                   walk.support_lower(), walk.support_upper(),
                                                   options.samples, options.seed, options.threads);
            est.value = prefactor * kde.density;
            est.std_error = prefactor * kde.std_error;
            est.bandwidth = kde.bandwidth;
            est.effort = kde.samples;
            return est;
        }
    }
    return est;
}

ScalingReport scaling_check(const AmbientSpec& spec, const ConeVector& tau, double r,
                            const VolumeOptions& options) {
    check_positive(r, "scale factor");
    if (classify(tau).tag != ConeTag::Good) throw ValidationError("scaling_check requires a Good tau");
    const VolumeEstimate base = leray_volume(spec, tau, options);
    const VolumeEstimate scaled = leray_volume(spec, tau.scaled(r), options);

    ScalingReport rep;
    rep.dimension = spec.fiber_dimension();
    rep.ratio = scaled.value / base.value;
    rep.expected = std::pow(r, rep.dimension);
    rep.rel_discrepancy = std::abs(rep.ratio - rep.expected) / rep.expected;
    if (options.method == VolumeMethod::MonteCarlo)
        rep.rel_uncertainty = std::hypot(base.std_error / base.value, scaled.std_error / scaled.value);
    else
        rep.rel_uncertainty = base.error_proxy / base.value + scaled.error_proxy / scaled.value;
    return rep;
}

}  // namespace polyspec
