#include "polyspec/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lattice_field.hpp"
#include "polyspec/errors.hpp"
#include "polyspec/parallel.hpp"

namespace polyspec {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double bump(double xi, double a) noexcept {
    const double u = xi / a;
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / ((1.0 - u) * (1.0 + u)));
}

class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_kernel_arity(const SmoothingKernel& kernel, const ConeVector& tau) {
    if (static_cast<int>(tau.size()) != kernel.k() + 1)
        throw ValidationError("kernel built for k=" + std::to_string(kernel.k()) + " but tau has " +
                              std::to_string(tau.size()) + " entries");
}

SquaredRange kernel_range(double center, double radius) {
    return squared_range({std::max(0.0, center - radius), center + radius});
}

// W(m) = rho_1(tau - |m|) on the annulus |tau - |m|| <= cutoff, zero elsewhere.
detail::LatticeField annulus_field(int n, const SmoothingKernel& kernel, double tau) {
    const SquaredRange range = kernel_range(tau, kernel.cutoff_radius());
    if (range.empty) return detail::LatticeField(n, 0);
    const auto radius = static_cast<std::int64_t>(std::sqrt(static_cast<double>(range.hi))) + 1;
    detail::LatticeField field(n, radius);
    std::vector<std::int64_t> prefix(static_cast<std::size_t>(std::max(n - 1, 1)));
    for (std::size_t r = 0; r < field.rows(); ++r) {
        field.prefix(r, prefix.data());
        std::uint64_t base = 0;
        for (int d = 0; d + 1 < n; ++d) base += static_cast<std::uint64_t>(prefix[d] * prefix[d]);
        if (base > range.hi) continue;
        double* row = field.row(r);
        for (std::int64_t c = -radius; c <= radius; ++c) {
            const std::uint64_t q = base + static_cast<std::uint64_t>(c * c);
            if (range.contains(q)) row[c + radius] = kernel.profile(tau - std::sqrt(static_cast<double>(q)));
        }
    }
    field.index_support();
    return field;
}

}  // namespace

double SmoothingKernel::fourier(double xi) const noexcept { return bump(xi, a_); }

double SmoothingKernel::direct(double t) const {
    KahanSum s;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s.add(weights_[i] * std::cos(t * nodes_[i]));
    return s.value();
}

double SmoothingKernel::direct_derivative(double t) const {
    KahanSum s;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s.add(-weights_[i] * nodes_[i] * std::sin(t * nodes_[i]));
    return s.value();
}

double SmoothingKernel::profile(double t) const {
    const double u = std::abs(t);
    const double h = options_.profile_step;
    const double pos = u / h;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table_.size()) return direct(u);
    const double x = pos - static_cast<double>(i);
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
    const double h10 = x3 - 2.0 * x2 + x;
    const double h01 = -2.0 * x3 + 3.0 * x2;
    const double h11 = x3 - x2;
    return h00 * table_[i] + h10 * h * table_slope_[i] + h01 * table_[i + 1] + h11 * h * table_slope_[i + 1];
}

double SmoothingKernel::value(std::span<const double> t) const {
    if (static_cast<int>(t.size()) != k_ + 1)
        throw ValidationError("kernel expects " + std::to_string(k_ + 1) + " coordinates");
    double p = 1.0;
    for (double x : t) p *= profile(x);
    return p;
}

SmoothingKernel build_kernel(int k, double a, const KernelOptions& options) {
    if (k < 2) throw ValidationError("kernel requires k >= 2, got " + std::to_string(k));
    if (!std::isfinite(a) || a <= 0.0 || a >= torus_injectivity_radius)
        throw HypothesisViolation("kernel halfwidth a=" + std::to_string(a) +
                                  " violates supp rho_hat in (-inj, inj)^{k+1}; the torus has inj = pi, "
                                  "so a must satisfy 0 < a < pi");
    if (!(options.profile_step > 0.0) || !(options.scan_step > 0.0) || !(options.scan_limit > 0.0) ||
        options.quadrature_nodes < 16 || !(options.cutoff_tol > 0.0) || !(options.tail_tol > 0.0))
        throw ValidationError("invalid kernel options");

    SmoothingKernel kernel;
    kernel.k_ = k;
    kernel.a_ = a;
    kernel.options_ = options;

    // rho_1(t) = (1/pi) int_0^a b(xi) cos(t xi) dxi; trapezoid is spectrally
    // accurate since b and all its derivatives vanish at a.
    const std::size_t m = options.quadrature_nodes;
    const double step = a / static_cast<double>(m);
    kernel.nodes_.resize(m);
    kernel.weights_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = step * static_cast<double>(i);
        kernel.nodes_[i] = xi;
        kernel.weights_[i] = (i == 0 ? 0.5 : 1.0) * step * bump(xi, a) / std::numbers::pi;
    }

    double last_above_cutoff = 0.0;
    double last_above_tail = 0.0;
    const auto scan_points = static_cast<std::size_t>(std::ceil(options.scan_limit / options.scan_step));
    for (std::size_t i = 0; i <= scan_points; ++i) {
        const double t = options.scan_step * static_cast<double>(i);
        const double v = std::abs(kernel.direct(t));
        if (v > options.cutoff_tol) last_above_cutoff = t;
        if (v >= options.tail_tol) last_above_tail = t;
    }
    if (last_above_tail + options.scan_step > options.scan_limit)
        throw ValidationError("kernel tail does not reach tail_tol within scan_limit");
    kernel.cutoff_radius_ = last_above_cutoff + options.scan_step;
    kernel.tail_radius_ = last_above_tail + options.scan_step;

    const auto table_points =
        static_cast<std::size_t>(std::ceil(kernel.cutoff_radius_ / options.profile_step)) + 2;
    kernel.table_.resize(table_points);
    kernel.table_slope_.resize(table_points);
    for (std::size_t i = 0; i < table_points; ++i) {
        const double t = options.profile_step * static_cast<double>(i);
        kernel.table_[i] = kernel.direct(t);
        kernel.table_slope_[i] = kernel.direct_derivative(t);
        kernel.lipschitz_ = std::max(kernel.lipschitz_, std::abs(kernel.table_slope_[i]));
    }
    return kernel;
}

double smoothed_mass(const JointMeasure& measure, const SmoothingKernel& kernel, const ConeVector& tau) {
    check_kernel_arity(kernel, tau);
    if (measure.k() != kernel.k()) throw ValidationError("measure and kernel disagree on k");
    const double radius = kernel.cutoff_radius();
    const std::size_t cols = tau.size();
    std::vector<SquaredRange> ranges(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        const FrequencyInterval& w = measure.window()[j];
        const double need_lo = std::max(0.0, tau[j] - radius);
        const double need_hi = tau[j] + radius;
        if (w.lo > need_lo || w.hi < need_hi)
            throw ValidationError("window insufficient: coordinate " + std::to_string(j + 1) + " covers [" +
                                  std::to_string(w.lo) + ", " + std::to_string(w.hi) + "] but the kernel needs [" +
                                  std::to_string(need_lo) + ", " + std::to_string(need_hi) + "]");
        ranges[j] = kernel_range(tau[j], radius);
    }
    KahanSum sum;
    for (const Atom& atom : measure.atoms()) {
        bool inside = true;
        for (std::size_t j = 0; j < cols && inside; ++j) inside = ranges[j].contains(atom.key.q[j]);
        if (!inside) continue;
        double p = static_cast<double>(atom.count);
        for (std::size_t j = 0; j < cols; ++j)
            p *= kernel.profile(tau[j] - std::sqrt(static_cast<double>(atom.key.q[j])));
        sum.add(p);
    }
    return sum.value() * measure.weight_factor();
}

double smoothed_lattice_sum(int n, const SmoothingKernel& kernel, const ConeVector& tau, unsigned threads) {
    if (n < 1) throw ValidationError("n must be positive");
    check_kernel_arity(kernel, tau);
    const int k = kernel.k();
    std::vector<detail::LatticeField> fields;
    fields.reserve(tau.size());
    for (std::size_t j = 0; j < tau.size(); ++j) fields.push_back(annulus_field(n, kernel, tau[j]));
    detail::LatticeField partial = std::move(fields[0]);
    for (int j = 1; j + 1 < k; ++j) partial = detail::convolve(partial, fields[static_cast<std::size_t>(j)], threads);
    const double sum = detail::convolve_dot(partial, fields[static_cast<std::size_t>(k - 1)],
                                            fields[static_cast<std::size_t>(k)], threads);
    return sum * std::pow(two_pi, -static_cast<double>((k - 1) * n));
}

double main_term(const AmbientSpec& spec, const ConeVector& tau, const VolumeOptions& options) {
    if (static_cast<int>(tau.size()) != spec.k + 1)
        throw ValidationError("tau must have k+1 = " + std::to_string(spec.k + 1) + " entries");
    const ConeClass cls = classify(tau);
    if (cls.tag != ConeTag::Good)
        throw ValidationError("main term requires a Good tau, got " + std::string(to_string(cls.tag)));
    const double torus_volume = std::pow(two_pi, static_cast<double>(spec.n));
    const double prefactor = std::pow(two_pi, -static_cast<double>(spec.k * spec.n)) * torus_volume;
    const double weight = std::pow(two_pi, -static_cast<double>((spec.k - 1) * spec.n));
    if (std::abs(prefactor - weight) > 8.0 * std::numeric_limits<double>::epsilon() * weight)
        throw std::logic_error("prefactor identity (2 pi)^{-kn} vol(T^n) = (2 pi)^{-(k-1)n} failed");
    return weight * leray_volume(spec, tau, options).value;
}

std::string_view to_string(SmoothingRoute route) noexcept {
    return route == SmoothingRoute::Lattice ? "lattice" : "atoms";
}

SmoothingRoute parse_smoothing_route(std::string_view name) {
    if (name == "lattice") return SmoothingRoute::Lattice;
    if (name == "atoms") return SmoothingRoute::Atoms;
    throw ValidationError("unknown smoothing route '" + std::string(name) + "' (expected lattice|atoms)");
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs at least two paired points");
    const auto count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    fit.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
        rss += fit.residuals[i] * fit.residuals[i];
    }
    fit.slope_stderr = x.size() > 2 ? std::sqrt(rss / (count - 2.0) / sxx) : 0.0;
    return fit;
}

AsymptoticReport asymptotic_sweep(int n, const ConeVector& tau0, std::span<const double> r_values,
                                  const SmoothingKernel& kernel, const SweepOptions& options) {
    const AmbientSpec spec = AmbientSpec::make(n, tau0.k());
    check_kernel_arity(kernel, tau0);
    if (r_values.empty()) throw ValidationError("sweep needs at least one r value");
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        if (!std::isfinite(r_values[i]) || r_values[i] <= 0.0) throw ValidationError("r values must be positive");
        if (i > 0 && !(r_values[i] > r_values[i - 1])) throw ValidationError("r values must be increasing");
    }
    const ConeClass cls = classify(tau0);
    if (cls.tag != ConeTag::Good)
        throw ValidationError("sweep direction tau0 must be Good, got " + std::string(to_string(cls.tag)));

    AsymptoticReport report;
    report.n = n;
    report.k = spec.k;
    report.tau0.assign(tau0.entries().begin(), tau0.entries().end());
    report.d_expected = spec.fiber_dimension();
    report.kernel_halfwidth = kernel.halfwidth();
    report.cutoff_radius = kernel.cutoff_radius();
    report.tail_radius = kernel.tail_radius();
    report.route = options.route;

    VolumeOptions volume = options.volume;
    if (volume.threads == 0) volume.threads = options.threads;
    const double main_unit = main_term(spec, tau0, volume);

    for (double r : r_values) {
        const ConeVector tau = tau0.scaled(r);
        SweepRow row;
        row.r = r;
        if (options.route == SmoothingRoute::Lattice) {
            row.smoothed = smoothed_lattice_sum(n, kernel, tau, options.threads);
        } else {
            std::vector<FrequencyInterval> window;
            for (double t : tau.entries())
                window.push_back({std::max(0.0, t - kernel.cutoff_radius()), t + kernel.cutoff_radius()});
            EnumerationLimits limits = options.limits;
            if (limits.threads == 0) limits.threads = options.threads;
            row.smoothed = smoothed_mass(joint_measure(n, spec.k, window, limits), kernel, tau);
        }
        row.main = main_unit * std::pow(r, static_cast<double>(report.d_expected));
        row.ratio = row.smoothed / row.main;
        report.rows.push_back(row);
    }

    const bool fittable = report.rows.size() >= 2 &&
                          std::all_of(report.rows.begin(), report.rows.end(),
                                      [](const SweepRow& row) { return row.smoothed > 0.0; });
    if (fittable) {
        std::vector<double> lx;
        std::vector<double> ly;
        for (const auto& row : report.rows) {
            lx.push_back(std::log(row.r));
            ly.push_back(std::log(row.smoothed));
        }
        LineFit fit = fit_line(lx, ly);
        report.slope = fit.slope;
        report.slope_stderr = fit.slope_stderr;
        report.intercept = fit.intercept;
        report.residuals = std::move(fit.residuals);
    } else {
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.slope_stderr = std::numeric_limits<double>::quiet_NaN();
        report.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

}  // namespace polyspec
