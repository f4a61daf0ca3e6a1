#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "polyspec/errors.hpp"
#include "polyspec/smoothing.hpp"

using namespace polyspec;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

const SmoothingKernel& kernel2() {
    static const SmoothingKernel k = build_kernel(2);
    return k;
}

// Coarser truncation so that atom enumeration stays small in tests.
const SmoothingKernel& narrow_kernel(int k) {
    static const SmoothingKernel k2 = [] {
        KernelOptions o;
        o.cutoff_tol = 1e-3;
        return build_kernel(2, default_kernel_halfwidth, o);
    }();
    static const SmoothingKernel k3 = [] {
        KernelOptions o;
        o.cutoff_tol = 1e-2;
        return build_kernel(3, default_kernel_halfwidth, o);
    }();
    return k == 2 ? k2 : k3;
}

std::vector<FrequencyInterval> cover(const ConeVector& tau, double radius) {
    std::vector<FrequencyInterval> w;
    for (double t : tau.entries()) w.push_back({std::max(0.0, t - radius), t + radius});
    return w;
}

}  // namespace

TEST_CASE("kernel normalization") {
    const SmoothingKernel& k = kernel2();
    CHECK(k.fourier(0.0) == 1.0);
    CHECK(k.fourier(k.halfwidth()) == 0.0);
    CHECK(k.fourier(-1.01 * k.halfwidth()) == 0.0);
    CHECK(k.fourier(0.5) == k.fourier(-0.5));

    // Trapezoid over [-250, 250]; the step is far below pi / a.
    const double h = 0.25;
    double integral = 0.0;
    for (int i = -1000; i <= 1000; ++i) integral += (std::abs(i) == 1000 ? 0.5 : 1.0) * k.profile(i * h);
    CHECK(std::abs(integral * h - 1.0) < 1e-8);

    // Poisson summation: supp rho_hat_1 inside (-pi, pi) gives sum_m rho_1(m) = rho_hat_1(0).
    double lattice = 0.0;
    for (int m = -250; m <= 250; ++m) lattice += k.profile(m);
    CHECK(std::abs(lattice - 1.0) < 1e-8);
}

TEST_CASE("kernel profile is even, interpolates accurately and decays") {
    const SmoothingKernel& k = kernel2();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, k.cutoff_radius());
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng);
        CHECK(std::abs(k.profile(t) - k.direct(t)) < 1e-9);
        CHECK(k.profile(t) == k.profile(-t));
    }
    CHECK(k.tail_radius() > k.cutoff_radius());
    for (double t = k.tail_radius(); t < k.tail_radius() + 40.0; t += 0.37) CHECK(std::abs(k.direct(t)) < 1e-12);
    for (double t = k.cutoff_radius(); t < k.cutoff_radius() + 20.0; t += 0.37) CHECK(std::abs(k.direct(t)) < 1e-6);
    CHECK(k.lipschitz() > 0.0);
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK(k.value(zeros) == doctest::Approx(std::pow(k.profile(0.0), 3)));
}

TEST_CASE("kernel hypothesis guard") {
    CHECK_THROWS_AS((void)build_kernel(2, std::numbers::pi), HypothesisViolation);
    CHECK_THROWS_AS((void)build_kernel(2, 3.2), HypothesisViolation);
    CHECK_THROWS_AS((void)build_kernel(2, 0.0), HypothesisViolation);
    CHECK_THROWS_AS((void)build_kernel(1, 1.0), ValidationError);
    CHECK_NOTHROW((void)build_kernel(2, 0.99 * std::numbers::pi));
}

TEST_CASE("smoothed mass of trivial measures") {
    const SmoothingKernel& k = kernel2();
    const ConeVector tau({5, 5, 5});
    const auto w = cover(tau, k.cutoff_radius());
    CHECK(smoothed_mass(JointMeasure(2, 2, w, {}), k, tau) == 0.0);
    const JointMeasure single(2, 2, w, {Atom{FrequencyKey{{25, 25, 25}}, 1}});
    CHECK(smoothed_mass(single, k, tau) ==
          doctest::Approx(std::pow(two_pi, -2.0) * std::pow(k.profile(0.0), 3)).epsilon(1e-14));
}

TEST_CASE("smoothed mass validates window and arity") {
    const SmoothingKernel& k = kernel2();
    const ConeVector tau({5, 5, 5});
    const JointMeasure narrow(2, 2, {{0, 6}, {0, 6}, {0, 6}}, {});
    CHECK_THROWS_AS((void)smoothed_mass(narrow, k, tau), ValidationError);
    const ConeVector four({5, 5, 5, 5});
    CHECK_THROWS_AS((void)smoothed_mass(narrow, k, four), ValidationError);
}

TEST_CASE("atom and lattice routes agree") {
    for (const ConeVector& tau : {ConeVector({6, 8, 10}), ConeVector({4.5, 3.2, 6.1})}) {
        const SmoothingKernel& k = narrow_kernel(2);
        const JointMeasure m = joint_measure(2, 2, cover(tau, k.cutoff_radius()));
        const double atoms = smoothed_mass(m, k, tau);
        const double lattice = smoothed_lattice_sum(2, k, tau, 1);
        CHECK(atoms == doctest::Approx(lattice).epsilon(1e-11));
        CHECK(smoothed_lattice_sum(2, k, tau, 3) == lattice);
    }
    const SmoothingKernel& k3 = narrow_kernel(3);
    const ConeVector tau3({3, 4, 5, 6.5});
    const JointMeasure m3 = joint_measure(2, 3, cover(tau3, k3.cutoff_radius()));
    CHECK(smoothed_mass(m3, k3, tau3) == doctest::Approx(smoothed_lattice_sum(2, k3, tau3, 1)).epsilon(1e-11));
}

TEST_CASE("convolution linearity over disjoint windows") {
    const SmoothingKernel& k = narrow_kernel(2);
    const ConeVector tau({6, 8, 10});
    const auto w = cover(tau, k.cutoff_radius());
    const JointMeasure full = joint_measure(2, 2, w);
    std::vector<Atom> low;
    std::vector<Atom> high;
    for (const auto& atom : full.atoms()) (atom.key.q[2] < 100 ? low : high).push_back(atom);
    const double split = smoothed_mass(JointMeasure(2, 2, w, low), k, tau) +
                         smoothed_mass(JointMeasure(2, 2, w, high), k, tau);
    CHECK(std::abs(split - smoothed_mass(full, k, tau)) < 1e-12 * std::abs(smoothed_mass(full, k, tau)) + 1e-15);
}

TEST_CASE("translation is Lipschitz") {
    const SmoothingKernel& k = narrow_kernel(2);
    const ConeVector tau({6, 8, 10});
    const double delta = 0.01;
    const ConeVector moved({6, 8, 10 + delta});
    const JointMeasure m = joint_measure(2, 2, cover(moved, k.cutoff_radius() + 1.0));
    const double mass = static_cast<double>(m.total_count()) * m.weight_factor();
    const double bound = k.lipschitz() * std::pow(k.profile(0.0), 2) * delta * mass;
    CHECK(std::abs(smoothed_mass(m, k, moved) - smoothed_mass(m, k, tau)) <= bound);
}

TEST_CASE("main term examples") {
    const double v = main_term(AmbientSpec::make(2, 2), ConeVector({30, 40, 50}));
    CHECK(v == doctest::Approx(100.0 / two_pi).epsilon(1e-9));
    CHECK(v == doctest::Approx(15.915).epsilon(1e-4));
    CHECK_THROWS_AS((void)main_term(AmbientSpec::make(2, 3), ConeVector({2, 2, 2, 2})), ValidationError);
    CHECK_THROWS_AS((void)main_term(AmbientSpec::make(2, 3), ConeVector({10, 1, 1, 1})), ValidationError);
    for (auto [n, k] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}}) {
        const ConeVector tau = k == 2 ? ConeVector({3, 4, 5}) : ConeVector({3, 4, 5, 6.5});
        const double d = k * (n - 1) - 1;
        const double ratio = main_term(AmbientSpec::make(n, k), tau.scaled(2.5)) / main_term(AmbientSpec::make(n, k), tau);
        CHECK(std::abs(ratio / std::pow(2.5, d) - 1.0) < 1e-6);
    }
}

TEST_CASE("smoothed mass tracks the main term at tau = 40 (0.3, 0.4, 0.5)") {
    const ConeVector tau({12, 16, 20});
    const double smoothed = smoothed_lattice_sum(2, kernel2(), tau);
    const double main = main_term(AmbientSpec::make(2, 2), tau);
    CHECK(std::abs(smoothed / main - 1.0) < 0.2);
}

TEST_CASE("bad directions have identically zero smoothed mass") {
    const SmoothingKernel& k = narrow_kernel(3);
    const ConeVector tau0({10, 1, 1, 1});
    for (double r : {7.0, 8.0, 10.0}) {
        REQUIRE(7.0 * r > 4.0 * k.cutoff_radius());
        CHECK(smoothed_lattice_sum(2, k, tau0.scaled(r)) == 0.0);
    }
}

TEST_CASE("asymptotic sweep slope and validation") {
    const std::vector<double> r{2, 3, 4, 5, 6};
    const AsymptoticReport rep = asymptotic_sweep(2, ConeVector({3, 4, 5}), r, kernel2());
    CHECK(rep.d_expected == 1);
    CHECK(std::abs(rep.slope - 1.0) < 0.2);
    REQUIRE(rep.rows.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(std::isfinite(rep.rows[i].ratio));
        CHECK(rep.rows[i].main == doctest::Approx(rep.rows[0].main * r[i] / r[0]).epsilon(1e-14));
    }
    const std::vector<double> down{3, 2};
    CHECK_THROWS_AS((void)asymptotic_sweep(2, ConeVector({3, 4, 5}), down, kernel2()), ValidationError);
    const SmoothingKernel& k3 = narrow_kernel(3);
    CHECK_THROWS_AS((void)asymptotic_sweep(2, ConeVector({2, 2, 2, 2}), r, k3), ValidationError);
    CHECK_THROWS_AS((void)asymptotic_sweep(2, ConeVector({3, 4, 5, 6}), r, kernel2()), ValidationError);
}

TEST_CASE("line fit and report export") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.slope_stderr == doctest::Approx(0.0));

    AsymptoticReport rep;
    rep.n = 2;
    rep.k = 2;
    rep.d_expected = 1;
    rep.slope = 1.01;
    rep.rows = {{2.0, 3.0, 3.1, 3.0 / 3.1}};
    std::ostringstream csv;
    write_report_csv(csv, rep, {"config"});
    CHECK(csv.str().rfind("# config\nr,smoothed,main,ratio\n2,3,3.1,", 0) == 0);
    const std::string json = report_summary_json(rep);
    CHECK(json.find("\"slope\": 1.01") != std::string::npos);
    CHECK(json.find("\"d_expected\": 1") != std::string::npos);
    CHECK(parse_smoothing_route("atoms") == SmoothingRoute::Atoms);
    CHECK_THROWS_AS((void)parse_smoothing_route("fft"), ValidationError);
}
