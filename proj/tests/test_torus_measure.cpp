#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "polyspec/errors.hpp"
#include "polyspec/torus_measure.hpp"

using namespace polyspec;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<FrequencyInterval> window_of(std::initializer_list<std::pair<double, double>> w) {
    std::vector<FrequencyInterval> out;
    for (auto [lo, hi] : w) out.push_back({lo, hi});
    return out;
}

void check_against_brute(int n, int k, const std::vector<FrequencyInterval>& window, int box) {
    std::vector<std::uint64_t> qlo;
    std::vector<std::uint64_t> qhi;
    for (const auto& w : window) {
        const SquaredRange r = squared_range(w);
        qlo.push_back(r.empty ? 1 : r.lo);
        qhi.push_back(r.empty ? 0 : r.hi);
    }
    const auto expected = oracle::torus_brute(n, k, box, qlo, qhi);
    const JointMeasure measure = joint_measure(n, k, window);
    REQUIRE(measure.atoms().size() == expected.size());
    auto it = expected.begin();
    for (const auto& atom : measure.atoms()) {
        CHECK(atom.key.q == it->first);
        CHECK(atom.count == it->second);
        ++it;
    }
}

}  // namespace

TEST_CASE("shell points examples") {
    const auto unit = shell_points(2, 1);
    REQUIRE(unit.size() == 4);
    for (const auto& p : unit) CHECK(p.squared_norm() == 1);
    CHECK(std::is_sorted(unit.begin(), unit.end()));
    CHECK(shell_points(2, 25).size() == 12);
    CHECK(shell_points(2, 3).empty());
    CHECK(shell_points(1, 9).size() == 2);
    CHECK(shell_points(3, 0).size() == 1);
}

TEST_CASE("shell sizes agree with the sum-of-two-squares predicate") {
    for (std::uint64_t q = 0; q <= 400; ++q) CHECK(shell_points(2, q).empty() != oracle::is_sum_of_two_squares(q));
}

TEST_CASE("squared ranges are exact at integer boundaries") {
    const SquaredRange r = squared_range({2.0, 3.0});
    CHECK(r.lo == 4);
    CHECK(r.hi == 9);
    const SquaredRange s = squared_range({std::sqrt(2.0), std::sqrt(5.0)});
    CHECK(s.contains(3));
    CHECK(s.contains(4));
    CHECK(squared_range({1.1, 1.2}).empty);
}

TEST_CASE("coefficient examples") {
    const std::vector<LatticePoint> hit{{{1, 0}}, {{0, 1}}, {{1, 1}}};
    CHECK(coefficient(hit, 2, 2) == doctest::Approx(1.0 / two_pi).epsilon(1e-15));
    const std::vector<LatticePoint> miss{{{1, 0}}, {{0, 1}}, {{1, 2}}};
    CHECK(coefficient(miss, 2, 2) == 0.0);
    const std::vector<LatticePoint> collinear{{{1, 0}}, {{2, 0}}, {{3, 0}}, {{6, 0}}};
    CHECK(coefficient(collinear, 2, 3) == doctest::Approx(std::pow(two_pi, -2.0)).epsilon(1e-15));
}

TEST_CASE("joint measure examples") {
    const JointMeasure same = joint_measure(2, 2, window_of({{1, 1}, {1, 1}, {2, 2}}));
    REQUIRE(same.atoms().size() == 1);
    CHECK(same.atoms()[0].key.q == std::vector<std::uint64_t>{1, 1, 4});
    CHECK(same.atoms()[0].count == 4);
    CHECK(same.mass(same.atoms()[0]) == doctest::Approx(4.0 / (two_pi * two_pi)));

    const JointMeasure opposite = joint_measure(2, 2, window_of({{1, 1}, {1, 1}, {0, 0}}));
    REQUIRE(opposite.atoms().size() == 1);
    CHECK(opposite.atoms()[0].key.q == std::vector<std::uint64_t>{1, 1, 0});
    CHECK(opposite.atoms()[0].count == 4);

    CHECK(joint_measure(2, 2, window_of({{0, 3}, {0, 4}, {7.5, 20}})).atoms().empty());
    CHECK(joint_measure(2, 3, window_of({{0, 1}, {0, 1}, {0, 1}, {3.01, 9}})).atoms().empty());
}

TEST_CASE("joint measure equals the full-box brute force") {
    check_against_brute(2, 2, window_of({{0, 6}, {0, 6}, {0, 12}}), 6);
    check_against_brute(2, 2, window_of({{2, 5}, {1.5, 6}, {3, 4.5}}), 6);
    check_against_brute(2, 3, window_of({{0, 3}, {0, 3}, {0, 3}, {0, 9}}), 3);
    check_against_brute(2, 3, window_of({{1, 3}, {2, 3}, {0, 2.5}, {2, 5}}), 3);
    check_against_brute(3, 2, window_of({{0, 2}, {1, 2}, {0, 4}}), 2);
}

TEST_CASE("mass conservation over the full window") {
    for (int b : {2, 4, 6}) {
        const double bd = b;
        const auto ball = oracle::lattice_ball_count(2, b);
        CHECK(joint_measure(2, 2, window_of({{0, bd}, {0, bd}, {0, 2 * bd}})).total_count() == ball * ball);
    }
    const auto ball3 = oracle::lattice_ball_count(2, 3);
    CHECK(joint_measure(2, 3, window_of({{0, 3}, {0, 3}, {0, 3}, {0, 9}})).total_count() == ball3 * ball3 * ball3);
    const auto ball_n3 = oracle::lattice_ball_count(3, 2);
    CHECK(joint_measure(3, 2, window_of({{0, 2}, {0, 2}, {0, 4}})).total_count() == ball_n3 * ball_n3);
}

TEST_CASE("atom keys are sums of two squares") {
    const JointMeasure m = joint_measure(2, 3, window_of({{0, 5}, {0, 5}, {0, 5}, {0, 15}}));
    for (const auto& atom : m.atoms())
        for (auto q : atom.key.q) CHECK(oracle::is_sum_of_two_squares(q));
}

TEST_CASE("counts are symmetric under permuting the free windows") {
    const JointMeasure a = joint_measure(2, 3, window_of({{1, 3}, {2, 4}, {0, 2}, {0, 9}}));
    const JointMeasure b = joint_measure(2, 3, window_of({{2, 4}, {0, 2}, {1, 3}, {0, 9}}));
    REQUIRE(a.atoms().size() == b.atoms().size());
    for (const auto& atom : a.atoms()) {
        FrequencyKey permuted{{atom.key.q[1], atom.key.q[2], atom.key.q[0], atom.key.q[3]}};
        CHECK(b.count(permuted) == atom.count);
    }
}

TEST_CASE("k >= 3 enumeration is independent of the thread count") {
    EnumerationLimits one;
    one.threads = 1;
    EnumerationLimits four;
    four.threads = 4;
    const auto w = window_of({{0, 6}, {0, 6}, {0, 6}, {5, 12}});
    CHECK(joint_measure(2, 3, w, one) == joint_measure(2, 3, w, four));
}

TEST_CASE("budget overflow is reported before enumeration") {
    EnumerationLimits tight;
    tight.max_tuples = 1000;
    CHECK_THROWS_AS((void)joint_measure(2, 2, window_of({{0, 50}, {0, 50}, {0, 100}}), tight), BudgetExceeded);
}

TEST_CASE("bad tail sums vanish exactly") {
    const std::vector<double> five{5, 5};
    const BadTailResult a = bad_tail_sum(2, five, 0.1, 20);
    CHECK(a.tuples == 0);
    CHECK(a.mass == 0.0);
    CHECK(a.domain > 0);
    const std::vector<double> three{3, 3, 3};
    CHECK(bad_tail_sum(2, three, 0.01, 15).tuples == 0);
    CHECK_THROWS_AS((void)bad_tail_sum(2, five, 0.1, 5), ValidationError);
}

TEST_CASE("boundary family examples") {
    const std::vector<std::int64_t> r11{1, 1};
    const BoundaryWitness w = boundary_family(LatticePoint{{1, 0}}, r11);
    CHECK(w.key.q == std::vector<std::uint64_t>{1, 1, 4});
    CHECK(w.magnitude == doctest::Approx(1.0 / two_pi).epsilon(1e-15));
    const std::vector<std::int64_t> r123{1, 2, 3};
    const BoundaryWitness v = boundary_family(LatticePoint{{1, 1}}, r123);
    CHECK(v.key.q == std::vector<std::uint64_t>{2, 8, 18, 72});
    CHECK(v.magnitude == doctest::Approx(std::pow(two_pi, -2.0)).epsilon(1e-15));
    const std::vector<std::int64_t> r52{5, 2};
    CHECK(boundary_family(LatticePoint{{3, -4}}, r52).magnitude == w.magnitude);
    CHECK_THROWS_AS((void)boundary_family(LatticePoint{{0, 0}}, r11), ValidationError);
}

TEST_CASE("measure files round-trip losslessly") {
    const JointMeasure m = joint_measure(2, 3, window_of({{0, 2.5}, {1, 3}, {0, 3}, {0.5, 7.25}}));
    std::stringstream ss;
    write_measure(ss, m, {"note=test"});
    const std::string first = ss.str();
    const JointMeasure back = read_measure(ss);
    CHECK(back == m);
    std::stringstream again;
    write_measure(again, back, {"note=test"});
    CHECK(again.str() == first);
}

TEST_CASE("windows parse and format") {
    const auto w = parse_window("0:6,0.5:6.25,0:12");
    REQUIRE(w.size() == 3);
    CHECK(w[1].lo == 0.5);
    CHECK(format_window(w) == "0:6,0.5:6.25,0:12");
    CHECK_THROWS_AS((void)parse_window("1:0"), ValidationError);
    CHECK_THROWS_AS((void)parse_window("a:b"), ValidationError);
}
