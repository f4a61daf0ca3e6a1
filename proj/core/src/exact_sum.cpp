#include "exact_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace polyspec::detail {

namespace {

inline void two_sum(double a, double b, double& s, double& err) {
    s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    err = (a - av) + (b - bv);
}

template <class Float>
int sign_at_precision(std::span<const int> coeffs, std::span<const std::uint64_t> squares,
                      bool& decided) {
    Float total = 0;
    Float scale = 0;
    for (std::size_t j = 0; j < squares.size(); ++j) {
        if (coeffs[j] == 0) continue;
        const Float root = boost::multiprecision::sqrt(Float(squares[j]));
        total += coeffs[j] * root;
        scale += std::abs(coeffs[j]) * root;
    }
    // Each sqrt and addition is correctly rounded; a generous bound on the
    // accumulated error is (2 * terms + 2) ulps of the absolute scale.
    const Float eps = std::numeric_limits<Float>::epsilon();
    const Float bound = scale * eps * Float(2 * squares.size() + 2);
    if (total > bound) {
        decided = true;
        return 1;
    }
    if (total < -bound) {
        decided = true;
        return -1;
    }
    decided = false;
    return 0;
}

}  // namespace

void ExactSum::add(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("ExactSum: non-finite term");
    double q = x;
    std::size_t out = 0;
    for (double e : parts_) {
        double s = 0.0;
        double err = 0.0;
        two_sum(q, e, s, err);
        if (err != 0.0) parts_[out++] = err;
        q = s;
    }
    parts_.resize(out);
    if (q != 0.0) parts_.push_back(q);
}

int ExactSum::sign() const noexcept {
    if (parts_.empty()) return 0;
    return parts_.back() > 0.0 ? 1 : -1;
}

double ExactSum::value() const noexcept {
    double s = 0.0;
    for (double p : parts_) s += p;
    return s;
}

int exact_sign(std::span<const double> terms) {
    ExactSum acc;
    for (double t : terms) acc.add(t);
    return acc.sign();
}

void squarefree_split(std::uint64_t q, std::uint64_t& root, std::uint64_t& core) {
    root = 1;
    core = 1;
    if (q == 0) {
        root = 0;
        return;
    }
    std::uint64_t rest = q;
    for (std::uint64_t p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
        int mult = 0;
        while (rest % p == 0) {
            rest /= p;
            ++mult;
        }
        for (int i = 0; i < mult / 2; ++i) root *= p;
        if (mult % 2 == 1) core *= p;
    }
    core *= rest;
}

int sqrt_sum_sign(std::span<const int> coeffs, std::span<const std::uint64_t> squares) {
    if (coeffs.size() != squares.size()) throw std::invalid_argument("sqrt_sum_sign: size mismatch");

    // sqrt of distinct squarefree integers are linearly independent over Q.
    std::map<std::uint64_t, __int128> groups;
    for (std::size_t j = 0; j < squares.size(); ++j) {
        std::uint64_t root = 0;
        std::uint64_t core = 0;
        squarefree_split(squares[j], root, core);
        if (root == 0) continue;
        groups[core] += static_cast<__int128>(coeffs[j]) * root;
    }
    const bool all_zero =
        std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.second == 0; });
    if (all_zero) return 0;

    using namespace boost::multiprecision;
    bool decided = false;
    int s = sign_at_precision<cpp_bin_float_50>(coeffs, squares, decided);
    if (decided) return s;
    s = sign_at_precision<cpp_bin_float_100>(coeffs, squares, decided);
    if (decided) return s;
    s = sign_at_precision<number<cpp_bin_float<400>>>(coeffs, squares, decided);
    if (decided) return s;
    s = sign_at_precision<number<cpp_bin_float<2000>>>(coeffs, squares, decided);
    if (decided) return s;
    throw std::runtime_error("sqrt_sum_sign: sign not resolved at 2000 digits");
}

}  // namespace polyspec::detail
