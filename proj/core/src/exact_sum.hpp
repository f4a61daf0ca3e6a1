#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polyspec::detail {

/// Exact floating-point accumulator (nonoverlapping expansion, zero-eliminated).
/// The represented value is the exact real sum of every added double.
class ExactSum {
public:
    void add(double x);
    /// -1, 0 or +1: the sign of the exact sum.
    [[nodiscard]] int sign() const noexcept;
    /// The exact sum rounded to (nearly) the nearest double.
    [[nodiscard]] double value() const noexcept;

private:
    std::vector<double> parts_;  // increasing magnitude
};

[[nodiscard]] int exact_sign(std::span<const double> terms);

/// Sign of sum_j coeff_j * sqrt(squares_j), decided exactly: zero is detected
/// by grouping the radicands by squarefree part, nonzero signs are resolved
/// with multiprecision evaluation at increasing precision.
[[nodiscard]] int sqrt_sum_sign(std::span<const int> coeffs,
                                std::span<const std::uint64_t> squares);

/// Writes q = root^2 * core with core squarefree.
void squarefree_split(std::uint64_t q, std::uint64_t& root, std::uint64_t& core);

}  // namespace polyspec::detail
