#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace polyspec {

/// A frequency vector tau = (tau_1, ..., tau_{k+1}) with strictly positive,
/// finite entries and k >= 2.
class ConeVector {
public:
    explicit ConeVector(std::vector<double> entries);

    [[nodiscard]] int k() const noexcept { return static_cast<int>(entries_.size()) - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::span<const double> entries() const noexcept { return entries_; }
    [[nodiscard]] double operator[](std::size_t i) const { return entries_[i]; }
    /// Sum of the entries, exactly rounded.
    [[nodiscard]] double sum() const;
    [[nodiscard]] ConeVector scaled(double r) const;

private:
    std::vector<double> entries_;
};

enum class ConeTag { Good, Bad, Degenerate };

[[nodiscard]] std::string_view to_string(ConeTag tag) noexcept;

/// Entries are +1 or -1.
using SignVector = std::vector<int>;

struct ConeClass {
    ConeTag tag = ConeTag::Degenerate;
    /// Failing (or minimizing) sign vector, set for sign-degenerate vectors.
    std::optional<SignVector> sign_witness;
    /// Zero-based index j of a dominant (Bad) or boundary (Degenerate) entry.
    std::optional<std::size_t> index_witness;
};

struct SignGap {
    double gap = 0.0;
    SignVector signs;  // a minimizer, normalized so that signs.back() == +1
};

/// True iff tau_j < sum_{l != j} tau_l for every j (decided exactly).
[[nodiscard]] bool polygon_inequality(const ConeVector& tau);

/// min over sign vectors eps of |eps . tau|.
[[nodiscard]] double min_sign_gap(const ConeVector& tau);
[[nodiscard]] SignGap min_sign_gap_with_witness(const ConeVector& tau);

/// Good / Bad / Degenerate with relative tolerance tol (scaled by sum(tau)).
/// With tol == 0 all comparisons are exact on the binary values of the entries.
[[nodiscard]] ConeClass classify(const ConeVector& tau, double tol = 0.0);

/// Exact classification of integer entries (equivalently of rationals over a
/// common denominator).
[[nodiscard]] ConeClass classify_exact(std::span<const std::int64_t> entries);

/// Exact classification of (sqrt(q_1), ..., sqrt(q_{k+1})) for positive
/// integers q_j, e.g. squared torus frequencies.
[[nodiscard]] ConeClass classify_sqrt(std::span<const std::uint64_t> squares);

/// Largest supported k for the sign enumeration.
inline constexpr int max_cone_k = 24;

}  // namespace polyspec
