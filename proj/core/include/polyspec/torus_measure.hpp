#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polyspec {

/// A frequency m in Z^n of the flat torus R^n / 2 pi Z^n (eigenfunction
/// (2 pi)^{-n/2} e^{i<x,m>}, frequency |m|).
struct LatticePoint {
    std::vector<std::int64_t> coords;

    [[nodiscard]] std::uint64_t squared_norm() const;
    auto operator<=>(const LatticePoint&) const = default;
};

/// Squared frequencies (|m_1|^2, ..., |m_k|^2, |m_1 + ... + m_k|^2).
struct FrequencyKey {
    std::vector<std::uint64_t> q;
    auto operator<=>(const FrequencyKey&) const = default;
};

/// Closed frequency interval [lo, hi] (frequencies, not squared).
struct FrequencyInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const FrequencyInterval&) const = default;
};

/// Exact squared-norm bounds equivalent to a FrequencyInterval:
/// lo <= sqrt(q) <= hi  <=>  q_lo <= q <= q_hi.
struct SquaredRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool empty = false;

    [[nodiscard]] bool contains(std::uint64_t q) const noexcept { return !empty && q >= lo && q <= hi; }
};

[[nodiscard]] SquaredRange squared_range(const FrequencyInterval& interval);

struct Atom {
    FrequencyKey key;
    std::uint64_t count = 0;
};

/// Exact joint spectral measure of the torus restricted to a window:
/// atom counts are numbers of tuples (m_1..m_k) realizing each key, and every
/// tuple carries mass (2 pi)^{-(k-1) n}.
class JointMeasure {
public:
    JointMeasure(int n, int k, std::vector<FrequencyInterval> window, std::vector<Atom> atoms);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] std::span<const FrequencyInterval> window() const noexcept { return window_; }
    /// Sorted by key.
    [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::uint64_t count(const FrequencyKey& key) const;
    [[nodiscard]] std::uint64_t total_count() const noexcept;
    /// (2 pi)^{-(k-1) n}.
    [[nodiscard]] double weight_factor() const noexcept;
    [[nodiscard]] double mass(const Atom& atom) const noexcept {
        return static_cast<double>(atom.count) * weight_factor();
    }

    bool operator==(const JointMeasure&) const;

private:
    int n_;
    int k_;
    std::vector<FrequencyInterval> window_;
    std::vector<Atom> atoms_;
};

struct EnumerationLimits {
    /// Cap on the estimated number of tuples (m_1..m_k) in the window.
    std::uint64_t max_tuples = 20'000'000'000ULL;
    /// Cap on the number of materialized atoms.
    std::uint64_t max_atoms = 10'000'000ULL;
    unsigned threads = 0;
};

/// All m in Z^n with |m|^2 = q, in lexicographic order.
[[nodiscard]] std::vector<LatticePoint> shell_points(int n, std::uint64_t q);

/// Number of m in Z^n with |m|^2 in [range.lo, range.hi].
[[nodiscard]] std::uint64_t count_lattice_points(int n, const SquaredRange& range);

/// <phi_{m_1} ... phi_{m_k}, phi_{m_{k+1}}> on the torus:
/// (2 pi)^{-(k-1) n / 2} if m_1 + ... + m_k = m_{k+1}, else 0.
[[nodiscard]] double coefficient(std::span<const LatticePoint> m, int n, int k);

/// Enumerates the measure on the window (k+1 intervals). k = 2 uses nested
/// loops over shell pairs; k >= 3 meets in the middle on partial sum vectors.
/// Throws BudgetExceeded before any enumeration when the estimated tuple
/// count exceeds limits.max_tuples.
[[nodiscard]] JointMeasure joint_measure(int n, int k, const std::vector<FrequencyInterval>& window,
                                         const EnumerationLimits& limits = {});

struct BadTailResult {
    /// Tuples with lambda_j <= tau_j (j <= k) and closing frequency in
    /// [(1 + eps) sum tau, cap].
    std::uint64_t tuples = 0;
    /// Size of the enumerated domain (tuples with lambda_j <= tau_j).
    std::uint64_t domain = 0;
    /// tuples * (2 pi)^{-(k-1) n}.
    double mass = 0.0;
};

[[nodiscard]] BadTailResult bad_tail_sum(int n, std::span<const double> tau, double eps, double cap,
                                         const EnumerationLimits& limits = {});

struct BoundaryWitness {
    FrequencyKey key;
    double magnitude = 0.0;
    /// (r_1 v, ..., r_k v, (r_1 + ... + r_k) v)
    std::vector<LatticePoint> tuple;
};

/// Collinear tuple on the boundary lambda_{k+1} = lambda_1 + ... + lambda_k.
[[nodiscard]] BoundaryWitness boundary_family(const LatticePoint& v, std::span<const std::int64_t> r);

/// Text export: header lines "# ..." then one atom per line "q1 ... q(k+1) count".
void write_measure(std::ostream& out, const JointMeasure& measure,
                   const std::vector<std::string>& extra_header = {});
[[nodiscard]] JointMeasure read_measure(std::istream& in);

[[nodiscard]] std::string format_window(std::span<const FrequencyInterval> window);
[[nodiscard]] std::vector<FrequencyInterval> parse_window(const std::string& text);

}  // namespace polyspec
