#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace polyspec::detail {

/// Dense real function on the box [-R, R]^n of Z^n, stored row-major with the
/// last coordinate contiguous. A "row" fixes the first n-1 coordinates.
class LatticeField {
public:
    LatticeField(int n, std::int64_t radius);

    [[nodiscard]] int dimension() const noexcept { return n_; }
    [[nodiscard]] std::int64_t radius() const noexcept { return radius_; }
    [[nodiscard]] std::int64_t side() const noexcept { return 2 * radius_ + 1; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

    [[nodiscard]] double* row(std::size_t r) noexcept { return data_.data() + r * static_cast<std::size_t>(side()); }
    [[nodiscard]] const double* row(std::size_t r) const noexcept {
        return data_.data() + r * static_cast<std::size_t>(side());
    }
    /// Row prefix (first n-1 coordinates, centered) of row r.
    void prefix(std::size_t r, std::int64_t* out) const noexcept;
    /// Row holding the given prefix, or npos when outside the box.
    [[nodiscard]] std::size_t row_of(const std::int64_t* prefix) const noexcept;

    /// Recomputes per-row [first, last] nonzero column ranges.
    void index_support();
    [[nodiscard]] bool row_empty(std::size_t r) const noexcept { return first_[r] > last_[r]; }
    [[nodiscard]] std::int64_t first(std::size_t r) const noexcept { return first_[r]; }
    [[nodiscard]] std::int64_t last(std::size_t r) const noexcept { return last_[r]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    int n_;
    std::int64_t radius_;
    std::size_t rows_;
    std::vector<double> data_;
    std::vector<std::int64_t> first_;
    std::vector<std::int64_t> last_;
};

/// Full lattice convolution (a * b)(s) = sum_u a(u) b(s - u).
[[nodiscard]] LatticeField convolve(const LatticeField& a, const LatticeField& b, unsigned threads);

/// sum_s w(s) (a * b)(s), summed row by row in a fixed order.
[[nodiscard]] double convolve_dot(const LatticeField& a, const LatticeField& b, const LatticeField& w,
                                  unsigned threads);

}  // namespace polyspec::detail
