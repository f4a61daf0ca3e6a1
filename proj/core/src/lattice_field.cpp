#include "lattice_field.hpp"

#include <algorithm>

#include "polyspec/parallel.hpp"

namespace polyspec::detail {

namespace {


void collect_pairs(const LatticeField& a, const LatticeField& b, const std::int64_t* target,
                   std::vector<std::pair<std::size_t, std::size_t>>& out) {
    out.clear();
    const int m = a.dimension() - 1;
    std::vector<std::int64_t> pa(static_cast<std::size_t>(std::max(m, 1)));
    std::vector<std::int64_t> pb(static_cast<std::size_t>(std::max(m, 1)));
    for (std::size_t ra = 0; ra < a.rows(); ++ra) {
        if (a.row_empty(ra)) continue;
        a.prefix(ra, pa.data());
        for (int d = 0; d < m; ++d) pb[d] = target[d] - pa[d];
        const std::size_t rb = b.row_of(pb.data());
        if (rb == LatticeField::npos || b.row_empty(rb)) continue;
        out.emplace_back(ra, rb);
    }
}

// acc[c] += sum over pairs of a(ia) b(ib) with column offsets chosen so that
// column c of the target corresponds to coordinate c - target_radius.
void accumulate_row(const LatticeField& a, const LatticeField& b,
                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                    std::int64_t target_radius, std::int64_t col_lo, std::int64_t col_hi,
                    std::vector<double>& acc) {
    const std::int64_t ra = a.radius();
    const std::int64_t rb = b.radius();
    for (const auto& [row_a, row_b] : pairs) {
        const double* av = a.row(row_a);
        const double* bv = b.row(row_b);
        const std::int64_t b_first = b.first(row_b);
        const std::int64_t b_last = b.last(row_b);
        for (std::int64_t ia = a.first(row_a); ia <= a.last(row_a); ++ia) {
            const double x = av[ia];
            if (x == 0.0) continue;
            // target column c = (ia - ra) + (ib - rb) + target_radius
            const std::int64_t shift = ia - ra - rb + target_radius;
            const std::int64_t lo = std::max(b_first, col_lo - shift);
            const std::int64_t hi = std::min(b_last, col_hi - shift);
            double* out = acc.data() + shift;
            for (std::int64_t ib = lo; ib <= hi; ++ib) out[ib] += x * bv[ib];
        }
    }
}

}  // namespace

LatticeField::LatticeField(int n, std::int64_t radius) : n_(n), radius_(radius), rows_(1) {
    for (int d = 0; d + 1 < n_; ++d) rows_ *= static_cast<std::size_t>(side());
    data_.assign(rows_ * static_cast<std::size_t>(side()), 0.0);
    first_.assign(rows_, 0);
    last_.assign(rows_, side() - 1);
}

void LatticeField::prefix(std::size_t r, std::int64_t* out) const noexcept {
    for (int d = n_ - 2; d >= 0; --d) {
        out[d] = static_cast<std::int64_t>(r % static_cast<std::size_t>(side())) - radius_;
        r /= static_cast<std::size_t>(side());
    }
}

std::size_t LatticeField::row_of(const std::int64_t* prefix) const noexcept {
    std::size_t r = 0;
    for (int d = 0; d + 1 < n_; ++d) {
        if (prefix[d] < -radius_ || prefix[d] > radius_) return npos;
        r = r * static_cast<std::size_t>(side()) + static_cast<std::size_t>(prefix[d] + radius_);
    }
    return r;
}

void LatticeField::index_support() {
    for (std::size_t r = 0; r < rows_; ++r) {
        const double* v = row(r);
        std::int64_t lo = 0;
        std::int64_t hi = side() - 1;
        while (lo <= hi && v[lo] == 0.0) ++lo;
        while (hi >= lo && v[hi] == 0.0) --hi;
        first_[r] = lo;
        last_[r] = hi;
    }
}

LatticeField convolve(const LatticeField& a, const LatticeField& b, unsigned threads) {
    LatticeField c(a.dimension(), a.radius() + b.radius());
    const int m = a.dimension() - 1;
    parallel_for(c.rows(), threads, [&](std::size_t rc) {
        std::vector<std::int64_t> pc(static_cast<std::size_t>(std::max(m, 1)));
        c.prefix(rc, pc.data());
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        collect_pairs(a, b, pc.data(), pairs);
        if (pairs.empty()) return;
        std::vector<double> acc(static_cast<std::size_t>(c.side()), 0.0);
        accumulate_row(a, b, pairs, c.radius(), 0, c.side() - 1, acc);
        std::copy(acc.begin(), acc.end(), c.row(rc));
    });
    c.index_support();
    return c;
}

double convolve_dot(const LatticeField& a, const LatticeField& b, const LatticeField& w, unsigned threads) {
    const int m = a.dimension() - 1;
    std::vector<double> partial(w.rows(), 0.0);
    parallel_for(w.rows(), threads, [&](std::size_t rw) {
        if (w.row_empty(rw)) return;
        std::vector<std::int64_t> pw(static_cast<std::size_t>(std::max(m, 1)));
        w.prefix(rw, pw.data());
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        collect_pairs(a, b, pw.data(), pairs);
        if (pairs.empty()) return;
        std::vector<double> acc(static_cast<std::size_t>(w.side()), 0.0);
        accumulate_row(a, b, pairs, w.radius(), w.first(rw), w.last(rw), acc);
        const double* wv = w.row(rw);
        double s = 0.0;
        for (std::int64_t i = w.first(rw); i <= w.last(rw); ++i) s += wv[i] * acc[i];
        partial[rw] = s;
    });
    double sum = 0.0;
    double comp = 0.0;
    for (double p : partial) {
        const double y = p - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace polyspec::detail
