#include "polyspec/cones.hpp"

#include <cmath>
#include <string>

#include "exact_sum.hpp"
#include "polyspec/errors.hpp"

namespace polyspec {

namespace {

void check_k(std::size_t size) {
    if (size < 3)
        throw ValidationError("cone vector needs k >= 2, i.e. at least 3 entries (got " +
                              std::to_string(size) + ")");
    if (size > static_cast<std::size_t>(max_cone_k) + 1)
        throw ValidationError("cone vector too long for sign enumeration (k > " +
                              std::to_string(max_cone_k) + ")");
}

// eps_{k+1} = +1; bit j of mask set means eps_j = -1 for j < k+1.
SignVector signs_from_mask(std::uint64_t mask, std::size_t size) {
    SignVector eps(size, 1);
    for (std::size_t j = 0; j + 1 < size; ++j)
        if ((mask >> j) & 1U) eps[j] = -1;
    return eps;
}

struct DoubleTerms {
    std::span<const double> tau;

    // Exact tau_j - sum_{l != j} tau_l.
    detail::ExactSum excess(std::size_t j) const {
        detail::ExactSum acc;
        for (std::size_t l = 0; l < tau.size(); ++l) acc.add(l == j ? tau[l] : -tau[l]);
        return acc;
    }

    detail::ExactSum signed_sum(std::uint64_t mask) const {
        detail::ExactSum acc;
        for (std::size_t j = 0; j < tau.size(); ++j)
            acc.add(((mask >> j) & 1U) && j + 1 < tau.size() ? -tau[j] : tau[j]);
        return acc;
    }
};

}  // namespace

ConeVector::ConeVector(std::vector<double> entries) : entries_(std::move(entries)) {
    check_k(entries_.size());
    for (double x : entries_)
        if (!std::isfinite(x) || !(x > 0.0))
            throw ValidationError("cone vector entries must be finite and strictly positive");
}

double ConeVector::sum() const {
    detail::ExactSum acc;
    for (double x : entries_) acc.add(x);
    return acc.value();
}

ConeVector ConeVector::scaled(double r) const {
    if (!std::isfinite(r) || !(r > 0.0)) throw ValidationError("scale factor must be positive");
    std::vector<double> out(entries_);
    for (double& x : out) x *= r;
    return ConeVector(std::move(out));
}

std::string_view to_string(ConeTag tag) noexcept {
    switch (tag) {
        case ConeTag::Good: return "Good";
        case ConeTag::Bad: return "Bad";
        case ConeTag::Degenerate: return "Degenerate";
    }
    return "?";
}

bool polygon_inequality(const ConeVector& tau) {
    const DoubleTerms terms{tau.entries()};
    for (std::size_t j = 0; j < tau.size(); ++j)
        if (terms.excess(j).sign() >= 0) return false;
    return true;
}

SignGap min_sign_gap_with_witness(const ConeVector& tau) {
    const DoubleTerms terms{tau.entries()};
    const std::uint64_t count = std::uint64_t{1} << (tau.size() - 1);
    SignGap best;
    best.gap = INFINITY;
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const auto s = terms.signed_sum(mask);
        const double gap = s.sign() == 0 ? 0.0 : std::abs(s.value());
        if (gap < best.gap) {
            best.gap = gap;
            best_mask = mask;
            if (gap == 0.0) break;
        }
    }
    best.signs = signs_from_mask(best_mask, tau.size());
    return best;
}

double min_sign_gap(const ConeVector& tau) { return min_sign_gap_with_witness(tau).gap; }

ConeClass classify(const ConeVector& tau, double tol) {
    if (!std::isfinite(tol) || tol < 0.0) throw ValidationError("tolerance must be >= 0");
    const DoubleTerms terms{tau.entries()};
    const double threshold = tol * tau.sum();

    ConeClass out;
    std::optional<std::size_t> boundary;
    for (std::size_t j = 0; j < tau.size(); ++j) {
        const auto ex = terms.excess(j);
        const bool dominant = tol == 0.0 ? ex.sign() > 0 : ex.value() > threshold;
        if (dominant) {
            out.tag = ConeTag::Bad;
            out.index_witness = j;
            return out;
        }
        if (!boundary && ex.sign() >= 0) boundary = j;
    }

    const SignGap g = min_sign_gap_with_witness(tau);
    const bool separated = tol == 0.0 ? g.gap > 0.0 : g.gap > threshold;
    if (!boundary && separated) {
        out.tag = ConeTag::Good;
        return out;
    }
    out.tag = ConeTag::Degenerate;
    if (boundary)
        out.index_witness = boundary;
    else
        out.sign_witness = g.signs;
    return out;
}

ConeClass classify_exact(std::span<const std::int64_t> entries) {
    check_k(entries.size());
    __int128 total = 0;
    for (auto x : entries) {
        if (x <= 0) throw ValidationError("cone vector entries must be strictly positive");
        total += x;
    }
    ConeClass out;
    std::optional<std::size_t> boundary;
    for (std::size_t j = 0; j < entries.size(); ++j) {
        const __int128 excess = 2 * static_cast<__int128>(entries[j]) - total;
        if (excess > 0) {
            out.tag = ConeTag::Bad;
            out.index_witness = j;
            return out;
        }
        if (!boundary && excess == 0) boundary = j;
    }
    if (boundary) {
        out.tag = ConeTag::Degenerate;
        out.index_witness = boundary;
        return out;
    }
    const std::uint64_t count = std::uint64_t{1} << (entries.size() - 1);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        __int128 s = 0;
        for (std::size_t j = 0; j < entries.size(); ++j)
            s += ((mask >> j) & 1U) && j + 1 < entries.size() ? -entries[j] : entries[j];
        if (s == 0) {
            out.tag = ConeTag::Degenerate;
            out.sign_witness = signs_from_mask(mask, entries.size());
            return out;
        }
    }
    out.tag = ConeTag::Good;
    return out;
}

ConeClass classify_sqrt(std::span<const std::uint64_t> squares) {
    check_k(squares.size());
    for (auto q : squares)
        if (q == 0) throw ValidationError("squared frequencies must be strictly positive");
    const std::size_t size = squares.size();
    std::vector<int> coeffs(size);

    ConeClass out;
    std::optional<std::size_t> boundary;
    for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t l = 0; l < size; ++l) coeffs[l] = l == j ? 1 : -1;
        const int s = detail::sqrt_sum_sign(coeffs, squares);
        if (s > 0) {
            out.tag = ConeTag::Bad;
            out.index_witness = j;
            return out;
        }
        if (!boundary && s == 0) boundary = j;
    }
    if (boundary) {
        out.tag = ConeTag::Degenerate;
        out.index_witness = boundary;
        return out;
    }
    const std::uint64_t count = std::uint64_t{1} << (size - 1);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const SignVector eps = signs_from_mask(mask, size);
        if (detail::sqrt_sum_sign(eps, squares) == 0) {
            out.tag = ConeTag::Degenerate;
            out.sign_witness = eps;
            return out;
        }
    }
    out.tag = ConeTag::Good;
    return out;
}

}  // namespace polyspec
