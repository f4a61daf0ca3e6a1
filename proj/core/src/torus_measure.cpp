#include "polyspec/torus_measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include "exact_sum.hpp"
#include "polyspec/errors.hpp"
#include "polyspec/parallel.hpp"

namespace polyspec {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double max_window_frequency = 9.0e7;  // keeps q < 2^53

std::uint64_t isqrt(std::uint64_t q) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(q)));
    while (r * r > q) --r;
    while ((r + 1) * (r + 1) <= q) ++r;
    return r;
}

// Sign of q - x^2, exact.
int compare_square(std::uint64_t q, double x) {
    const double p = x * x;
    const double e = std::fma(x, x, -p);
    detail::ExactSum acc;
    acc.add(static_cast<double>(q));
    acc.add(-p);
    acc.add(-e);
    return acc.sign();
}

void check_dimensions(int n, int k) {
    if (n < 1) throw ValidationError("lattice dimension n must be >= 1");
    if (k < 2) throw ValidationError("k must be >= 2");
}

// Lattice points with squared norm in a range, ordered by (q, lexicographic).
struct Annulus {
    int n = 0;
    std::vector<std::uint64_t> q;
    std::vector<std::int64_t> coords;      // n per point
    std::vector<std::size_t> shell_start;  // first index of each shell, plus end

    [[nodiscard]] std::size_t size() const noexcept { return q.size(); }
    [[nodiscard]] std::size_t shells() const noexcept { return shell_start.size() - 1; }
    [[nodiscard]] const std::int64_t* point(std::size_t i) const { return coords.data() + i * n; }
};

template <class Visit>
void visit_ball(int n, std::uint64_t q_hi, Visit&& visit) {
    std::vector<std::int64_t> cur(n, 0);
    auto rec = [&](auto& self, int depth, std::uint64_t used) -> void {
        if (depth == n) {
            visit(cur, used);
            return;
        }
        const auto bound = static_cast<std::int64_t>(isqrt(q_hi - used));
        for (std::int64_t x = -bound; x <= bound; ++x) {
            cur[depth] = x;
            self(self, depth + 1, used + static_cast<std::uint64_t>(x * x));
        }
    };
    rec(rec, 0, 0);
}

Annulus make_annulus(int n, const SquaredRange& range) {
    Annulus a;
    a.n = n;
    if (!range.empty) {
        std::vector<std::uint64_t> q;
        std::vector<std::int64_t> coords;
        visit_ball(n, range.hi, [&](const std::vector<std::int64_t>& m, std::uint64_t norm) {
            if (norm < range.lo) return;
            q.push_back(norm);
            coords.insert(coords.end(), m.begin(), m.end());
        });
        std::vector<std::size_t> order(q.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return q[x] < q[y]; });
        a.q.reserve(q.size());
        a.coords.reserve(coords.size());
        for (auto i : order) {
            a.q.push_back(q[i]);
            a.coords.insert(a.coords.end(), coords.begin() + i * n, coords.begin() + (i + 1) * n);
        }
    }
    for (std::size_t i = 0; i < a.q.size(); ++i)
        if (i == 0 || a.q[i] != a.q[i - 1]) a.shell_start.push_back(i);
    a.shell_start.push_back(a.q.size());
    return a;
}

class AtomBudget {
public:
    explicit AtomBudget(std::uint64_t cap) : cap_(cap) {}
    void charge(std::uint64_t atoms) {
        if (used_.fetch_add(atoms) + atoms > cap_)
            throw BudgetExceeded("joint measure exceeds the atom cap of " + std::to_string(cap_));
    }

private:
    std::uint64_t cap_;
    std::atomic<std::uint64_t> used_{0};
};

std::vector<Atom> enumerate_pairs(const Annulus& a1, const Annulus& a2, const SquaredRange& close,
                                  const EnumerationLimits& limits, AtomBudget& budget) {
    const int n = a1.n;
    std::vector<std::vector<Atom>> per_shell(a1.shells());
    parallel_for(a1.shells(), limits.threads, [&](std::size_t s1) {
        std::vector<Atom>& out = per_shell[s1];
        std::vector<std::uint64_t> closing;
        const std::uint64_t q1 = a1.q[a1.shell_start[s1]];
        const double r1 = std::sqrt(static_cast<double>(q1));
        for (std::size_t s2 = 0; s2 < a2.shells(); ++s2) {
            const std::uint64_t q2 = a2.q[a2.shell_start[s2]];
            const double r2 = std::sqrt(static_cast<double>(q2));
            const double lo = (r1 - r2) * (r1 - r2);
            const double hi = (r1 + r2) * (r1 + r2);
            if (hi + 1.0 < static_cast<double>(close.lo) || lo - 1.0 > static_cast<double>(close.hi))
                continue;
            closing.clear();
            for (std::size_t i = a1.shell_start[s1]; i < a1.shell_start[s1 + 1]; ++i) {
                const std::int64_t* m1 = a1.point(i);
                for (std::size_t j = a2.shell_start[s2]; j < a2.shell_start[s2 + 1]; ++j) {
                    const std::int64_t* m2 = a2.point(j);
                    std::uint64_t q3 = 0;
                    for (int d = 0; d < n; ++d) {
                        const std::int64_t c = m1[d] + m2[d];
                        q3 += static_cast<std::uint64_t>(c * c);
                    }
                    if (close.contains(q3)) closing.push_back(q3);
                }
            }
            if (closing.empty()) continue;
            std::sort(closing.begin(), closing.end());
            std::size_t added = 0;
            for (std::size_t i = 0; i < closing.size();) {
                std::size_t j = i;
                while (j < closing.size() && closing[j] == closing[i]) ++j;
                out.push_back(Atom{FrequencyKey{{q1, q2, closing[i]}}, j - i});
                ++added;
                i = j;
            }
            budget.charge(added);
        }
    });
    std::vector<Atom> atoms;
    for (auto& v : per_shell) std::move(v.begin(), v.end(), std::back_inserter(atoms));
    return atoms;
}

using SumVector = std::vector<std::int64_t>;
using PartialKeys = std::map<std::vector<std::uint64_t>, std::uint64_t>;
using HalfTable = std::map<SumVector, PartialKeys>;

HalfTable enumerate_half(const std::vector<const Annulus*>& parts, int n) {
    HalfTable table;
    for (const auto* a : parts)
        if (a->size() == 0) return table;
    std::vector<std::size_t> idx(parts.size(), 0);
    SumVector sum(n);
    std::vector<std::uint64_t> key(parts.size());
    for (;;) {
        std::fill(sum.begin(), sum.end(), 0);
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const std::int64_t* m = parts[p]->point(idx[p]);
            for (int d = 0; d < n; ++d) sum[d] += m[d];
            key[p] = parts[p]->q[idx[p]];
        }
        ++table[sum][key];
        std::size_t p = parts.size();
        while (p > 0) {
            --p;
            if (++idx[p] < parts[p]->size()) break;
            idx[p] = 0;
            if (p == 0) return table;
        }
    }
}

// Flat (key, count) records with periodic sort-and-merge compaction.
class RecordBuffer {
public:
    explicit RecordBuffer(std::size_t key_size) : key_size_(key_size), stride_(key_size + 1) {}

    [[nodiscard]] std::size_t records() const noexcept { return data_.size() / stride_; }

    void add(const std::uint64_t* key, std::uint64_t count) {
        data_.insert(data_.end(), key, key + key_size_);
        data_.push_back(count);
        if (records() >= 2 * std::max<std::size_t>(compacted_, 1U << 16)) compact();
    }

    void append(const RecordBuffer& other) { data_.insert(data_.end(), other.data_.begin(), other.data_.end()); }

    void compact() {
        const std::size_t count = records();
        std::vector<std::size_t> order(count);
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        const auto less = [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                                                data_.begin() + static_cast<std::ptrdiff_t>(a * stride_ + key_size_),
                                                data_.begin() + static_cast<std::ptrdiff_t>(b * stride_),
                                                data_.begin() + static_cast<std::ptrdiff_t>(b * stride_ + key_size_));
        };
        std::sort(order.begin(), order.end(), less);
        std::vector<std::uint64_t> out;
        out.reserve(data_.size());
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t* rec = data_.data() + order[i] * stride_;
            if (!out.empty() && std::equal(rec, rec + key_size_, out.end() - static_cast<std::ptrdiff_t>(stride_)))
                out.back() += rec[key_size_];
            else
                out.insert(out.end(), rec, rec + stride_);
        }
        out.shrink_to_fit();
        data_ = std::move(out);
        compacted_ = records();
    }

    [[nodiscard]] std::vector<Atom> atoms() const {
        std::vector<Atom> out;
        out.reserve(records());
        for (std::size_t i = 0; i < records(); ++i) {
            const std::uint64_t* rec = data_.data() + i * stride_;
            out.push_back(Atom{FrequencyKey{std::vector<std::uint64_t>(rec, rec + key_size_)}, rec[key_size_]});
        }
        return out;
    }

private:
    std::size_t key_size_;
    std::size_t stride_;
    std::vector<std::uint64_t> data_;
    std::size_t compacted_ = 0;
};

std::vector<Atom> meet_in_the_middle(const std::vector<Annulus>& annuli, const SquaredRange& close,
                                     int n, const EnumerationLimits& limits, std::uint64_t max_atoms) {
    const std::size_t k = annuli.size();
    const std::size_t h = (k + 1) / 2;
    std::vector<const Annulus*> first;
    std::vector<const Annulus*> second;
    for (std::size_t j = 0; j < k; ++j) (j < h ? first : second).push_back(&annuli[j]);
    const HalfTable left = enumerate_half(first, n);
    const HalfTable right = enumerate_half(second, n);

    std::vector<const HalfTable::value_type*> left_entries;
    for (const auto& e : left) left_entries.push_back(&e);
    std::vector<const HalfTable::value_type*> right_entries;
    for (const auto& e : right) right_entries.push_back(&e);

    // Counts are exact integers, so the split into chunks never affects the result.
    const std::size_t chunks =
        std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(limits.threads), left_entries.size()));
    std::vector<RecordBuffer> partial(chunks, RecordBuffer(k + 1));
    parallel_for(chunks, limits.threads, [&](std::size_t c) {
        RecordBuffer& acc = partial[c];
        std::vector<std::uint64_t> key(k + 1);
        const std::size_t begin = left_entries.size() * c / chunks;
        const std::size_t end = left_entries.size() * (c + 1) / chunks;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& [sa, da] = *left_entries[i];
            for (const auto* rb : right_entries) {
                const auto& [sb, db] = *rb;
                std::uint64_t q = 0;
                for (int d = 0; d < n; ++d) {
                    const std::int64_t x = sa[d] + sb[d];
                    q += static_cast<std::uint64_t>(x * x);
                }
                if (!close.contains(q)) continue;
                key[k] = q;
                for (const auto& [ka, ca] : da) {
                    std::copy(ka.begin(), ka.end(), key.begin());
                    for (const auto& [kb, cb] : db) {
                        std::copy(kb.begin(), kb.end(), key.begin() + static_cast<std::ptrdiff_t>(h));
                        acc.add(key.data(), ca * cb);
                    }
                }
                if (acc.records() > 2 * max_atoms) acc.compact();
                if (acc.records() > max_atoms)
                    throw BudgetExceeded("joint measure exceeds the atom cap of " + std::to_string(max_atoms));
            }
        }
        acc.compact();
    });
    RecordBuffer merged(k + 1);
    for (const auto& p : partial) merged.append(p);
    partial.clear();
    merged.compact();
    if (merged.records() > max_atoms)
        throw BudgetExceeded("joint measure exceeds the atom cap of " + std::to_string(max_atoms));
    return merged.atoms();
}

}  // namespace

std::uint64_t LatticePoint::squared_norm() const {
    std::uint64_t s = 0;
    for (auto x : coords) s += static_cast<std::uint64_t>(x * x);
    return s;
}

SquaredRange squared_range(const FrequencyInterval& interval) {
    if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi))
        throw ValidationError("window bounds must be finite");
    if (interval.lo > interval.hi) throw ValidationError("window interval has lo > hi");
    if (interval.hi > max_window_frequency) throw ValidationError("window frequency too large");
    SquaredRange r;
    if (interval.hi < 0.0) {
        r.empty = true;
        return r;
    }
    const double lo = std::max(0.0, interval.lo);
    if (lo > 0.0) {
        auto q = static_cast<std::uint64_t>(std::ceil(lo * lo));
        while (q > 0 && compare_square(q - 1, lo) >= 0) --q;
        while (compare_square(q, lo) < 0) ++q;
        r.lo = q;
    }
    auto q = static_cast<std::uint64_t>(std::floor(interval.hi * interval.hi));
    while (compare_square(q, interval.hi) > 0) --q;
    while (compare_square(q + 1, interval.hi) <= 0) ++q;
    r.hi = q;
    r.empty = r.lo > r.hi;
    return r;
}

JointMeasure::JointMeasure(int n, int k, std::vector<FrequencyInterval> window, std::vector<Atom> atoms)
    : n_(n), k_(k), window_(std::move(window)), atoms_(std::move(atoms)) {
    check_dimensions(n_, k_);
    if (window_.size() != static_cast<std::size_t>(k_) + 1)
        throw ValidationError("window needs k+1 intervals");
    for (const auto& a : atoms_)
        if (a.key.q.size() != static_cast<std::size_t>(k_) + 1)
            throw ValidationError("atom key length differs from k+1");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.key < y.key; });
}

std::uint64_t JointMeasure::count(const FrequencyKey& key) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                               [](const Atom& a, const FrequencyKey& k) { return a.key < k; });
    return it != atoms_.end() && it->key == key ? it->count : 0;
}

std::uint64_t JointMeasure::total_count() const noexcept {
    std::uint64_t total = 0;
    for (const auto& a : atoms_) total += a.count;
    return total;
}

double JointMeasure::weight_factor() const noexcept {
    return std::pow(two_pi, -static_cast<double>((k_ - 1) * n_));
}

bool JointMeasure::operator==(const JointMeasure& other) const {
    if (n_ != other.n_ || k_ != other.k_ || window_ != other.window_ || atoms_.size() != other.atoms_.size())
        return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i].key != other.atoms_[i].key || atoms_[i].count != other.atoms_[i].count) return false;
    return true;
}

std::vector<LatticePoint> shell_points(int n, std::uint64_t q) {
    if (n < 1) throw ValidationError("lattice dimension n must be >= 1");
    std::vector<LatticePoint> out;
    visit_ball(n, q, [&](const std::vector<std::int64_t>& m, std::uint64_t norm) {
        if (norm == q) out.push_back(LatticePoint{m});
    });
    return out;
}

std::uint64_t count_lattice_points(int n, const SquaredRange& range) {
    if (n < 1) throw ValidationError("lattice dimension n must be >= 1");
    if (range.empty) return 0;
    std::uint64_t count = 0;
    visit_ball(n, range.hi, [&](const std::vector<std::int64_t>&, std::uint64_t norm) {
        if (norm >= range.lo) ++count;
    });
    return count;
}

double coefficient(std::span<const LatticePoint> m, int n, int k) {
    check_dimensions(n, k);
    if (m.size() != static_cast<std::size_t>(k) + 1) throw ValidationError("coefficient needs k+1 lattice points");
    for (const auto& p : m)
        if (p.coords.size() != static_cast<std::size_t>(n))
            throw ValidationError("lattice point dimension differs from n");
    for (int d = 0; d < n; ++d) {
        std::int64_t s = 0;
        for (int j = 0; j < k; ++j) s += m[j].coords[d];
        if (s != m[k].coords[d]) return 0.0;
    }
    return std::pow(two_pi, -0.5 * static_cast<double>((k - 1) * n));
}

JointMeasure joint_measure(int n, int k, const std::vector<FrequencyInterval>& window,
                           const EnumerationLimits& limits) {
    check_dimensions(n, k);
    if (window.size() != static_cast<std::size_t>(k) + 1)
        throw ValidationError("window needs k+1 intervals, got " + std::to_string(window.size()));
    std::vector<SquaredRange> ranges;
    for (const auto& w : window) ranges.push_back(squared_range(w));

    long double estimate = 1.0L;
    for (int j = 0; j < k; ++j) estimate *= static_cast<long double>(count_lattice_points(n, ranges[j]));
    if (estimate > static_cast<long double>(limits.max_tuples))
        throw BudgetExceeded("window holds an estimated " + std::to_string(static_cast<double>(estimate)) +
                             " tuples, above the cap of " + std::to_string(limits.max_tuples));

    const SquaredRange& close = ranges[k];
    std::vector<Annulus> annuli;
    for (int j = 0; j < k; ++j) annuli.push_back(make_annulus(n, ranges[j]));

    AtomBudget budget(limits.max_atoms);
    std::vector<Atom> atoms;
    if (!close.empty) {
        if (k == 2)
            atoms = enumerate_pairs(annuli[0], annuli[1], close, limits, budget);
        else
            atoms = meet_in_the_middle(annuli, close, n, limits, limits.max_atoms);
    }
    return JointMeasure(n, k, window, std::move(atoms));
}

BadTailResult bad_tail_sum(int n, std::span<const double> tau, double eps, double cap,
                           const EnumerationLimits& limits) {
    const int k = static_cast<int>(tau.size());
    check_dimensions(n, k);
    if (!std::isfinite(eps) || !(eps > 0.0)) throw ValidationError("eps must be positive");
    double total = 0.0;
    for (double t : tau) {
        if (!std::isfinite(t) || !(t > 0.0)) throw ValidationError("tau entries must be positive");
        total += t;
    }
    const double threshold = (1.0 + eps) * total;
    if (!(cap >= threshold)) throw ValidationError("cap must be >= (1 + eps) * sum(tau)");

    std::vector<FrequencyInterval> window;
    for (double t : tau) window.push_back({0.0, t});
    window.push_back({threshold, cap});

    BadTailResult out;
    long double domain = 1.0L;
    for (int j = 0; j < k; ++j) domain *= static_cast<long double>(count_lattice_points(n, squared_range(window[j])));
    out.domain = static_cast<std::uint64_t>(domain);
    const JointMeasure tail = joint_measure(n, k, window, limits);
    out.tuples = tail.total_count();
    out.mass = static_cast<double>(out.tuples) * tail.weight_factor();
    return out;
}

BoundaryWitness boundary_family(const LatticePoint& v, std::span<const std::int64_t> r) {
    if (v.coords.empty()) throw ValidationError("v must have at least one coordinate");
    if (v.squared_norm() == 0) throw ValidationError("v must be a nonzero lattice vector");
    if (r.size() < 2) throw ValidationError("need k >= 2 multipliers r_j");
    const int n = static_cast<int>(v.coords.size());
    const int k = static_cast<int>(r.size());

    BoundaryWitness w;
    std::int64_t total = 0;
    const unsigned __int128 v2 = v.squared_norm();
    for (auto rj : r) {
        if (rj < 1) throw ValidationError("multipliers r_j must be >= 1");
        LatticePoint m;
        for (auto x : v.coords) m.coords.push_back(rj * x);
        w.tuple.push_back(std::move(m));
        total += rj;
    }
    LatticePoint closing;
    for (auto x : v.coords) closing.coords.push_back(total * x);
    w.tuple.push_back(std::move(closing));

    for (int j = 0; j <= k; ++j) {
        const auto mult = static_cast<unsigned __int128>(j < k ? r[j] : total);
        const unsigned __int128 q = mult * mult * v2;
        if (q > static_cast<unsigned __int128>(UINT64_MAX)) throw ValidationError("boundary key overflows");
        w.key.q.push_back(static_cast<std::uint64_t>(q));
    }
    w.magnitude = std::abs(coefficient(w.tuple, n, k));
    return w;
}

}  // namespace polyspec
