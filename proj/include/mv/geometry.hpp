#ifndef MV_GEOMETRY_HPP
#define MV_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace mv {

/// Axis-aligned rectangle in Frenet coordinates (s = arc length, d = lateral offset).
/// Bounds are treated as closed for contact tests and as open for emptiness.
struct FrenetRect {
    double s_lo{0.0};
    double s_hi{0.0};
    double d_lo{0.0};
    double d_hi{0.0};

    [[nodiscard]] double s_length() const noexcept { return s_hi - s_lo; }
    [[nodiscard]] double d_width() const noexcept { return d_hi - d_lo; }
    [[nodiscard]] double area() const noexcept { return s_length() * d_width(); }
    [[nodiscard]] bool has_area() const noexcept { return s_lo < s_hi && d_lo < d_hi; }

    [[nodiscard]] bool contains(double s, double d) const noexcept {
        return s_lo <= s && s <= s_hi && d_lo <= d && d <= d_hi;
    }
    [[nodiscard]] bool interior_contains(double s, double d) const noexcept {
        return s_lo < s && s < s_hi && d_lo < d && d < d_hi;
    }
    [[nodiscard]] bool contains(FrenetRect const& o) const noexcept {
        return s_lo <= o.s_lo && o.s_hi <= s_hi && d_lo <= o.d_lo && o.d_hi <= d_hi;
    }

    /// Closed rectangles share at least one point.
    [[nodiscard]] bool touches(FrenetRect const& o, double eps = 0.0) const noexcept {
        return s_lo <= o.s_hi + eps && o.s_lo <= s_hi + eps && d_lo <= o.d_hi + eps && o.d_lo <= d_hi + eps;
    }

    /// Interiors overlap.
    [[nodiscard]] bool overlaps(FrenetRect const& o) const noexcept {
        return s_lo < o.s_hi && o.s_lo < s_hi && d_lo < o.d_hi && o.d_lo < d_hi;
    }

    [[nodiscard]] FrenetRect intersection(FrenetRect const& o) const noexcept {
        return {std::max(s_lo, o.s_lo), std::min(s_hi, o.s_hi), std::max(d_lo, o.d_lo), std::min(d_hi, o.d_hi)};
    }

    /// Smallest rectangle containing both.
    [[nodiscard]] FrenetRect hull(FrenetRect const& o) const noexcept {
        return {std::min(s_lo, o.s_lo), std::max(s_hi, o.s_hi), std::min(d_lo, o.d_lo), std::max(d_hi, o.d_hi)};
    }

    friend bool operator==(FrenetRect const&, FrenetRect const&) = default;
};

inline std::ostream& operator<<(std::ostream& os, FrenetRect const& r) {
    return os << '[' << r.s_lo << ',' << r.s_hi << "]x[" << r.d_lo << ',' << r.d_hi << ']';
}

namespace detail {

struct Interval {
    double lo;
    double hi;
    friend bool operator==(Interval const&, Interval const&) = default;
};

// Sorts and merges closed intervals that overlap or share an endpoint.
inline std::vector<Interval> merge_intervals(std::vector<Interval> in) {
    std::sort(in.begin(), in.end(), [](Interval const& a, Interval const& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> out;
    for (auto const& iv : in) {
        if (!out.empty() && iv.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

// Rectangle minus rectangle, at most four positive-area pieces.
inline void subtract_rect(FrenetRect const& a, FrenetRect const& b, std::vector<FrenetRect>& out) {
    if (!a.overlaps(b)) {
        out.push_back(a);
        return;
    }
    auto const core = a.intersection(b);
    if (a.s_lo < core.s_lo) out.push_back({a.s_lo, core.s_lo, a.d_lo, a.d_hi});
    if (core.s_hi < a.s_hi) out.push_back({core.s_hi, a.s_hi, a.d_lo, a.d_hi});
    if (a.d_lo < core.d_lo) out.push_back({core.s_lo, core.s_hi, a.d_lo, core.d_lo});
    if (core.d_hi < a.d_hi) out.push_back({core.s_lo, core.s_hi, core.d_hi, a.d_hi});
}

}  // namespace detail

/// A finite union of rectangles kept in canonical form: positive-area rects with
/// pairwise disjoint interiors, produced by an s-sweep that merges each slab's
/// cross-section and then fuses equal d-intervals of neighbouring slabs. The
/// canonical form depends only on the point set, so `==` is set equality.
class Region {
public:
    Region() = default;
    explicit Region(FrenetRect const& r) {
        if (r.has_area()) rects_.push_back(r);
    }

    /// Builds the union of arbitrary (possibly overlapping or degenerate) rects.
    static Region from_rects(std::vector<FrenetRect> rects) {
        Region out;
        out.rects_ = canonicalize(std::move(rects));
        return out;
    }
    static Region from_rects(std::initializer_list<FrenetRect> rects) {
        return from_rects(std::vector<FrenetRect>(rects));
    }

    [[nodiscard]] std::vector<FrenetRect> const& rects() const noexcept { return rects_; }
    [[nodiscard]] bool empty() const noexcept { return rects_.empty(); }

    [[nodiscard]] double area() const noexcept {
        double a = 0.0;
        for (auto const& r : rects_) a += r.area();
        return a;
    }

    /// Closed membership.
    [[nodiscard]] bool contains(double s, double d) const noexcept {
        return std::any_of(rects_.begin(), rects_.end(), [&](auto const& r) { return r.contains(s, d); });
    }

    [[nodiscard]] std::optional<FrenetRect> bounds() const noexcept {
        if (rects_.empty()) return std::nullopt;
        FrenetRect b = rects_.front();
        for (auto const& r : rects_) b = b.hull(r);
        return b;
    }

    /// Lateral extent [d_lo, d_hi] of the closed region at arc length s.
    [[nodiscard]] std::optional<std::pair<double, double>> lateral_extent(double s) const noexcept {
        std::optional<std::pair<double, double>> ext;
        for (auto const& r : rects_) {
            if (r.s_lo <= s && s <= r.s_hi) {
                if (!ext) {
                    ext = std::pair{r.d_lo, r.d_hi};
                } else {
                    ext->first = std::min(ext->first, r.d_lo);
                    ext->second = std::max(ext->second, r.d_hi);
                }
            }
        }
        return ext;
    }

    friend bool operator==(Region const&, Region const&) = default;

private:
    static std::vector<FrenetRect> canonicalize(std::vector<FrenetRect> rects) {
        std::erase_if(rects, [](FrenetRect const& r) { return !r.has_area(); });
        if (rects.empty()) return {};

        std::vector<double> cuts;
        cuts.reserve(rects.size() * 2);
        for (auto const& r : rects) {
            cuts.push_back(r.s_lo);
            cuts.push_back(r.s_hi);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        std::vector<FrenetRect> done;
        std::vector<FrenetRect> open;  // rects still extendable in +s, keyed by d-interval
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double const lo = cuts[k];
            double const hi = cuts[k + 1];
            std::vector<detail::Interval> slab;
            for (auto const& r : rects) {
                if (r.s_lo <= lo && hi <= r.s_hi) slab.push_back({r.d_lo, r.d_hi});
            }
            slab = detail::merge_intervals(std::move(slab));

            std::vector<FrenetRect> next_open;
            for (auto const& iv : slab) {
                auto it = std::find_if(open.begin(), open.end(), [&](FrenetRect const& o) {
                    return o.s_hi == lo && o.d_lo == iv.lo && o.d_hi == iv.hi;
                });
                if (it != open.end()) {
                    FrenetRect ext = *it;
                    ext.s_hi = hi;
                    open.erase(it);
                    next_open.push_back(ext);
                } else {
                    next_open.push_back({lo, hi, iv.lo, iv.hi});
                }
            }
            done.insert(done.end(), open.begin(), open.end());
            open = std::move(next_open);
        }
        done.insert(done.end(), open.begin(), open.end());
        std::sort(done.begin(), done.end(), [](FrenetRect const& a, FrenetRect const& b) {
            if (a.s_lo != b.s_lo) return a.s_lo < b.s_lo;
            if (a.d_lo != b.d_lo) return a.d_lo < b.d_lo;
            if (a.s_hi != b.s_hi) return a.s_hi < b.s_hi;
            return a.d_hi < b.d_hi;
        });
        return done;
    }

    std::vector<FrenetRect> rects_;
};

inline std::ostream& operator<<(std::ostream& os, Region const& r) {
    os << '{';
    for (std::size_t i = 0; i < r.rects().size(); ++i) {
        if (i) os << ", ";
        os << r.rects()[i];
    }
    return os << '}';
}

/// Set intersection; regions that share only boundary intersect to the empty region.
[[nodiscard]] inline Region intersect(Region const& a, Region const& b) {
    std::vector<FrenetRect> out;
    for (auto const& ra : a.rects()) {
        for (auto const& rb : b.rects()) {
            auto const c = ra.intersection(rb);
            if (c.has_area()) out.push_back(c);
        }
    }
    return Region::from_rects(std::move(out));
}

[[nodiscard]] inline Region intersect(Region const& a, FrenetRect const& b) { return intersect(a, Region{b}); }

/// Set difference a \ b, re-canonicalized to positive-area rects.
[[nodiscard]] inline Region subtract(Region const& a, Region const& b) {
    std::vector<FrenetRect> cur(a.rects().begin(), a.rects().end());
    for (auto const& rb : b.rects()) {
        std::vector<FrenetRect> next;
        next.reserve(cur.size() + 3);
        for (auto const& ra : cur) detail::subtract_rect(ra, rb, next);
        cur = std::move(next);
    }
    return Region::from_rects(std::move(cur));
}

[[nodiscard]] inline Region unite(Region const& a, Region const& b) {
    std::vector<FrenetRect> all(a.rects().begin(), a.rects().end());
    all.insert(all.end(), b.rects().begin(), b.rects().end());
    return Region::from_rects(std::move(all));
}

/// Default contact tolerance for regions whose coordinates were not produced by shared cut lines.
inline constexpr double kContactEpsilon = 1e-9;

/// True iff the closures share at least one point (corner contact included).
/// Partition cells are cut from shared coordinates, so the default tolerance is exact.
[[nodiscard]] inline bool closures_touch(Region const& a, Region const& b, double eps = 0.0) {
    for (auto const& ra : a.rects()) {
        for (auto const& rb : b.rects()) {
            if (ra.touches(rb, eps)) return true;
        }
    }
    return false;
}

[[nodiscard]] inline double area(Region const& a) { return a.area(); }

/// Smallest gap along s between a closed region and a closed rectangle (0 if their s-spans meet).
[[nodiscard]] inline double s_distance(Region const& a, FrenetRect const& box) {
    double best = std::numeric_limits<double>::infinity();
    for (auto const& r : a.rects()) {
        double const gap = std::max({0.0, r.s_lo - box.s_hi, box.s_lo - r.s_hi});
        best = std::min(best, gap);
    }
    return best;
}

}  // namespace mv

#endif  // MV_GEOMETRY_HPP
