#include <random>

#include "catch_amalgamated.hpp"
#include "support/oracles.hpp"

using mv::FrenetRect;
using mv::Region;
using Catch::Approx;

namespace {

FrenetRect random_rect(std::mt19937& rng) {
    auto coord = [&](int hi) { return 0.5 * static_cast<double>(rng() % static_cast<unsigned>(hi)); };
    double const s = coord(30), d = coord(16);
    return {s, s + 0.5 + coord(12), d, d + 0.5 + coord(8)};
}

bool in_any(std::vector<FrenetRect> const& rs, double s, double d) {
    for (auto const& r : rs) {
        if (oracle::open_inside(r, s, d)) return true;
    }
    return false;
}

// Grid points offset from the half-metre lattice, so they never sit on an edge.
template <class F>
void for_grid(F&& f) {
    for (double s = -0.47; s < 22.0; s += 0.1) {
        for (double d = -0.47; d < 13.0; d += 0.1) f(s, d);
    }
}

bool interiors_disjoint(Region const& r) {
    auto const& rs = r.rects();
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (!rs[i].has_area()) return false;
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
            if (rs[i].overlaps(rs[j])) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("intersect of single rectangles") {
    auto const r = mv::intersect(Region{{0, 10, 0, 4}}, Region{{5, 15, 2, 6}});
    REQUIRE(r.rects().size() == 1);
    CHECK(r.rects()[0] == FrenetRect{5, 10, 2, 4});

    CHECK(mv::intersect(Region{{0, 10, 0, 4}}, Region{{10, 20, 0, 4}}).empty());
}

TEST_CASE("subtract splits and cancels") {
    auto const r = mv::subtract(Region{{0, 10, 0, 4}}, Region{{4, 6, 0, 4}});
    REQUIRE(r.rects().size() == 2);
    CHECK(r.rects()[0] == FrenetRect{0, 4, 0, 4});
    CHECK(r.rects()[1] == FrenetRect{6, 10, 0, 4});
    CHECK(r.area() == Approx(32.0));

    Region const a = Region::from_rects({{0, 3, 0, 1}, {1, 2, 1, 5}});
    CHECK(mv::subtract(a, a).empty());
}

TEST_CASE("closures_touch examples") {
    Region const unit{{0, 1, 0, 1}};
    CHECK(mv::closures_touch(unit, Region{{1, 2, 1, 2}}));
    CHECK_FALSE(mv::closures_touch(unit, Region{{2, 3, 0, 1}}));
    CHECK(mv::closures_touch(unit, Region{{0.5, 2, 0.5, 2}}));
    CHECK_FALSE(mv::closures_touch(unit, Region{}));

    // A hair's-width gap only closes with the tolerance.
    Region const near{{1.0 + 1e-12, 2, 0, 1}};
    CHECK_FALSE(mv::closures_touch(unit, near));
    CHECK(mv::closures_touch(unit, near, mv::kContactEpsilon));
}

TEST_CASE("area examples") {
    CHECK(mv::area(Region{}) == 0.0);
    CHECK(mv::area(Region{{0, 2, 0, 3}}) == Approx(6.0));
    Region const overlapped = Region::from_rects({{0, 2, 0, 2}, {1, 3, 0, 2}});
    double const incl_excl = 4.0 + 4.0 - 2.0;
    CHECK(mv::area(overlapped) == Approx(incl_excl));
    CHECK(interiors_disjoint(overlapped));
}

TEST_CASE("canonical form merges to the minimal s-sweep decomposition") {
    auto const r = Region::from_rects({{0, 5, 0, 2}, {5, 10, 0, 2}});
    REQUIRE(r.rects().size() == 1);
    CHECK(r.rects()[0] == FrenetRect{0, 10, 0, 2});

    auto const lshape = Region::from_rects({{0, 4, 0, 4}, {4, 8, 0, 2}});
    CHECK(lshape.rects().size() == 2);
    CHECK(lshape == Region::from_rects({{0, 8, 0, 2}, {0, 4, 2, 4}}));

    // Zero-area rects vanish.
    CHECK(Region::from_rects({{1, 1, 0, 3}, {0, 2, 5, 5}}).empty());
}

TEST_CASE("lateral extent and bounds") {
    auto const lshape = Region::from_rects({{0, 4, 0, 4}, {4, 8, 0, 2}});
    auto b = lshape.bounds();
    REQUIRE(b);
    CHECK(*b == FrenetRect{0, 8, 0, 4});
    auto e = lshape.lateral_extent(2.0);
    REQUIRE(e);
    CHECK(e->first == 0.0);
    CHECK(e->second == 4.0);
    e = lshape.lateral_extent(6.0);
    REQUIRE(e);
    CHECK(e->second == 2.0);
    CHECK_FALSE(lshape.lateral_extent(9.0));
    CHECK_FALSE(Region{}.bounds());
}

TEST_CASE("s_distance to a box") {
    Region const r{{0, 10, 0, 4}};
    CHECK(mv::s_distance(r, {15, 20, 0, 1}) == Approx(5.0));
    CHECK(mv::s_distance(r, {-8, -3, 0, 1}) == Approx(3.0));
    CHECK(mv::s_distance(r, {10, 12, 5, 6}) == 0.0);
    CHECK(std::isinf(mv::s_distance(Region{}, {0, 1, 0, 1})));
}

TEST_CASE("intersect and subtract agree with a membership grid on random inputs") {
    std::mt19937 rng(20240611);
    for (int round = 0; round < 1000; ++round) {
        std::vector<FrenetRect> ra, rb;
        for (int k = 0; k < 3; ++k) ra.push_back(random_rect(rng));
        for (int k = 0; k < 3; ++k) rb.push_back(random_rect(rng));
        Region const a = Region::from_rects(ra);
        Region const b = Region::from_rects(rb);
        REQUIRE(interiors_disjoint(a));
        auto const inter = mv::intersect(a, b);
        auto const diff = mv::subtract(a, b);
        auto const uni = mv::unite(a, b);
        REQUIRE(interiors_disjoint(inter));
        REQUIRE(interiors_disjoint(diff));
        REQUIRE(interiors_disjoint(uni));
        bool ok = true;
        for_grid([&](double s, double d) {
            bool const ia = in_any(ra, s, d);
            bool const ib = in_any(rb, s, d);
            ok = ok && (inter.contains(s, d) == (ia && ib));
            ok = ok && (diff.contains(s, d) == (ia && !ib));
            ok = ok && (uni.contains(s, d) == (ia || ib));
            ok = ok && (a.contains(s, d) == ia);
        });
        REQUIRE(ok);
        // Area bookkeeping closes exactly.
        REQUIRE(inter.area() + diff.area() == Approx(a.area()).margin(1e-9));
    }
}

TEST_CASE("canonicalization is idempotent and area preserving") {
    std::mt19937 rng(7);
    for (int round = 0; round < 500; ++round) {
        std::vector<FrenetRect> rs;
        for (int k = 0; k < 4; ++k) rs.push_back(random_rect(rng));
        auto const once = Region::from_rects(rs);
        auto const twice = Region::from_rects(once.rects());
        REQUIRE(once == twice);
        REQUIRE(once.area() == Approx(oracle::union_area(rs, {-100, 100, -100, 100})).margin(1e-9));
    }
}

TEST_CASE("closures_touch is symmetric and implied by overlap") {
    std::mt19937 rng(99);
    for (int round = 0; round < 2000; ++round) {
        Region const a{random_rect(rng)};
        Region const b{random_rect(rng)};
        bool const ab = mv::closures_touch(a, b);
        REQUIRE(ab == mv::closures_touch(b, a));
        if (!mv::intersect(a, b).empty()) REQUIRE(ab);
        // Independent check: closed intervals meet on both axes.
        auto const& x = a.rects()[0];
        auto const& y = b.rects()[0];
        bool const expected = x.s_lo <= y.s_hi && y.s_lo <= x.s_hi && x.d_lo <= y.d_hi && y.d_lo <= x.d_hi;
        REQUIRE(ab == expected);
    }
}
