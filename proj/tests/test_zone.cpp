#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tareach/zone.hpp"
#include "test_support.hpp"

#include <set>

using namespace tareach;
using namespace tareach::testing;

namespace {

BoundedZone make_zone(std::uint32_t n,
                      const std::vector<std::tuple<std::uint32_t, std::uint32_t, Bound>>& cs) {
    RawZone raw(n);
    for (const auto& [i, j, b] : cs) {
        raw.constrain(i, j, b);
    }
    auto zone = BoundedZone::canonicalize(raw);
    REQUIRE(zone.has_value());
    return *zone;
}

std::vector<Rational> pt(std::initializer_list<Rational> values) { return values; }

}  // namespace

TEST_CASE("bound encoding") {
    CHECK(Bound::weak(0).value() == 0);
    CHECK_FALSE(Bound::weak(0).is_strict());
    CHECK(Bound::strict(-1).value() == -1);
    CHECK(Bound::strict(-1).is_strict());
    CHECK(Bound::strict(0) < Bound::weak(0));
    CHECK(Bound::weak(0) < Bound::strict(1));
    CHECK((Bound::weak(1) + Bound::weak(-1)) == Bound::weak(0));
    CHECK((Bound::weak(1) + Bound::strict(-1)) == Bound::strict(0));
    CHECK((Bound::strict(0) + Bound::strict(0)) == Bound::strict(0));
    CHECK(Bound::weak(0).admits(Rational(0)));
    CHECK_FALSE(Bound::strict(0).admits(Rational(0)));
    CHECK(Bound::strict(1).admits(Rational(1, 2)));
}

TEST_CASE("canonicalize basics") {
    // {x <= 0, x >= 0} is the point zone {0}.
    const auto point = make_zone(1, {{1, 0, Bound::weak(0)}, {0, 1, Bound::weak(0)}});
    CHECK(point == BoundedZone::zero_point(1));

    // {x < 0} contradicts x >= 0.
    RawZone raw(1);
    raw.constrain(1, 0, Bound::strict(0));
    CHECK_FALSE(BoundedZone::canonicalize(raw).has_value());

    // {x - y <= 0, y - x <= 0, x <= 1} closes to x = y in [0,1].
    const auto diag = make_zone(2, {{1, 2, Bound::weak(0)}, {2, 1, Bound::weak(0)},
                                    {1, 0, Bound::weak(1)}});
    CHECK(diag.at(1, 2) == Bound::weak(0));
    CHECK(diag.at(2, 1) == Bound::weak(0));
    CHECK(diag.at(1, 0) == Bound::weak(1));
    CHECK(diag.at(2, 0) == Bound::weak(1));
    CHECK(diag.at(0, 1) == Bound::weak(0));
    CHECK(diag.at(0, 2) == Bound::weak(0));
}

TEST_CASE("time_successor examples") {
    // From the origin with two clocks: the diagonal segment.
    const auto diag = time_successor(BoundedZone::zero_point(2));
    CHECK(diag == make_zone(2, {{1, 2, Bound::weak(0)}, {2, 1, Bound::weak(0)}}));

    // {x = 1} is a fixed point of the 1-bounded future.
    const auto face = make_zone(1, {{0, 1, Bound::weak(-1)}});
    CHECK(time_successor(face) == face);

    // Superset of the input and idempotent.
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const auto zone = random_zone(rng, 2);
        const auto fut = time_successor(zone);
        for (const auto& p : grid_points(2, 4)) {
            if (member_oracle(zone, p)) {
                CHECK(member_oracle(fut, p));
            }
        }
        CHECK(time_successor(fut) == fut);
    }
}

TEST_CASE("zone_reset examples") {
    // Reset x in the corner point {x = y = 1}.
    const auto corner = make_zone(2, {{0, 1, Bound::weak(-1)}, {0, 2, Bound::weak(-1)}});
    const auto reset = zone_reset(corner, ClockSet::single(0));
    CHECK(reset == make_zone(2, {{1, 0, Bound::weak(0)}, {0, 2, Bound::weak(-1)}}));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto zone = random_zone(rng, 2);
        CHECK(zone_reset(zone, ClockSet::none()) == zone);
        const auto once = zone_reset(zone, ClockSet::single(1));
        CHECK(zone_reset(once, ClockSet::single(1)) == once);
    }

    const auto diag = time_successor(BoundedZone::zero_point(2));
    CHECK(zone_reset(diag, ClockSet::all(2)) == BoundedZone::zero_point(2));
}

TEST_CASE("wrap_face examples") {
    const auto diag = time_successor(BoundedZone::zero_point(2));
    const auto wrapped = wrap_face(diag, 0);
    REQUIRE(wrapped.has_value());
    CHECK(*wrapped == make_zone(2, {{1, 0, Bound::weak(0)}, {0, 2, Bound::weak(-1)}}));

    CHECK_FALSE(wrap_face(BoundedZone::zero_point(1), 0).has_value());

    // x - y < 0 keeps x away from the face x = 1.
    const auto below = make_zone(2, {{1, 2, Bound::strict(0)}});
    CHECK_FALSE(wrap_face(below, 0).has_value());
}

TEST_CASE("guard_restrict examples") {
    const auto box = make_zone(1, {});
    const Guard gt1{{GuardAtom{0, GuardOp::Gt, 1}}};
    const Guard eq1{{GuardAtom{0, GuardOp::Eq, 1}}};

    const std::vector<std::uint32_t> zero{0};
    const std::vector<std::uint32_t> one{1};

    CHECK_FALSE(guard_restrict(box, zero, 2, gt1).has_value());

    const auto above = guard_restrict(box, one, 2, gt1);
    REQUIRE(above.has_value());
    CHECK(*above == make_zone(1, {{0, 1, Bound::strict(0)}}));

    const auto at = guard_restrict(box, one, 2, eq1);
    REQUIRE(at.has_value());
    CHECK(*at == BoundedZone::zero_point(1));

    // Capped integer part decides atoms wholesale.
    const std::vector<std::uint32_t> capped{2};
    CHECK_FALSE(guard_restrict(box, capped, 2, eq1).has_value());
    const auto all = guard_restrict(box, capped, 2, gt1);
    REQUIRE(all.has_value());
    CHECK(*all == box);

    CHECK_THROWS_AS(guard_restrict(box, std::vector<std::uint32_t>{5}, 2, gt1), SemanticError);
}

TEST_CASE("zone_member examples") {
    const auto diag = time_successor(BoundedZone::zero_point(2));
    CHECK(zone_member(diag, pt({Rational(1, 2), Rational(1, 2)})));
    CHECK_FALSE(zone_member(diag, pt({Rational(1, 2), Rational(1, 3)})));

    const auto open = make_zone(1, {{1, 0, Bound::strict(1)}, {0, 1, Bound::strict(0)}});
    CHECK_FALSE(zone_member(open, pt({Rational(0)})));
    CHECK(zone_member(open, pt({Rational(1, 2)})));
}

TEST_CASE("grid oracle agreement for all four operators") {
    std::mt19937_64 rng(99);
    const std::uint32_t cap = 3;
    for (std::uint32_t n = 1; n <= 3; ++n) {
        const auto points = grid_points(n, 4);
        for (int trial = 0; trial < 40; ++trial) {
            const auto zone = random_zone(rng, n);

            const auto fut = time_successor(zone);
            const auto clock = static_cast<ClockId>(rng() % n);
            const auto face = wrap_face(zone, clock);
            ClockSet resets;
            for (std::uint32_t x = 0; x < n; ++x) {
                if (rng() % 2) {
                    resets.add(x);
                }
            }
            const auto reset = zone_reset(zone, resets);
            Guard guard;
            for (std::uint32_t i = 0; i < rng() % 3; ++i) {
                guard.atoms.push_back(GuardAtom{static_cast<ClockId>(rng() % n),
                                                static_cast<GuardOp>(rng() % 3),
                                                static_cast<std::uint32_t>(rng() % 3)});
            }
            std::vector<std::uint32_t> ints(n);
            for (auto& u : ints) {
                u = static_cast<std::uint32_t>(rng() % (cap + 1));
            }
            const auto restricted = guard_restrict(zone, ints, cap, guard);

            for (const auto& p : points) {
                // time_successor against exact shift feasibility
                CHECK(zone_member(fut, p) == future_member_oracle(zone, p));

                // wrap_face against the defining slice
                bool in_face = p[clock] == Rational(0);
                if (in_face) {
                    auto lifted = p;
                    lifted[clock] = Rational(1);
                    in_face = member_oracle(zone, lifted);
                }
                CHECK((face.has_value() && zone_member(*face, p)) == in_face);

                // zone_reset against pinned feasibility of the preimage
                bool in_reset = true;
                std::vector<std::optional<Rational>> pins(n);
                for (std::uint32_t x = 0; x < n; ++x) {
                    if (resets.contains(x)) {
                        in_reset = in_reset && p[x] == Rational(0);
                    } else {
                        pins[x] = p[x];
                    }
                }
                in_reset = in_reset && pinned_feasible(zone, pins);
                CHECK(zone_member(reset, p) == in_reset);

                // guard_restrict against direct evaluation
                const bool in_restrict =
                    member_oracle(zone, p) && guard_holds_oracle(guard, ints, cap, p);
                CHECK((restricted.has_value() && zone_member(*restricted, p)) == in_restrict);
            }
        }
    }
}

TEST_CASE("equal grid sets imply identical canonical matrices") {
    std::mt19937_64 rng(5);
    for (std::uint32_t n = 1; n <= 2; ++n) {
        const auto points = grid_points(n, 8);
        std::vector<BoundedZone> zones;
        for (int i = 0; i < 60; ++i) {
            zones.push_back(random_zone(rng, n));
        }
        for (const auto& a : zones) {
            for (const auto& b : zones) {
                bool same_points = true;
                for (const auto& p : points) {
                    if (member_oracle(a, p) != member_oracle(b, p)) {
                        same_points = false;
                        break;
                    }
                }
                if (same_points) {
                    CHECK(a == b);
                }
            }
        }
    }
}

TEST_CASE("distinct canonical zones stay below (2n+1)!") {
    std::mt19937_64 rng(123);
    for (std::uint32_t n = 1; n <= 2; ++n) {
        std::set<std::vector<std::int8_t>> seen;
        for (int i = 0; i < 3000; ++i) {
            const auto zone = random_zone(rng, n);
            seen.insert(zone.raw_bytes());
            seen.insert(time_successor(zone).raw_bytes());
            if (auto face = wrap_face(zone, 0)) {
                seen.insert(face->raw_bytes());
            }
        }
        std::size_t factorial = 1;
        for (std::size_t k = 2; k <= 2 * n + 1; ++k) {
            factorial *= k;
        }
        CHECK(seen.size() <= factorial);
    }
}

TEST_CASE("debug rendering") {
    const auto box = make_zone(1, {});
    CHECK(box.to_string({"x"}) == "x<=1 & -x<=0");
    CHECK(BoundedZone::zero_point(1).to_string({"x"}) == "x<=0 & -x<=0");
    const auto diag = time_successor(BoundedZone::zero_point(2));
    CHECK(diag.to_string({"x", "y"}) ==
          "x-y<=0 & y-x<=0 & x<=1 & y<=1 & -x<=0 & -y<=0");
}

TEST_CASE("zone_find_point returns members matching pins") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t n = 1 + rng() % 3;
        const auto zone = random_zone(rng, n);
        const auto free_point = zone_find_point(zone, std::vector<std::optional<Rational>>(n));
        REQUIRE(free_point.has_value());
        CHECK(zone_member(zone, *free_point));

        std::vector<std::optional<Rational>> pins(n);
        pins[rng() % n] = (*free_point)[rng() % n];
        // Pinning a coordinate to a value taken from a member keeps some
        // solutions around only if that coordinate matches; just check the
        // reported point when one comes back.
        if (auto pinned = zone_find_point(zone, pins)) {
            CHECK(zone_member(zone, *pinned));
            for (std::uint32_t x = 0; x < n; ++x) {
                if (pins[x]) {
                    CHECK((*pinned)[x] == *pins[x]);
                }
            }
        }
    }
}
