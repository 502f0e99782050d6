#include <doctest.h>

#include "haltlab/errors.hpp"
#include "haltlab/obs.hpp"
#include "haltlab/suite.hpp"

using namespace haltlab;

namespace {

PartialObservation entries(std::initializer_list<std::pair<StepIndex, bool>> kv,
                           TailKind tail = TailKind::Bottom, StepIndex from = 0) {
    PartialObservation::EntryMap m;
    for (const auto& [k, v] : kv) m[k] = v;
    return PartialObservation::make(std::move(m), tail, from);
}

} // namespace

TEST_CASE("leq: bottom is below everything, extension is one-directional") {
    const auto bot = PartialObservation::bottom();
    const auto p = entries({{0, false}});
    const auto q = entries({{0, false}, {1, false}});
    CHECK(leq(bot, bot));
    CHECK(leq(bot, p));
    CHECK(leq(bot, PartialObservation::zero_claim()));
    CHECK(leq(p, q));
    CHECK(!leq(q, p));
}

TEST_CASE("leq: finite observation below a resolved tail, checked by unfolding lookups") {
    const auto p = entries({{0, false}, {1, true}});
    const auto q = PartialObservation::resolved_halting(1); // 0 then ones from 1
    REQUIRE(leq(p, q));
    // Independent route: wherever p is defined on 0..10, q must agree.
    for (StepIndex k = 0; k <= 10; ++k) {
        if (p.lookup(k) != Obs::Undefined) CHECK(p.lookup(k) == q.lookup(k));
    }
    CHECK(!leq(q, p)); // the tail carries information p lacks
}

TEST_CASE("leq: tails compared symbolically") {
    const auto claim = PartialObservation::zero_claim();
    CHECK(leq(claim, claim));
    CHECK(!leq(claim, PartialObservation::resolved_halting(3)));
    CHECK(!leq(claim, entries({{0, false}})));
    CHECK(leq(PartialObservation::resolved_halting(3), PartialObservation::resolved_halting(3)));
    // ones-from-5 is compatible with ones-from-3 only in one direction:
    // a value claiming ones from 3 has MORE content at 3 and 4.
    const auto from3 = PartialObservation::resolved_halting(3);
    const auto from5 = PartialObservation::resolved_halting(5);
    CHECK(!leq(from3, from5)); // from3 says 3 -> 1, from5 says 3 -> 0
    CHECK(!leq(from5, from3));
    const auto bare5 = entries({}, TailKind::OneFrom, 5); // no zero prefix, holes below 5
    CHECK(leq(bare5, from5));
    CHECK(!leq(from5, bare5));
    // from3 also shows ones everywhere bare5 is defined, so bare5 sits below
    // both resolved values even though they are incomparable to each other.
    CHECK(leq(bare5, from3));
    CHECK(leq(bare5, entries({}, TailKind::OneFrom, 3)));
}

TEST_CASE("lub: neutral bottom, disjoint union, and first-conflict reporting") {
    const auto p = entries({{0, false}, {1, true}});
    CHECK(lub({PartialObservation::bottom(), p}) == p);
    CHECK(lub({entries({{0, false}}), entries({{1, false}})}) ==
          entries({{0, false}, {1, false}}));

    CHECK_THROWS_AS(lub({entries({{0, false}, {1, true}}), entries({{0, false}}),
                         entries({{1, false}})}),
                    ConflictError);
    try {
        lub({entries({{0, false}, {1, true}}), entries({{1, false}})});
    } catch (const ConflictError& e) {
        CHECK(e.index() == 1);
    }
    try {
        lub({PartialObservation::zero_claim(), PartialObservation::resolved_halting(2)});
    } catch (const ConflictError& e) {
        CHECK(e.index() == 2); // first index where 0-claim meets a 1
    }
}

TEST_CASE("lub: tails join downward for ones, and bounds hold") {
    const auto a = entries({{0, false}}, TailKind::OneFrom, 4);
    const auto b = entries({}, TailKind::OneFrom, 2);
    const auto j = lub({a, b});
    CHECK(j.tail() == TailKind::OneFrom);
    CHECK(j.one_from() == 2);
    CHECK(leq(a, j));
    CHECK(leq(b, j));
}

TEST_CASE("is_directed: chains yes, incompatible pairs no, fans need their join") {
    const auto p0 = PartialObservation::bottom();
    const auto p1 = entries({{0, false}});
    const auto p2 = entries({{0, false}, {1, false}});
    CHECK(is_directed({p0, p1, p2}));

    CHECK(!is_directed({entries({{0, false}}), entries({{0, true}})}));

    const auto left = entries({{0, false}});
    const auto right = entries({{1, false}});
    CHECK(!is_directed({left, right}));
    CHECK(is_directed({left, right, lub({left, right})}));
}

TEST_CASE("in_bounded_class: defined set within the bound and no tail") {
    CHECK(in_bounded_class(PartialObservation::bottom(), 0));
    const auto p3 = entries({{0, false}, {1, false}, {2, true}});
    CHECK(in_bounded_class(p3, 3));
    CHECK(!in_bounded_class(p3, 2));
    CHECK(!in_bounded_class(PartialObservation::resolved_halting(2), 1000));
    CHECK(!in_bounded_class(PartialObservation::zero_claim(), 1000));
}

TEST_CASE("canonicalization: tails absorb implied entries and lower through 1-runs") {
    // 1-entries adjacent to the tail fold into it.
    const auto folded = entries({{0, false}, {1, true}, {2, true}}, TailKind::OneFrom, 3);
    CHECK(folded == PartialObservation::resolved_halting(1));
    CHECK(folded.one_from() == 1);
    CHECK(folded.entry_count() == 1);

    // Entries the tail already implies are dropped.
    const auto absorbed = entries({{5, true}, {7, true}}, TailKind::OneFrom, 5);
    CHECK(absorbed.entry_count() == 0);

    // Zero entries under a zero claim are implied.
    const auto claim = entries({{0, false}, {4, false}}, TailKind::ZeroClaim);
    CHECK(claim == PartialObservation::zero_claim());

    // Lookup-identical values compare equal structurally.
    const auto a = entries({{0, false}, {1, true}}, TailKind::OneFrom, 2);
    const auto b = entries({{0, false}}, TailKind::OneFrom, 1);
    CHECK(a == b);
}

TEST_CASE("domain membership: monotone-1 and tail invariants") {
    CHECK(entries({{0, true}, {1, true}}).is_monotone());
    CHECK(entries({{1, false}}).is_monotone()); // hole at 0 is fine
    CHECK(!entries({{0, true}, {2, false}}).is_monotone());
    CHECK_THROWS_AS(PartialObservation::make_checked({{0, true}, {2, false}}, TailKind::Bottom),
                    ValidationError);
    CHECK_THROWS_AS(PartialObservation::make_checked({{3, true}}, TailKind::ZeroClaim),
                    ValidationError);
    // 1-entry strictly below a one-tail with a hole between violates the
    // tail invariant (entries below the start must be 0).
    CHECK_THROWS_AS(PartialObservation::make_checked({{0, true}}, TailKind::OneFrom, 2),
                    ValidationError);
}

TEST_CASE("text form: print and parse round trip, ASCII fallbacks accepted") {
    const std::vector<PartialObservation> samples = {
        PartialObservation::bottom(),
        entries({{0, false}, {2, true}}, TailKind::Bottom), // hole at 1
        PartialObservation::resolved_halting(0),
        PartialObservation::resolved_halting(3),
        PartialObservation::zero_claim(),
    };
    for (const auto& p : samples) {
        CHECK(PartialObservation::parse(p.to_text()) == p);
    }
    CHECK(PartialObservation::parse("[0 0 | 1...@2]") == PartialObservation::resolved_halting(2));
    CHECK(PartialObservation::parse("[| bot]") == PartialObservation::bottom());
    CHECK(PartialObservation::parse("[0 _ 1 | bot]") == entries({{0, false}, {2, true}}));
    CHECK(PartialObservation::parse("[| 0...]") == PartialObservation::zero_claim());

    CHECK_THROWS_AS(PartialObservation::parse("0 0 | bot"), ParseError);
    CHECK_THROWS_AS(PartialObservation::parse("[0 0]"), ParseError);
    CHECK_THROWS_AS(PartialObservation::parse("[2 | bot]"), ParseError);
    CHECK_THROWS_AS(PartialObservation::parse("[0 | 1...@x]"), ParseError);
    // Parse validates domain membership.
    CHECK_THROWS_AS(PartialObservation::parse("[1 0 | bot]"), ValidationError);
}

TEST_CASE("order laws hold on raw values too, not just the monotone fragment") {
    // The operator can produce lookup tables outside the monotone fragment
    // when fed machine-inconsistent observations, and the ordering must
    // still behave as a partial order there.
    std::vector<PartialObservation> domain = suite::all_bottom_observations(4, false);
    for (StepIndex k = 0; k <= 3; ++k) {
        domain.push_back(PartialObservation::resolved_halting(k));
        domain.push_back(entries({}, TailKind::OneFrom, k));
    }
    domain.push_back(PartialObservation::zero_claim());
    domain.push_back(entries({{1, true}}, TailKind::ZeroClaim)); // raw shadowing claim

    for (const auto& p : domain) {
        CHECK(leq(p, p));
    }
    std::size_t comparable = 0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (std::size_t j = 0; j < domain.size(); ++j) {
            const bool ij = leq(domain[i], domain[j]);
            if (ij) ++comparable;
            if (ij && leq(domain[j], domain[i])) {
                CHECK(domain[i] == domain[j]);
            }
            if (!ij) continue;
            for (std::size_t k = 0; k < domain.size(); ++k) {
                if (leq(domain[j], domain[k])) {
                    CHECK(leq(domain[i], domain[k]));
                }
            }
        }
    }
    CHECK(comparable > domain.size()); // the order is not discrete
}

TEST_CASE("exhaustive small-domain enumeration has the expected size") {
    const auto all = suite::all_bottom_observations(5, false);
    CHECK(all.size() == 243); // 3^5
    const auto monotone = suite::all_bottom_observations(5, true);
    // Defined positions carry a 0*1* value pattern: sum over d of C(5,d)*(d+1).
    CHECK(monotone.size() == 112);
}
