#include <doctest.h>

#include "gradspine/diagram_moves.hpp"
#include "gradspine/fold_diagram.hpp"

#include <algorithm>
#include <functional>

using namespace gradspine;

namespace {

FoldDiagram plain_loops(int n) {
    FoldDiagram d;
    d.curves.assign(n, {});
    d.seg_sign.assign(n, {1});
    return d;
}

bool same_diagram(const FoldDiagram& a, const FoldDiagram& b) {
    return diagram_to_json(a) == diagram_to_json(b);
}

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("empty diagram validates and has trivial invariants") {
    FoldDiagram d = plain_loops(2);
    d.validate();
    CHECK(d.site_sign({0, 0}) == 1);
    CHECK(degree_h(d) == 0);
    CHECK(polarized_counts(d) == std::pair<int, int>{0, 0});
    auto psi = psi_form(d);
    CHECK(psi == std::vector<std::vector<int>>{{0, 0}, {0, 0}});
}

TEST_CASE("cancellation verdict truth table over the four flavor pairs") {
    DiagCusp pp{+1, +1}, pm{+1, -1}, mp{-1, +1}, mm{-1, -1};
    // same first, opposite second: changes topology
    CHECK(cancel_verdict(pp, pm) == CancelVerdict::TopologyChanging);
    CHECK(cancel_verdict(mm, mp) == CancelVerdict::TopologyChanging);
    // opposite first, same second: dove-tail, preserves topology
    CHECK(cancel_verdict(pp, mp) == CancelVerdict::TopologyPreserving);
    CHECK(cancel_verdict(pm, mm) == CancelVerdict::TopologyPreserving);
    // identical or doubly-opposite flavors are forbidden
    CHECK(cancel_verdict(pp, pp) == CancelVerdict::Forbidden);
    CHECK(cancel_verdict(pp, mm) == CancelVerdict::Forbidden);
    CHECK(cancel_verdict(pm, mp) == CancelVerdict::Forbidden);
}

TEST_CASE("cusp pair insertion makes a minus arc and cancels back") {
    FoldDiagram d = plain_loops(1);
    FoldDiagram e = insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, -1});
    CHECK(e.cusp_count() == 2);
    REQUIRE(e.curves[0].size() == 2);
    CHECK(e.seg_sign[0] == std::vector<int>{-1, 1});
    CHECK(e.site_sign({0, 1}) == -1);   // between the pair
    CHECK(e.site_sign({0, 0}) == 1);    // wrap-around arc stays plus
    FoldDiagram back = cancel_cusps(e, 0, 1);
    CHECK(same_diagram(back, d));
}

TEST_CASE("insertion rejects minus-arc sites and forbidden flavor pairs") {
    FoldDiagram d = plain_loops(1);
    FoldDiagram e = insert_cusp_pair(d, {0, 0}, {+1, +1}, {-1, +1});
    CHECK(code_of([&] { insert_cusp_pair(e, {0, 1}, {+1, +1}, {+1, -1}); }) ==
          "SiteObstructed");
    CHECK(code_of([&] { insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, +1}); }) ==
          "ForbiddenPair");
    CHECK(code_of([&] { insert_cusp_pair(d, {0, 0}, {+1, +1}, {-1, -1}); }) ==
          "ForbiddenPair");
    // flavors fine as a pair, but the host arc's far cusp would end up two
    // polarities away
    CHECK(code_of([&] { insert_cusp_pair(e, {0, 0}, {-1, +1}, {-1, -1}); }) ==
          "ForbiddenPair");
}

TEST_CASE("cancellation requires consecutive cusps") {
    FoldDiagram d = plain_loops(1);
    d = insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, -1});
    d = insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, -1});
    // curve order: cusp2 cusp3 cusp0 cusp1; 2 and 0 are separated by 3
    CHECK(code_of([&] { cusp_cancel_rule(d, 2, 0); }) == "NotConsecutive");
    CHECK(cusp_cancel_rule(d, 3, 0) == CancelVerdict::TopologyChanging);
}

TEST_CASE("over-push adds an opposite-polarity crossing pair on plus arcs") {
    FoldDiagram d = plain_loops(2);
    FoldDiagram e = alpha_move(d, {0, 0}, {1, 0});
    CHECK(e.crossing_count() == 2);
    CHECK(polarized_counts(e) == std::pair<int, int>{1, 1});
    // the pair cancels in the signed crossing form
    CHECK(psi_form(e) == psi_form(plain_loops(2)));
    // the first new crossing is oplus with the first site's strand on top
    CHECK(e.crossings[0].polarity == +1);
    CHECK(e.curves[0][0].upper);
    CHECK_FALSE(e.curves[1][0].upper);
    // removing the bigon restores the original diagram
    CHECK(same_diagram(alpha_inverse(e, 0, 1), d));
}

TEST_CASE("over-push works with both sites on one curve") {
    FoldDiagram d = plain_loops(1);
    FoldDiagram e = alpha_move(d, {0, 0}, {0, 0});
    CHECK(e.crossing_count() == 2);
    e.validate();
    CHECK(same_diagram(alpha_inverse(e, 0, 1), d));
}

TEST_CASE("over-push is rejected on minus arcs") {
    FoldDiagram d = plain_loops(2);
    d = insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, -1});
    CHECK(code_of([&] { alpha_move(d, {0, 1}, {1, 0}); }) == "SiteObstructed");
}

TEST_CASE("bigon removal rejects same-polarity or separated crossings") {
    FoldDiagram d = plain_loops(2);
    FoldDiagram e = alpha_move(d, {0, 0}, {1, 0});
    e = alpha_move(e, {0, 1}, {1, 1});   // interleave a second pair
    CHECK(code_of([&] { alpha_inverse(e, 0, 2); }) == "SiteObstructed");
    CHECK(code_of([&] { alpha_inverse(e, 0, 0); }) == "BadParams");
}

namespace {

// three strands with a consistent over/under order: X over Y over Z
FoldDiagram ordered_triangle() {
    FoldDiagram d;
    d.crossings = {{+1}, {+1}, {+1}};   // c0=(X,Y) c1=(X,Z) c2=(Y,Z)
    d.curves = {
        {{DiagEvent::Kind::Crossing, 0, true}, {DiagEvent::Kind::Crossing, 1, true}},
        {{DiagEvent::Kind::Crossing, 2, true}, {DiagEvent::Kind::Crossing, 0, false}},
        {{DiagEvent::Kind::Crossing, 1, false}, {DiagEvent::Kind::Crossing, 2, false}},
    };
    d.seg_sign = {{1, 1}, {1, 1}, {1, 1}};
    return d;
}

} // namespace

TEST_CASE("triangle flip keeps three crossings and adds one oplus") {
    FoldDiagram d = ordered_triangle();
    d.validate();
    auto before = polarized_counts(d);
    FoldDiagram e = beta_move(d, 0, 1, 2);
    e.validate();
    CHECK(e.crossing_count() == 4);
    auto after = polarized_counts(e);
    CHECK(after.first == before.first + 1);
    CHECK(after.second == before.second);
}

TEST_CASE("triangle flip rejects a cyclic over/under order") {
    FoldDiagram d;
    d.crossings = {{+1}, {+1}, {+1}};
    // X over Y, Y over Z, Z over X
    d.curves = {
        {{DiagEvent::Kind::Crossing, 0, true}, {DiagEvent::Kind::Crossing, 1, false}},
        {{DiagEvent::Kind::Crossing, 2, true}, {DiagEvent::Kind::Crossing, 0, false}},
        {{DiagEvent::Kind::Crossing, 1, true}, {DiagEvent::Kind::Crossing, 2, false}},
    };
    d.seg_sign = {{1, 1}, {1, 1}, {1, 1}};
    d.validate();
    CHECK(code_of([&] { beta_move(d, 0, 1, 2); }) == "IncompatibleOrder");
}

TEST_CASE("triangle flip rejects crossings that bound no empty triangle") {
    FoldDiagram d = plain_loops(3);
    d = alpha_move(d, {0, 0}, {1, 0});
    d = alpha_move(d, {1, 0}, {2, 0});
    CHECK(code_of([&] { beta_move(d, 0, 1, 2); }) == "IncompatibleOrder");
}

TEST_CASE("json round trip and rejection of malformed diagrams") {
    Rng rng(7);
    FoldDiagram d = random_diagram(rng, 2, 10);
    std::string text = diagram_to_json(d);
    FoldDiagram e = diagram_from_json(text);
    CHECK(diagram_to_json(e) == text);
    CHECK(code_of([&] { diagram_from_json("not json"); }) == "ParseError");
    // a cusp whose label does not flip
    std::string bad = R"({"curves":[{"events":[{"kind":"cusp","id":0}],
        "signs":[1]}],"crossings":[],"cusps":[{"first":1,"second":1}]})";
    CHECK(code_of([&] { diagram_from_json(bad); }) == "InvalidDiagram");
}

TEST_CASE("structural validation catches broken invariants") {
    FoldDiagram d = plain_loops(1);
    d = insert_cusp_pair(d, {0, 0}, {+1, +1}, {+1, -1});
    SUBCASE("plus arc bounded by flavor-identical cusps") {
        d.cusps[1] = d.cusps[0];
        CHECK(code_of([&] { d.validate(); }) == "InvalidDiagram");
    }
    SUBCASE("crossing with two upper ends") {
        FoldDiagram e = alpha_move(plain_loops(2), {0, 0}, {1, 0});
        e.curves[1][0].upper = true;
        CHECK(code_of([&] { e.validate(); }) == "InvalidDiagram");
    }
    SUBCASE("crossing on a minus arc") {
        FoldDiagram e = alpha_move(plain_loops(2), {0, 0}, {1, 0});
        e.seg_sign[1] = {-1, -1};
        CHECK(code_of([&] { e.validate(); }) == "InvalidDiagram");
    }
}

TEST_CASE("random diagrams are valid, eliminable, and keep their crossings") {
    Rng rng(12345);
    for (int trial = 0; trial < 60; ++trial) {
        int n_curves = 1 + static_cast<int>(rng.next() % 3);
        int n_steps = 2 + static_cast<int>(rng.next() % 14);
        FoldDiagram d = random_diagram(rng, n_curves, n_steps);
        d.validate();
        // the first polarity count difference is even, so the winding degree
        // is an integer
        int p = 0, m = 0;
        for (const auto& cu : d.cusps) (cu.first > 0 ? p : m)++;
        CHECK((p - m) % 2 == 0);
        CHECK(degree_h(d) == (p - m) / 2);
        EliminationResult res = eliminate_cusps(d);
        CHECK(res.diagram.cusp_count() == 0);
        CHECK(res.diagram.crossing_count() == d.crossing_count());
        // crossings keep their polarities (elimination never touches them)
        for (int i = 0; i < d.crossing_count(); ++i)
            CHECK(res.diagram.crossings[i].polarity == d.crossings[i].polarity);
        res.diagram.validate();
    }
}

TEST_CASE("over-push preserves the signed crossing form on random diagrams") {
    Rng rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        FoldDiagram d = random_diagram(rng, 2 + static_cast<int>(rng.next() % 2),
                                       1 + static_cast<int>(rng.next() % 10));
        std::vector<ArcSite> sites;
        for (size_t c = 0; c < d.curves.size(); ++c)
            for (int g = 0; g < std::max<int>(1, static_cast<int>(d.curves[c].size())); ++g)
                if (d.site_sign({static_cast<int>(c), g}) == 1)
                    sites.push_back({static_cast<int>(c), g});
        REQUIRE(!sites.empty());
        ArcSite a = sites[rng.next() % sites.size()];
        ArcSite b = sites[rng.next() % sites.size()];
        FoldDiagram e = alpha_move(d, a, b);
        CHECK(psi_form(e) == psi_form(d));
        auto pc0 = polarized_counts(d);
        auto pc1 = polarized_counts(e);
        CHECK(pc1.first - pc0.first == 1);
        CHECK(pc1.second - pc0.second == 1);
        CHECK(e.cusp_count() == d.cusp_count());
    }
}
