#include <doctest.h>

#include "gradspine/spine.hpp"

#include <functional>
#include <map>
#include <set>

using namespace gradspine;

namespace {

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// a circle beam closed through one artificial joint, all three pages looping
MarkedSpine joint_circle() {
    MarkedSpine s;
    s.vertices.push_back({VertexKind::Joint, {}});
    SpineEdge e;
    e.a = {0, 0, {0, 1, 2}};
    e.b = {0, 1, {0, 1, 2}};
    e.page_class = {'T', 'N', 'U'};
    s.edges.push_back(e);
    s.cells = {{{0}, 0, +1}, {{1}, 0, +1}, {{2}, 0, +1}};
    return s;
}

// a single beam between two free landing ends (curtain strip)
MarkedSpine curtain_strip() {
    MarkedSpine s;
    s.vertices.push_back({VertexKind::FreeP, {}});
    s.vertices.push_back({VertexKind::FreeP, {}});
    SpineEdge e;
    e.a = {0, 0, {0, 2, 1}};   // curtain fixed, grounds pair
    e.b = {1, 0, {0, 2, 1}};
    e.page_class = {'T', 'N', 'U'};
    s.edges.push_back(e);
    s.cells = {{{0}, 0, +1}, {{1}, 0, +1}};
    return s;
}

// one Q vertex with two loops, beams attached class-to-class
MarkedSpine one_vertex_spine(const MarkerPattern& pat) {
    MarkedSpine s;
    s.vertices.push_back({VertexKind::Q, pat});
    auto attach_at = [&](int slot) {
        std::array<int, 3> a{};
        int t = pat.t_target(slot), n = pat.n_target(slot);
        int u = 0 + 1 + 2 + 3 - slot - t - n;
        a[0] = t;
        a[1] = n;
        a[2] = u;
        return a;
    };
    SpineEdge e0, e1;
    e0.a = {0, 0, attach_at(0)};
    e0.b = {0, 1, attach_at(1)};
    e0.page_class = {'T', 'N', 'U'};
    e1.a = {0, 2, attach_at(2)};
    e1.b = {0, 3, attach_at(3)};
    e1.page_class = {'T', 'N', 'U'};
    s.edges = {e0, e1};
    for (size_t i = 0; i < trace_circuits(s).size(); ++i)
        s.cells.push_back({{static_cast<int>(i)}, 0, +1});
    return s;
}

} // namespace

TEST_CASE("twelve admissible vertex patterns, all distinct") {
    auto pats = admissible_patterns();
    std::set<std::pair<int, int>> seen;
    for (const MarkerPattern& p : pats) {
        CHECK(p.valid());
        seen.insert({p.apex, p.partner});
        // targets are distinct other slots at every slot
        for (int s = 0; s < 4; ++s) {
            CHECK(p.t_target(s) != s);
            CHECK(p.n_target(s) != s);
            CHECK(p.t_target(s) != p.n_target(s));
        }
    }
    CHECK(seen.size() == 12);
}

TEST_CASE("exactly 12 of the 1296 raw local markings are admissible") {
    // exhaustive oracle: every slot carries an ordered pair of distinct
    // other slots, 6^4 = 1296 raw markings in total
    std::vector<std::array<int, 2>> choices[4];
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 4; ++t)
            for (int n = 0; n < 4; ++n)
                if (t != s && n != s && t != n)
                    choices[s].push_back({t, n});
    for (int s = 0; s < 4; ++s) REQUIRE(choices[s].size() == 6);
    int total = 0, admissible = 0;
    std::array<std::array<int, 2>, 4> tn;
    for (const auto& c0 : choices[0])
        for (const auto& c1 : choices[1])
            for (const auto& c2 : choices[2])
                for (const auto& c3 : choices[3]) {
                    tn = {c0, c1, c2, c3};
                    ++total;
                    if (raw_marking_admissible(tn)) ++admissible;
                }
    CHECK(total == 1296);
    CHECK(admissible == 12);
}

TEST_CASE("preferred-side completion convention") {
    MarkerPattern p{0, 1};   // b-slots 2 and 3
    CHECK(p.t_target(2) == 0);
    CHECK(p.t_target(0) == 1);
    CHECK(p.n_target(2) == 1);   // b-slot points to the partner
    CHECK(p.n_target(0) == 2);   // apex points to the smaller b-slot
    CHECK(p.n_target(1) == 2);
    CHECK(p.sector_class(2, 0) == 'T');
    CHECK(p.sector_class(2, 1) == 'N');
    CHECK(p.sector_class(2, 3) == 'U');
}

TEST_CASE("joint circle: three page loops, disk plus sphere resolution") {
    MarkedSpine s = joint_circle();
    CHECK(s.complexity() == 0);
    auto circuits = trace_circuits(s);
    REQUIRE(circuits.size() == 3);
    for (const auto& c : circuits) {
        CHECK(c.steps.size() == 1);
        CHECK_FALSE(c.self_mirror);
    }
    CHECK(validate_markers(s).ok);
    ResolvedSurface r = resolve_T(s);
    REQUIRE(r.components.size() == 2);
    CHECK(r.components[0].chi == 1);   // cut-loose curtain caps to a disk
    CHECK(r.components[0].orientable);
    CHECK(r.components[1].chi == 2);   // grounds glue into a sphere
    CHECK(r.components[1].orientable);
    CHECK(r.total_chi() == 3);
    CHECK(r.orientable());
}

TEST_CASE("curtain strip: self-mirror curtain circuit and folded cap") {
    MarkedSpine s = curtain_strip();
    auto circuits = trace_circuits(s);
    REQUIRE(circuits.size() == 2);
    CHECK(circuits[0].self_mirror);        // curtain turns around twice
    CHECK(circuits[0].steps.size() == 2);
    CHECK_FALSE(circuits[1].self_mirror);  // grounds wrap the strip
    CHECK(validate_markers(s).ok);
    ResolvedSurface r = resolve_T(s);
    REQUIRE(r.components.size() == 2);
    // the folded cap covers the curtain once and returns along a free
    // boundary arc, so the curtain side resolves to a disk
    CHECK(r.components[0].chi == 1);
    CHECK(r.components[1].chi == 2);
    CHECK(r.orientable());
}

TEST_CASE("fold free end pairs the curtain with the preferred ground") {
    MarkedSpine s = curtain_strip();
    // re-pair end a: curtain with preferred ground, unmarked ground fixed
    s.vertices[0].kind = VertexKind::FreeO;
    s.edges[0].a.attach = {1, 0, 2};
    s.cells.clear();
    for (size_t i = 0; i < trace_circuits(s).size(); ++i)
        s.cells.push_back({{static_cast<int>(i)}, 0, +1});
    CHECK(validate_markers(s).ok);
    // the same pairing under a landing kind is a marker break
    s.vertices[0].kind = VertexKind::FreeP;
    MarkerVerdict v = validate_markers(s);
    CHECK_FALSE(v.ok);
    CHECK(v.diagnostics.front().substr(0, 19) == "MarkerDiscontinuity");
}

TEST_CASE("one-vertex class-to-class spine validates for every pattern") {
    for (const MarkerPattern& pat : admissible_patterns()) {
        MarkedSpine s = one_vertex_spine(pat);
        CHECK(s.complexity() == 1);
        CHECK(validate_markers(s).ok);
        auto circuits = trace_circuits(s);
        // every page is traversed by exactly one merged circuit
        std::map<std::pair<int, int>, int> uses;
        for (const auto& c : circuits)
            for (const auto& st : c.steps) uses[{st.edge, st.page}]++;
        for (auto& [pg, n] : uses) CHECK((n == 1 || n == 2));
        CHECK(uses.size() == 6);
        ResolvedSurface r = resolve_T(s);
        CHECK(r.components.size() >= 1);
    }
}

TEST_CASE("validation diagnostics name the broken invariant") {
    MarkedSpine s = one_vertex_spine(MarkerPattern{0, 1});
    SUBCASE("pattern out of range") {
        s.vertices[0].pattern = MarkerPattern{2, 2};
        MarkerVerdict v = validate_markers(s);
        CHECK_FALSE(v.ok);
        CHECK(v.diagnostics.front().substr(0, 14) == "InvalidPattern");
    }
    SUBCASE("attach not a bijection") {
        s.edges[0].a.attach = {1, 1, 3};
        CHECK(code_of([&] { require_valid(s); }) == "BadAttach");
    }
    SUBCASE("duplicate page classes") {
        s.edges[0].page_class = {'T', 'T', 'U'};
        CHECK(code_of([&] { require_valid(s); }) == "MarkerDiscontinuity");
    }
    SUBCASE("vertical leg leaves its sector") {
        std::swap(s.edges[0].page_class[0], s.edges[0].page_class[1]);
        CHECK(code_of([&] { require_valid(s); }) == "MarkerDiscontinuity");
    }
    SUBCASE("missing cap") {
        s.cells.pop_back();
        CHECK(code_of([&] { require_valid(s); }) == "UncappedCircuit");
    }
    SUBCASE("doubly capped circuit") {
        s.cells.push_back(s.cells.front());
        CHECK(code_of([&] { require_valid(s); }) == "UncappedCircuit");
    }
}

TEST_CASE("canonical form is invariant under relabeling") {
    MarkedSpine a = joint_circle();
    // same spine with pages stored in a different order
    MarkedSpine b = joint_circle();
    b.edges[0].page_class = {'N', 'T', 'U'};
    CHECK(is_isomorphic(a, b));
    // and with the edge stored the other way around
    MarkedSpine c = joint_circle();
    std::swap(c.edges[0].a, c.edges[0].b);
    CHECK(is_isomorphic(a, c));
    CHECK_FALSE(is_isomorphic(a, curtain_strip()));
    // distinct patterns at the vertex give distinct spines unless related
    // by a slot relabeling
    MarkedSpine p1 = one_vertex_spine(MarkerPattern{0, 1});
    CHECK(is_isomorphic(p1, p1));
}

TEST_CASE("mushroom flip is an involution preserving validity") {
    MarkedSpine s = joint_circle();
    MarkedSpine f = mushroom_flip(s, 1);
    CHECK(validate_markers(f).ok);
    CHECK(f.cells[1].orient == -s.cells[1].orient);
    MarkedSpine ff = mushroom_flip(f, 1);
    CHECK(canonical_form(ff) == canonical_form(s));
    CHECK(ff.cells[1].orient == s.cells[1].orient);
    // the resolution is blind to the preferred-side swap
    ResolvedSurface r0 = resolve_T(s), r1 = resolve_T(f);
    CHECK(r0.total_chi() == r1.total_chi());
    CHECK(r0.orientable() == r1.orientable());
}

TEST_CASE("mushroom flip rejects non-disks and free boundaries") {
    MarkedSpine s = joint_circle();
    s.cells[0].genus = 1;
    CHECK(code_of([&] { mushroom_flip(s, 0); }) == "NotADiskCell");
    CHECK(code_of([&] { mushroom_flip(curtain_strip(), 0); }) ==
          "NotADiskCell");
    CHECK(code_of([&] { mushroom_flip(joint_circle(), 7); }) == "BadParams");
}

TEST_CASE("branching check flags triple boundary coefficients") {
    MarkedSpine s = joint_circle();
    // three loops all running the same way: coefficient 3 with equal signs
    BranchVerdict all_plus = check_branching(s, {+1, +1, +1});
    CHECK_FALSE(all_plus.ok);
    CHECK(all_plus.edge_multiplicity == std::vector<int>{3});
    BranchVerdict mixed = check_branching(s, {+1, +1, -1});
    CHECK(mixed.ok);
    CHECK(mixed.edge_multiplicity == std::vector<int>{1});
}

TEST_CASE("dot output names every vertex and edge") {
    std::string dot = to_dot(joint_circle());
    CHECK(dot.find("joint") != std::string::npos);
    CHECK(dot.find("e0:TNU") != std::string::npos);
}
