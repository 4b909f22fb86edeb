#include <doctest.h>

#include "gradspine/fixtures.hpp"
#include "gradspine/strata.hpp"

using namespace gradspine;

namespace {

struct Expected {
    const char* name;
    int folds, chi_d1_plus, chi_d2_plus, d3_plus, d3_minus, deg_h;
    int arcs_a, arcs_b, arcs_c, plus_loops, minus_loops;
};

// frozen stratification censuses in the downward direction (0,0,-1), seed 0
const Expected kTable[] = {
    {"icosphere3",         1,  1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
    {"icosphere4",         1,  1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
    {"icosphere5",         1,  1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
    {"torus",              2,  0, 0, 0, 0, 0, 0, 0, 0, 0, 2},
    {"torus_fine",         2,  0, 0, 0, 0, 0, 0, 0, 0, 0, 2},
    {"torus_standing",     2,  0, 6, 6, 6, 0, 0, 0, 6, 0, 0},
    {"torus_standing_fat", 2,  0, 10, 10, 10, 0, 0, 0, 10, 0, 0},
    {"genus2",             3, -1, 4, 4, 4, 0, 0, 0, 4, 0, 1},
    {"genus3",             4, -2, 6, 6, 6, 0, 0, 0, 6, 0, 1},
    {"dented_sphere",      2,  0, 7, 8, 6, 1, 1, 0, 6, 0, 0},
    {"dented_sphere_low",  1,  1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
    {"dented_sphere_two",  3, -1, 2, 4, 0, 2, 2, 0, 0, 0, 1},
    {"peanut",             5,  1, 4, 4, 4, 0, 2, 2, 0, 0, 1},
    {"pocket_pair",        3,  1, 2, 2, 2, 0, 1, 1, 0, 0, 1},
    {"cusp_patch",         2,  0, 1, 2, 0, 1, 1, 0, 0, 0, 1},
    {"dovetail_neg",       2,  0, 1, 2, 0, 1, 1, 0, 0, 0, 1},
    {"dovetail_pos",       1,  1, 0, 0, 0, 0, 0, 0, 0, 0, 1},
};

} // namespace

TEST_CASE("stratification census matches frozen values on every fixture") {
    for (const auto& e : kTable) {
        CAPTURE(e.name);
        Strata s = compute_strata(fixture_by_name(e.name), {0, 0, -1}, 0);
        const IdentityReport& r = s.report;
        CHECK(static_cast<int>(s.folds.size()) == e.folds);
        CHECK(r.chi_d1_plus == e.chi_d1_plus);
        CHECK(r.chi_d2_plus == e.chi_d2_plus);
        CHECK(r.d3_plus == e.d3_plus);
        CHECK(r.d3_minus == e.d3_minus);
        CHECK(r.deg_h == e.deg_h);
        CHECK(r.arcs_a == e.arcs_a);
        CHECK(r.arcs_b == e.arcs_b);
        CHECK(r.arcs_c == e.arcs_c);
        CHECK(r.plus_loops == e.plus_loops);
        CHECK(r.minus_loops == e.minus_loops);
    }
}

TEST_CASE("all asserted identities hold on every fixture in the default direction") {
    for (const auto& e : kTable) {
        CAPTURE(e.name);
        Strata s = compute_strata(fixture_by_name(e.name), {0, 0, -1}, 0);
        CHECK(s.report.asserted_pass());
    }
}

TEST_CASE("identities are stable under random direction perturbations") {
    Rng rng(101);
    for (const char* name : {"icosphere4", "dented_sphere", "genus2", "peanut"}) {
        CAPTURE(name);
        TriMesh m = fixture_by_name(name);
        for (int k = 0; k < 5; ++k) {
            Vec3 v = normalized(Vec3{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                     -1.0});
            Strata s = compute_strata(m, v, 1000 + k);
            CHECK(s.report.asserted_pass());
        }
    }
}

TEST_CASE("both half euler characteristics always sum to the total") {
    for (const auto& e : kTable) {
        Strata s = compute_strata(fixture_by_name(e.name), {0, 0, -1}, 0);
        CHECK(s.report.chi_d1_plus + s.report.chi_d1_minus == s.report.chi_boundary);
    }
}

TEST_CASE("fold loops are closed and labels flip exactly at cusps") {
    Strata s = compute_strata(fixture_by_name("dented_sphere"), {0, 0, -1}, 0);
    int flips = 0;
    for (const auto& c : s.folds) {
        int n = static_cast<int>(c.points.size());
        REQUIRE(n >= 3);
        REQUIRE(static_cast<int>(c.seg_sign.size()) == n);
        for (int i = 0; i < n; ++i)
            if (c.seg_sign[i] != c.seg_sign[(i + 1) % n]) flips++;
    }
    CHECK(flips == static_cast<int>(s.cusps.size()));
    CHECK(flips == s.report.d3_plus + s.report.d3_minus);
}

TEST_CASE("open surfaces are rejected as non-manifold input") {
    TriMesh open;
    open.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    open.faces = {{0, 1, 2}};
    CHECK_THROWS_WITH_AS(classify_regions(open, {0, 0, -1}, 0),
                         doctest::Contains("NonManifoldMesh"), Error);
}

TEST_CASE("cusp class balance holds whenever cusps are present") {
    for (const char* name : {"dented_sphere", "dented_sphere_two", "peanut",
                             "torus_standing", "cusp_patch"}) {
        CAPTURE(name);
        Strata s = compute_strata(fixture_by_name(name), {0, 0, -1}, 0);
        const auto& r = s.report;
        CHECK(r.cusp_pp + r.cusp_mm == r.cusp_pm + r.cusp_mp);
        int a_class = 0, b_class = 0;
        for (const auto& c : s.cusps) (c.is_a_class() ? a_class : b_class)++;
        CHECK(a_class == r.cusp_pp + r.cusp_mm);
        CHECK(b_class == r.cusp_pm + r.cusp_mp);
    }
}
