#include <doctest.h>

#include "gradspine/fixtures.hpp"
#include "gradspine/mesh.hpp"

#include <sstream>

using namespace gradspine;

TEST_CASE("off round trip preserves the mesh") {
    TriMesh m = icosphere(3);
    std::ostringstream out;
    save_off(m, out);
    std::istringstream in(out.str());
    TriMesh back = load_off(in);
    REQUIRE(back.vertex_count() == m.vertex_count());
    REQUIRE(back.face_count() == m.face_count());
    for (int i = 0; i < m.vertex_count(); ++i)
        CHECK(norm(back.vertices[i] - m.vertices[i]) == 0.0);
    CHECK(back.faces == m.faces);
}

namespace {
TriMesh load_off_text(const std::string& text) {
    std::istringstream in(text);
    return load_off(in);
}
} // namespace

TEST_CASE("off parser reports format errors") {
    CHECK_THROWS_WITH_AS(load_off_text("not-off\n"), doctest::Contains("ParseError"),
                         Error);
    CHECK_THROWS_WITH_AS(load_off_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n"),
                         doctest::Contains("NotTriangulated"), Error);
    // single triangle: boundary edges, not a closed surface
    CHECK_THROWS_WITH_AS(load_off_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"),
                         doctest::Contains("NotClosed"), Error);
}

TEST_CASE("validation flags inconsistent orientation and degenerate faces") {
    TriMesh m = icosphere(1);
    std::swap(m.faces[0][0], m.faces[0][1]);
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("NotOriented"), Error);

    TriMesh d = icosphere(1);
    d.vertices[d.faces[0][1]] = d.vertices[d.faces[0][0]];
    CHECK_THROWS_WITH_AS(d.validate(), doctest::Contains("DegenerateFace"), Error);
}

TEST_CASE("euler characteristic of the standard fixtures") {
    CHECK(icosphere(3).euler_char() == 2);
    CHECK(icosphere(5).euler_char() == 2);
    CHECK(torus(2.0, 0.7, 48, 24).euler_char() == 0);
    CHECK(torus_standing(2.0, 0.7, 48, 24).euler_char() == 0);
    CHECK(genus_surface(1).euler_char() == 0);
    CHECK(genus_surface(2).euler_char() == -2);
    CHECK(genus_surface(3).euler_char() == -4);
    CHECK(genus_surface(5).euler_char() == -8);
}

TEST_CASE("point-in-solid matches the exact answer on a sphere") {
    TriMesh m = icosphere(4);
    std::vector<Vec3> pts;
    std::vector<char> expect;
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        Vec3 p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        double r = norm(p);
        // the level-4 icosphere is within 1% of the unit sphere; skip the shell
        if (r > 0.97 && r < 1.01) { --i; continue; }
        pts.push_back(p);
        expect.push_back(r < 0.97 ? 1 : 0);
    }
    CHECK(points_inside_serial(m, pts, 0) == expect);
    CHECK(points_inside(m, pts, 0) == expect);
}

TEST_CASE("parallel and serial point classification agree on a torus") {
    TriMesh m = torus(2.0, 0.7, 32, 16);
    std::vector<Vec3> pts;
    Rng rng(11);
    for (int i = 0; i < 500; ++i)
        pts.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 1)});
    CHECK(points_inside(m, pts, 3) == points_inside_serial(m, pts, 3));
}

TEST_CASE("fixture registry resolves every listed name") {
    for (const auto& name : fixture_names()) {
        TriMesh m = fixture_by_name(name);
        CHECK(m.face_count() > 0);
    }
    CHECK_THROWS_WITH_AS(fixture_by_name("nope"), doctest::Contains("BadParams"), Error);
}
