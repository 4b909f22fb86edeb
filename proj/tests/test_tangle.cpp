#include <doctest.h>

#include "gradspine/fixtures.hpp"
#include "gradspine/tangle.hpp"

#include <algorithm>

using namespace gradspine;

namespace {

// Independent brute-force pairing oracle. Enumerates every unordered pair of
// plus fold segments, detects a projected crossing with orientation
// predicates, and tests the open vertical chord with plain parity ray
// casting against all mesh triangles (no acceleration, no retry logic).
struct OracleHit {
    int polarity;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool ray_parity_inside(const TriMesh& mesh, const Vec3& p) {
    // fixed, non-axis-aligned ray direction
    Vec3 d = normalized(Vec3{0.1234567, 0.4567891, 0.7891234});
    int hits = 0;
    for (const auto& f : mesh.faces) {
        Vec3 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
        Vec3 e1 = b - a, e2 = c - a;
        Vec3 pv = cross(d, e2);
        double det = dot(e1, pv);
        if (std::fabs(det) < 1e-14) continue;
        Vec3 tv = p - a;
        double u = dot(tv, pv) / det;
        if (u < 0 || u > 1) continue;
        Vec3 qv = cross(tv, e1);
        double v = dot(d, qv) / det;
        if (v < 0 || u + v > 1) continue;
        double t = dot(e2, qv) / det;
        if (t > 0) hits++;
    }
    return hits % 2 == 1;
}

std::vector<OracleHit> oracle_tangle(const TriMesh& mesh, const Strata& s) {
    Frame2 fr = make_frame(s.labeling.dir);
    struct Seg {
        int curve, idx;
        Vec2 a, b;
        Vec3 pa, pb;
    };
    std::vector<Seg> segs;
    for (int ci = 0; ci < static_cast<int>(s.folds.size()); ++ci) {
        const auto& c = s.folds[ci];
        int n = static_cast<int>(c.points.size());
        for (int i = 0; i < n; ++i)
            if (c.seg_sign[i] == RegionSign::Plus)
                segs.push_back({ci, i, fr.project(c.points[i].pos),
                                fr.project(c.points[(i + 1) % n].pos),
                                c.points[i].pos, c.points[(i + 1) % n].pos});
    }
    std::vector<OracleHit> hits;
    for (size_t i = 0; i < segs.size(); ++i)
        for (size_t j = i + 1; j < segs.size(); ++j) {
            const Seg& x = segs[i];
            const Seg& y = segs[j];
            if (x.curve == y.curve) {
                int n = static_cast<int>(s.folds[x.curve].points.size());
                int d = std::abs(x.idx - y.idx);
                if (d <= 1 || d == n - 1) continue;
            }
            double o1 = orient(x.a, x.b, y.a), o2 = orient(x.a, x.b, y.b);
            double o3 = orient(y.a, y.b, x.a), o4 = orient(y.a, y.b, x.b);
            // strict proper crossing with half-open convention at endpoints
            if (!((o1 > 0) != (o2 > 0) && (o3 > 0) != (o4 > 0))) continue;
            if (o2 == 0 || o4 == 0) continue;
            // crossing parameters from the orientation areas
            double t1 = o3 / (o3 - o4);
            double t2 = o1 / (o1 - o2);
            Vec3 p1 = x.pa + (x.pb - x.pa) * t1;
            Vec3 p2 = y.pa + (y.pb - y.pa) * t2;
            double h1 = fr.height(p1), h2 = fr.height(p2);
            if (h1 == h2) continue;
            const Seg& lo = h1 < h2 ? x : y;
            const Seg& hi = h1 < h2 ? y : x;
            Vec3 plo = h1 < h2 ? p1 : p2;
            Vec3 phi = h1 < h2 ? p2 : p1;
            bool inside = true;
            for (int k = 1; k <= 31 && inside; ++k)
                if (!ray_parity_inside(mesh, plo + (phi - plo) * (k / 32.0)))
                    inside = false;
            if (!inside) continue;
            Vec2 tl = fr.project(lo.pb) - fr.project(lo.pa);
            Vec2 th = fr.project(hi.pb) - fr.project(hi.pa);
            hits.push_back({det2(tl, th) < 0 ? 1 : -1});
        }
    return hits;
}

} // namespace

TEST_CASE("double tangent detection matches the brute-force pairing oracle") {
    struct Fix {
        const char* name;
        int gc, gc_pol;
    };
    const Fix fixtures[] = {
        {"icosphere3", 0, 0},   {"torus", 0, 0},        {"dented_sphere", 0, 0},
        {"pocket_pair", 1, -1}, {"peanut", 2, -2},
    };
    for (const auto& fx : fixtures) {
        CAPTURE(fx.name);
        TriMesh m = fixture_by_name(fx.name);
        Strata s = compute_strata(m, {0, 0, -1}, 0);
        Tangle t = detect_double_tangents(m, s.labeling, s.folds);
        CHECK(t.gc() == fx.gc);
        CHECK(t.gc_polarized() == fx.gc_pol);

        std::vector<OracleHit> oracle = oracle_tangle(m, s);
        CHECK(static_cast<int>(oracle.size()) == fx.gc);
        int pol = 0;
        for (const auto& h : oracle) pol += h.polarity;
        CHECK(pol == fx.gc_pol);
    }
}

TEST_CASE("parallel and serial double tangent kernels agree exactly") {
    for (const char* name : {"pocket_pair", "peanut", "torus_standing"}) {
        CAPTURE(name);
        TriMesh m = fixture_by_name(name);
        Strata s = compute_strata(m, {0, 0, -1}, 0);
        Tangle a = detect_double_tangents(m, s.labeling, s.folds);
        Tangle b = detect_double_tangents_serial(m, s.labeling, s.folds);
        REQUIRE(a.segments.size() == b.segments.size());
        for (size_t i = 0; i < a.segments.size(); ++i) {
            CHECK(a.segments[i].curve_lo == b.segments[i].curve_lo);
            CHECK(a.segments[i].point_lo == b.segments[i].point_lo);
            CHECK(a.segments[i].curve_hi == b.segments[i].curve_hi);
            CHECK(a.segments[i].point_hi == b.segments[i].point_hi);
            CHECK(a.segments[i].polarity == b.segments[i].polarity);
            CHECK(norm(a.segments[i].lower - b.segments[i].lower) == 0.0);
            CHECK(norm(a.segments[i].upper - b.segments[i].upper) == 0.0);
        }
    }
}

TEST_CASE("tangle endpoints lie on plus segments and chords are vertical") {
    TriMesh m = fixture_by_name("peanut");
    Strata s = compute_strata(m, {0, 0, -1}, 0);
    Tangle t = detect_double_tangents(m, s.labeling, s.folds);
    Frame2 fr = make_frame(s.labeling.dir);
    for (const auto& seg : t.segments) {
        CHECK(s.folds[seg.curve_lo].seg_sign[seg.point_lo] == RegionSign::Plus);
        CHECK(s.folds[seg.curve_hi].seg_sign[seg.point_hi] == RegionSign::Plus);
        Vec2 dlo = fr.project(seg.lower), dhi = fr.project(seg.upper);
        CHECK(std::fabs(dlo.x - dhi.x) < 1e-12);
        CHECK(std::fabs(dlo.y - dhi.y) < 1e-12);
        CHECK(fr.height(seg.upper) > fr.height(seg.lower));
    }
}
