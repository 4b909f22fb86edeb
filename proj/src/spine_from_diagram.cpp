#include "gradspine/spine_from_diagram.hpp"

#include "gradspine/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace gradspine {

namespace {

// ---------------------------------------------------------------------------
// shared geometry helpers

struct RayHit {
    bool hit = false;
    int face = -1;
    double t = 0;
    Vec3 p;
};

std::vector<RayHit> ray_hits(const TriMesh& mesh, const Vec3& orig, const Vec3& dir,
                             double t_min) {
    constexpr double kBary = 1e-9;
    std::vector<RayHit> out;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& tri = mesh.faces[f];
        const Vec3& v0 = mesh.vertices[tri[0]];
        Vec3 e1 = mesh.vertices[tri[1]] - v0, e2 = mesh.vertices[tri[2]] - v0;
        Vec3 pv = cross(dir, e2);
        double det = dot(e1, pv);
        if (std::fabs(det) < 1e-14 * norm(e1) * norm(e2)) continue;
        double inv = 1.0 / det;
        Vec3 tv = orig - v0;
        double u = dot(tv, pv) * inv;
        if (u < -kBary || u > 1 + kBary) continue;
        Vec3 qv = cross(tv, e1);
        double v = dot(dir, qv) * inv;
        if (v < -kBary || u + v > 1 + kBary) continue;
        double t = dot(e2, qv) * inv;
        if (t <= t_min) continue;
        out.push_back({true, f, t, orig + dir * t});
    }
    std::sort(out.begin(), out.end(),
              [](const RayHit& a, const RayHit& b) { return a.t < b.t; });
    return out;
}

// Descending rays launched from fold points run tangent to the boundary, so a
// faceted mesh produces spurious skimming intersections near the launch. Only
// transverse hits are meaningful: the first transverse exit is the landing,
// a first transverse entry means the flow genuinely leaves the solid.
constexpr double kGraze = 0.15;

enum class LandStatus { Landed, ExitsMinus, Nothing };

struct LandResult {
    LandStatus status = LandStatus::Nothing;
    RayHit hit;
};

// t_skim: transverse entry hits closer than this are still part of the
// faceted skim zone (the polyline dips in and out around the true tangent
// ray) and are ignored; only an entry beyond it counts as a genuine escape.
LandResult descend(const TriMesh& mesh, const Vec3& orig, const Vec3& down, double t_min,
                   double t_skim) {
    for (const RayHit& h : ray_hits(mesh, orig, down, t_min)) {
        double facing = dot(mesh.face_normal(h.face), down);
        if (std::fabs(facing) < kGraze) continue;
        if (facing > 0) return {LandStatus::Landed, h};
        if (h.t > t_skim) return {LandStatus::ExitsMinus, h};
    }
    return {LandStatus::Nothing, {}};
}

double median_edge_length(const TriMesh& mesh) {
    std::vector<double> lens;
    for (const auto& tri : mesh.faces)
        for (int k = 0; k < 3; ++k)
            if (tri[k] < tri[(k + 1) % 3])
                lens.push_back(norm(mesh.vertices[tri[k]] - mesh.vertices[tri[(k + 1) % 3]]));
    std::sort(lens.begin(), lens.end());
    return lens.empty() ? 0 : lens[lens.size() / 2];
}

// Curtain heights vanish toward cusps, so landing rays launched within a few
// samples of one sit below mesh resolution; their failures carry no signal.
constexpr int kCuspWindow = 3;

std::vector<std::vector<bool>> near_cusp_mask(const std::vector<FoldCurve>& folds,
                                              const std::vector<Cusp>& cusps) {
    std::vector<std::vector<bool>> mask(folds.size());
    for (size_t ci = 0; ci < folds.size(); ++ci)
        mask[ci].assign(folds[ci].points.size(), false);
    for (const Cusp& c : cusps) {
        int n = static_cast<int>(folds[c.curve].points.size());
        for (int d = -kCuspWindow; d <= kCuspWindow; ++d)
            mask[c.curve][((c.point + d) % n + n) % n] = true;
    }
    return mask;
}

// One event on a fold curve, parameterized along the sampled polyline:
// integer positions are samples, so a cusp at sample i has pos == i and a
// crossing inside segment k has pos in (k, k+1).
struct CurveEvent {
    double pos = 0;
    bool is_cusp = false;
    int id = 0;        // tangle segment index or cusp index
    bool upper = false;   // crossings only
};

double crossing_param(const FoldCurve& c, int seg, const Vec3& at) {
    int n = static_cast<int>(c.points.size());
    const Vec3& a = c.points[seg].pos;
    const Vec3& b = c.points[(seg + 1) % n].pos;
    double len = norm(b - a);
    double t = len > 0 ? norm(at - a) / len : 0.0;
    return std::clamp(t, 1e-9, 1.0 - 1e-9);
}

std::vector<std::vector<CurveEvent>> curve_events(const std::vector<FoldCurve>& folds,
                                                  const std::vector<Cusp>& cusps,
                                                  const Tangle& tangle) {
    std::vector<std::vector<CurveEvent>> ev(folds.size());
    for (size_t k = 0; k < cusps.size(); ++k)
        ev[cusps[k].curve].push_back({static_cast<double>(cusps[k].point), true,
                                      static_cast<int>(k), false});
    for (size_t k = 0; k < tangle.segments.size(); ++k) {
        const TangleSegment& s = tangle.segments[k];
        ev[s.curve_lo].push_back(
            {s.point_lo + crossing_param(folds[s.curve_lo], s.point_lo, s.lower), false,
             static_cast<int>(k), false});
        ev[s.curve_hi].push_back(
            {s.point_hi + crossing_param(folds[s.curve_hi], s.point_hi, s.upper), false,
             static_cast<int>(k), true});
    }
    for (auto& v : ev)
        std::sort(v.begin(), v.end(),
                  [](const CurveEvent& a, const CurveEvent& b) { return a.pos < b.pos; });
    return ev;
}

// Label of the arc that follows an event: the fold segment just past its
// position (labels are constant between events and flip only at cusps).
int label_after(const FoldCurve& c, const CurveEvent& e) {
    int n = static_cast<int>(c.points.size());
    int seg = e.is_cusp ? static_cast<int>(e.pos) % n
                        : static_cast<int>(std::floor(e.pos)) % n;
    return c.seg_sign[seg] == RegionSign::Plus ? 1 : -1;
}

std::string vec_str(const Vec3& p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ", " << p.z << ")";
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// fold diagram

FoldDiagram build_fold_diagram(const TriMesh& mesh, const RegionLabeling& lab,
                               const std::vector<FoldCurve>& folds,
                               const std::vector<Cusp>& cusps, const Tangle& tangle) {
    const double diag = mesh.bbox_diagonal();
    const double excl = 1e-6 * diag;
    const double t_skim = 4.0 * median_edge_length(mesh);
    const Vec3 down = -lab.dir;

    // every plus fold sample must flow down onto the plus region
    std::vector<std::vector<bool>> near_cusp = near_cusp_mask(folds, cusps);
    for (size_t ci = 0; ci < folds.size(); ++ci) {
        const FoldCurve& c = folds[ci];
        int n = static_cast<int>(c.points.size());
        for (int i = 0; i < n; ++i) {
            if (c.seg_sign[i] != RegionSign::Plus ||
                c.seg_sign[(i - 1 + n) % n] != RegionSign::Plus)
                continue;
            if (near_cusp[ci][i]) continue;
            LandResult r = descend(mesh, c.points[i].pos, down, excl, t_skim);
            if (r.status == LandStatus::Nothing)
                throw Error("ProjectionMiss",
                            "downward ray from fold point " + vec_str(c.points[i].pos) +
                                " never lands");
            if (r.status == LandStatus::ExitsMinus)
                throw Error("ProjectionMiss",
                            "downward ray from fold point " + vec_str(c.points[i].pos) +
                                " exits through the minus region at " + vec_str(r.hit.p));
        }
    }

    FoldDiagram d;
    std::vector<std::vector<CurveEvent>> ev = curve_events(folds, cusps, tangle);
    for (const TangleSegment& s : tangle.segments) d.crossings.push_back({s.polarity});
    for (const Cusp& c : cusps) d.cusps.push_back({c.first, c.second});
    for (size_t ci = 0; ci < folds.size(); ++ci) {
        std::vector<DiagEvent> curve;
        std::vector<int> signs;
        for (const CurveEvent& e : ev[ci]) {
            DiagEvent de;
            de.kind = e.is_cusp ? DiagEvent::Kind::Cusp : DiagEvent::Kind::Crossing;
            de.id = e.id;
            de.upper = e.upper;
            curve.push_back(de);
            signs.push_back(label_after(folds[ci], e));
        }
        if (curve.empty())
            signs.push_back(folds[ci].seg_sign[0] == RegionSign::Plus ? 1 : -1);
        d.curves.push_back(std::move(curve));
        d.seg_sign.push_back(std::move(signs));
    }
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// derived spine

namespace {

// Attach tables at a crossing vertex. Slots: 0 = vertical leg entering from
// the upper arc's landing curve (the pattern apex), 1 = its continuation
// (partner), 2/3 = the lower arc's landing curve in/out. Pages of every edge
// are ordered (curtain, left-of-travel ground, right-of-travel ground); the
// crossing polarity decides on which side of the lower landing curve the
// upper one continues, which fixes all six sector pairings.
std::array<int, 3> q_attach(int slot, int polarity) {
    if (polarity > 0) {
        switch (slot) {
        case 0: return {1, 2, 3};
        case 1: return {0, 2, 3};
        case 2: return {0, 1, 3};
        default: return {0, 1, 2};
        }
    }
    switch (slot) {
    case 0: return {1, 3, 2};
    case 1: return {0, 3, 2};
    case 2: return {0, 3, 1};
    default: return {0, 2, 1};
    }
}

struct Landing {
    Vec3 p;
    int face = -1;
};

struct BuildEdge {
    int va = -1, sa = 0, vb = -1, sb = 0;
    std::array<int, 3> attach_a{0, 1, 2}, attach_b{0, 1, 2};
    std::array<char, 3> page_class{'T', 'N', 'U'};
    std::vector<Landing> line;        // landing polyline, travel order a -> b
    int curve = -1;                   // fold curve carrying the curtain top
    double pos_lo = 0, pos_hi = 0;    // fold-parameter interval of the top
    bool thin = false;                // curtain below mesh resolution
};

struct FaceWalker {
    const TriMesh& mesh;
    std::map<std::pair<int, int>, std::array<int, 2>> edge_faces;

    explicit FaceWalker(const TriMesh& m) : mesh(m) {
        for (int f = 0; f < m.face_count(); ++f)
            for (int k = 0; k < 3; ++k) {
                int u = m.faces[f][k], v = m.faces[f][(k + 1) % 3];
                auto key = std::minmax(u, v);
                auto it = edge_faces.find({key.first, key.second});
                if (it == edge_faces.end())
                    edge_faces[{key.first, key.second}] = {f, -1};
                else
                    it->second[1] = f;
            }
    }

    int other_face(int f, int u, int v) const {
        auto key = std::minmax(u, v);
        auto it = edge_faces.find({key.first, key.second});
        if (it == edge_faces.end()) return -1;
        return it->second[0] == f ? it->second[1] : it->second[0];
    }

    // In-plane exit edge of face f along the segment from x toward q.
    // Returns the local edge index or -1 when q projects inside f.
    int exit_edge(int f, const Vec3& x, const Vec3& q, Vec3* at) const {
        const auto& tri = mesh.faces[f];
        Vec3 n = mesh.face_normal(f);
        Vec3 d = (q - x) - n * dot(q - x, n);
        if (norm(d) < 1e-15) return -1;
        int best = -1;
        double best_t = 1.0 + 1e-9;
        for (int k = 0; k < 3; ++k) {
            const Vec3& a = mesh.vertices[tri[k]];
            const Vec3& b = mesh.vertices[tri[(k + 1) % 3]];
            // solve x + t d = a + s (b - a) in the face plane
            Vec3 e = b - a;
            Vec3 w = a - x;
            Vec3 cn = cross(d, e);
            double den = dot(cn, n);
            if (std::fabs(den) < 1e-18) continue;
            double t = dot(cross(w, e), n) / den;
            double s = dot(cross(w, d), n) / den;
            if (s < -1e-9 || s > 1 + 1e-9) continue;
            if (t < 1e-9 || t > best_t) continue;
            best_t = t;
            best = k;
            if (at) *at = x + d * t;
        }
        return best;
    }

    // Walk from face f toward point q; optionally record crossed mesh edges.
    int walk(int f, Vec3 x, const Vec3& q,
             std::set<std::pair<int, int>>* crossed = nullptr, int max_steps = 64) const {
        std::set<int> seen;
        for (int step = 0; step < max_steps && f >= 0; ++step) {
            if (!seen.insert(f).second) break;
            Vec3 at;
            int k = exit_edge(f, x, q, &at);
            if (k < 0) break;
            const auto& tri = mesh.faces[f];
            int u = tri[k], v = tri[(k + 1) % 3];
            if (crossed) {
                auto key = std::minmax(u, v);
                crossed->insert({key.first, key.second});
            }
            int g = other_face(f, u, v);
            if (g < 0) break;
            f = g;
            x = at;
        }
        return f;
    }
};

struct RegionStats {
    int chi = 0;
    int boundary_circles = 0;
    int faces = 0;
    std::vector<std::vector<Vec3>> circle_points;   // samples along each circle
};

} // namespace

MarkedSpine spine_from_strata(const TriMesh& mesh, const RegionLabeling& lab,
                              const std::vector<FoldCurve>& folds,
                              const std::vector<Cusp>& cusps, const Tangle& tangle) {
    const double diag = mesh.bbox_diagonal();
    const double excl = 1e-6 * diag;
    const Vec3 down = -lab.dir;
    FaceWalker walker(mesh);

    double edge_len = 0;
    {
        std::vector<double> lens;
        for (const auto& [key, fs] : walker.edge_faces)
            lens.push_back(norm(mesh.vertices[key.first] - mesh.vertices[key.second]));
        std::sort(lens.begin(), lens.end());
        edge_len = lens.empty() ? 0.01 * diag : lens[lens.size() / 2];
    }
    const double probe_delta = 1.2 * edge_len;
    const double t_skim = 4.0 * edge_len;

    auto land = [&](const Vec3& from) -> Landing {
        LandResult r = descend(mesh, from, down, excl, t_skim);
        if (r.status == LandStatus::Nothing)
            throw Error("ProjectionMiss",
                        "downward ray from " + vec_str(from) + " never lands");
        if (r.status == LandStatus::ExitsMinus)
            throw Error("ProjectionMiss", "downward ray from " + vec_str(from) +
                                              " exits through the minus region at " +
                                              vec_str(r.hit.p));
        return {r.hit.p, r.hit.face};
    };

    MarkedSpine s;
    std::vector<int> qvert(tangle.segments.size(), -1);
    std::vector<Landing> land_star(tangle.segments.size());
    for (size_t k = 0; k < tangle.segments.size(); ++k) {
        SpineVertex v;
        v.kind = VertexKind::Q;
        v.pattern = {0, 1};
        qvert[k] = static_cast<int>(s.vertices.size());
        s.vertices.push_back(v);
        land_star[k] = land(tangle.segments[k].lower);
    }

    // free ends at cusps: a cusp whose descending ray has an interior segment
    // pinches in the bulk (grounds pair); otherwise the landing curve dies on
    // the fold and the curtain pairs with the shadow-side ground
    std::vector<int> fvert(cusps.size(), -1);
    std::vector<bool> f_interior(cusps.size(), false);
    std::vector<Landing> f_land(cusps.size());
    for (size_t k = 0; k < cusps.size(); ++k) {
        LandResult r = descend(mesh, cusps[k].pos, down, excl, t_skim);
        bool interior = false;
        if (r.status == LandStatus::Landed) {
            Vec3 mid = cusps[k].pos + down * (r.hit.t * 0.5);
            try {
                interior = point_inside(mesh, mid, lab.seed + 99);
            } catch (const Error&) {
                interior = false;
            }
        }
        SpineVertex v;
        v.kind = interior ? VertexKind::FreeP : VertexKind::FreeO;
        fvert[k] = static_cast<int>(s.vertices.size());
        s.vertices.push_back(v);
        f_interior[k] = interior;
        if (interior) f_land[k] = {r.hit.p, r.hit.face};
        else f_land[k] = {cusps[k].pos, -1};
    }

    // landing samples for every interior plus fold sample; failures within
    // the cusp window are dropped (the curtain is thinner than the mesh there)
    std::vector<std::vector<bool>> near_cusp = near_cusp_mask(folds, cusps);
    std::vector<std::vector<Landing>> sample_land(folds.size());
    for (size_t ci = 0; ci < folds.size(); ++ci) {
        const FoldCurve& c = folds[ci];
        int n = static_cast<int>(c.points.size());
        sample_land[ci].resize(n);
        for (int i = 0; i < n; ++i) {
            if (c.seg_sign[i] != RegionSign::Plus ||
                c.seg_sign[(i - 1 + n) % n] != RegionSign::Plus)
                continue;
            if (near_cusp[ci][i]) {
                LandResult r = descend(mesh, c.points[i].pos, down, excl, t_skim);
                if (r.status == LandStatus::Landed)
                    sample_land[ci][i] = {r.hit.p, r.hit.face};
                continue;
            }
            sample_land[ci][i] = land(c.points[i].pos);
        }
    }

    // probe point just inside the plus region next to a fold position
    auto fold_point_at = [&](const FoldCurve& c, double pos) {
        int n = static_cast<int>(c.points.size());
        int i = static_cast<int>(std::floor(pos)) % n;
        double t = pos - std::floor(pos);
        const Vec3& a = c.points[i].pos;
        const Vec3& b = c.points[(i + 1) % n].pos;
        return std::pair<Vec3, int>{a + (b - a) * t, i};
    };

    std::vector<std::vector<CurveEvent>> ev = curve_events(folds, cusps, tangle);
    std::vector<BuildEdge> edges;

    auto push_interval = [&](int ci, const CurveEvent& from, const CurveEvent& to,
                             bool wrapped) {
        const FoldCurve& c = folds[ci];
        int n = static_cast<int>(c.points.size());
        BuildEdge e;
        e.curve = ci;
        e.pos_lo = from.pos;
        e.pos_hi = wrapped ? to.pos + n : to.pos;
        // stations
        if (from.is_cusp) {
            e.va = fvert[from.id];
            e.sa = 0;
            e.attach_a = f_interior[from.id] ? std::array<int, 3>{0, 2, 1}
                                             : std::array<int, 3>{0, 1, 2};   // fixed later
        } else {
            e.va = qvert[from.id];
            e.sa = from.upper ? 1 : 3;
            e.attach_a = q_attach(e.sa, tangle.segments[from.id].polarity);
        }
        if (to.is_cusp) {
            e.vb = fvert[to.id];
            e.sb = 0;
            e.attach_b = f_interior[to.id] ? std::array<int, 3>{0, 2, 1}
                                           : std::array<int, 3>{0, 1, 2};
        } else {
            e.vb = qvert[to.id];
            e.sb = to.upper ? 0 : 2;
            e.attach_b = q_attach(e.sb, tangle.segments[to.id].polarity);
        }
        // landing polyline with crossing / cusp extensions
        // both roles leave the crossing through the common landing point
        e.line.push_back(from.is_cusp ? f_land[from.id] : land_star[from.id]);
        for (int i = static_cast<int>(std::floor(e.pos_lo)) + 1;
             i <= static_cast<int>(std::ceil(e.pos_hi)) - 1; ++i) {
            int ii = ((i % n) + n) % n;
            if (i <= e.pos_lo || i >= e.pos_hi) continue;
            if (sample_land[ci][ii].face >= 0) e.line.push_back(sample_land[ci][ii]);
        }
        if (!to.is_cusp) {
            // the upper arc's landing jumps: it dies on the lower fold before
            // reappearing below; the barrier still runs up to the graze point
            if (to.upper) e.line.push_back({tangle.segments[to.id].lower, -1});
            else e.line.push_back(land_star[to.id]);
        } else {
            e.line.push_back(f_land[to.id]);
        }
        edges.push_back(std::move(e));
    };

    for (size_t ci = 0; ci < folds.size(); ++ci) {
        const FoldCurve& c = folds[ci];
        int m = static_cast<int>(ev[ci].size());
        if (m == 0) {
            if (c.seg_sign[0] != RegionSign::Plus) continue;
            // event-free landing circle: close it up with a joint
            SpineVertex v;
            v.kind = VertexKind::Joint;
            int jv = static_cast<int>(s.vertices.size());
            s.vertices.push_back(v);
            BuildEdge e;
            e.curve = static_cast<int>(ci);
            e.va = jv;
            e.sa = 0;
            e.vb = jv;
            e.sb = 1;
            e.pos_lo = 0;
            e.pos_hi = static_cast<double>(c.points.size());
            for (const Landing& l : sample_land[ci])
                if (l.face >= 0) e.line.push_back(l);
            if (!e.line.empty()) e.line.push_back(e.line.front());   // close the barrier
            edges.push_back(std::move(e));
            continue;
        }
        for (int j = 0; j < m; ++j) {
            const CurveEvent& from = ev[ci][j];
            const CurveEvent& to = ev[ci][(j + 1) % m];
            if (label_after(c, from) != 1) continue;
            push_interval(static_cast<int>(ci), from, to, j + 1 == m);
        }
    }

    // ------------------------------------------------------------------
    // barriers and plus-region flood fill. Polyline points without a landing
    // face sit on the fold itself (free fold ends, graze points); barriers
    // reaching them overshoot past the region boundary so the cut seals.
    for (BuildEdge& e : edges) {
        int good = 0;
        for (const Landing& l : e.line)
            if (l.face >= 0) good++;
        e.thin = good < 2;
    }
    // A curtain with no resolvable landing samples is thinner than the mesh:
    // it witnesses stratification detail below the triangulation scale
    // (swallowtail slivers of the jittered direction on near-degenerate
    // silhouettes). Such curtains are dropped together with their free ends;
    // only curtains reaching a crossing are kept regardless.
    {
        auto at_q = [&](int v) {
            return v >= 0 && s.vertices[v].kind == VertexKind::Q;
        };
        std::vector<BuildEdge> kept;
        for (BuildEdge& e : edges)
            if (!e.thin || at_q(e.va) || at_q(e.vb)) kept.push_back(std::move(e));
        edges.swap(kept);
        std::vector<int> remap(s.vertices.size(), -1);
        std::vector<SpineVertex> verts;
        auto use = [&](int v) {
            if (v >= 0 && remap[v] < 0) {
                remap[v] = static_cast<int>(verts.size());
                verts.push_back(s.vertices[v]);
            }
        };
        for (int v : qvert) use(v);
        for (const BuildEdge& e : edges) {
            use(e.va);
            use(e.vb);
        }
        for (BuildEdge& e : edges) {
            if (e.va >= 0) e.va = remap[e.va];
            if (e.vb >= 0) e.vb = remap[e.vb];
        }
        s.vertices.swap(verts);
    }
    std::set<std::pair<int, int>> blocked;
    for (const BuildEdge& e : edges)
        for (size_t i = 0; i + 1 < e.line.size(); ++i) {
            const Landing& a = e.line[i];
            const Landing& b = e.line[i + 1];
            if (a.face >= 0) {
                Vec3 target = b.p;
                if (b.face < 0 && norm(b.p - a.p) > 1e-12 * diag)
                    target = b.p + normalized(b.p - a.p) * (0.7 * probe_delta);
                walker.walk(a.face, a.p, target, &blocked);
            } else if (b.face >= 0) {
                Vec3 target = a.p;
                if (norm(a.p - b.p) > 1e-12 * diag)
                    target = a.p + normalized(a.p - b.p) * (0.7 * probe_delta);
                walker.walk(b.face, b.p, target, &blocked);
            }
        }
    std::vector<int> region(mesh.face_count(), -1);
    int nregions = 0;
    for (int f0 = 0; f0 < mesh.face_count(); ++f0) {
        if (region[f0] >= 0 || lab.face_sign[f0] != RegionSign::Plus) continue;
        int id = nregions++;
        std::vector<int> stack{f0};
        region[f0] = id;
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            const auto& tri = mesh.faces[f];
            for (int k = 0; k < 3; ++k) {
                int u = tri[k], v = tri[(k + 1) % 3];
                auto key = std::minmax(u, v);
                if (blocked.count({key.first, key.second})) continue;
                int g = walker.other_face(f, u, v);
                if (g < 0 || region[g] >= 0 || lab.face_sign[g] != RegionSign::Plus)
                    continue;
                region[g] = id;
                stack.push_back(g);
            }
        }
    }

    // ------------------------------------------------------------------
    // per-page region probes
    auto side_region = [&](const BuildEdge& e, int side) -> int {
        // side: +1 left of travel, -1 right
        std::map<int, int> votes;
        for (size_t i = 0; i + 1 < e.line.size(); ++i) {
            const Landing& a = e.line[i];
            const Landing& b = e.line[i + 1];
            int f = a.face >= 0 ? a.face : b.face;
            if (f < 0) continue;
            Vec3 d = b.p - a.p;
            if (norm(d) < 1e-12 * diag) continue;
            Vec3 n = mesh.face_normal(f);
            Vec3 w = cross(n, normalized(d));
            Vec3 mid = (a.p + b.p) * 0.5;
            Vec3 q = mid + w * (side * probe_delta);
            int g = walker.walk(f, mid, q);
            if (g >= 0 && region[g] >= 0) votes[region[g]]++;
        }
        int best = -1, best_n = 0;
        for (auto& [r, c] : votes)
            if (c > best_n) { best = r; best_n = c; }
        return best;
    };
    auto curtain_region = [&](const BuildEdge& e) -> int {
        if (e.curve < 0) return -1;
        const FoldCurve& c = folds[e.curve];
        std::map<int, int> votes;
        for (double frac : {0.5, 0.25, 0.75}) {
            double pos = e.pos_lo + (e.pos_hi - e.pos_lo) * frac;
            auto [p, seg] = fold_point_at(c, std::fmod(pos, c.points.size()));
            const FoldPoint& fp = c.points[seg];
            Vec3 toward_plus = mesh.vertices[fp.va] - p;
            if (norm(toward_plus) < 1e-15) continue;
            Vec3 q = p + normalized(toward_plus) * probe_delta;
            int f0 = c.seg_face[seg];
            int g = walker.walk(f0, p, q);
            if (g >= 0 && region[g] >= 0) votes[region[g]]++;
            else if (region[f0] >= 0) votes[region[f0]]++;
            else {
                // last resort: any plus face incident to the plus-side vertex
                for (int f = 0; f < mesh.face_count(); ++f) {
                    if (region[f] < 0) continue;
                    const auto& tri = mesh.faces[f];
                    if (tri[0] == fp.va || tri[1] == fp.va || tri[2] == fp.va) {
                        votes[region[f]]++;
                        break;
                    }
                }
            }
        }
        int best = -1, best_n = 0;
        for (auto& [r, cnt] : votes)
            if (cnt > best_n) { best = r; best_n = cnt; }
        return best;
    };

    // resolve the fold-type free ends: a curtain has a preferred side picked
    // by the inner surface normals along the fold arc it hangs from, and
    // that side's ground carries the N-marker; at a fold-type end the
    // curtain closes up with the preferred ground while the far ground's rim
    // runs free.  The side is a property of the whole curtain, so it is
    // computed once per edge and applied to both ends.
    for (BuildEdge& e : edges) {
        bool oa = e.va >= 0 && s.vertices[e.va].kind == VertexKind::FreeO;
        bool ob = e.vb >= 0 && s.vertices[e.vb].kind == VertexKind::FreeO;
        if (!oa && !ob) continue;
        const FoldCurve& c = folds[e.curve];
        int n = static_cast<int>(c.points.size());
        int midseg = static_cast<int>(std::floor((e.pos_lo + e.pos_hi) * 0.5));
        midseg = (midseg % n + n) % n;
        Vec3 u = mesh.face_normal(c.seg_face[midseg]) * -1.0;
        // majority vote along the landing line: does the inner normal point
        // left (+) or right (-) of travel?
        double acc = 0;
        for (size_t i = 0; i + 1 < e.line.size(); ++i) {
            const Landing& a = e.line[i];
            const Landing& b = e.line[i + 1];
            int f = a.face >= 0 ? a.face : b.face;
            if (f < 0) continue;
            Vec3 d = b.p - a.p;
            if (norm(d) < 1e-12 * diag) continue;
            acc += dot(cross(mesh.face_normal(f), normalized(d)), u);
        }
        int npage = acc >= 0 ? 1 : 2;
        int upage = 3 - npage;
        std::array<int, 3> at{};
        at[0] = npage;
        at[npage] = 0;
        at[upage] = upage;
        if (oa) e.attach_a = at;
        if (ob) e.attach_b = at;
        e.page_class[0] = 'T';
        e.page_class[npage] = 'N';
        e.page_class[upage] = 'U';
    }

    for (const BuildEdge& e : edges) {
        SpineEdge se;
        se.a = {e.va, e.sa, e.attach_a};
        se.b = {e.vb, e.sb, e.attach_b};
        se.page_class = e.page_class;
        s.edges.push_back(se);
    }

    // ------------------------------------------------------------------
    // cells: group traced circuits by the geometric piece they bound
    std::vector<TracedCircuit> circuits = s.edges.empty()
                                              ? std::vector<TracedCircuit>{}
                                              : trace_circuits(s);
    std::vector<std::array<int, 3>> page_region(edges.size(), {-1, -1, -1});
    for (size_t i = 0; i < edges.size(); ++i) {
        page_region[i][0] = curtain_region(edges[i]);
        page_region[i][1] = side_region(edges[i], +1);
        page_region[i][2] = side_region(edges[i], -1);
        // a curtain thinner than the mesh has no probing room beside its
        // landing curve; both grounds then hug the region at the crease
        for (int p = 1; p < 3; ++p)
            if (page_region[i][p] < 0) page_region[i][p] = page_region[i][0];
    }
    // cut-complex Euler characteristic and boundary circle count per region
    auto region_stats = [&](int id) -> RegionStats {
        RegionStats st;
        std::set<int> faces;
        for (int f = 0; f < mesh.face_count(); ++f)
            if (region[f] == id) faces.insert(f);
        st.faces = static_cast<int>(faces.size());
        auto in = [&](int f) { return f >= 0 && faces.count(f) > 0; };
        auto is_blocked = [&](int u, int v) {
            auto key = std::minmax(u, v);
            return blocked.count({key.first, key.second}) > 0;
        };
        // edges
        int E = 0;
        std::set<std::pair<int, int>> counted;
        for (int f : faces)
            for (int k = 0; k < 3; ++k) {
                int u = mesh.faces[f][k], v = mesh.faces[f][(k + 1) % 3];
                auto key = std::minmax(u, v);
                if (!counted.insert({key.first, key.second}).second) continue;
                int g = walker.other_face(f, u, v);
                if (in(g) && is_blocked(u, v)) E += 2;
                else E += 1;
            }
        // vertices: fan components around each mesh vertex, split at blocked
        // or missing neighbors
        std::map<int, std::vector<int>> vert_faces;
        for (int f : faces)
            for (int k = 0; k < 3; ++k) vert_faces[mesh.faces[f][k]].push_back(f);
        int V = 0;
        for (auto& [v, vf] : vert_faces) {
            std::map<int, int> comp;
            for (int f : vf) comp[f] = f;
            std::function<int(int)> find = [&](int x) {
                while (comp[x] != x) x = comp[x] = comp[comp[x]];
                return x;
            };
            for (int f : vf) {
                const auto& tri = mesh.faces[f];
                for (int k = 0; k < 3; ++k) {
                    int a = tri[k], b = tri[(k + 1) % 3];
                    if (a != v && b != v) continue;
                    if (is_blocked(a, b)) continue;
                    int g = walker.other_face(f, a, b);
                    if (!in(g)) continue;
                    comp[find(f)] = find(g);
                }
            }
            std::set<int> roots;
            for (int f : vf) roots.insert(find(f));
            V += static_cast<int>(roots.size());
        }
        st.chi = V - E + st.faces;
        // boundary circles: directed boundary half-edges stitched by rotating
        // around the shared vertex through the region fan
        std::map<std::pair<int, int>, std::pair<int, int>> bhe;   // (u,v) -> (face, local)
        for (int f : faces)
            for (int k = 0; k < 3; ++k) {
                int u = mesh.faces[f][k], v = mesh.faces[f][(k + 1) % 3];
                int g = walker.other_face(f, u, v);
                if (!in(g) || is_blocked(u, v)) bhe[{u, v}] = {f, k};
            }
        std::set<std::pair<int, int>> seen;
        for (auto& [he, fk] : bhe) {
            if (seen.count(he)) continue;
            std::pair<int, int> cur = he;
            std::vector<Vec3> pts;
            int guard = 0;
            while (!seen.count(cur) && guard++ < 100000) {
                seen.insert(cur);
                pts.push_back(mesh.vertices[cur.first]);
                auto [f, k] = bhe[cur];
                // rotate around cur.second looking for the next boundary edge
                int v = cur.second;
                int fc = f;
                int prev_u = cur.first;
                int guard2 = 0;
                while (guard2++ < 1000) {
                    // edge of fc leaving v
                    const auto& tri = mesh.faces[fc];
                    int idx = tri[0] == v ? 0 : (tri[1] == v ? 1 : 2);
                    int w = tri[(idx + 1) % 3];
                    if (bhe.count({v, w})) {
                        cur = {v, w};
                        break;
                    }
                    if (is_blocked(v, w)) {
                        // a blocked interior edge is a boundary wall: its
                        // doubled copy belongs to the far side fan; stop here
                        cur = {v, w};
                        break;
                    }
                    int g = walker.other_face(fc, v, w);
                    if (!in(g)) break;
                    fc = g;
                    (void)prev_u;
                }
                if (!bhe.count(cur)) break;   // fan ended without a boundary edge
            }
            st.circle_points.push_back(std::move(pts));
            st.boundary_circles += 1;
        }
        return st;
    };

    std::vector<RegionStats> stats(nregions);
    for (int id = 0; id < nregions; ++id) stats[id] = region_stats(id);

    // ------------------------------------------------------------------
    // pieces: at every free end of a landing curve the two attach-paired
    // sheets continue into one another around the tip, so the flood regions
    // glue into larger 2-cells there. Each tip gluing is along a single arc:
    // it adds the Euler characteristics minus one, and either merges two
    // boundary circles into one or splits one circle into two.
    std::vector<int> piece(nregions);
    for (int i = 0; i < nregions; ++i) piece[i] = i;
    std::function<int(int)> proot = [&](int x) {
        while (piece[x] != x) x = piece[x] = piece[piece[x]];
        return x;
    };
    struct TipGlue {
        int r1, r2;
        Vec3 tip;
    };
    std::vector<TipGlue> glues;
    // a fold-type end joins the curtain sheet (living with the region above
    // its fold arc) to the preferred-side ground around the tip
    for (size_t i = 0; i < edges.size(); ++i) {
        const BuildEdge& e = edges[i];
        for (int end = 0; end < 2; ++end) {
            int v = end == 0 ? e.va : e.vb;
            if (v < 0 || s.vertices[v].kind != VertexKind::FreeO) continue;
            const std::array<int, 3>& at = end == 0 ? e.attach_a : e.attach_b;
            int npage = at[0];
            if (npage == 0) continue;
            int r1 = page_region[i][0], r2 = page_region[i][npage];
            if (r1 < 0 || r2 < 0) continue;
            Vec3 tip = end == 0 ? e.line.front().p : e.line.back().p;
            glues.push_back({r1, r2, tip});
        }
    }
    // a landing-type end reconnects the two ground sheets around the tip.
    // Usually the face flood already walks around the tip and nothing needs
    // doing; but when the tip sits at sub-mesh distance from the fold the
    // barrier severs the passage, and the reconnection is restored here
    auto local_link = [&](int fa, int fb, const Vec3& c) -> bool {
        if (fa == fb) return true;
        double rad = 3.0 * probe_delta;
        std::set<int> seen{fa};
        std::vector<int> stack{fa};
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            if (f == fb) return true;
            const auto& tri = mesh.faces[f];
            for (int k = 0; k < 3; ++k) {
                int u = tri[k], v = tri[(k + 1) % 3];
                auto key = std::minmax(u, v);
                if (blocked.count({key.first, key.second})) continue;
                int g = walker.other_face(f, u, v);
                if (g < 0 || seen.count(g) || lab.face_sign[g] != RegionSign::Plus)
                    continue;
                Vec3 cen = (mesh.vertices[mesh.faces[g][0]] +
                            mesh.vertices[mesh.faces[g][1]] +
                            mesh.vertices[mesh.faces[g][2]]) *
                           (1.0 / 3.0);
                if (norm(cen - c) > rad) continue;
                seen.insert(g);
                stack.push_back(g);
            }
        }
        return false;
    };
    for (size_t i = 0; i < edges.size(); ++i) {
        const BuildEdge& e = edges[i];
        for (int end = 0; end < 2; ++end) {
            int v = end == 0 ? e.va : e.vb;
            if (v < 0 || s.vertices[v].kind != VertexKind::FreeP) continue;
            if (e.line.size() < 2) continue;
            // probe the two sides of the landing segment nearest the tip
            int fL = -1, fR = -1;
            int m = static_cast<int>(e.line.size());
            for (int trial = 0; trial + 1 < m && (fL < 0 || fR < 0); ++trial) {
                int ia = end == 0 ? trial : m - 2 - trial;
                const Landing& a = e.line[ia];
                const Landing& b = e.line[ia + 1];
                int f = a.face >= 0 ? a.face : b.face;
                if (f < 0) continue;
                Vec3 d = b.p - a.p;
                if (norm(d) < 1e-12 * diag) continue;
                Vec3 w = cross(mesh.face_normal(f), normalized(d));
                Vec3 mid = (a.p + b.p) * 0.5;
                int gl = walker.walk(f, mid, mid + w * probe_delta);
                int gr = walker.walk(f, mid, mid - w * probe_delta);
                if (fL < 0 && gl >= 0 && region[gl] >= 0) fL = gl;
                if (fR < 0 && gr >= 0 && region[gr] >= 0) fR = gr;
            }
            if (fL < 0 || fR < 0) continue;
            Vec3 tip = (end == 0 ? e.line.front() : e.line.back()).p;
            if (!local_link(fL, fR, tip))
                glues.push_back({region[fL], region[fR], tip});
        }
    }
    for (const TipGlue& g : glues) piece[proot(g.r1)] = proot(g.r2);

    // boundary circle bookkeeping across the gluings
    std::vector<int> circle_base(nregions + 1, 0);
    for (int r = 0; r < nregions; ++r)
        circle_base[r + 1] = circle_base[r] + stats[r].boundary_circles;
    int ncircles = circle_base[nregions];
    std::vector<int> cuf(ncircles);
    for (int i = 0; i < ncircles; ++i) cuf[i] = i;
    std::function<int(int)> croot = [&](int x) {
        while (cuf[x] != x) x = cuf[x] = cuf[cuf[x]];
        return x;
    };
    auto circle_near = [&](int r, const Vec3& p) -> int {
        const RegionStats& st = stats[r];
        int best = 0;
        double bd = 1e300;
        for (size_t c = 0; c < st.circle_points.size(); ++c)
            for (const Vec3& q : st.circle_points[c]) {
                double d = norm(q - p);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(c);
                }
            }
        return circle_base[r] + best;
    };
    std::map<int, int> splits;   // piece root -> circles gained by splitting
    for (const TipGlue& g : glues) {
        int c1 = croot(circle_near(g.r1, g.tip));
        int c2 = croot(circle_near(g.r2, g.tip));
        if (c1 == c2) splits[proot(g.r1)] += 1;
        else cuf[c1] = c2;
    }

    std::map<int, std::vector<int>> group_regions;
    for (int r = 0; r < nregions; ++r) group_regions[proot(r)].push_back(r);

    std::map<int, std::vector<int>> group_circuits;
    for (size_t ci = 0; ci < circuits.size(); ++ci) {
        std::map<int, int> votes;
        for (const CircuitStep& st : circuits[ci].steps) {
            int r = page_region[st.edge][st.page];
            if (r >= 0) votes[proot(r)]++;
        }
        int best = -1, best_n = 0;
        for (auto& [r, c] : votes)
            if (c > best_n) {
                best = r;
                best_n = c;
            }
        if (best < 0)
            throw Error("BadAttach", "circuit " + std::to_string(ci) +
                                         " probes no plus-region piece");
        group_circuits[best].push_back(static_cast<int>(ci));
    }

    if (std::getenv("SPINE_TRACE")) {
        std::fprintf(stderr, "[spine] %d regions, %zu blocked edges\n", nregions,
                     blocked.size());
        for (int id = 0; id < nregions; ++id) {
            Vec3 cen{0, 0, 0};
            int nf = 0;
            for (int f = 0; f < mesh.face_count(); ++f)
                if (region[f] == id) {
                    cen = cen + (mesh.vertices[mesh.faces[f][0]] +
                                 mesh.vertices[mesh.faces[f][1]] +
                                 mesh.vertices[mesh.faces[f][2]]) *
                                    (1.0 / 3.0);
                    nf++;
                }
            if (nf) cen = cen * (1.0 / nf);
            std::fprintf(stderr,
                         "[spine] region %d: faces=%d chi=%d b=%d piece=%d at %s\n",
                         id, stats[id].faces, stats[id].chi,
                         stats[id].boundary_circles, proot(id),
                         vec_str(cen).c_str());
        }
        for (size_t i = 0; i < edges.size(); ++i)
            std::fprintf(stderr,
                         "[spine] edge %zu: line=%zu thin=%d pages=(%d,%d,%d) "
                         "v(%d.%d->%d.%d)\n",
                         i, edges[i].line.size(), (int)edges[i].thin, page_region[i][0],
                         page_region[i][1], page_region[i][2], edges[i].va, edges[i].sa,
                         edges[i].vb, edges[i].sb);
        for (const TipGlue& g : glues)
            std::fprintf(stderr, "[spine] glue %d-%d at %s\n", g.r1, g.r2,
                         vec_str(g.tip).c_str());
        for (size_t ci = 0; ci < circuits.size(); ++ci) {
            std::fprintf(stderr, "[spine] circuit %zu:", ci);
            for (const CircuitStep& st : circuits[ci].steps)
                std::fprintf(stderr, " e%d.p%d%+d", st.edge, st.page, st.dir);
            std::fprintf(stderr, "\n");
        }
    }

    for (auto& [root, regs] : group_regions) {
        int chi = 0;
        for (int r : regs) chi += stats[r].chi;
        int ng = 0;
        for (const TipGlue& g : glues)
            if (proot(g.r1) == root) ng++;
        chi -= ng;
        std::set<int> circle_roots;
        for (int r : regs)
            for (int c = 0; c < stats[r].boundary_circles; ++c)
                circle_roots.insert(croot(circle_base[r] + c));
        int bc = static_cast<int>(circle_roots.size());
        auto sp = splits.find(root);
        if (sp != splits.end()) bc += sp->second;
        auto it = group_circuits.find(root);
        int k = it == group_circuits.end() ? 0 : static_cast<int>(it->second.size());
        int p = bc - k;
        if (p < 0)
            throw Error("BadAttach", "piece " + std::to_string(root) + " caps " +
                                         std::to_string(k) + " circuits but has only " +
                                         std::to_string(bc) + " boundary circles");
        int two_g = 2 - chi - bc;
        if (two_g < 0 || two_g % 2 != 0)
            throw Error("BadAttach", "piece " + std::to_string(root) + " has chi " +
                                         std::to_string(chi) + " with " +
                                         std::to_string(bc) + " boundary circles");
        SpineCell cell;
        cell.genus = two_g / 2;
        cell.punctures = p;
        cell.orient = +1;
        if (it != group_circuits.end()) cell.circuits = it->second;
        s.cells.push_back(cell);
    }

    require_valid(s);
    return s;
}

} // namespace gradspine
