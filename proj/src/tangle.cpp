#include "gradspine/tangle.hpp"

#include "gradspine/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace gradspine {

namespace {

struct PlusSeg {
    int curve, point;      // segment from points[point] to points[point+1]
    Vec2 a, b;             // projected endpoints
    Vec3 pa, pb;           // 3D endpoints
};

struct Candidate {
    int lo_idx, hi_idx;    // indices into the PlusSeg list
    Vec2 at;               // projected intersection point
    Vec3 lower, upper;
    Vec2 t_lo, t_hi;       // projected fold tangents at lower / upper
};

double seg_point_dist(const Vec2& a, const Vec2& b, const Vec2& p) {
    Vec2 d = b - a;
    double len2 = dot2(d, d);
    double t = len2 > 0 ? std::clamp(dot2(p - a, d) / len2, 0.0, 1.0) : 0.0;
    Vec2 q = a + d * t;
    return std::sqrt(dot2(q - p, q - p));
}

Tangle detect_impl(const TriMesh& mesh, const RegionLabeling& lab,
                   const std::vector<FoldCurve>& folds, bool parallel) {
    Frame2 fr = make_frame(lab.dir);
    std::vector<PlusSeg> segs;
    for (int ci = 0; ci < static_cast<int>(folds.size()); ++ci) {
        const auto& c = folds[ci];
        int n = static_cast<int>(c.points.size());
        for (int i = 0; i < n; ++i) {
            if (c.seg_sign[i] != RegionSign::Plus) continue;
            PlusSeg s;
            s.curve = ci;
            s.point = i;
            s.pa = c.points[i].pos;
            s.pb = c.points[(i + 1) % n].pos;
            s.a = fr.project(s.pa);
            s.b = fr.project(s.pb);
            segs.push_back(s);
        }
    }

    const double diag = mesh.bbox_diagonal();
    const double excl = 1e-7 * diag;
    const int ns = static_cast<int>(segs.size());

    auto adjacent = [&](const PlusSeg& x, const PlusSeg& y) {
        if (x.curve != y.curve) return false;
        int n = static_cast<int>(folds[x.curve].points.size());
        int d = std::abs(x.point - y.point);
        return d <= 1 || d == n - 1;
    };

    std::vector<Candidate> cands;
#ifdef GRADSPINE_OPENMP
#pragma omp parallel if (parallel)
    {
        std::vector<Candidate> local;
#pragma omp for schedule(dynamic, 8)
        for (int i = 0; i < ns; ++i) {
#else
    {
        std::vector<Candidate>& local = cands;
        for (int i = 0; i < ns; ++i) {
#endif
            for (int j = i + 1; j < ns; ++j) {
                const PlusSeg& s1 = segs[i];
                const PlusSeg& s2 = segs[j];
                if (adjacent(s1, s2)) continue;
                Vec2 d1 = s1.b - s1.a, d2 = s2.b - s2.a;
                double den = det2(d1, d2);
                if (den == 0) continue;
                Vec2 w = s2.a - s1.a;
                double t1 = det2(w, d2) / den;
                double t2 = det2(w, d1) / den;
                // half-open ranges so a crossing exactly at a shared sample
                // point is reported once
                if (t1 < 0 || t1 >= 1 || t2 < 0 || t2 >= 1) continue;
                Vec3 p1 = s1.pa + (s1.pb - s1.pa) * t1;
                Vec3 p2 = s2.pa + (s2.pb - s2.pa) * t2;
                double h1 = fr.height(p1), h2 = fr.height(p2);
                if (std::fabs(h1 - h2) <= 2 * excl) continue;
                Candidate c;
                c.at = s1.a + d1 * t1;
                // larger height along the direction of motion = reached later
                bool first_lower = h1 < h2;
                c.lo_idx = first_lower ? i : j;
                c.hi_idx = first_lower ? j : i;
                c.lower = first_lower ? p1 : p2;
                c.upper = first_lower ? p2 : p1;
                c.t_lo = first_lower ? Vec2{d1} : Vec2{d2};
                c.t_hi = first_lower ? Vec2{d2} : Vec2{d1};
                local.push_back(c);
            }
        }
#ifdef GRADSPINE_OPENMP
#pragma omp critical
        cands.insert(cands.end(), local.begin(), local.end());
    }
#else
    }
#endif
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        return std::tie(segs[a.lo_idx].curve, segs[a.lo_idx].point, segs[a.hi_idx].curve,
                        segs[a.hi_idx].point) <
               std::tie(segs[b.lo_idx].curve, segs[b.lo_idx].point, segs[b.hi_idx].curve,
                        segs[b.hi_idx].point);
    });

    // a third fold segment passing through a crossing's projection point is a
    // non-generic triple tangency
    for (const auto& c : cands)
        for (int k = 0; k < ns; ++k) {
            if (k == c.lo_idx || k == c.hi_idx) continue;
            if (adjacent(segs[k], segs[c.lo_idx]) || adjacent(segs[k], segs[c.hi_idx]))
                continue;
            if (seg_point_dist(segs[k].a, segs[k].b, c.at) < excl)
                throw Error("TripleTangency",
                            "three fold points project to the same point");
        }

    // interior-of-X test for the open vertical segment between the tangencies
    const int kSamples = 16;
    std::vector<Vec3> probes;
    probes.reserve(cands.size() * kSamples);
    for (const auto& c : cands) {
        Vec3 d = c.upper - c.lower;
        double len = norm(d);
        double lo = excl / len, hi = 1.0 - excl / len;
        for (int k = 0; k < kSamples; ++k) {
            double t = lo + (hi - lo) * (k + 0.5) / kSamples;
            probes.push_back(c.lower + d * t);
        }
    }
    std::vector<char> inside = parallel ? points_inside(mesh, probes, lab.seed)
                                        : points_inside_serial(mesh, probes, lab.seed);

    Tangle out;
    for (size_t ci = 0; ci < cands.size(); ++ci) {
        bool all_in = true;
        for (int k = 0; k < kSamples; ++k)
            if (!inside[ci * kSamples + k]) { all_in = false; break; }
        if (!all_in) continue;
        const Candidate& c = cands[ci];
        double nlo = std::sqrt(dot2(c.t_lo, c.t_lo));
        double nhi = std::sqrt(dot2(c.t_hi, c.t_hi));
        if (nlo < 1e-12 * diag || nhi < 1e-12 * diag)
            throw Error("TangencyDegenerate", "projected fold tangent vanishes");
        TangleSegment t;
        t.curve_lo = segs[c.lo_idx].curve;
        t.point_lo = segs[c.lo_idx].point;
        t.curve_hi = segs[c.hi_idx].curve;
        t.point_hi = segs[c.hi_idx].point;
        t.lower = c.lower;
        t.upper = c.upper;
        t.polarity = det2(c.t_lo, c.t_hi) < 0 ? 1 : -1;
        out.segments.push_back(t);
    }
    return out;
}

} // namespace

Tangle detect_double_tangents(const TriMesh& mesh, const RegionLabeling& lab,
                              const std::vector<FoldCurve>& folds) {
    return detect_impl(mesh, lab, folds, true);
}

Tangle detect_double_tangents_serial(const TriMesh& mesh, const RegionLabeling& lab,
                                     const std::vector<FoldCurve>& folds) {
    return detect_impl(mesh, lab, folds, false);
}

} // namespace gradspine
