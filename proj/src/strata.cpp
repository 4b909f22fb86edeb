#include "gradspine/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace gradspine {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGenericEps = 1e-9;

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
    std::vector<Vec3> n(mesh.vertex_count(), Vec3{});
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        // area-weighted: the raw cross product carries the area factor
        Vec3 an = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                        mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        for (int k = 0; k < 3; ++k) n[t[k]] += an;
    }
    for (auto& v : n) v = normalized(v);
    return n;
}

// In-plane gradient of the linearly interpolated vertex field on a face.
Vec3 face_gradient(const TriMesh& mesh, int f, const std::vector<double>& val) {
    const auto& t = mesh.faces[f];
    Vec3 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    Vec3 n = cross(p1 - p0, p2 - p0);
    double a2 = dot(n, n);   // (2*area)^2
    Vec3 nu = n / std::sqrt(a2);
    // grad = sum val_i * (n x opposite_edge) / (2A)
    Vec3 g = (cross(nu, p2 - p1) * val[t[0]] + cross(nu, p0 - p2) * val[t[1]] +
              cross(nu, p1 - p0) * val[t[2]]) /
             std::sqrt(a2);
    return g;
}

} // namespace

RegionLabeling classify_regions(const TriMesh& mesh, const Vec3& dir_in, uint64_t seed) {
    try {
        mesh.validate();
    } catch (const Error& e) {
        throw Error("NonManifoldMesh", e.what());
    }
    Vec3 dir = normalized(dir_in);
    std::vector<Vec3> normals = vertex_normals(mesh);
    Rng rng(seed ^ 0xa5a5a5a55a5a5a5aull);
    RegionLabeling lab;
    lab.seed = seed;
    for (int attempt = 0;; ++attempt) {
        lab.g.assign(mesh.vertex_count(), 0.0);
        double worst = 1e300;
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            lab.g[v] = dot(normals[v], dir);
            worst = std::min(worst, std::fabs(lab.g[v]));
        }
        if (worst > kGenericEps) break;
        if (attempt >= 16)
            throw Error("PerturbationExhausted", "no generic direction after 16 jitters");
        dir = jitter_direction(dir, rng, 1e-6);
        lab.perturb_retries = attempt + 1;
    }
    lab.dir = dir;
    lab.face_sign.resize(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        double s = lab.g[t[0]] + lab.g[t[1]] + lab.g[t[2]];
        lab.face_sign[f] = s < 0 ? RegionSign::Plus : RegionSign::Minus;
    }
    return lab;
}

namespace {

struct CrossedEdge {
    int va, vb;              // va has g < 0
    double t;
    Vec3 pos;
    int faces[2] = {-1, -1}; // the two incident mixed faces
};

} // namespace

std::vector<FoldCurve> extract_folds(const TriMesh& mesh, const RegionLabeling& lab) {
    // collect crossed edges
    std::map<std::pair<int, int>, int> edge_id;
    std::vector<CrossedEdge> crossed;
    auto is_neg = [&](int v) { return lab.g[v] < 0; };
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& tri = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (is_neg(a) == is_neg(b)) continue;
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = edge_id.find(key);
            int id;
            if (it == edge_id.end()) {
                CrossedEdge ce;
                ce.va = is_neg(a) ? a : b;
                ce.vb = is_neg(a) ? b : a;
                ce.t = lab.g[ce.va] / (lab.g[ce.va] - lab.g[ce.vb]);
                ce.pos = mesh.vertices[ce.va] +
                         (mesh.vertices[ce.vb] - mesh.vertices[ce.va]) * ce.t;
                id = static_cast<int>(crossed.size());
                crossed.push_back(ce);
                edge_id[key] = id;
            } else {
                id = it->second;
            }
            if (crossed[id].faces[0] == -1) crossed[id].faces[0] = f;
            else if (crossed[id].faces[1] == -1 && crossed[id].faces[0] != f)
                crossed[id].faces[1] = f;
        }
    }
    for (const auto& ce : crossed)
        if (ce.faces[0] == -1 || ce.faces[1] == -1)
            throw Error("OpenFoldChain", "crossed edge with fewer than two mixed faces");

    // per mixed face: its two crossed edges and the oriented fold direction
    std::map<int, std::array<int, 2>> face_crossings;
    for (int i = 0; i < static_cast<int>(crossed.size()); ++i)
        for (int s = 0; s < 2; ++s) {
            int f = crossed[i].faces[s];
            auto it = face_crossings.find(f);
            if (it == face_crossings.end()) face_crossings[f] = {i, -1};
            else if (it->second[1] == -1 && it->second[0] != i) it->second[1] = i;
        }
    for (const auto& [f, pair] : face_crossings)
        if (pair[1] == -1) throw Error("OpenFoldChain", "mixed face with one crossing");

    std::vector<FoldCurve> curves;
    std::vector<char> done(crossed.size(), 0);
    for (int start = 0; start < static_cast<int>(crossed.size()); ++start) {
        if (done[start]) continue;
        FoldCurve curve;
        int cur = start;
        int prev_face = -1;
        while (true) {
            done[cur] = 1;
            FoldPoint fp;
            fp.va = crossed[cur].va;
            fp.vb = crossed[cur].vb;
            fp.t = crossed[cur].t;
            fp.pos = crossed[cur].pos;
            curve.points.push_back(fp);
            // choose the continuation face: the incident face we have not
            // just come from whose oriented fold direction leaves `cur`
            int face = -1;
            for (int s = 0; s < 2; ++s) {
                int f = crossed[cur].faces[s];
                if (f == prev_face) continue;
                const auto& pr = face_crossings[f];
                int other = pr[0] == cur ? pr[1] : pr[0];
                Vec3 grad = face_gradient(mesh, f, lab.g);
                Vec3 dirseg = cross(mesh.face_normal(f), grad);
                if (dot(crossed[other].pos - crossed[cur].pos, dirseg) > 0) {
                    face = f;
                    break;
                }
            }
            if (face == -1) {
                // both candidate faces point back; only possible when the
                // walk started mid-stream — restart handled by orientation,
                // so this indicates a degenerate gradient
                throw Error("OpenFoldChain", "could not orient fold through a face");
            }
            const auto& pr = face_crossings[face];
            int next = pr[0] == cur ? pr[1] : pr[0];
            // label by the sine of the frame angle of the discrete segment;
            // this equals the sign of -dot(dir, grad) in exact arithmetic but
            // stays consistent with the cusp bookkeeping on jagged meshes
            Vec3 t = normalized(crossed[next].pos - crossed[cur].pos);
            double s = dot(lab.dir, cross(mesh.face_normal(face), t));
            curve.seg_sign.push_back(s > 0 ? RegionSign::Plus : RegionSign::Minus);
            curve.seg_face.push_back(face);
            prev_face = face;
            cur = next;
            if (cur == start) break;
            if (done[cur])
                throw Error("OpenFoldChain", "fold walk re-entered a visited crossing");
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

namespace {

// Angle of the constant direction in the moving frame (tangent, normal x
// tangent) of an oriented fold segment. The sign of its sine is the segment
// label, so a label flip is a crossing of angle 0 or pi.
double segment_angle(const TriMesh& mesh, const RegionLabeling& lab,
                     const FoldCurve& c, int seg) {
    int n = static_cast<int>(c.points.size());
    Vec3 t = normalized(c.points[(seg + 1) % n].pos - c.points[seg].pos);
    Vec3 nrm = mesh.face_normal(c.seg_face[seg]);
    return std::atan2(dot(lab.dir, cross(nrm, t)), dot(lab.dir, t));
}

} // namespace

std::vector<Cusp> extract_cusps(const TriMesh& mesh, const RegionLabeling& lab,
                                const std::vector<FoldCurve>& folds) {
    constexpr double kPiLocal = 3.14159265358979323846;
    std::vector<Cusp> cusps;
    for (int ci = 0; ci < static_cast<int>(folds.size()); ++ci) {
        const auto& c = folds[ci];
        int n = static_cast<int>(c.points.size());
        for (int i = 0; i < n; ++i) {
            int prev = (i + n - 1) % n;
            if (c.seg_sign[prev] == c.seg_sign[i]) continue;
            // the frame angle crosses a multiple of pi between the segments:
            // even multiple = crossing with the direction (second +1), odd =
            // against it (second -1); ascending crossings enter the plus set
            // from above (first +1), descending ones from below (first -1)
            double tp = segment_angle(mesh, lab, c, prev);
            double tn = segment_angle(mesh, lab, c, i);
            double d = tn - tp;
            while (d > kPiLocal) d -= 2 * kPiLocal;
            while (d < -kPiLocal) d += 2 * kPiLocal;
            if (std::fabs(d) > kPiLocal - 1e-6)
                throw Error("TangencyDegenerate",
                            "ambiguous frame-angle crossing at a label flip");
            long long k = d > 0 ? static_cast<long long>(std::ceil(tp / kPiLocal))
                                : static_cast<long long>(std::floor(tp / kPiLocal));
            Cusp cusp;
            cusp.curve = ci;
            cusp.point = i;
            cusp.pos = c.points[i].pos;
            cusp.first = d > 0 ? 1 : -1;
            cusp.second = (k % 2 == 0) ? 1 : -1;
            cusps.push_back(cusp);
        }
    }
    return cusps;
}

ArcCensus classify_arcs(const std::vector<FoldCurve>& folds, const std::vector<Cusp>& cusps) {
    ArcCensus out;
    // cusp indices per curve, ordered along the curve
    std::vector<std::vector<const Cusp*>> per_curve(folds.size());
    for (const auto& c : cusps) per_curve[c.curve].push_back(&c);
    for (auto& v : per_curve)
        std::sort(v.begin(), v.end(),
                  [](const Cusp* a, const Cusp* b) { return a->point < b->point; });
    for (size_t ci = 0; ci < folds.size(); ++ci) {
        const auto& curve = folds[ci];
        const auto& cs = per_curve[ci];
        if (cs.empty()) {
            if (curve.seg_sign[0] == RegionSign::Plus) out.plus_loops++;
            else out.minus_loops++;
            continue;
        }
        int m = static_cast<int>(cs.size());
        for (int k = 0; k < m; ++k) {
            const Cusp* a = cs[k];
            const Cusp* b = cs[(k + 1) % m];
            // the arc from cusp a to cusp b follows segment label at a->point
            if (curve.seg_sign[a->point] != RegionSign::Plus) continue;
            int fa = a->first, fb = b->first;
            if (fa > 0 && fb > 0) out.a++;
            else if (fa < 0 && fb < 0) out.b++;
            else out.c++;
        }
    }
    return out;
}

namespace {

// Winding of the constant field around each fold loop, measured in the
// moving frame (tangent, normal x tangent) of the loop on the surface.
int fold_walk_degree(const TriMesh& mesh, const RegionLabeling& lab,
                     const std::vector<FoldCurve>& folds) {
    int total = 0;
    for (const auto& c : folds) {
        int n = static_cast<int>(c.points.size());
        double acc = 0, prev_angle = 0;
        bool have_prev = false;
        double first_angle = 0;
        for (int i = 0; i < n; ++i) {
            Vec3 t = c.points[(i + 1) % n].pos - c.points[i].pos;
            double tn = norm(t);
            if (tn < 1e-300) continue;
            t = t / tn;
            Vec3 nrm = mesh.face_normal(c.seg_face[i]);
            double x = dot(lab.dir, t);
            double y = dot(lab.dir, cross(nrm, t));
            double ang = std::atan2(y, x);
            if (have_prev) {
                double d = ang - prev_angle;
                while (d > kPi) d -= 2 * kPi;
                while (d < -kPi) d += 2 * kPi;
                acc += d;
            } else {
                first_angle = ang;
                have_prev = true;
            }
            prev_angle = ang;
        }
        double d = first_angle - prev_angle;
        while (d > kPi) d -= 2 * kPi;
        while (d < -kPi) d += 2 * kPi;
        acc += d;
        total += static_cast<int>(std::lround(acc / (2 * kPi)));
    }
    return total;
}

} // namespace

IdentityReport strata_euler(const TriMesh& mesh, const RegionLabeling& lab,
                            const std::vector<FoldCurve>& folds,
                            const std::vector<Cusp>& cusps) {
    IdentityReport r;
    r.chi_boundary = mesh.euler_char();
    r.chi_X = r.chi_boundary / 2;

    // split-complex chi on each side: vertices of that sign plus fold points;
    // uncrossed edges of that sign plus half-edges plus fold segments; pure
    // faces plus the piece of every mixed face
    auto is_neg = [&](int v) { return lab.g[v] < 0; };
    int neg_v = 0;
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (is_neg(v)) neg_v++;
    int pos_v = mesh.vertex_count() - neg_v;

    std::map<std::pair<int, int>, char> edges;   // 0 both neg, 1 both pos, 2 crossed
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            edges[key] = is_neg(a) == is_neg(b) ? (is_neg(a) ? 0 : 1) : 2;
        }
    int neg_e = 0, pos_e = 0, crossed_e = 0;
    for (const auto& [k, c] : edges)
        if (c == 0) neg_e++;
        else if (c == 1) pos_e++;
        else crossed_e++;

    int neg_f = 0, pos_f = 0, mixed_f = 0;
    for (const auto& f : mesh.faces) {
        int negs = is_neg(f[0]) + is_neg(f[1]) + is_neg(f[2]);
        if (negs == 3) neg_f++;
        else if (negs == 0) pos_f++;
        else mixed_f++;
    }

    int fold_points = crossed_e;
    int fold_segments = mixed_f;
    r.chi_d1_plus = (neg_v + fold_points) - (neg_e + crossed_e + fold_segments) +
                    (neg_f + mixed_f);
    r.chi_d1_minus = (pos_v + fold_points) - (pos_e + crossed_e + fold_segments) +
                     (pos_f + mixed_f);

    ArcCensus arcs = classify_arcs(folds, cusps);
    r.arcs_a = arcs.a;
    r.arcs_b = arcs.b;
    r.arcs_c = arcs.c;
    r.plus_loops = arcs.plus_loops;
    r.minus_loops = arcs.minus_loops;
    r.chi_d2_plus = arcs.a + arcs.b + arcs.c;

    for (const auto& c : cusps) {
        if (c.first > 0) {
            r.d3_plus++;
            (c.second > 0 ? r.cusp_pp : r.cusp_pm)++;
        } else {
            r.d3_minus++;
            (c.second > 0 ? r.cusp_mp : r.cusp_mm)++;
        }
    }

    r.deg_h = fold_walk_degree(mesh, lab, folds);
    r.gauss_degree = r.chi_d1_plus - r.chi_d2_plus + r.d3_plus;
    return r;
}

IdentityReport verify_identities(IdentityReport r) {
    r.alt_sum_zero = (r.chi_X - r.chi_d1_plus + r.chi_d2_plus - r.d3_plus) == 0;
    r.gauss_matches = r.gauss_degree == r.chi_boundary / 2;
    r.cusp_count_parity = (r.d3_plus - r.d3_minus) == 2 * r.deg_h;
    r.chi_cusp_relation =
        (r.d3_minus - r.d3_plus) % 2 == 0 &&
        r.chi_d1_plus == r.chi_X + (r.d3_minus - r.d3_plus) / 2;
    int lhs = r.chi_d1_plus - r.chi_d1_minus;
    int rhs = r.d3_plus - r.d3_minus;
    r.magnitude_match = std::abs(lhs) == std::abs(rhs);
    if (lhs == 0 && rhs == 0) r.observed_sign = 0;
    else if (lhs == rhs) r.observed_sign = 1;
    else if (lhs == -rhs) r.observed_sign = -1;
    else r.observed_sign = 0;
    r.class_balance = (r.cusp_pp + r.cusp_mm) == (r.cusp_pm + r.cusp_mp);
    r.alt_degree = r.chi_X - 2 * r.chi_d1_plus;
    r.alt_degree_gap = r.alt_degree - r.deg_h;
    return r;
}

Strata compute_strata(const TriMesh& mesh, const Vec3& dir, uint64_t seed) {
    // degenerate tangencies found downstream are also resolved by jitter
    Rng rng(seed ^ 0xc3c3c3c3c3c3c3c3ull);
    Vec3 d = normalized(dir);
    for (int attempt = 0;; ++attempt) {
        try {
            Strata s;
            s.labeling = classify_regions(mesh, d, seed);
            s.folds = extract_folds(mesh, s.labeling);
            s.cusps = extract_cusps(mesh, s.labeling, s.folds);
            s.arcs = classify_arcs(s.folds, s.cusps);
            s.report =
                verify_identities(strata_euler(mesh, s.labeling, s.folds, s.cusps));
            s.labeling.perturb_retries += attempt;
            return s;
        } catch (const Error& e) {
            if (std::string(e.code()) != "TangencyDegenerate" || attempt >= 16) throw;
            d = jitter_direction(d, rng, 1e-6);
        }
    }
}

} // namespace gradspine
