#pragma once

#include "gradspine/mesh.hpp"

#include <vector>

namespace gradspine {

enum class RegionSign : char { Plus, Minus };

// Face/vertex labeling for a solid X bounded by the mesh and a unit gradient
// direction v. g(vertex) = <outward vertex normal, v>; the plus region
// (where v enters X) is g < 0. The direction actually used may be a seeded
// perturbation of the requested one; it is recorded here.
struct RegionLabeling {
    Vec3 dir;                       // unit direction after perturbation
    uint64_t seed = 0;
    int perturb_retries = 0;        // how many jitter rounds were needed
    std::vector<double> g;          // per mesh vertex
    std::vector<RegionSign> face_sign;   // per face, sign of g at the barycenter
};

RegionLabeling classify_regions(const TriMesh& mesh, const Vec3& dir, uint64_t seed = 0);

// A point where the interpolated g vanishes on a mesh edge.
struct FoldPoint {
    int va = -1, vb = -1;   // mesh edge endpoints, g[va] < 0 < g[vb]
    double t = 0;           // pos = vertex[va] + t * (vertex[vb] - vertex[va])
    Vec3 pos;
};

// One closed fold loop, oriented as the boundary of the plus region with its
// preferred orientation (plus region on the left seen from outside).
// seg_sign[i] labels the segment from points[i] to points[(i+1) % n]:
// Plus where the tangential part of v points into the plus region.
struct FoldCurve {
    std::vector<FoldPoint> points;
    std::vector<RegionSign> seg_sign;
    std::vector<int> seg_face;      // mesh face containing each segment
};

std::vector<FoldCurve> extract_folds(const TriMesh& mesh, const RegionLabeling& lab);

// A cusp sits at a fold point where the segment label flips.
// first:  +1 when v points into the adjoining plus segment (d3+), else -1.
// second: +1 for the oplus class, -1 for ominus.
// The A class is {+oplus, -ominus}; B is {-oplus, +ominus}.
struct Cusp {
    int curve = 0;
    int point = 0;          // index into FoldCurve::points
    Vec3 pos;
    int first = 0;
    int second = 0;
    bool is_a_class() const { return first * second > 0; }
};

std::vector<Cusp> extract_cusps(const TriMesh& mesh, const RegionLabeling& lab,
                                const std::vector<FoldCurve>& folds);

// Census of maximal plus arcs by endpoint first-polarities, plus cusp-free
// loop counts per sign.
struct ArcCensus {
    int a = 0;      // both ends d3+
    int b = 0;      // both ends d3-
    int c = 0;      // mixed
    int plus_loops = 0;
    int minus_loops = 0;
};

ArcCensus classify_arcs(const std::vector<FoldCurve>& folds, const std::vector<Cusp>& cusps);

// Integer Euler characteristics of all strata plus the identity checks.
struct IdentityReport {
    int chi_boundary = 0;   // chi of the whole mesh
    int chi_X = 0;          // chi(boundary) / 2
    int chi_d1_plus = 0;
    int chi_d1_minus = 0;
    int chi_d2_plus = 0;    // number of plus arcs (loops contribute 0)
    int d3_plus = 0, d3_minus = 0;
    int cusp_pp = 0, cusp_pm = 0, cusp_mp = 0, cusp_mm = 0;  // (first, second) flavors
    int arcs_a = 0, arcs_b = 0, arcs_c = 0;
    int plus_loops = 0, minus_loops = 0;
    int deg_h = 0;          // fold-walk rotation degree (projected-tangent winding)
    int gauss_degree = 0;   // chi_d1_plus - chi_d2_plus + d3_plus

    bool alt_sum_zero = false;      // chi_X - chi_d1p + chi_d2p - d3p == 0
    bool gauss_matches = false;     // gauss_degree == chi_boundary / 2
    bool cusp_count_parity = false; // d3p - d3m == 2 * deg_h
    bool chi_cusp_relation = false; // chi_d1p == chi_X + (d3m - d3p) / 2
    bool magnitude_match = false;   // |chi_d1p - chi_d1m| == |d3p - d3m|
    int observed_sign = 0;          // +1: chi_d1p-chi_d1m == d3p-d3m; -1: opposite; 0: both zero
    bool class_balance = false;     // #A-class cusps == #B-class cusps

    // Reported, never asserted: the alternative degree formula and its gap.
    int alt_degree = 0;             // chi_X - 2 * chi_d1_plus
    int alt_degree_gap = 0;         // alt_degree - deg_h

    bool asserted_pass() const {
        return alt_sum_zero && gauss_matches && cusp_count_parity && chi_cusp_relation &&
               magnitude_match && class_balance;
    }
};

IdentityReport strata_euler(const TriMesh& mesh, const RegionLabeling& lab,
                            const std::vector<FoldCurve>& folds, const std::vector<Cusp>& cusps);
IdentityReport verify_identities(IdentityReport r);

// Convenience bundle running the full pipeline on one mesh/direction pair.
struct Strata {
    RegionLabeling labeling;
    std::vector<FoldCurve> folds;
    std::vector<Cusp> cusps;
    ArcCensus arcs;
    IdentityReport report;
};

Strata compute_strata(const TriMesh& mesh, const Vec3& dir, uint64_t seed = 0);

} // namespace gradspine
