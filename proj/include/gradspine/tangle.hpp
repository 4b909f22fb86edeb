#pragma once

#include "gradspine/strata.hpp"

namespace gradspine {

// One double-tangent segment: the straight line along v through two fold
// points, both on plus segments, whose open part is strictly inside X.
// (upper) is the point with the larger height along v.
struct TangleSegment {
    int curve_lo = 0, point_lo = 0;   // fold sample indices of the lower tangency
    int curve_hi = 0, point_hi = 0;   // and the upper one
    Vec3 lower, upper;
    int polarity = 0;                 // +1 oplus, -1 ominus
};

struct Tangle {
    std::vector<TangleSegment> segments;
    int gc() const { return static_cast<int>(segments.size()); }
    int gc_polarized() const {
        int s = 0;
        for (const auto& t : segments) s += t.polarity;
        return s;
    }
};

// Crossing polarity convention: project both fold tangents (in fold
// orientation) to the plane perpendicular to v with frame (e1, e2, v)
// right-handed; polarity is oplus when det2(proj t_lower, proj t_upper) < 0,
// i.e. when the (lower, upper) frame agrees with the preferred orientation of
// the plus region (whose outward normal pairs negatively with v).
//
// Throws Error("TripleTangency") when three fold points share a projection
// point within tolerance, and Error("TangencyDegenerate") when a projected
// tangent vanishes.
Tangle detect_double_tangents(const TriMesh& mesh, const RegionLabeling& lab,
                              const std::vector<FoldCurve>& folds);

// Serial reference implementation; must match detect_double_tangents exactly.
Tangle detect_double_tangents_serial(const TriMesh& mesh, const RegionLabeling& lab,
                                     const std::vector<FoldCurve>& folds);

} // namespace gradspine
