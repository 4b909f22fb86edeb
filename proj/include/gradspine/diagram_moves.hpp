#pragma once

#include "gradspine/fold_diagram.hpp"

namespace gradspine {

// Second-Reidemeister-like move: pushes one plus arc over another, adding two
// crossings of opposite polarity between the two sites. Both sites must lie
// on plus arcs (Error("SiteObstructed") otherwise). The first new crossing is
// oplus with the strand of site a on top.
FoldDiagram alpha_move(const FoldDiagram& d, const ArcSite& a, const ArcSite& b);

// Removes a bigon: the two crossings must have opposite polarity, involve the
// same pair of strand passages and be adjacent (no event between their ends
// on either strand); Error("SiteObstructed") otherwise.
FoldDiagram alpha_inverse(const FoldDiagram& d, int crossing_a, int crossing_b);

// Third-Reidemeister-like move on an empty triangle formed by three pairwise
// crossings whose upper/lower bits give a consistent strand ordering. The
// triangle is flipped and, following the move's complexity jump, one extra
// oplus crossing between the top and bottom strands appears next to it.
// Error("IncompatibleOrder") when the three crossings do not form such a
// triangle.
FoldDiagram beta_move(const FoldDiagram& d, int c0, int c1, int c2);

// Removes two consecutive cusps whose verdict is not Forbidden and whose
// middle arc carries no crossing; Error("ForbiddenPair") otherwise,
// Error("NotConsecutive") when they are not adjacent.
FoldDiagram cancel_cusps(const FoldDiagram& d, int cusp_a, int cusp_b);

// Inserts a consecutive cusp pair (fa then fb in curve order) at a plus-arc
// site, making the arc between them minus. The pair must not be Forbidden
// and the insertion must keep every plus arc's end cusps differing in exactly
// one polarity; Error("ForbiddenPair") otherwise, Error("SiteObstructed") for
// a minus-arc site.
FoldDiagram insert_cusp_pair(const FoldDiagram& d, const ArcSite& site,
                             const DiagCusp& fa, const DiagCusp& fb);

struct EliminationResult {
    FoldDiagram diagram;
    std::vector<std::string> log;
};

// Drives the cusp count to zero by cancelling admissible consecutive pairs,
// inserting dove-tail pairs to unlock blocked configurations when needed.
// Crossing count is preserved. Error("NonTerminating") if the step cap
// (10 * initial cusp count, at least 16) is exceeded.
EliminationResult eliminate_cusps(const FoldDiagram& d);

// Randomized diagrams for property tests: starts from crossingless cusp-free
// loops and applies random reverse/forward elementary steps, so the result is
// always valid and cusp-eliminable.
FoldDiagram random_diagram(Rng& rng, int n_curves, int n_steps);

} // namespace gradspine
